import numpy as np
import pytest

from swgraph import Fields, build_interval_mesh, build_quad_mesh
from swgraph.driver import build_mesh, simulate
from swgraph.scenarios import (error_norm, get_scenario, scenario_names,
                               scenario_paraboloid, scenario_vortex)

G = 9.81


def test_registry():
    names = scenario_names()
    for expected in ("three_bumps", "inclined_friction", "vortex", "paraboloid",
                     "rain_incline_3", "rain_incline_4", "vortex_still"):
        assert expected in names
    with pytest.raises(ValueError):
        get_scenario("nope")


def test_all_initial_states_admissible():
    for name in scenario_names():
        sc = get_scenario(name)
        g = build_mesh(sc, cells=8 if sc.dim == 2 else 32)
        f = sc.initial_fields(g.coords)
        assert f.h.min() >= 0.0
        dry = f.h == 0.0
        assert np.all(f.q[dry] == 0.0)


def test_exactness_at_t0():
    for name in scenario_names():
        sc = get_scenario(name)
        if sc.exact is None:
            continue
        g = build_mesh(sc, cells=8 if sc.dim == 2 else 32)
        init = sc.initial_fields(g.coords)
        exact = sc.exact_fields(g.coords, 0.0)
        assert np.abs(init.h - exact.h).max() <= 1e-13
        assert np.abs(init.q - exact.q).max() <= 1e-13


def test_three_bumps_geometry():
    sc = get_scenario("three_bumps")
    g = build_mesh(sc, cells=32)
    f = sc.initial_fields(g.coords)
    z = sc.bathymetry(g.coords)
    assert np.all(f.q == 0.0)
    wet = f.h > 0.0
    np.testing.assert_allclose((f.h + z)[wet], 1.5, rtol=1e-14)
    # the tall cone pierces the surface, the small ones stay submerged
    assert z.max() > 1.5
    assert np.any(~wet)


def test_inclined_equilibrium_depth():
    sc = get_scenario("inclined_friction")
    g = build_mesh(sc, cells=64)
    f = sc.initial_fields(g.coords)
    assert f.h[0] == pytest.approx(0.0956352, abs=5e-8)
    np.testing.assert_allclose(f.q[:, 0], 0.1)


def test_inclined_steady_one_step_residual():
    sc = get_scenario("inclined_friction")
    res = simulate(sc, cells=64, t_final=0.05)
    exact = sc.exact_fields(res.graph.coords, res.t)
    assert error_norm(res.fields, exact, np.inf, res.graph) <= 1e-12


def test_vortex_pointwise_values():
    sc = scenario_vortex()
    pts = np.array([[0.0, 0.0], [5.9, 5.9]])
    h, q = sc.exact(pts, 0.0)
    assert h[0] == pytest.approx(1.98596, abs=5e-6)
    v0 = q[0] / h[0]
    np.testing.assert_allclose(v0, [1.0, 1.0], atol=1e-12)
    # far field
    assert h[1] == pytest.approx(2.0, abs=1e-6)
    np.testing.assert_allclose(q[1] / h[1], [1.0, 1.0], atol=1e-5)


def test_paraboloid_period_and_shoreline():
    sc = scenario_paraboloid()
    assert sc.t_final == pytest.approx(13.45710440, abs=5e-8)
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.0, 4.0, (4000, 2))
    omega = np.sqrt(2.0 * G * 0.1)
    for t in (0.0, 1.3, 4.1):
        h, _ = sc.exact(pts, t)
        center = np.array([2.0 + 0.5 * np.cos(omega * t),
                           2.0 + 0.5 * np.sin(omega * t)])
        r = np.linalg.norm(pts - center, axis=1)
        wet = h > 0.0
        assert np.all(r[wet] <= 1.0 + 1e-12)
        assert np.all(r[~wet] >= 1.0 - 1e-12)


def test_rain_scenarios_configured():
    for test in (3, 4):
        sc = get_scenario(f"rain_incline_{test}")
        assert sc.source.rain_rate == pytest.approx(1e-4)
        assert sc.source.rain_window == (0.0, 100.0)
        assert sc.source.manning_n > 0.0
        assert sc.probes == ("outlet_discharge",)
        assert sc.t_final == 150.0


def test_error_norm_cases():
    g = build_interval_mesh(8, 0.0, 1.0)
    ones = Fields(np.ones(g.node_count), np.full((g.node_count, 1), 0.5))
    assert error_norm(ones, ones, 1, g) == 0.0
    assert error_norm(ones, ones, np.inf, g) == 0.0
    shifted = Fields(ones.h + 1e-3, ones.q.copy())
    assert error_norm(shifted, ones, 1, g) == pytest.approx(1e-3, rel=1e-12)
    assert error_norm(shifted, ones, np.inf, g) == pytest.approx(1e-3, rel=1e-12)
    # absolute discharge norm when the exact discharge vanishes
    rest = Fields(np.ones(g.node_count), np.zeros((g.node_count, 1)))
    moved = Fields(np.ones(g.node_count), np.full((g.node_count, 1), 2e-4))
    err = error_norm(moved, rest, np.inf, g)
    assert err == pytest.approx(2e-4, rel=1e-12)
    dry = Fields(np.zeros(g.node_count), np.zeros((g.node_count, 1)))
    with pytest.raises(ValueError):
        error_norm(ones, dry, 1, g)
    with pytest.raises(ValueError):
        error_norm(ones, ones, 2, g)


def test_cells_scaling_preserves_aspect():
    sc = get_scenario("three_bumps")
    assert sc.cells_for(None) == (64, 32)
    assert sc.cells_for(128) == (128, 64)
    sc1 = get_scenario("inclined_friction")
    assert sc1.cells_for(100) == (100,)

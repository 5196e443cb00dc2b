import numpy as np
import pytest

from swgraph import (Fields, PhysConstants, apply_dirichlet,
                     apply_nonreflecting, apply_reflecting, build_interval_mesh,
                     build_quad_mesh, flow_regime)
from swgraph.boundary import (DIRICHLET, NONREFLECTING, REFLECTING,
                              BoundaryCondition, BoundaryData)

G = 9.81


def test_reflecting_projection():
    _, q = apply_reflecting((1.0, np.array([1.0, 2.0])), np.array([0.0, 1.0]))
    np.testing.assert_allclose(q, [1.0, 0.0])
    _, q = apply_reflecting((1.0, np.array([3.0, 0.0])), np.array([0.0, 1.0]))
    np.testing.assert_allclose(q, [3.0, 0.0])
    n = np.array([np.sqrt(0.5), np.sqrt(0.5)])
    _, q = apply_reflecting((1.0, np.array([1.0, 1.0])), n)
    np.testing.assert_allclose(q, [0.0, 0.0], atol=1e-15)
    # q . n vanishes afterwards
    rng = np.random.default_rng(1)
    for _ in range(50):
        qv = rng.uniform(-5, 5, 2)
        nv = rng.normal(size=2)
        nv /= np.linalg.norm(nv)
        _, qp = apply_reflecting((1.0, qv), nv)
        assert abs(qp @ nv) <= 1e-14 * np.linalg.norm(qv)


def test_flow_regimes():
    n = np.array([1.0])
    assert flow_regime((1.0, np.array([-5.0])), n, G) == "torrential_in"
    assert flow_regime((1.0, np.array([0.0])), n, G) == "fluvial_out"
    assert flow_regime((0.0, np.array([0.0])), n, G) == "torrential_out"
    a = np.sqrt(G)
    assert flow_regime((1.0, np.array([a])), n, G) == "torrential_out"
    assert flow_regime((1.0, np.array([-0.5])), n, G) == "fluvial_in"
    assert flow_regime((1.0, np.array([5.0])), n, G) == "torrential_out"


def test_nonreflecting_torrential_out_identity():
    n = np.array([1.0])
    u = (1.0, np.array([5.0]))
    (h, q), clamped = apply_nonreflecting(u, (0.5, np.array([0.0])), n, G)
    assert h == 1.0 and not clamped
    np.testing.assert_allclose(q, [5.0])


def test_nonreflecting_torrential_in_replaces():
    n = np.array([1.0])
    u = (1.0, np.array([-5.0]))
    (h, q), _ = apply_nonreflecting(u, (0.5, np.array([-0.2])), n, G)
    assert h == 0.5
    np.testing.assert_allclose(q, [-0.2])


def test_nonreflecting_fluvial_out_hand_values():
    n = np.array([1.0])
    u = (1.0, np.array([0.5]))
    ud = (1.0, np.array([0.0]))
    (h, q), clamped = apply_nonreflecting(u, ud, n, G)
    assert not clamped
    assert h == pytest.approx(1.08141, abs=5e-6)
    vn = q[0] / h
    assert vn == pytest.approx(0.25, rel=1e-12)


def test_nonreflecting_matches_riemann_invariants():
    rng = np.random.default_rng(6)
    n = np.array([1.0])
    for _ in range(200):
        h = rng.uniform(0.3, 3.0)
        vn = rng.uniform(-0.4, 0.4) * np.sqrt(G * h)
        hd = rng.uniform(0.3, 3.0)
        vnd = rng.uniform(-0.4, 0.4) * np.sqrt(G * hd)
        u = (h, np.array([h * vn]))
        ud = (hd, np.array([hd * vnd]))
        (hp, qp), clamped = apply_nonreflecting(u, ud, n, G)
        assert not clamped
        r1d = vnd - 2 * np.sqrt(G * hd)
        r3 = vn + 2 * np.sqrt(G * h)
        vp = qp[0] / hp
        assert vp - 2 * np.sqrt(G * hp) == pytest.approx(r1d, rel=1e-12, abs=1e-12)
        assert vp + 2 * np.sqrt(G * hp) == pytest.approx(r3, rel=1e-12, abs=1e-12)
        assert hp >= 0.0


def test_nonreflecting_far_field_match_is_identity():
    n = np.array([1.0])
    u = (1.2, np.array([0.4]))
    (hp, qp), _ = apply_nonreflecting(u, u, n, G)
    assert hp == pytest.approx(1.2, rel=1e-13)
    np.testing.assert_allclose(qp, [0.4], rtol=1e-13)


def test_dirichlet_masks():
    u = (1.0, np.array([2.0, 3.0]))
    ud = (0.5, np.array([-1.0, -2.0]))
    h, q = apply_dirichlet(u, ud)
    assert h == 0.5
    np.testing.assert_allclose(q, [-1.0, -2.0])
    h, q = apply_dirichlet(u, ud, mask=("q",))
    assert h == 1.0
    np.testing.assert_allclose(q, [-1.0, -2.0])
    h, q = apply_dirichlet(u, ud, mask=())
    assert h == 1.0
    np.testing.assert_allclose(q, [2.0, 3.0])


def _const_data(h, qx, qy=None):
    def data(coords, t):
        n = coords.shape[0]
        dim = coords.shape[1]
        q = np.zeros((n, dim))
        q[:, 0] = qx
        if dim == 2 and qy is not None:
            q[:, 1] = qy
        return np.full(n, h), q
    return data


def test_boundary_resolution_precedence_and_apply():
    g = build_quad_mesh(4, 4, ((0.0, 1.0), (0.0, 1.0)))
    c = PhysConstants()
    spec = {
        "left": BoundaryCondition(REFLECTING),
        "bottom": BoundaryCondition(REFLECTING),
        "right": BoundaryCondition(NONREFLECTING, data=_const_data(1.0, 0.0, 0.0)),
        "top": BoundaryCondition(DIRICHLET, data=_const_data(2.0, 0.0, 0.0)),
    }
    bd = BoundaryData(g, spec, c)
    kinds = {grp.kind: set(grp.nodes.tolist()) for grp in bd.groups}
    # corner (0,0) belongs to two reflecting sides; corner (1,0) resolves to
    # reflecting over nonreflecting
    assert 0 in kinds[REFLECTING]
    assert 4 in kinds[REFLECTING]
    assert 4 not in kinds.get(NONREFLECTING, set())
    # top-left corner: reflecting wins over dirichlet
    assert 20 in kinds[REFLECTING]

    f = Fields(np.full(g.node_count, 1.5), np.full((g.node_count, 2), 0.3))
    bd.apply(f, 0.0)
    # reflecting corner ends with zero normal flow along the averaged normal
    assert f.h.min() >= 0.0
    top_interior = [i for i in kinds[DIRICHLET]]
    for i in top_interior:
        assert f.h[i] == 2.0


def test_boundary_inadmissible_data_rejected():
    g = build_interval_mesh(8, 0.0, 1.0)
    c = PhysConstants()
    # V_n^D = 3 > 2 a^D: inadmissible for fluvial matching at the right side
    bad = _const_data(0.01, 0.03 * 3.0 / 0.01)

    def big_velocity(coords, t):
        n = coords.shape[0]
        return np.full(n, 0.01), np.full((n, 1), 0.01 * 100.0)

    with pytest.raises(ValueError):
        BoundaryData(g, {"right": BoundaryCondition(NONREFLECTING, data=big_velocity)}, c)


def test_boundary_1d_sides():
    g = build_interval_mesh(8, 0.0, 1.0)
    c = PhysConstants()
    bd = BoundaryData(g, {
        "left": BoundaryCondition(REFLECTING),
        "right": BoundaryCondition(NONREFLECTING, data=_const_data(1.0, 0.0)),
    }, c)
    f = Fields(np.ones(g.node_count), np.full((g.node_count, 1), 0.5))
    bd.apply(f, 0.0)
    assert f.q[0, 0] == 0.0
    assert f.h[-1] == pytest.approx(1.08141, abs=5e-6)

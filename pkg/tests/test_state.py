import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swgraph import (PhysConstants, entropy_flat, entropy_flux_flat,
                     grad_entropy_flat, physical_flux, regularized_velocity)

G = 9.81


def test_flux_lake_1d():
    f = physical_flux(1.0, np.array([0.0]), G)
    assert f.shape == (2, 1)
    np.testing.assert_allclose(f[:, 0], [0.0, 4.905])


def test_flux_moving_1d():
    f = physical_flux(1.0, np.array([1.0]), G)
    np.testing.assert_allclose(f[:, 0], [1.0, 1.0 + 4.905])


def test_flux_rest_2d():
    f = physical_flux(2.0, np.array([0.0, 0.0]), G)
    assert f.shape == (3, 2)
    np.testing.assert_allclose(f[0], 0.0)
    np.testing.assert_allclose(f[1:], 0.5 * G * 4.0 * np.eye(2))


def test_flux_rejects_negative_depth():
    with pytest.raises(ValueError):
        physical_flux(-0.1, np.array([0.0]), G)
    with pytest.raises(ValueError):
        entropy_flat(-1.0, np.array([0.0]), G)


def test_regularized_velocity_cases():
    v = regularized_velocity(1.0, np.array([3.0]), 1.0e-4)
    np.testing.assert_allclose(v, [3.0])
    v = regularized_velocity(0.0, np.array([0.0]), 1.0e-4)
    np.testing.assert_allclose(v, [0.0])
    # regularized branch, hand evaluation of the formula
    v = regularized_velocity(5.0e-5, np.array([1.0e-4]), 1.0e-4)
    np.testing.assert_allclose(v, [0.8], rtol=1e-14)


def test_entropy_values():
    assert entropy_flat(1.0, np.array([0.0]), G) == pytest.approx(4.905)
    np.testing.assert_allclose(entropy_flux_flat(1.0, np.array([0.0]), G), [0.0])
    assert entropy_flat(0.0, np.array([0.0]), G) == 0.0


def _fd_gradient(h, q, delta=1e-7):
    base = np.concatenate([[h], q])
    grad = np.empty(base.size)
    for k in range(base.size):
        up = base.copy()
        dn = base.copy()
        up[k] += delta
        dn[k] -= delta
        grad[k] = (entropy_flat(up[0], up[1:], G) - entropy_flat(dn[0], dn[1:], G)) / (2 * delta)
    return grad


def test_gradient_matches_finite_differences():
    h, q = 2.0, np.array([1.0, 1.0])
    grad = grad_entropy_flat(h, q, G)
    fd = _fd_gradient(h, q)
    np.testing.assert_allclose(grad, fd, rtol=1e-6)


def test_gradient_consistency_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        h = rng.uniform(0.2, 5.0)
        q = rng.uniform(-4.0, 4.0, size=2)
        grad = grad_entropy_flat(h, q, G)
        fd = _fd_gradient(h, q)
        assert np.linalg.norm(grad - fd) <= 1e-6 * np.linalg.norm(fd)


admissible = st.tuples(st.floats(0.01, 10.0), st.floats(-20.0, 20.0))


@settings(max_examples=200, deadline=None)
@given(admissible, admissible, st.floats(0.0, 1.0))
def test_entropy_convexity(u1, u2, theta):
    h = theta * u1[0] + (1 - theta) * u2[0]
    q = np.array([theta * u1[1] + (1 - theta) * u2[1]])
    lhs = entropy_flat(h, q, G)
    rhs = theta * entropy_flat(u1[0], np.array([u1[1]]), G) \
        + (1 - theta) * entropy_flat(u2[0], np.array([u2[1]]), G)
    assert lhs <= rhs + 1e-12 * max(1.0, abs(rhs))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(-30.0, 30.0))
def test_regularized_velocity_bounds(h, qx):
    eps_depth = 1.0e-3
    q = np.array([qx])
    v = regularized_velocity(h, q, eps_depth)
    if h >= eps_depth:
        # regularization inactive: equals q/h (up to one rounding of h*h)
        np.testing.assert_allclose(v, q / h, rtol=5e-16)
    assert np.abs(v[0]) <= abs(qx) / eps_depth * (1 + 1e-12)


def test_consts_validation():
    with pytest.raises(ValueError):
        PhysConstants(gravity=-1.0)
    with pytest.raises(ValueError):
        PhysConstants(eps_reg=-1.0)
    with pytest.raises(ValueError):
        PhysConstants(h_max_ref=0.0)
    c = PhysConstants(eps_reg=1e-4, h_max_ref=2.0)
    assert c.eps_depth == pytest.approx(2e-4)

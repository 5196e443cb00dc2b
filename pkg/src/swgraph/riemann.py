"""Wave-speed bounds and Riemann averages for the 1D projected problem.

The solver only needs a guaranteed upper bound on the maximal wave speed
(two-rarefaction depth estimate with shock-side correction factors) and the
bar-state average.  The exact Riemann solver lives here as a test oracle and
is never called in the time loop.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def lambda_max_scalar(h_l, u_l, h_r, u_r, gravity):
    """Guaranteed bound on the maximal wave speed, projected states.

    u_l, u_r are the normal velocity components.  Dry sides fall back to the
    rarefaction front speed; double vacuum returns 0.  The bound additionally
    dominates |u_l| and |u_r| so that the graph viscosity satisfies
    d_ij + V_i . c_ij >= 0 on every edge (the affine-shift sign ingredient),
    including edges whose reconstructed depth was cut off by topography.
    """
    guard = max(abs(u_l), abs(u_r))
    if h_l <= 0.0 and h_r <= 0.0:
        return guard
    if h_l <= 0.0:
        a_r = math.sqrt(gravity * h_r)
        return max(abs(u_r - 2.0 * a_r), abs(u_r + a_r), guard)
    if h_r <= 0.0:
        a_l = math.sqrt(gravity * h_l)
        return max(abs(u_l - a_l), abs(u_l + 2.0 * a_l), guard)
    a_l = math.sqrt(gravity * h_l)
    a_r = math.sqrt(gravity * h_r)
    root = 0.5 * (a_l + a_r) + 0.25 * (u_l - u_r)
    if root < 0.0:
        root = 0.0
    h_tilde = root * root / gravity
    x_l = h_tilde - h_l
    if x_l < 0.0:
        x_l = 0.0
    x_r = h_tilde - h_r
    if x_r < 0.0:
        x_r = 0.0
    lam_minus = u_l - a_l * math.sqrt((1.0 + 0.5 * x_l / h_l) * (1.0 + x_l / h_l))
    lam_plus = u_r + a_r * math.sqrt((1.0 + 0.5 * x_r / h_r) * (1.0 + x_r / h_r))
    return max(abs(lam_minus), abs(lam_plus), guard)


def _normal_velocity(h, q, n, eps_depth):
    n = np.atleast_1d(np.asarray(n, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    qn = float(np.dot(q, n))
    h = float(h)
    hm = max(h, eps_depth)
    denom = h * h + hm * hm
    return 2.0 * h * qn / denom if denom > 0.0 else 0.0


def max_wave_speed(u_left, u_right, n, gravity, eps_depth=0.0):
    """Guaranteed maximum wave speed for states u = (h, q) across normal n."""
    h_l, q_l = u_left
    h_r, q_r = u_right
    if h_l < 0.0 or h_r < 0.0:
        raise ValueError("negative water depth")
    ul = _normal_velocity(h_l, q_l, n, eps_depth)
    ur = _normal_velocity(h_r, q_r, n, eps_depth)
    return lambda_max_scalar(float(h_l), ul, float(h_r), ur, gravity)


def _depth_fun(h, h_k, gravity):
    # Rarefaction/shock branch of the depth function.
    if h <= h_k:
        return 2.0 * (math.sqrt(gravity * h) - math.sqrt(gravity * h_k))
    return (h - h_k) * math.sqrt(0.5 * gravity * (h + h_k) / (h * h_k))


def _depth_fun_prime(h, h_k, gravity):
    if h <= h_k:
        return math.sqrt(gravity / h) if h > 0.0 else math.inf
    a = math.sqrt(0.5 * gravity * (h + h_k) / (h * h_k))
    return a - (h - h_k) * gravity / (4.0 * a * h * h)


def _left_edge_speed(h_star, h_l, u_l, a_l):
    if h_star <= h_l:
        return u_l - a_l
    x = h_star - h_l
    return u_l - a_l * math.sqrt((1.0 + 0.5 * x / h_l) * (1.0 + x / h_l))


def exact_riemann_max_speed(u_left, u_right, n, gravity, tol=1.0e-12, max_iter=100):
    """Exact maximal signal speed; Newton on the depth function with a
    bisection safeguard.  Test oracle for the guaranteed bound."""
    h_l, q_l = u_left
    h_r, q_r = u_right
    if h_l < 0.0 or h_r < 0.0:
        raise ValueError("negative water depth")
    ul = _normal_velocity(h_l, q_l, n, 0.0)
    ur = _normal_velocity(h_r, q_r, n, 0.0)
    h_l, h_r = float(h_l), float(h_r)
    if h_l <= 0.0 and h_r <= 0.0:
        return 0.0
    a_l = math.sqrt(gravity * h_l)
    a_r = math.sqrt(gravity * h_r)
    if h_l <= 0.0:
        return max(abs(ur - 2.0 * a_r), abs(ur + a_r))
    if h_r <= 0.0:
        return max(abs(ul - a_l), abs(ul + 2.0 * a_l))
    # Vacuum formation between two strong rarefactions.
    if 2.0 * (a_l + a_r) <= ur - ul:
        return max(abs(ul - a_l), abs(ur + a_r))

    def phi(h):
        return _depth_fun(h, h_l, gravity) + _depth_fun(h, h_r, gravity) + ur - ul

    # The two-rarefaction depth dominates the true intermediate depth, so
    # [0, h_tr] brackets the root (phi is increasing, phi(0+) < 0 here).
    lo = 0.0
    hi = (0.5 * (a_l + a_r) + 0.25 * (ul - ur)) ** 2 / gravity
    while phi(hi) < 0.0:
        lo = hi
        hi = 2.0 * hi + 1.0e-300
        if hi > 1.0e18:
            raise RuntimeError("failed to bracket the intermediate depth")
    root = min(hi, max(0.5 * hi, 1.0e-300))
    converged = False
    for _ in range(max_iter):
        f = phi(root)
        if f > 0.0:
            hi = root
        else:
            lo = root
        dphi = _depth_fun_prime(root, h_l, gravity) + _depth_fun_prime(root, h_r, gravity)
        new = root - f / dphi if dphi > 0.0 and math.isfinite(dphi) else 0.5 * (lo + hi)
        if not (lo < new < hi):
            new = 0.5 * (lo + hi)
        if abs(new - root) <= tol * max(abs(new), 1.0e-300):
            root = new
            converged = True
            break
        root = new
    if not converged and hi - lo > tol * max(hi, 1.0):
        raise RuntimeError("exact Riemann solver did not converge")
    h_star = root
    lam_l = _left_edge_speed(h_star, h_l, ul, a_l)
    lam_r = -_left_edge_speed(h_star, h_r, -ur, a_r)
    return max(abs(lam_l), abs(lam_r))


def bar_state(u_star_i, u_star_j, c_ij, d_ij, gravity):
    """Riemann average (U_i* + U_j*)/2 - (f(U_j*) - f(U_i*)) . c_ij / (2 d_ij)."""
    if d_ij <= 0.0:
        raise ValueError("bar state needs d_ij > 0")
    h_i, q_i = u_star_i
    h_j, q_j = u_star_j
    q_i = np.atleast_1d(np.asarray(q_i, dtype=float))
    q_j = np.atleast_1d(np.asarray(q_j, dtype=float))
    c = np.atleast_1d(np.asarray(c_ij, dtype=float))
    from .state import physical_flux

    fi = physical_flux(h_i, q_i, gravity)
    fj = physical_flux(h_j, q_j, gravity)
    df_c = (fj - fi) @ c
    h_bar = 0.5 * (h_i + h_j) - df_c[0] / (2.0 * d_ij)
    q_bar = 0.5 * (q_i + q_j) - df_c[1:] / (2.0 * d_ij)
    return h_bar, q_bar

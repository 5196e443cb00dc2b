"""Convex limiting: local depth/velocity bounds from shifted bar states,
per-edge limiting coefficients, and the committed update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .state import Fields, regularized_velocity

EPS_LIM_DEFAULT = 1.0e-14


@dataclass
class LimiterBounds:
    h_min: np.ndarray
    h_max: np.ndarray
    v2_max: np.ndarray


def compute_bounds(graph, ws, fields, tau, consts, relax=False):
    """Nodewise (H_min, H_max, V2_max) over the shifted bar states
    W_ij = Ubar_ij + (tau/m_i)(B_i + m_i S_i), j in I(i) (diagonal included,
    zero-viscosity edges skipped)."""
    h_min = np.empty(graph.node_count)
    h_max = np.empty(graph.node_count)
    v2_max = np.empty(graph.node_count)
    K.bar_bounds_kernel(graph.indptr, graph.indices, graph.transpose, ws.hstar,
                        ws.velocity, fields.h, fields.q, ws.visc, graph.cij,
                        ws.bshift, ws.source, tau, graph.mass, consts.gravity,
                        consts.eps_depth, graph.relax_factor, relax,
                        h_min, h_max, v2_max)
    return LimiterBounds(h_min, h_max, v2_max)


def limit_depth(u_low, increment, bounds, eps_lim=EPS_LIM_DEFAULT):
    """Largest l in [0,1] keeping the depth of u_low + l*P inside the local
    interval; bounds is the triple (h_min, h_max, v2_max) at the node."""
    h_min, h_max = bounds[0], bounds[1]
    h_low = float(u_low[0])
    ph = float(np.asarray(increment)[0])
    cand = h_low + ph
    if h_min <= cand <= h_max:
        return 1.0
    den = abs(ph) + eps_lim * h_max
    if den <= 0.0:
        return 1.0
    target = h_min if cand < h_min else h_max
    return min(abs(target - h_low) / den, 1.0)


def limit_velocity(u_low, increment, bounds, ell_cap):
    """Largest l in [0, ell_cap] with Psi3 = h^2 V2_max - |q|^2 >= 0 along
    u_low + l*P; closed-form root of the quadratic (linear fallback when the
    quadratic coefficient degenerates).

    Raises if the low-order state itself violates the bound beyond round-off,
    which signals a bug upstream.
    """
    v2 = float(bounds[2])
    h = float(u_low[0])
    q = np.atleast_1d(np.asarray(u_low[1], dtype=float))
    p = np.asarray(increment, dtype=float)
    ph = p[0]
    pq = p[1:]
    a = ph * ph * v2 - float(pq @ pq)
    b = 2.0 * (h * ph * v2 - float(q @ pq))
    c = h * h * v2 - float(q @ q)
    scale = h * h * v2 + float(q @ q)
    if c < -1.0e-10 * scale:
        raise AssertionError("low-order state violates its own velocity bound")
    c = max(c, 0.0)
    athresh = 1.0e-14 * (ph * ph * v2 + float(pq @ pq))
    if a > athresh:
        disc = b * b - 4.0 * a * c
        if b >= 0.0 or disc <= 0.0:
            return ell_cap
        return min(ell_cap, 2.0 * c / (-b + np.sqrt(disc)))
    if a < -athresh:
        disc = max(b * b - 4.0 * a * c, 0.0)
        if b > 0.0:
            root = (-b - np.sqrt(disc)) / (2.0 * a)
        else:
            den = -b + np.sqrt(disc)
            root = 2.0 * c / den if den > 0.0 else 0.0
        return max(0.0, min(ell_cap, root))
    if b >= 0.0:
        return ell_cap
    return max(0.0, min(ell_cap, c / (-b)))


def limiter_coefficients(graph, fields_low, increments, bounds, consts,
                         eps_lim=EPS_LIM_DEFAULT):
    """Symmetrized per-edge coefficients min(l_j^i, l_i^j).

    Returns (ell, violations); violations counts nodes whose low-order state
    broke the velocity bound where the bound applies (should stay zero).
    """
    ell = np.empty(graph.edge_count)
    violations = K.limiter_kernel(graph.edge_i, graph.indices, fields_low.h,
                                  fields_low.q, increments, bounds.h_min,
                                  bounds.h_max, bounds.v2_max, eps_lim,
                                  consts.eps_depth, ell)
    ell = np.minimum(ell, ell[graph.transpose])
    return ell, int(violations)


def final_update(graph, fields_low, increments, ell):
    """Committed update U_i^L + sum_{j != i} ell_ij lambda_i P_ij."""
    h = np.empty(graph.node_count)
    q = np.empty_like(fields_low.q)
    K.commit_kernel(graph.indptr, graph.indices, fields_low.h, fields_low.q,
                    increments, ell, graph.lam, h, q)
    return Fields(h, q)

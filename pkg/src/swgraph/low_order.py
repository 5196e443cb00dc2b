"""Low-order invariant-domain-preserving forward-Euler scheme.

Hydrostatic reconstruction per edge, guaranteed graph viscosity, the
well-balanced low-order flux, the affine shift entering the convex
combination, rain/Gauckler-Manning sources, and the stage update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .state import Fields, PhysConstants, regularized_velocity


class CFLViolation(RuntimeError):
    """Raised when a requested time step exceeds the stability bound."""

    def __init__(self, tau, tau_bound):
        super().__init__(f"time step {tau:g} exceeds the admissible bound {tau_bound:g}")
        self.tau = tau
        self.tau_bound = tau_bound


@dataclass
class SourceConfig:
    """Rain and friction configuration.

    rain_rate is a constant [m/s] or a callable of the node coordinates;
    the rain is active inside rain_window (None means always on).
    manning_n = 0 disables friction.
    """

    rain_rate: float | Callable = 0.0
    rain_window: Optional[tuple] = None
    manning_n: float = 0.0

    @property
    def active(self) -> bool:
        has_rain = callable(self.rain_rate) or self.rain_rate != 0.0
        return has_rain or self.manning_n > 0.0


@dataclass
class LowOrderWorkspace:
    """Per-stage low-order data reused by the limiter and the ERK driver."""

    hstar: np.ndarray        # (E,) own-side reconstructed depth per directed edge
    velocity: np.ndarray     # (I, d) regularized nodal velocity
    visc: np.ndarray         # (E,) d^L with d_ii = -sum_{j != i} d_ij on the diagonal
    flux: np.ndarray         # (E, d+1)
    bshift: np.ndarray       # (I, d+1)
    source: np.ndarray       # (I, d+1), zeros when sources are off
    tau_bound: float         # min_i m_i / (2 |d_ii|)


def hydrostatic_star(u_i, u_j, z_i, z_j, v_i):
    """Hydrostatic reconstruction of state i toward j.

    Returns (H_i^{j,*}, U_i^{j,*}) with U* = (H*, v_i H*).
    """
    h_i = float(u_i[0])
    if h_i < 0.0:
        raise ValueError("negative water depth")
    hstar = h_i if z_i >= z_j else max(0.0, h_i + (z_i - z_j))
    v_i = np.atleast_1d(np.asarray(v_i, dtype=float))
    return hstar, (hstar, v_i * hstar)


def reconstruction_depths(graph, H, Z):
    """Own-side reconstructed depth for every directed edge."""
    out = np.empty(graph.edge_count)
    K.hstar_kernel(graph.edge_i, graph.indices, H, Z, out)
    return out


def low_order_viscosity(graph, fields, Z, consts, hstar=None, velocity=None):
    """Symmetric guaranteed graph viscosity d^L; diagonal holds d_ii."""
    if velocity is None:
        velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    if hstar is None:
        hstar = reconstruction_depths(graph, fields.h, Z)
    raw = np.empty(graph.edge_count)
    K.wavespeed_kernel(graph.edge_i, graph.indices, graph.transpose, hstar,
                       velocity, graph.cij, graph.cnorm, consts.gravity,
                       consts.eps_depth, raw)
    visc = np.maximum(raw, raw[graph.transpose])
    K.viscosity_diagonal(graph.indptr, graph.indices, visc)
    return visc


def cfl_bound(graph, visc):
    """Largest admissible forward-Euler step min_i m_i / (2 |d_ii|)."""
    dii = np.abs(visc[graph.diag])
    active = dii > 0.0
    if not np.any(active):
        return np.inf
    return float(np.min(graph.mass[active] / (2.0 * dii[active])))


def low_order_flux(graph, fields, Z, visc, consts, hstar=None, velocity=None):
    """Edge fluxes of the low-order well-balanced scheme."""
    if velocity is None:
        velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    if hstar is None:
        hstar = reconstruction_depths(graph, fields.h, Z)
    out = np.empty((graph.edge_count, graph.dim + 1))
    K.low_flux_kernel(graph.edge_i, graph.indices, graph.transpose, hstar,
                      velocity, fields.h, visc, graph.cij, consts.gravity, out)
    return out


def affine_shift(graph, fields, Z, visc, consts, hstar=None, velocity=None):
    """Affine shift B_i = sum_j -2 (d_ij + v_i . c_ij)(U_i^{j,*} - U_i)."""
    if velocity is None:
        velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    if hstar is None:
        hstar = reconstruction_depths(graph, fields.h, Z)
    out = np.empty((graph.node_count, graph.dim + 1))
    K.affine_kernel(graph.indptr, graph.indices, hstar, velocity, fields.h,
                    fields.q, visc, graph.cij, out)
    return out


def manning_rain_source(u, x, tau, cfg, consts, t=0.0):
    """Pointwise source (rain, friction) for a single state."""
    h = np.atleast_1d(np.asarray(u[0], dtype=float))
    q = np.asarray(u[1], dtype=float)[None, :]
    fields = Fields(h, q)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    s = source_field(fields, x, tau, t, cfg, consts)
    return s[0, 0], s[0, 1:]


def source_field(fields, coords, tau, t, cfg, consts):
    """Nodal source vector (R, -g n^2 q ||v|| / Hcal) with the regularized
    depth power Hcal = ((h^{4/3}) + max(h^{4/3}, 2 g n^2 tau ||v||)) / 2."""
    n_nodes, dim = fields.q.shape
    out = np.zeros((n_nodes, dim + 1))
    if cfg is None or not cfg.active:
        return out
    in_window = cfg.rain_window is None or (cfg.rain_window[0] <= t <= cfg.rain_window[1])
    if in_window:
        rate = cfg.rain_rate(coords) if callable(cfg.rain_rate) else cfg.rain_rate
        out[:, 0] = rate
    n = cfg.manning_n
    if n > 0.0:
        g = consts.gravity
        v = regularized_velocity(fields.h, fields.q, consts.eps_depth)
        vnorm = np.sqrt(np.sum(v * v, axis=1))
        h43 = fields.h ** (4.0 / 3.0)
        hcal = 0.5 * (h43 + np.maximum(h43, 2.0 * g * n * n * tau * vnorm))
        factor = np.where(hcal > 0.0, -g * n * n * vnorm / np.where(hcal > 0.0, hcal, 1.0), 0.0)
        out[:, 1:] = factor[:, None] * fields.q
    return out


def prepare_stage(graph, fields, Z, consts):
    """Velocity, reconstructions, viscosity and the CFL bound for one stage."""
    velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    hstar = reconstruction_depths(graph, fields.h, Z)
    visc = low_order_viscosity(graph, fields, Z, consts, hstar=hstar, velocity=velocity)
    return velocity, hstar, visc, cfl_bound(graph, visc)


def complete_workspace(graph, fields, Z, consts, tau, velocity, hstar, visc,
                       tau_bound, source_cfg=None, t=0.0):
    flux = low_order_flux(graph, fields, Z, visc, consts, hstar=hstar, velocity=velocity)
    bshift = affine_shift(graph, fields, Z, visc, consts, hstar=hstar, velocity=velocity)
    source = source_field(fields, graph.coords, tau, t, source_cfg, consts)
    return LowOrderWorkspace(hstar=hstar, velocity=velocity, visc=visc, flux=flux,
                             bshift=bshift, source=source, tau_bound=tau_bound)


def apply_low_update(graph, fields, ws, tau):
    rhs = np.empty((graph.node_count, graph.dim + 1))
    K.rowsum_kernel(graph.indptr, ws.flux, rhs)
    scale = tau / graph.mass
    h_new = fields.h + scale * rhs[:, 0] + tau * ws.source[:, 0]
    q_new = fields.q + scale[:, None] * rhs[:, 1:] + tau * ws.source[:, 1:]
    return Fields(h_new, q_new)


def low_order_update(graph, fields, Z, tau, consts, source_cfg=None, t=0.0):
    """One forward-Euler low-order step; refuses steps beyond the CFL bound.

    Returns the updated fields and the stage workspace.
    """
    velocity, hstar, visc, tau_bound = prepare_stage(graph, fields, Z, consts)
    if tau > tau_bound * (1.0 + 1.0e-12):
        raise CFLViolation(tau, tau_bound)
    ws = complete_workspace(graph, fields, Z, consts, tau, velocity, hstar, visc,
                            tau_bound, source_cfg=source_cfg, t=t)
    return apply_low_update(graph, fields, ws, tau), ws

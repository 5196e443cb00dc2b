"""Explicit Runge-Kutta IDP time stepping.

Optimal-efficiency ERK schemes advance s elementary CFL steps per full step
by accumulating the per-stage high-order fluxes with the weight table
w^(l)_k and safeguarding every stage with the limited low-order update.
The classical SSP schemes are provided as reference integrators in their
convex Shu-Osher form built from the same limited forward-Euler map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import high_order as ho
from . import limiting as lim
from . import low_order as lo
from .state import dry_clamp


@dataclass(frozen=True)
class ErkScheme:
    """Stage weights of an ERK integrator.

    kind "idp": weights[l-1][k-1] multiplies the archived stage flux k in
    stage l.  kind "ssp": convex[l-1] is the weight of U^n in the Shu-Osher
    combination U^(l) = a U^n + (1 - a) Euler(U^(l-1)).
    """

    name: str
    stages: int
    order: int
    c_eff: float
    kind: str = "idp"
    weights: tuple = ()
    convex: tuple = ()
    # time level (in units of tau_n past t^n) each SSP stage state represents
    stage_times: tuple = ()

    @property
    def step_multiplier(self) -> float:
        """Global advance per full step in units of the elementary step."""
        return self.c_eff * self.stages

    def butcher(self):
        """Reconstruct the Butcher tableau (A, b, c) from the weights."""
        if self.kind != "idp":
            raise ValueError("only IDP weight tables map back to a tableau")
        s = self.stages
        a = np.zeros((s + 1, s))
        for l in range(1, s + 1):
            a[l, :] = a[l - 1, :]
            for k, w in enumerate(self.weights[l - 1]):
                a[l, k] += w / s
        c = np.array([sum(a[l, :]) for l in range(s)])
        return a[:s, :], a[s, :], c


_SQ = {
    "RK(2,2;1)": ErkScheme("RK(2,2;1)", 2, 2, 1.0, weights=((1.0,), (-1.0, 2.0))),
    "RK(3,3;1)": ErkScheme("RK(3,3;1)", 3, 3, 1.0,
                           weights=((1.0,), (-1.0, 2.0), (0.75, -2.0, 2.25))),
    "RK(4,3;1)": ErkScheme("RK(4,3;1)", 4, 3, 1.0,
                           weights=((1.0,), (-1.0, 2.0), (0.0, -1.0, 2.0),
                                    (0.0, 5.0 / 3.0, -10.0 / 3.0, 8.0 / 3.0))),
    "RK(5,4;1)": ErkScheme("RK(5,4;1)", 5, 4, 1.0, weights=(
        (1.000000000000000,),
        (0.303779113477746, 0.696220886522255),
        (-2.596605007106260, 3.860592821791782, -0.263987814685521),
        (2.373989715203703, -1.980102553333916, -3.819151895277756, 4.425264733407969),
        (-1.606747744309784, 1.817291202624922, 1.137969506889054,
         -2.114595709136266, 1.766082743932075))),
    "FE(1,1;1)": ErkScheme("FE(1,1;1)", 1, 1, 1.0, weights=((1.0,),)),
    "RK(2,2;1/2)": ErkScheme("RK(2,2;1/2)", 2, 2, 0.5, kind="ssp",
                             convex=(0.0, 0.5), stage_times=(1.0, 1.0)),
    "RK(3,3;1/3)": ErkScheme("RK(3,3;1/3)", 3, 3, 1.0 / 3.0, kind="ssp",
                             convex=(0.0, 0.75, 1.0 / 3.0),
                             stage_times=(1.0, 0.5, 1.0)),
}


def builtin_scheme(name):
    """Weight tables of the built-in integrators (exact printed values)."""
    try:
        return _SQ[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; available: {', '.join(sorted(_SQ))}")


def scheme_names():
    return tuple(sorted(_SQ))


def compute_time_step(graph, visc, cfl, tau_max=np.inf):
    """Elementary step CFL * min_i m_i / (2 |d_ii|) (capped by tau_max)."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError("CFL must lie in (0, 1]")
    bound = lo.cfl_bound(graph, visc)
    return min(cfl * bound, tau_max)


@dataclass
class SolverOptions:
    relaxation: bool = False
    eps_lim: float = lim.EPS_LIM_DEFAULT
    dry_clamp_factor: float = 1.0e-14
    tau_max: float = 1.0
    max_restarts: int = 10
    force_ell: Optional[float] = None      # diagnostic override of the limiter
    use_mass_correction: bool = True
    viscosity: str = "high"                # "low" forces d^H = d^L


@dataclass
class StepStats:
    tau_n: float = 0.0
    tau_erk: float = 0.0
    substeps: int = 0
    restarts: int = 0
    limiter_violations: int = 0
    clamped_nodes: int = 0
    # mass-weighted budget changes (d+1 components) accumulated over stages:
    # boundary post-processing replacements and source contributions
    bc_budget: np.ndarray = None
    source_budget: np.ndarray = None


class ErkStepper:
    """Drives one ERK-IDP (or reference SSP) step on a fixed graph."""

    def __init__(self, graph, bathymetry, consts, scheme, boundary=None,
                 source=None, options=None):
        self.graph = graph
        self.z = np.ascontiguousarray(bathymetry, dtype=float)
        self.consts = consts
        self.scheme = builtin_scheme(scheme) if isinstance(scheme, str) else scheme
        self.boundary = boundary
        self.source = source
        self.options = options or SolverOptions()
        if self.options.viscosity not in ("high", "low"):
            raise ValueError("viscosity option must be 'high' or 'low'")
        self._b_disabled = None

    @property
    def _bmatrix(self):
        if not self.options.use_mass_correction:
            if self._b_disabled is None:
                self._b_disabled = np.zeros(self.graph.edge_count)
            return self._b_disabled
        return self.graph.b_matrix

    def _stage_highflux(self, fields, ws):
        g = self.graph
        if self.options.viscosity == "low":
            visc_h = ws.visc
        else:
            alpha = ho.entropy_indicator(g, fields, self.consts, velocity=ws.velocity)
            visc_h = ho.high_order_viscosity(g, ws.visc, alpha)
        return ho.high_order_flux(g, fields, self.z, visc_h, self.consts,
                                  hstar=ws.hstar, velocity=ws.velocity)

    def _limited_commit(self, fields_low, increments, bounds):
        g = self.graph
        if self.options.force_ell is not None:
            ell = np.full(g.edge_count, float(self.options.force_ell))
            violations = 0
        else:
            ell, violations = lim.limiter_coefficients(
                g, fields_low, increments, bounds, self.consts, self.options.eps_lim)
        return lim.final_update(g, fields_low, increments, ell), violations

    def _assemble_p(self, flux_acc, flux_low, tau, source_acc):
        b_override = None if self.options.use_mass_correction else self._bmatrix
        return ho.assemble_increments(self.graph, flux_acc, flux_low, tau,
                                      source=source_acc, b_override=b_override)

    def step(self, fields, t, cfl, tau_erk_cap=None):
        """Advance one full RK step from time t.

        The elementary step is frozen during the first stage; a stage-level
        CFL violation restarts the whole step with the step halved.  Returns
        (fields, tau_erk, stats).
        """
        opts = self.options
        scheme = self.scheme
        forced_tau = None
        stats = StepStats()
        stats.bc_budget = np.zeros(self.graph.dim + 1)
        stats.source_budget = np.zeros(self.graph.dim + 1)
        for _ in range(opts.max_restarts + 1):
            result = self._attempt(fields, t, cfl, tau_erk_cap, forced_tau, stats)
            if result is not None:
                return result
            forced_tau = stats.tau_n * 0.5
            stats.restarts += 1
            stats.bc_budget[:] = 0.0
            stats.source_budget[:] = 0.0
        raise RuntimeError(
            f"step at t={t:g} failed after {opts.max_restarts} restarts "
            f"(last tau_n={stats.tau_n:g})")

    def _attempt(self, fields, t, cfl, tau_erk_cap, forced_tau, stats):
        g = self.graph
        opts = self.options
        scheme = self.scheme
        mult = scheme.step_multiplier
        state = fields.copy()
        u0 = state
        flux_archive = []
        source_archive = []
        src_on = self.source is not None and self.source.active
        tau = forced_tau

        for l in range(1, scheme.stages + 1):
            velocity, hstar, visc, bound = lo.prepare_stage(g, state, self.z, self.consts)
            if l == 1 and tau is None:
                tau = compute_time_step(g, visc, cfl, opts.tau_max)
                if tau_erk_cap is not None:
                    tau = min(tau, tau_erk_cap / mult)
                if not np.isfinite(tau) or tau <= 0.0:
                    raise RuntimeError("no admissible time step")
            elif tau > bound * (1.0 + 1.0e-12):
                stats.tau_n = tau
                return None  # restart with a smaller elementary step
            stats.tau_n = tau
            if scheme.kind == "ssp":
                t_stage = t + (0.0 if l == 1 else scheme.stage_times[l - 2]) * tau
            else:
                t_stage = t + (l - 1) * tau

            ws = lo.complete_workspace(g, state, self.z, self.consts, tau, velocity,
                                       hstar, visc, bound, self.source, t_stage)
            fields_low = lo.apply_low_update(g, state, ws, tau)
            bounds = lim.compute_bounds(g, ws, state, tau, self.consts, opts.relaxation)

            flux_archive.append(self._stage_highflux(state, ws))
            if src_on:
                source_archive.append(ws.source)

            if scheme.kind == "ssp":
                flux_acc = flux_archive[-1]
                source_acc = ws.source if src_on else None
            else:
                w = scheme.weights[l - 1]
                flux_acc = w[0] * flux_archive[0]
                for k in range(1, l):
                    flux_acc += w[k] * flux_archive[k]
                source_acc = None
                if src_on:
                    source_acc = w[0] * source_archive[0]
                    for k in range(1, l):
                        source_acc += w[k] * source_archive[k]

            increments = self._assemble_p(flux_acc, ws.flux, tau, source_acc)
            new_state, violations = self._limited_commit(fields_low, increments, bounds)
            stats.limiter_violations += violations

            if scheme.kind == "ssp":
                a = scheme.convex[l - 1]
                if a != 0.0:
                    new_state.h = a * u0.h + (1.0 - a) * new_state.h
                    new_state.q = a * u0.q + (1.0 - a) * new_state.q
                t_post = t + scheme.stage_times[l - 1] * tau
            else:
                t_post = t + l * tau
            if src_on:
                stats.source_budget[0] += tau * float(g.mass @ ws.source[:, 0])
                stats.source_budget[1:] += tau * (g.mass @ ws.source[:, 1:])
            if self.boundary is not None:
                pre_h = float(g.mass @ new_state.h)
                pre_q = g.mass @ new_state.q
                self.boundary.apply(new_state, t_post)
                stats.bc_budget[0] += float(g.mass @ new_state.h) - pre_h
                stats.bc_budget[1:] += g.mass @ new_state.q - pre_q
            stats.clamped_nodes += dry_clamp(
                new_state.h, new_state.q, opts.dry_clamp_factor * self.consts.h_max_ref)
            state = new_state
            stats.substeps += 1

        stats.tau_erk = mult * tau
        return state, stats.tau_erk, stats


def erk_step(fields, scheme, graph, bathymetry, consts, t=0.0, cfl=0.5,
             boundary=None, source=None, options=None, tau_erk_cap=None):
    """One-shot convenience wrapper around ErkStepper.step."""
    stepper = ErkStepper(graph, bathymetry, consts, scheme, boundary=boundary,
                         source=source, options=options)
    return stepper.step(fields, t, cfl, tau_erk_cap)

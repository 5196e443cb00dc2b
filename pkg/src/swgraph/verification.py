"""Acceptance suites: one callable per criterion, shared by the CLI
``verify`` subcommand and the pytest acceptance module."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import riemann
from .high_order import (assemble_increments, entropy_indicator,
                         high_order_flux, high_order_viscosity)
from .limiting import compute_bounds, final_update, limiter_coefficients
from .low_order import (apply_low_update, complete_workspace, low_order_update,
                        prepare_stage)
from .driver import simulate
from .meshgraph import build_interval_mesh, build_quad_mesh
from .scenarios import error_norm, get_scenario
from .state import Fields, PhysConstants, entropy_flat, entropy_flux_flat

G = 9.81


@dataclass
class CriterionResult:
    key: str
    label: str
    passed: bool
    details: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key}: {self.label} -- {self.details}"


def check_rest(cells=64):
    """Well-balancing at rest on the distorted three-bump topography."""
    sc = get_scenario("three_bumps")
    res = simulate(sc, cells=cells)
    h0, _ = sc.initial(res.graph.coords)
    drift_h = float(np.abs(res.fields.h - h0).max())
    max_q = float(np.sqrt(np.sum(res.fields.q**2, axis=1)).max())
    passed = drift_h <= 1e-12 and max_q <= 1e-12
    return CriterionResult(
        "rest", "three-bump lake at rest, T=100 s", passed,
        f"|h(T)-h(0)|_inf={drift_h:.3e} (<=1e-12), max|q|={max_q:.3e} (<=1e-12), "
        f"nodes={res.graph.node_count}, wall={res.wall_time:.1f}s")


def check_incline(cells=512):
    """Steady inclined flow with Manning friction stays put."""
    sc = get_scenario("inclined_friction")
    res = simulate(sc, cells=cells)
    exact = sc.exact_fields(res.graph.coords, res.t)
    dinf = error_norm(res.fields, exact, np.inf, res.graph)
    passed = dinf <= 1e-10
    return CriterionResult(
        "incline", "steady frictional flow on an incline, T=100 s", passed,
        f"deltainf={dinf:.3e} (<=1e-10), nodes={res.graph.node_count}, "
        f"wall={res.wall_time:.1f}s")


VORTEX_REFERENCE = {32: 3.58e-3, 64: 6.28e-4, 128: 8.41e-5, 256: 1.10e-5}


def check_vortex(levels=(32, 64, 128, 256)):
    """Smooth-vortex convergence against the reference error table."""
    sc = get_scenario("vortex")
    errs = []
    walls = []
    for n in levels:
        res = simulate(sc, cells=n)
        exact = sc.exact_fields(res.graph.coords, res.t)
        errs.append(error_norm(res.fields, exact, 1, res.graph))
        walls.append(res.wall_time)
    rates = [np.log2(errs[k - 1] / errs[k]) for k in range(1, len(errs))]
    within = all(0.5 * VORTEX_REFERENCE[n] <= e <= 2.0 * VORTEX_REFERENCE[n]
                 for n, e in zip(levels, errs))
    passed = within and all(r >= 2.3 for r in rates)
    err_s = ", ".join(f"{n}:{e:.3e}" for n, e in zip(levels, errs))
    rate_s = ", ".join(f"{r:.2f}" for r in rates)
    return CriterionResult(
        "vortex", "traveling-vortex convergence, T=2 s", passed,
        f"delta1 {{{err_s}}} (factor-2 of reference), rates [{rate_s}] (>=2.3), "
        f"wall={sum(walls):.1f}s")


def check_paraboloid(levels=(32, 64, 128)):
    """Planar oscillation in a paraboloid basin: first-to-second order."""
    sc = get_scenario("paraboloid")
    errs = []
    walls = []
    for n in levels:
        res = simulate(sc, cells=n)
        exact = sc.exact_fields(res.graph.coords, res.t)
        errs.append(error_norm(res.fields, exact, 1, res.graph))
        walls.append(res.wall_time)
    rates = [np.log2(errs[k - 1] / errs[k]) for k in range(1, len(errs))]
    passed = all(1.2 <= r <= 2.1 for r in rates)
    err_s = ", ".join(f"{n}:{e:.3e}" for n, e in zip(levels, errs))
    rate_s = ", ".join(f"{r:.2f}" for r in rates)
    return CriterionResult(
        "paraboloid", "paraboloid basin convergence, 3 periods", passed,
        f"delta1 {{{err_s}}}, rates [{rate_s}] (in [1.2, 2.1]), wall={sum(walls):.1f}s")


def _random_admissible(graph, rng, h_floor):
    h = rng.uniform(h_floor, 2.5, graph.node_count)
    near_dry = rng.random(graph.node_count) < 0.2
    h[near_dry] = rng.uniform(h_floor, 1e-8, np.count_nonzero(near_dry))
    v = rng.uniform(-3.0, 3.0, (graph.node_count, graph.dim))
    return Fields(h, h[:, None] * v)


def check_idp(trials=10_000, seed=2024):
    """One limited forward-Euler step on random admissible fields keeps the
    depth nonnegative and inside the local bounds."""
    rng = np.random.default_rng(seed)
    graphs = [build_interval_mesh(14, 0.0, 1.0),
              build_quad_mesh(4, 4, ((0.0, 1.0), (0.0, 1.0)), 0.25, seed=1)]
    consts = PhysConstants(h_max_ref=2.5)
    worst_h = np.inf
    worst_incl = 0.0
    kviol = 0
    for k in range(trials):
        graph = graphs[k % 2]
        z = rng.uniform(0.0, 1.5, graph.node_count)
        f = _random_admissible(graph, rng, 1e-12)
        velocity, hstar, visc, bound = prepare_stage(graph, f, z, consts)
        tau = 0.95 * bound
        ws = complete_workspace(graph, f, z, consts, tau, velocity, hstar,
                                visc, bound)
        low = apply_low_update(graph, f, ws, tau)
        bounds = compute_bounds(graph, ws, f, tau, consts)
        scale = max(1.0, float(bounds.h_max.max()))
        worst_incl = max(worst_incl,
                         float((bounds.h_min - low.h).max() / scale),
                         float((low.h - bounds.h_max).max() / scale))
        applies = bounds.h_min >= consts.eps_depth
        if np.any(applies):
            q2 = np.sum(low.q**2, axis=1)[applies]
            cap = (low.h**2 * bounds.v2_max)[applies]
            kviol += int(np.count_nonzero(q2 > cap * (1.0 + 1e-12) + 1e-14))
        alpha = entropy_indicator(graph, f, consts, velocity=velocity)
        dh = high_order_viscosity(graph, visc, alpha)
        fh = high_order_flux(graph, f, z, dh, consts, hstar=hstar, velocity=velocity)
        p = assemble_increments(graph, fh, ws.flux, tau)
        ell, violations = limiter_coefficients(graph, low, p, bounds, consts)
        kviol += violations
        new = final_update(graph, low, p, ell)
        worst_h = min(worst_h, float(new.h.min()))
        if new.h.min() < 0.0:
            break
    passed = worst_h >= 0.0 and worst_incl <= 1e-12 and kviol == 0
    return CriterionResult(
        "idp", f"invariant-domain preservation over {trials} random fields", passed,
        f"min h={worst_h:.3e} (>=0), bound-inclusion residual={worst_incl:.2e} "
        f"(<=1e-12), velocity-bound violations={kviol}")


def check_wavespeed(trials=100_000, seed=7):
    """The guaranteed wave-speed bound dominates the exact solver."""
    rng = np.random.default_rng(seed)
    n = np.array([1.0])
    worst = np.inf
    violations = 0
    for _ in range(trials):
        hl, hr = rng.uniform(0.0, 10.0, 2)
        ul, ur = rng.uniform(-20.0, 20.0, 2)
        left = (hl, np.array([hl * ul]))
        right = (hr, np.array([hr * ur]))
        bound = riemann.max_wave_speed(left, right, n, G)
        exact = riemann.exact_riemann_max_speed(left, right, n, G)
        gap = bound - exact
        worst = min(worst, gap)
        if gap < -1e-10:
            violations += 1
    passed = violations == 0
    return CriterionResult(
        "wavespeed", f"wave-speed bound dominance over {trials} pairs", passed,
        f"violations={violations}, smallest margin={worst:.3e} (>=-1e-10)")


def check_conservation(cells=64):
    """Flat-bed compact vortex: the accounted budget closes to round-off."""
    sc = get_scenario("vortex_still")
    res = simulate(sc, cells=cells)
    drift = np.abs(res.conservation_drift())
    passed = bool(np.all(drift <= 1e-12))
    return CriterionResult(
        "conservation", "global budget on a compact still vortex", passed,
        "relative drift (mass, qx, qy) = "
        + ", ".join(f"{d:.3e}" for d in drift) + " (<=1e-12)")


def check_entropy(trials=10_000, seed=5):
    """Low-order step satisfies the flat-bed entropy inequality."""
    rng = np.random.default_rng(seed)
    graph = build_interval_mesh(20, 0.0, 1.0)
    z = np.zeros(graph.node_count)
    consts = PhysConstants(h_max_ref=3.0)
    edge_i, indices = graph.edge_i, graph.indices
    violations = 0
    worst = -np.inf
    for _ in range(trials):
        h = rng.uniform(0.05, 3.0, graph.node_count)
        v = rng.uniform(-4.0, 4.0, (graph.node_count, 1))
        f = Fields(h, h[:, None] * v)
        velocity, hstar, visc, bound = prepare_stage(graph, f, z, consts)
        tau = 0.9 * bound
        ws = complete_workspace(graph, f, z, consts, tau, velocity, hstar,
                                visc, bound)
        new = apply_low_update(graph, f, ws, tau)
        e_old = entropy_flat(f.h, f.q, G, consts.eps_depth)
        e_new = entropy_flat(new.h, new.q, G, consts.eps_depth)
        fflux = entropy_flux_flat(f.h, f.q, G, consts.eps_depth)
        edge_terms = np.sum((fflux[indices] - fflux[edge_i]) * graph.cij, axis=1)
        offdiag = edge_i != indices
        edge_terms = np.where(offdiag,
                              edge_terms - visc * (e_old[indices] - e_old[edge_i]),
                              edge_terms)
        resid = graph.mass / tau * (e_new - e_old) + graph.rowsum(edge_terms[:, None])[:, 0]
        scale = (graph.mass / tau + 2.0 * np.abs(visc[graph.diag])) * (e_old.max() + 1e-300)
        rel = float((resid / scale).max())
        worst = max(worst, rel)
        if rel > 1e-11:
            violations += 1
    passed = violations == 0
    return CriterionResult(
        "entropy", f"discrete entropy inequality over {trials} fields", passed,
        f"violations={violations}, worst scaled residual={worst:.3e} (<=1e-11)")


def check_efficiency(cells=256, t_final=0.5, cfl=0.2):
    """Cycle-count ratio of the reference SSP scheme to the optimal one."""
    sc = get_scenario("vortex")
    res_opt = simulate(sc, cells=cells, t_final=t_final, cfl=cfl, scheme="RK(3,3;1)")
    res_ssp = simulate(sc, cells=cells, t_final=t_final, cfl=cfl, scheme="RK(3,3;1/3)")
    ratio = res_ssp.cycles / res_opt.cycles
    passed = 2.7 <= ratio <= 3.3
    return CriterionResult(
        "efficiency", "RK(3,3;1/3) vs RK(3,3;1) cycle counts on the vortex", passed,
        f"cycles {res_ssp.cycles}/{res_opt.cycles}, ratio={ratio:.3f} (in [2.7, 3.3]); "
        f"throughput {res_opt.throughput_mqs:.3g} / {res_ssp.throughput_mqs:.3g} MQ/s "
        "(reported only)")


def check_rain(cells=128):
    """Rain/friction volume budget and the shape of the outlet discharge."""
    sc = get_scenario("rain_incline_3")
    marks = {}

    def watch(res, t):
        if t >= 100.0 and "v100" not in marks:
            marks["v100"] = float(res.graph.mass @ res.fields.h)
            marks["t100"] = t

    res = simulate(sc, cells=cells, step_callback=watch)
    ts, vals = res.probes["outlet_discharge"]
    ts = np.asarray(ts)
    vals = np.asarray(vals)
    t_mark = marks["t100"]
    rain_in = 2.5 * 1.0e-4 * min(t_mark, 100.0)
    upto = ts <= t_mark + 1e-12
    outflow = float(np.trapezoid(vals[upto], ts[upto]))
    budget = marks["v100"] - (rain_in - outflow)
    rel = abs(budget) / rain_in
    q_max = float(vals.max())
    t_peak = float(ts[np.argmax(vals)])
    rising = ts <= min(t_peak, 95.0)
    diffs = np.diff(vals[rising])
    monotone = bool(np.all(diffs >= -1e-3 * q_max))
    decays = vals[-1] <= 0.5 * q_max
    passed = rel <= 1e-6 and monotone and decays and t_peak <= 115.0
    return CriterionResult(
        "rain", "rain-on-incline volume budget and discharge shape", passed,
        f"budget closure={rel:.3e} (<=1e-6), peak q={q_max:.3e} at t={t_peak:.0f}s, "
        f"final/peak={vals[-1] / q_max:.2f}, monotone rise={monotone}")


SUITES = {
    "rest": check_rest,
    "incline": check_incline,
    "vortex": check_vortex,
    "paraboloid": check_paraboloid,
    "idp": check_idp,
    "wavespeed": check_wavespeed,
    "conservation": check_conservation,
    "entropy": check_entropy,
    "efficiency": check_efficiency,
    "rain": check_rain,
}

SUITE_ORDER = ("rest", "incline", "vortex", "paraboloid", "idp", "wavespeed",
               "conservation", "entropy", "efficiency", "rain")


def run_suite(name, printer=print):
    """Run one named suite or 'all'; returns True when everything passed."""
    names = SUITE_ORDER if name == "all" else (name,)
    ok = True
    for key in names:
        if key not in SUITES:
            raise ValueError(f"unknown suite {key!r}; available: "
                             f"{', '.join(SUITE_ORDER)} or 'all'")
        result = SUITES[key]()
        printer(result.line())
        ok &= result.passed
    return ok

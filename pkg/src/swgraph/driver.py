"""Run orchestration: scenario assembly, the time loop, probes, snapshots,
and the run report."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boundary import BoundaryData
from .config import RunConfig
from .meshgraph import build_interval_mesh, build_quad_mesh
from .output import write_series, write_snapshot
from .scenarios import error_norm, get_scenario
from .state import PhysConstants
from .timestepping import ErkStepper, SolverOptions


@dataclass
class SimResult:
    scenario: object
    graph: object
    bathymetry: np.ndarray
    fields: object
    consts: PhysConstants
    scheme: str
    t: float = 0.0
    cycles: int = 0
    substeps: int = 0
    wall_time: float = 0.0
    restarts: int = 0
    limiter_violations: int = 0
    budget0: np.ndarray = None
    bc_budget: np.ndarray = None
    source_budget: np.ndarray = None
    probes: dict = field(default_factory=dict)

    @property
    def throughput_mqs(self) -> float:
        """Million node updates per second per forward-Euler substep."""
        if self.wall_time <= 0.0:
            return 0.0
        return self.graph.node_count * self.substeps / self.wall_time / 1.0e6

    def mass_budget(self):
        """Mass-weighted state sums now vs start, minus accounted
        boundary-replacement and source contributions, per component."""
        now = np.concatenate([[self.graph.mass @ self.fields.h],
                              self.graph.mass @ self.fields.q])
        return now - self.budget0 - self.bc_budget - self.source_budget

    def conservation_drift(self):
        """Relative per-component drift of the accounted budget."""
        scale = np.concatenate([[self.graph.mass @ np.abs(self.fields.h)],
                                self.graph.mass @ np.abs(self.fields.q)])
        return self.mass_budget() / np.maximum(scale, 1e-30)


def build_mesh(scenario, cells=None, distortion=None, seed=None):
    n = scenario.cells_for(cells)
    dist = scenario.distortion if distortion is None else distortion
    sd = scenario.seed if seed is None else seed
    if scenario.dim == 1:
        return build_interval_mesh(n[0], *scenario.extent[0])
    return build_quad_mesh(n[0], n[1], scenario.extent,
                           distortion_amplitude=dist, seed=sd)


def simulate(scenario, cells=None, cfl=None, scheme=None, t_final=None,
             relaxation=None, distortion=None, seed=None, eps_reg=None,
             h_max_ref=None, gravity=None, tau_max=None, step_callback=None):
    """Advance a scenario to its final time; returns a SimResult."""
    if isinstance(scenario, str):
        scenario = get_scenario(scenario)
    graph = build_mesh(scenario, cells, distortion, seed)
    z = np.ascontiguousarray(scenario.bathymetry(graph.coords))
    fields = scenario.initial_fields(graph.coords)

    href = h_max_ref if h_max_ref is not None else scenario.h_max_override
    if href is None:
        href = float(fields.h.max())
    if href <= 0.0:
        href = 1.0
    consts = PhysConstants(
        gravity=gravity if gravity is not None else scenario.gravity,
        eps_reg=eps_reg if eps_reg is not None else 1.0e-4,
        h_max_ref=href)

    opts = SolverOptions(
        relaxation=scenario.relaxation if relaxation is None else relaxation,
        tau_max=tau_max if tau_max is not None else 1.0)
    bdata = BoundaryData(graph, scenario.boundary, consts)
    scheme_name = scheme if scheme is not None else scenario.scheme
    stepper = ErkStepper(graph, z, consts, scheme_name, boundary=bdata,
                         source=scenario.source, options=opts)

    t_end = t_final if t_final is not None else scenario.t_final
    res = SimResult(scenario=scenario, graph=graph, bathymetry=z, fields=fields,
                    consts=consts, scheme=scheme_name)
    res.budget0 = np.concatenate([[graph.mass @ fields.h], graph.mass @ fields.q])
    res.bc_budget = np.zeros(graph.dim + 1)
    res.source_budget = np.zeros(graph.dim + 1)

    for name in scenario.probes:
        res.probes[name] = ([], [])
    _record_probes(res, 0.0)
    if step_callback is not None:
        step_callback(res, 0.0)

    t = 0.0
    start = time.perf_counter()
    while t < t_end * (1.0 - 1e-13):
        cap = t_end - t
        fields, dt, stats = stepper.step(fields, t, cfl if cfl is not None else scenario.cfl,
                                         tau_erk_cap=cap)
        if not dt > 0.0:
            raise RuntimeError(f"stalled at t={t:g}")
        t += dt
        res.fields = fields
        res.cycles += 1
        res.substeps += stats.substeps
        res.restarts += stats.restarts
        res.limiter_violations += stats.limiter_violations
        res.bc_budget += stats.bc_budget
        res.source_budget += stats.source_budget
        _record_probes(res, t)
        if step_callback is not None:
            step_callback(res, t)
    res.wall_time = time.perf_counter() - start
    res.t = t
    return res


def _record_probes(res, t):
    for name, (ts, vals) in res.probes.items():
        if name == "outlet_discharge":
            outlet = res.graph.boundary_faces[res.graph.faces_on_side("right")][0][0]
            ts.append(t)
            vals.append(float(res.fields.q[outlet, 0]))
        else:
            raise ValueError(f"unknown probe {name!r}")


@dataclass
class RunReport:
    scenario: str
    scheme: str
    nodes: int
    cycles: int
    substeps: int
    wall_time: float
    throughput_mqs: float
    final_delta1: Optional[float]
    final_deltainf: Optional[float]
    conservation_drift: tuple
    restarts: int
    limiter_violations: int

    def kv_lines(self):
        lines = [
            f"scenario={self.scenario}",
            f"scheme={self.scheme}",
            f"nodes={self.nodes}",
            f"cycles={self.cycles}",
            f"substeps={self.substeps}",
            f"wall_time={self.wall_time:.6g}",
            f"throughput_mqs={self.throughput_mqs:.6g}",
            f"restarts={self.restarts}",
            f"limiter_violations={self.limiter_violations}",
        ]
        if self.final_delta1 is not None:
            lines.append(f"delta1={self.final_delta1:.12e}")
            lines.append(f"deltainf={self.final_deltainf:.12e}")
        for k, v in zip(("mass", "qx", "qy"), self.conservation_drift):
            lines.append(f"conservation_drift_{k}={v:.6e}")
        return lines

    def text(self):
        out = [f"run: {self.scenario} [{self.scheme}] on {self.nodes} nodes",
               f"  cycles {self.cycles} (substeps {self.substeps}, restarts {self.restarts})",
               f"  wall {self.wall_time:.3f} s, throughput {self.throughput_mqs:.4g} MQ/s"]
        if self.final_delta1 is not None:
            out.append(f"  delta1 {self.final_delta1:.6e}   deltainf {self.final_deltainf:.6e}")
        drift = ", ".join(f"{v:.3e}" for v in self.conservation_drift)
        out.append(f"  accounted conservation drift per component: {drift}")
        return "\n".join(out)


def run(config: RunConfig):
    """Execute a validated RunConfig: time loop, snapshots, probes, report.

    Returns (RunReport, SimResult).
    """
    scenario = get_scenario(config.scenario)
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)

    cadence = config.cadence
    state = {"next": 0.0, "count": 0}

    def snapshot(res, t):
        if cadence is None:
            return
        if t >= state["next"] - 1e-12:
            base = os.path.join(outdir, f"snap_{state['count']:05d}")
            fmts = ("csv", "vtk") if config.fmt == "both" else (config.fmt,)
            for fmt in fmts:
                if fmt == "vtk" and res.graph.dim != 2:
                    continue
                write_snapshot(f"{base}.{fmt}", res.graph, res.fields,
                               res.bathymetry, fmt=fmt)
            state["count"] += 1
            while state["next"] <= t + 1e-12:
                state["next"] += cadence

    res = simulate(scenario, cells=config.cells, cfl=config.cfl,
                   scheme=config.scheme, t_final=config.t_final,
                   relaxation=config.relaxation, distortion=config.distortion,
                   seed=config.seed, eps_reg=config.eps_reg,
                   h_max_ref=config.h_max_ref, gravity=config.gravity,
                   tau_max=config.tau_max,
                   step_callback=snapshot if cadence is not None else None)

    fmts = ("csv", "vtk") if config.fmt == "both" else (config.fmt,)
    for fmt in fmts:
        if fmt == "vtk" and res.graph.dim != 2:
            continue
        write_snapshot(os.path.join(outdir, f"final.{fmt}"), res.graph,
                       res.fields, res.bathymetry, fmt=fmt)

    if config.write_probes:
        for name, (ts, vals) in res.probes.items():
            write_series(os.path.join(outdir, f"{name}.csv"), ts, vals)

    delta1 = deltainf = None
    if res.scenario.exact is not None:
        exact = res.scenario.exact_fields(res.graph.coords, res.t)
        delta1 = error_norm(res.fields, exact, 1, res.graph)
        deltainf = error_norm(res.fields, exact, np.inf, res.graph)

    report = RunReport(
        scenario=res.scenario.name, scheme=res.scheme,
        nodes=res.graph.node_count, cycles=res.cycles, substeps=res.substeps,
        wall_time=res.wall_time, throughput_mqs=res.throughput_mqs,
        final_delta1=delta1, final_deltainf=deltainf,
        conservation_drift=tuple(res.conservation_drift()),
        restarts=res.restarts, limiter_violations=res.limiter_violations)

    with open(os.path.join(outdir, "report.kv"), "w") as fh:
        fh.write("\n".join(report.kv_lines()) + "\n")
    with open(os.path.join(outdir, "report.txt"), "w") as fh:
        fh.write(report.text() + "\n")
    return report, res

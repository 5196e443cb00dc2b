"""End-of-stage boundary post-processing.

Reflecting (slip) projection, non-reflecting conditions via Riemann
invariants with the four flow regimes, and plain Dirichlet replacement
(full state or discharge-only).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .meshgraph import boundary_normal_integrals
from .state import regularized_velocity

REFLECTING = "reflecting"
NONREFLECTING = "nonreflecting"
DIRICHLET = "dirichlet"
DIRICHLET_Q = "dirichlet_discharge_only"
NONE = "none"

# Resolution precedence at nodes shared by sides of different kinds.
_PRECEDENCE = (REFLECTING, NONREFLECTING, DIRICHLET, DIRICHLET_Q, NONE)

TORRENTIAL_IN = "torrential_in"
TORRENTIAL_OUT = "torrential_out"
FLUVIAL_IN = "fluvial_in"
FLUVIAL_OUT = "fluvial_out"


@dataclass
class BoundaryCondition:
    kind: str
    data: Optional[Callable] = None     # (coords (N, d), t) -> (H, Q)

    def __post_init__(self):
        if self.kind not in _PRECEDENCE:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind in (NONREFLECTING, DIRICHLET, DIRICHLET_Q) and self.data is None:
            raise ValueError(f"{self.kind} boundary needs a data provider")


def apply_reflecting(u, n):
    """Slip projection U^P = (h, q - (q.n) n)."""
    h, q = u
    n = np.atleast_1d(np.asarray(n, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    return h, q - np.dot(q, n) * n


def flow_regime(u, n, gravity, eps_depth=0.0):
    """Classify the boundary flow from the normal velocity and celerity.

    The fluvial-outflow branch is 0 <= V_n < a (matching the eigenvalue
    pattern lambda_1 < 0 <= lambda_2); ties V_n = a >= 0 classify as
    torrential outflow, and a dry node (a = V_n = 0) as well.
    """
    h, q = u
    n = np.atleast_1d(np.asarray(n, dtype=float))
    v = regularized_velocity(h, np.atleast_1d(np.asarray(q, dtype=float)), eps_depth)
    vn = float(np.dot(v, n))
    a = np.sqrt(gravity * max(float(h), 0.0))
    if vn < 0.0:
        return TORRENTIAL_IN if a < -vn else FLUVIAL_IN
    return TORRENTIAL_OUT if a <= vn else FLUVIAL_OUT


def check_admissible(u_dirichlet, n, gravity, eps_depth=0.0):
    """Admissibility V_n^D <= 2 a^D of far-field data for fluvial matching."""
    h, q = u_dirichlet
    v = regularized_velocity(h, np.atleast_1d(np.asarray(q, dtype=float)), eps_depth)
    vn = float(np.dot(v, np.atleast_1d(np.asarray(n, dtype=float))))
    return vn <= 2.0 * np.sqrt(gravity * max(float(h), 0.0))


def apply_nonreflecting(u, u_dirichlet, n, gravity, eps_depth=0.0):
    """Riemann-invariant matching; returns (state, clamped_flag)."""
    regime = flow_regime(u, n, gravity, eps_depth)
    if regime == TORRENTIAL_IN:
        h_d, q_d = u_dirichlet
        return (float(h_d), np.atleast_1d(np.asarray(q_d, dtype=float)).copy()), False
    if regime == TORRENTIAL_OUT:
        h, q = u
        return (float(h), np.atleast_1d(np.asarray(q, dtype=float)).copy()), False

    n = np.atleast_1d(np.asarray(n, dtype=float))
    h, q = u
    h_d, q_d = u_dirichlet
    q = np.atleast_1d(np.asarray(q, dtype=float))
    q_d = np.atleast_1d(np.asarray(q_d, dtype=float))
    v = regularized_velocity(h, q, eps_depth)
    v_d = regularized_velocity(h_d, q_d, eps_depth)
    r3 = float(np.dot(v, n)) + 2.0 * np.sqrt(gravity * max(float(h), 0.0))
    r1_d = float(np.dot(v_d, n)) - 2.0 * np.sqrt(gravity * max(float(h_d), 0.0))
    spread = r3 - r1_d
    clamped = spread < 0.0
    if clamped:
        spread = 0.0
    h_p = (0.25 * spread) ** 2 / gravity
    vn_p = 0.5 * (r1_d + r3)
    v_src = v_d if regime == FLUVIAL_IN else v
    v_perp = v_src - np.dot(v_src, n) * n
    return (h_p, h_p * (v_perp + vn_p * n)), clamped


def apply_dirichlet(u, u_dirichlet, mask=("h", "q")):
    """Replace the masked components by the Dirichlet data."""
    h, q = u
    h_d, q_d = u_dirichlet
    q = np.atleast_1d(np.asarray(q, dtype=float)).copy()
    if "h" in mask:
        h = float(h_d)
    if "q" in mask:
        q = np.atleast_1d(np.asarray(q_d, dtype=float)).copy()
    return h, q


@dataclass
class _Group:
    kind: str
    nodes: np.ndarray
    normals: np.ndarray            # unit normals (unused for dirichlet kinds)
    data: Optional[Callable]
    face_normals: dict = field(default_factory=dict)   # flagged node -> list of unit face normals
    flagged: np.ndarray = None


class BoundaryData:
    """Resolved per-node boundary assignment with precomputed normals."""

    def __init__(self, graph, side_conditions, consts):
        self.graph = graph
        self.consts = consts
        self.clamp_count = 0
        kinds = {}
        for side, cond in side_conditions.items():
            if side not in graph.side_names:
                raise ValueError(f"unknown side {side!r}")
        for name in graph.side_names:
            cond = side_conditions.get(name)
            kinds[name] = cond if cond is not None else BoundaryCondition(NONE)

        node_kind = {}
        for name, cond in kinds.items():
            for f in graph.faces_on_side(name):
                for node in graph.boundary_faces[f]:
                    prev = node_kind.get(int(node))
                    if prev is None or _PRECEDENCE.index(cond.kind) < _PRECEDENCE.index(prev.kind):
                        node_kind[int(node)] = cond

        self.groups = []
        for kind in (REFLECTING, NONREFLECTING, DIRICHLET, DIRICHLET_Q):
            conds = [c for c in kinds.values() if c.kind == kind]
            if not conds:
                continue
            if len({id(c.data) for c in conds}) > 1:
                raise ValueError(f"sides of kind {kind} must share one data provider")
            sel_nodes = sorted(i for i, c in node_kind.items() if c.kind == kind)
            if not sel_nodes:
                continue
            face_idx = np.concatenate([graph.faces_on_side(n) for n, c in kinds.items()
                                       if c.kind == kind])
            nodes, integrals = boundary_normal_integrals(graph, face_idx)
            lookup = {int(n): integrals[k] for k, n in enumerate(nodes)}
            sel = np.array(sel_nodes, dtype=np.int64)
            normals = np.zeros((sel.shape[0], graph.dim))
            flagged = np.zeros(sel.shape[0], dtype=bool)
            face_normals = {}
            scale = float(np.mean(graph.face_measure))
            for k, node in enumerate(sel):
                vec = lookup[int(node)]
                nrm = np.linalg.norm(vec)
                if nrm > 1.0e-12 * scale:
                    normals[k] = vec / nrm
                else:
                    flagged[k] = True
                    per_face = []
                    for f in face_idx:
                        if int(node) in graph.boundary_faces[f]:
                            per_face.append(graph.face_normal[f])
                    face_normals[int(node)] = per_face
            data = conds[0].data
            group = _Group(kind, sel, normals, data, face_normals, flagged)
            self.groups.append(group)
            if kind == NONREFLECTING and data is not None:
                coords = graph.coords[sel]
                h_d, q_d = data(coords, 0.0)
                for k in range(sel.shape[0]):
                    if not check_admissible((h_d[k], q_d[k]), normals[k],
                                            consts.gravity, consts.eps_depth):
                        raise ValueError("inadmissible non-reflecting Dirichlet data "
                                         f"at node {int(sel[k])}")

    def apply(self, fields, t):
        """Post-process the stage state in place."""
        g = self.consts.gravity
        eps = self.consts.eps_depth
        for grp in self.groups:
            if grp.kind == REFLECTING:
                for k, i in enumerate(grp.nodes):
                    if grp.flagged[k]:
                        for n in grp.face_normals[int(i)]:
                            _, fields.q[i] = apply_reflecting((fields.h[i], fields.q[i]), n)
                    else:
                        _, fields.q[i] = apply_reflecting((fields.h[i], fields.q[i]), grp.normals[k])
            elif grp.kind == NONREFLECTING:
                coords = self.graph.coords[grp.nodes]
                h_d, q_d = grp.data(coords, t)
                for k, i in enumerate(grp.nodes):
                    (h_p, q_p), clamped = apply_nonreflecting(
                        (fields.h[i], fields.q[i]), (h_d[k], q_d[k]),
                        grp.normals[k], g, eps)
                    if clamped:
                        self.clamp_count += 1
                    fields.h[i] = h_p
                    fields.q[i] = q_p
            else:
                mask = ("h", "q") if grp.kind == DIRICHLET else ("q",)
                coords = self.graph.coords[grp.nodes]
                h_d, q_d = grp.data(coords, t)
                for k, i in enumerate(grp.nodes):
                    h_p, q_p = apply_dirichlet((fields.h[i], fields.q[i]),
                                               (h_d[k], q_d[k]), mask)
                    fields.h[i] = h_p
                    fields.q[i] = q_p
        return fields

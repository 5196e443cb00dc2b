"""Discretization-independent graph data.

Builds the per-node lumped mass m_i, the consistent mass entries m_ij, the
gradient vectors c_ij, the stencils and the boundary faces for 1D interval
meshes (continuous linear elements) and 2D quadrilateral meshes (continuous
bilinear elements, 2x2 Gauss quadrature), optionally with a deterministic
pseudo-random distortion of the interior nodes.

Sparse layout: CSR with the diagonal stored explicitly in every row and the
column indices sorted, so every per-node loop runs over the stencil I(i).
``transpose[e]`` locates the reversed edge (j, i).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GAUSS = 1.0 / np.sqrt(3.0)
_U64 = np.uint64


@dataclass
class MeshGraph:
    dim: int
    coords: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    edge_i: np.ndarray
    transpose: np.ndarray
    diag: np.ndarray
    mass: np.ndarray
    mass_matrix: np.ndarray
    cij: np.ndarray
    cells: np.ndarray
    boundary_faces: np.ndarray
    face_side: np.ndarray
    face_normal: np.ndarray
    face_measure: np.ndarray
    side_names: tuple
    min_edge: float
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def node_count(self) -> int:
        return self.coords.shape[0]

    @property
    def edge_count(self) -> int:
        return self.indices.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.mass))

    @property
    def cnorm(self) -> np.ndarray:
        if "cnorm" not in self._cache:
            self._cache["cnorm"] = np.sqrt(np.sum(self.cij * self.cij, axis=1))
        return self._cache["cnorm"]

    @property
    def lam(self) -> np.ndarray:
        """Convex weights 1/Card(I*(i))."""
        if "lam" not in self._cache:
            deg = np.diff(self.indptr) - 1
            self._cache["lam"] = 1.0 / np.maximum(deg, 1)
        return self._cache["lam"]

    @property
    def b_matrix(self) -> np.ndarray:
        """Dispersion-correction entries b_ij = delta_ij - m_ij/m_j per edge."""
        if "b" not in self._cache:
            b = -self.mass_matrix / self.mass[self.indices]
            b[self.diag] += 1.0
            self._cache["b"] = b
        return self._cache["b"]

    @property
    def relax_factor(self) -> np.ndarray:
        """Bounds-relaxation factor (m_i/|D|)^(1.5/d)."""
        if "relax" not in self._cache:
            self._cache["relax"] = (self.mass / self.total_mass) ** (1.5 / self.dim)
        return self._cache["relax"]

    @property
    def boundary_nodes(self) -> np.ndarray:
        if "bnodes" not in self._cache:
            self._cache["bnodes"] = np.unique(self.boundary_faces)
        return self._cache["bnodes"]

    def row(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edge_slot(self, i, j):
        row = self.row(i)
        k = np.searchsorted(row, j)
        if k == row.shape[0] or row[k] != j:
            raise KeyError(f"({i}, {j}) not in stencil")
        return int(self.indptr[i] + k)

    def rowsum(self, edge_values):
        """Sum an edge array over each stencil row."""
        return np.add.reduceat(edge_values, self.indptr[:-1], axis=0)

    def faces_on_side(self, name):
        sid = self.side_names.index(name)
        return np.nonzero(self.face_side == sid)[0]

    def dump_csv(self, bathymetry, path):
        """Debug dump: node id, x, y, m_i, z_i."""
        x = self.coords[:, 0]
        y = self.coords[:, 1] if self.dim == 2 else np.zeros_like(x)
        with open(path, "w") as fh:
            fh.write("id,x,y,m,z\n")
            for i in range(self.node_count):
                fh.write("%d,%.17g,%.17g,%.17g,%.17g\n" % (i, x[i], y[i], self.mass[i], bathymetry[i]))


def _splitmix64(x):
    # uint64 wraparound is intentional
    with np.errstate(over="ignore"):
        x = (x + _U64(0x9E3779B97F4A7C15)) & _U64(0xFFFFFFFFFFFFFFFF)
        z = x
        z = ((z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)) & _U64(0xFFFFFFFFFFFFFFFF)
        z = ((z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)) & _U64(0xFFFFFFFFFFFFFFFF)
        return z ^ (z >> _U64(31))


def _counter_uniform(seed, node_ids, axis):
    """Deterministic uniforms in [-1, 1) keyed by (seed, node, axis)."""
    base = _splitmix64(_U64(seed & 0xFFFFFFFFFFFFFFFF))
    with np.errstate(over="ignore"):
        key = (node_ids.astype(np.uint64) * _U64(0xD1B54A32D192ED03) + _U64(axis + 1)) ^ base
    z = _splitmix64(key)
    return z.astype(np.float64) / 2.0**64 * 2.0 - 1.0


def _csr_from_coo(node_count, rows, cols, values):
    """Sum duplicate COO entries into canonical sorted CSR."""
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    values = [v[order] for v in values]
    new = np.ones(rows.shape[0], dtype=bool)
    new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.nonzero(new)[0]
    seg = np.append(starts, rows.shape[0])
    indices = cols[starts]
    edge_i = rows[starts]
    summed = [np.add.reduceat(v, starts, axis=0) for v in values]
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.add.at(indptr, edge_i + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, indices.astype(np.int64), edge_i.astype(np.int64), summed


def _finalize(dim, coords, indptr, indices, edge_i, mass_matrix, cij,
              cells, faces, face_side, face_normal, face_measure, side_names, min_edge):
    node_count = coords.shape[0]
    keys = edge_i * node_count + indices
    tkeys = indices * node_count + edge_i
    transpose = np.searchsorted(keys, tkeys).astype(np.int64)
    if not np.array_equal(keys[transpose], tkeys):
        raise RuntimeError("stencil is not structurally symmetric")
    diag = np.searchsorted(keys, np.arange(node_count, dtype=np.int64) * (node_count + 1)).astype(np.int64)

    # Mirror the gradient vectors so c_ij = -c_ji holds exactly except for
    # pairs of nodes sharing a boundary face, where the surface term breaks
    # antisymmetry.
    same_face = set()
    if faces.shape[1] == 2:
        for a, b in faces:
            same_face.add((min(a, b), max(a, b)))
    mirror = (edge_i < indices)
    if same_face:
        pair_keys = np.array([i * node_count + j for i, j in same_face], dtype=np.int64)
        mirror &= ~np.isin(keys, np.sort(pair_keys))
    src = np.nonzero(mirror)[0]
    cij[transpose[src]] = -cij[src]

    mass = np.add.reduceat(mass_matrix, indptr[:-1])
    graph = MeshGraph(
        dim=dim, coords=coords, indptr=indptr, indices=indices, edge_i=edge_i,
        transpose=transpose, diag=diag, mass=mass, mass_matrix=mass_matrix,
        cij=np.ascontiguousarray(cij), cells=cells, boundary_faces=faces,
        face_side=face_side, face_normal=face_normal, face_measure=face_measure,
        side_names=side_names, min_edge=min_edge)
    if np.any(mass <= 0.0):
        raise RuntimeError("nonpositive lumped mass")
    return graph


def build_interval_mesh(n_cells, x_left, x_right):
    """Uniform 1D mesh with continuous linear elements.

    Interior consistent-mass row is (dx/6)(1, 4, 1) and the interior gradient
    row is (-1/2, 0, 1/2).
    """
    if n_cells < 2:
        raise ValueError("need at least 2 cells")
    if not x_right > x_left:
        raise ValueError("degenerate extent")
    n = n_cells + 1
    dx = (x_right - x_left) / n_cells
    coords = (x_left + dx * np.arange(n))[:, None]
    cells = np.column_stack([np.arange(n_cells), np.arange(1, n_cells + 1)]).astype(np.int64)

    rows, cols, mvals, cvals = [], [], [], []
    m_el = dx / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    c_el = np.array([[-0.5, 0.5], [-0.5, 0.5]])
    for a in range(2):
        for b in range(2):
            rows.append(cells[:, a])
            cols.append(cells[:, b])
            mvals.append(np.full(n_cells, m_el[a, b]))
            cvals.append(np.full(n_cells, c_el[a, b]))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    indptr, indices, edge_i, (mm, cc) = _csr_from_coo(
        n, rows, cols, [np.concatenate(mvals), np.concatenate(cvals)])

    faces = np.array([[0], [n - 1]], dtype=np.int64)
    face_side = np.array([0, 1], dtype=np.int64)
    face_normal = np.array([[-1.0], [1.0]])
    face_measure = np.ones(2)
    return _finalize(1, coords, indptr, indices, edge_i, mm, cc[:, None],
                     cells, faces, face_side, face_normal, face_measure,
                     ("left", "right"), dx)


def _quad_shape(xi, eta):
    corners = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    n = 0.25 * (1.0 + corners[:, 0] * xi) * (1.0 + corners[:, 1] * eta)
    dn = np.empty((4, 2))
    dn[:, 0] = 0.25 * corners[:, 0] * (1.0 + corners[:, 1] * eta)
    dn[:, 1] = 0.25 * corners[:, 1] * (1.0 + corners[:, 0] * xi)
    return n, dn


def build_quad_mesh(nx, ny, extent=((0.0, 1.0), (0.0, 1.0)),
                    distortion_amplitude=0.0, seed=0):
    """Structured quadrilateral mesh with continuous bilinear elements.

    Interior nodes are displaced by a counter-based pseudo-random offset of
    magnitude <= distortion_amplitude * (min cell edge); boundary nodes stay
    put, so graph entries are reproducible bit for bit for a fixed seed.
    """
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 cells per direction")
    if not 0.0 <= distortion_amplitude < 0.5:
        raise ValueError("distortion amplitude must be in [0, 0.5)")
    (x0, x1), (y0, y1) = extent
    if not (x1 > x0 and y1 > y0):
        raise ValueError("degenerate extent")
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    min_edge = min(dx, dy)

    node_id = lambda ix, iy: iy * (nx + 1) + ix
    ix, iy = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()
    coords = np.column_stack([x0 + ix * dx, y0 + iy * dy]).astype(float)
    n = coords.shape[0]

    if distortion_amplitude > 0.0:
        interior = (ix > 0) & (ix < nx) & (iy > 0) & (iy < ny)
        ids = np.arange(n, dtype=np.int64)
        for axis in range(2):
            u = _counter_uniform(seed, ids, axis)
            coords[interior, axis] += distortion_amplitude * min_edge * u[interior]

    cx, cy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    cx, cy = cx.ravel(), cy.ravel()
    cells = np.column_stack([
        node_id(cx, cy), node_id(cx + 1, cy),
        node_id(cx + 1, cy + 1), node_id(cx, cy + 1)]).astype(np.int64)
    ncell = cells.shape[0]

    xc = coords[cells]                       # (ncell, 4, 2)
    m_block = np.zeros((ncell, 4, 4))
    c_block = np.zeros((ncell, 4, 4, 2))
    for gx in (-_GAUSS, _GAUSS):
        for gy in (-_GAUSS, _GAUSS):
            nfun, dn = _quad_shape(gx, gy)
            jac = np.einsum("an,cam->cmn", dn, xc)          # (ncell, 2, 2)
            det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
            if np.any(det <= 0.0):
                raise ValueError("inverted cell Jacobian; reduce distortion")
            inv = np.empty_like(jac)
            inv[:, 0, 0] = jac[:, 1, 1]
            inv[:, 0, 1] = -jac[:, 0, 1]
            inv[:, 1, 0] = -jac[:, 1, 0]
            inv[:, 1, 1] = jac[:, 0, 0]
            inv /= det[:, None, None]
            grad = np.einsum("cnm,an->cam", inv, dn)        # grad phi_a, (ncell, 4, 2)
            m_block += nfun[None, :, None] * nfun[None, None, :] * det[:, None, None]
            c_block += nfun[None, :, None, None] * grad[:, None, :, :] * det[:, None, None, None]

    # rows/cols layout must match the (a, b) block ordering
    rows = cells[:, :, None].repeat(4, axis=2).ravel()
    cols = cells[:, None, :].repeat(4, axis=1).ravel()
    indptr, indices, edge_i, (mm, ccx, ccy) = _csr_from_coo(
        n, rows, cols,
        [m_block.ravel(), c_block[..., 0].ravel(), c_block[..., 1].ravel()])
    cij = np.column_stack([ccx, ccy])

    faces, face_side, face_normal, face_measure = [], [], [], []
    side_names = ("left", "right", "bottom", "top")
    for k in range(ny):
        faces.append([node_id(0, k), node_id(0, k + 1)])
        face_side.append(0); face_normal.append([-1.0, 0.0]); face_measure.append(dy)
        faces.append([node_id(nx, k), node_id(nx, k + 1)])
        face_side.append(1); face_normal.append([1.0, 0.0]); face_measure.append(dy)
    for k in range(nx):
        faces.append([node_id(k, 0), node_id(k + 1, 0)])
        face_side.append(2); face_normal.append([0.0, -1.0]); face_measure.append(dx)
        faces.append([node_id(k, ny), node_id(k + 1, ny)])
        face_side.append(3); face_normal.append([0.0, 1.0]); face_measure.append(dx)
    return _finalize(2, coords, indptr, indices, edge_i, mm, cij, cells,
                     np.asarray(faces, dtype=np.int64), np.asarray(face_side, dtype=np.int64),
                     np.asarray(face_normal), np.asarray(face_measure), side_names, min_edge)


def boundary_normal_integrals(graph, face_indices):
    """Per-node integrals of phi_i * n over the selected boundary faces.

    Returns (nodes, integrals); the caller normalizes or flags near-zero
    rows (cancelling normals).
    """
    acc = {}
    for f in np.atleast_1d(face_indices):
        nodes = graph.boundary_faces[f]
        n = graph.face_normal[f]
        w = graph.face_measure[f] / nodes.shape[0] if graph.dim == 2 else 1.0
        for node in nodes:
            acc.setdefault(int(node), np.zeros(graph.dim))
            acc[int(node)] += w * n
    nodes = np.array(sorted(acc), dtype=np.int64)
    vals = np.array([acc[int(i)] for i in nodes]) if nodes.size else np.zeros((0, graph.dim))
    return nodes, vals

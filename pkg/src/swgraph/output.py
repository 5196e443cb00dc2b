"""Snapshot and time-series output: full-precision CSV and legacy VTK."""

from __future__ import annotations

import numpy as np

from .state import Fields

CSV_HEADER = "x,y,h,qx,qy,z"


def write_snapshot(path, graph, fields, bathymetry, fmt="csv"):
    """Write one nodal snapshot.

    CSV carries the exact header ``x,y,h,qx,qy,z`` at 17 significant digits
    (bitwise round-trippable); 1D data pads y and qy with zeros.  VTK is
    legacy ASCII with point data and is available for 2D quad meshes only.
    """
    if fmt == "csv":
        _write_csv(path, graph, fields, bathymetry)
    elif fmt == "vtk":
        _write_vtk(path, graph, fields, bathymetry)
    else:
        raise ValueError(f"unknown snapshot format {fmt!r}")


def _write_csv(path, graph, fields, bathymetry):
    x = graph.coords[:, 0]
    y = graph.coords[:, 1] if graph.dim == 2 else np.zeros_like(x)
    qx = fields.q[:, 0]
    qy = fields.q[:, 1] if graph.dim == 2 else np.zeros_like(x)
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for i in range(graph.node_count):
            fh.write("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n"
                     % (x[i], y[i], fields.h[i], qx[i], qy[i], bathymetry[i]))


def read_snapshot_csv(path):
    """Read a CSV snapshot back; returns (graph coords, Fields, z)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    coords = data[:, 0:2]
    fields = Fields(data[:, 2], data[:, 3:5])
    return coords, fields, data[:, 5]


def _write_vtk(path, graph, fields, bathymetry):
    if graph.dim != 2:
        raise ValueError("VTK output requires a 2D quadrilateral mesh")
    n = graph.node_count
    cells = graph.cells
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("shallow water snapshot\n")
        fh.write("ASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {n} double\n")
        for i in range(n):
            fh.write("%.17g %.17g 0\n" % (graph.coords[i, 0], graph.coords[i, 1]))
        fh.write(f"CELLS {cells.shape[0]} {cells.shape[0] * 5}\n")
        for c in cells:
            fh.write("4 %d %d %d %d\n" % tuple(c))
        fh.write(f"CELL_TYPES {cells.shape[0]}\n")
        fh.write("9\n" * cells.shape[0])
        fh.write(f"POINT_DATA {n}\n")
        fh.write("SCALARS h double 1\nLOOKUP_TABLE default\n")
        for v in fields.h:
            fh.write("%.17g\n" % v)
        fh.write("VECTORS discharge double\n")
        for i in range(n):
            fh.write("%.17g %.17g 0\n" % (fields.q[i, 0], fields.q[i, 1]))
        fh.write("SCALARS z double 1\nLOOKUP_TABLE default\n")
        for v in bathymetry:
            fh.write("%.17g\n" % v)


def write_series(path, times, values, header="t,value"):
    """Time series as two full-precision CSV columns."""
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t, v in zip(times, values):
            fh.write("%.17g,%.17g\n" % (t, v))


def read_series(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]

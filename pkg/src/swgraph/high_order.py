"""High-order spatial scheme: entropy-production indicator, high-order
graph viscosity and flux, mass-matrix dispersion correction, and the
anti-diffusive increments fed to the convex limiter."""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .low_order import reconstruction_depths
from .state import Fields, regularized_velocity


def indicator_floor(consts):
    """Denominator floor eps * sqrt(g h_max) * g h_max^2 / 2 of the indicator."""
    g = consts.gravity
    h = consts.h_max_ref
    return consts.eps_reg * np.sqrt(g * h) * 0.5 * g * h * h


def entropy_indicator(graph, fields, consts, velocity=None):
    """Normalized entropy-production residual alpha_i in [0, 1]."""
    if velocity is None:
        velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    out = np.empty(graph.node_count)
    K.alpha_kernel(graph.indptr, graph.indices, fields.h, fields.q, velocity,
                   graph.cij, consts.gravity, indicator_floor(consts), out)
    return out


def high_order_viscosity(graph, visc_low, alpha):
    """d^H_ij = d^L_ij (alpha_i + alpha_j)/2, diagonal rebuilt as -rowsum."""
    visc = visc_low * (0.5 * (alpha[graph.edge_i] + alpha[graph.indices]))
    K.viscosity_diagonal(graph.indptr, graph.indices, visc)
    return visc


def high_order_flux(graph, fields, Z, visc_high, consts, hstar=None, velocity=None):
    """High-order flux with the well-balanced topography coupling."""
    if velocity is None:
        velocity = regularized_velocity(fields.h, fields.q, consts.eps_depth)
    if hstar is None:
        hstar = reconstruction_depths(graph, fields.h, Z)
    out = np.empty((graph.edge_count, graph.dim + 1))
    K.high_flux_kernel(graph.edge_i, graph.indices, graph.transpose, hstar,
                       velocity, fields.h, fields.q, Z, visc_high, graph.cij,
                       consts.gravity, out)
    return out


def mass_correction(graph):
    """Entries b_ij = delta_ij - m_ij/m_j of the dispersion correction."""
    return graph.b_matrix


def node_flux_sums(graph, flux_edges):
    out = np.empty((graph.node_count, graph.dim + 1))
    K.rowsum_kernel(graph.indptr, flux_edges, out)
    return out


def mass_source_sums(graph, source):
    """Per-node sums sum_j m_ij S_j."""
    vals = graph.mass_matrix[:, None] * source[graph.indices]
    out = np.empty_like(source)
    K.rowsum_kernel(graph.indptr, vals, out)
    return out


def assemble_increments(graph, flux_acc, flux_low, tau, source=None,
                        flux_acc_node=None, b_override=None):
    """Anti-diffusive increments P_ij (with the optional source extension).

    flux_acc is the accumulated high-order edge flux of the stage; the
    increments are scaled by tau / (m_i lambda_i) so the final update adds
    sum_j ell_ij lambda_i P_ij.
    """
    if flux_acc_node is None:
        flux_acc_node = node_flux_sums(graph, flux_acc)
    has_source = source is not None
    if has_source:
        msource = mass_source_sums(graph, source)
    else:
        source = np.zeros((graph.node_count, graph.dim + 1))
        msource = source
    bmat = graph.b_matrix if b_override is None else b_override
    out = np.empty_like(flux_acc)
    K.p_kernel(graph.edge_i, graph.indices, graph.transpose, flux_acc, flux_low,
               flux_acc_node, bmat, graph.mass_matrix, source, msource,
               has_source, tau, graph.mass, graph.lam, out)
    return out


def provisional_high_update(graph, fields, flux_high, tau):
    """Raw high-order forward-Euler update (diagnostic; not committed and
    not guaranteed admissible)."""
    fnode = node_flux_sums(graph, flux_high)
    b = graph.b_matrix
    corr = (b[:, None] * fnode[graph.indices]
            - b[graph.transpose][:, None] * fnode[graph.edge_i])
    rhs = fnode + graph.rowsum(corr)
    scale = tau / graph.mass
    return Fields(fields.h + scale * rhs[:, 0], fields.q + scale[:, None] * rhs[:, 1:])

"""Compiled per-edge/per-node kernels for the stage pipeline.

All kernels run single-threaded over the CSR graph (deterministic) and are
shared by the module-level operations; they are not part of the public API.
"""

import numpy as np
from numba import njit

from .riemann import lambda_max_scalar


@njit(cache=True)
def _vfac(h, eps_depth):
    # Regularized-velocity factor: v = _vfac(h) * q.
    hm = h if h > eps_depth else eps_depth
    den = h * h + hm * hm
    return 2.0 * h / den if den > 0.0 else 0.0


@njit(cache=True)
def hstar_kernel(edge_i, indices, H, Z, out):
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        zi = Z[i]
        zj = Z[j]
        if zi >= zj:
            # max(z_i, z_j) = z_i cancels z_i exactly
            out[e] = H[i]
        else:
            s = H[i] + (zi - zj)
            out[e] = s if s > 0.0 else 0.0


@njit(cache=True)
def wavespeed_kernel(edge_i, indices, transpose, hstar, V, cij, cnorm, gravity,
                     eps_depth, out):
    # Depths below the numerically-dry scale take the vacuum branch of the
    # bound: the shock-correction factor diverges like 1/sqrt(h) against a
    # residual film, which would collapse the admissible time step.
    dim = cij.shape[1]
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        cn = cnorm[e]
        if i == j or cn <= 0.0:
            out[e] = 0.0
            continue
        ul = 0.0
        ur = 0.0
        for k in range(dim):
            nk = cij[e, k] / cn
            ul += V[i, k] * nk
            ur += V[j, k] * nk
        hl = hstar[e]
        hr = hstar[transpose[e]]
        if hl < eps_depth:
            hl = 0.0
        if hr < eps_depth:
            hr = 0.0
        out[e] = lambda_max_scalar(hl, ul, hr, ur, gravity) * cn


@njit(cache=True)
def viscosity_diagonal(indptr, indices, d):
    # d_ii = -sum_{j != i} d_ij, accumulated in row order.
    for i in range(indptr.shape[0] - 1):
        acc = 0.0
        pos = -1
        for e in range(indptr[i], indptr[i + 1]):
            if indices[e] == i:
                pos = e
            else:
                acc += d[e]
        d[pos] = -acc


@njit(cache=True)
def low_flux_kernel(edge_i, indices, transpose, hstar, V, H, dL, cij, gravity, out):
    dim = cij.shape[1]
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        hi_s = hstar[e]
        hj_s = hstar[transpose[e]]
        vci = 0.0
        vcj = 0.0
        for k in range(dim):
            vci += V[i, k] * cij[e, k]
            vcj += V[j, k] * cij[e, k]
        d = dL[e]
        out[e, 0] = -(hj_s * vcj + hi_s * vci) + d * (hj_s - hi_s)
        pres = 0.5 * (hj_s - hi_s) * (hj_s + hi_s) + H[i] * H[i]
        for k in range(dim):
            out[e, 1 + k] = (-(hj_s * V[j, k] * vcj + hi_s * V[i, k] * vci)
                             + d * (hj_s * V[j, k] - hi_s * V[i, k])
                             - gravity * cij[e, k] * pres)


@njit(cache=True)
def affine_kernel(indptr, indices, hstar, V, H, Q, dL, cij, out):
    dim = cij.shape[1]
    for i in range(indptr.shape[0] - 1):
        for c in range(dim + 1):
            out[i, c] = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            vci = 0.0
            for k in range(dim):
                vci += V[i, k] * cij[e, k]
            coef = -2.0 * (dL[e] + vci)
            out[i, 0] += coef * (hstar[e] - H[i])
            for k in range(dim):
                out[i, 1 + k] += coef * (hstar[e] * V[i, k] - Q[i, k])


@njit(cache=True)
def bar_bounds_kernel(indptr, indices, transpose, hstar, V, H, Q, dL, cij,
                      bshift, source, tau, mass, gravity, eps_depth,
                      relax, use_relax, hmin_out, hmax_out, v2_out):
    dim = cij.shape[1]
    qtmp = np.empty(dim)
    shift = np.empty(dim + 1)
    for i in range(indptr.shape[0] - 1):
        inv_m = tau / mass[i]
        for c in range(dim + 1):
            shift[c] = inv_m * (bshift[i, c] + mass[i] * source[i, c])
        wh = H[i] + shift[0]
        hmin = wh
        hmax = wh
        fac = _vfac(wh, eps_depth)
        v2 = 0.0
        for k in range(dim):
            vk = fac * (Q[i, k] + shift[1 + k])
            v2 += vk * vk
        v2max = v2
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            d = dL[e]
            if j == i or d <= 0.0:
                continue
            t = transpose[e]
            hi_s = hstar[e]
            hj_s = hstar[t]
            vci = 0.0
            vcj = 0.0
            for k in range(dim):
                vci += V[i, k] * cij[e, k]
                vcj += V[j, k] * cij[e, k]
            half_inv_d = 0.5 / d
            bh = 0.5 * (hi_s + hj_s) - half_inv_d * (hj_s * vcj - hi_s * vci)
            wh = bh + shift[0]
            if wh < hmin:
                hmin = wh
            if wh > hmax:
                hmax = wh
            fac = _vfac(wh, eps_depth)
            v2 = 0.0
            for k in range(dim):
                fq = (hj_s * V[j, k] * vcj - hi_s * V[i, k] * vci
                      + 0.5 * gravity * (hj_s * hj_s - hi_s * hi_s) * cij[e, k])
                qtmp[k] = 0.5 * (hi_s * V[i, k] + hj_s * V[j, k]) - half_inv_d * fq
                vk = fac * (qtmp[k] + shift[1 + k])
                v2 += vk * vk
            if v2 > v2max:
                v2max = v2
        if use_relax:
            r = relax[i]
            hmin = hmin * (1.0 - r)
            hmax = hmax * (1.0 + r)
            v2max = v2max * (1.0 + r)
        hmin_out[i] = hmin if hmin > 0.0 else 0.0
        hmax_out[i] = hmax
        v2_out[i] = v2max


@njit(cache=True)
def alpha_kernel(indptr, indices, H, Q, V, cij, gravity, eps_dmax, out):
    dim = cij.shape[1]
    for i in range(indptr.shape[0] - 1):
        v2i = 0.0
        for k in range(dim):
            v2i += V[i, k] * V[i, k]
        ge0 = gravity * H[i] - 0.5 * v2i
        acc_a = 0.0
        acc_b = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            j = indices[e]
            v2j = 0.0
            vcj = 0.0
            qcj = 0.0
            for k in range(dim):
                v2j += V[j, k] * V[j, k]
                vcj += V[j, k] * cij[e, k]
                qcj += Q[j, k] * cij[e, k]
            ej = 0.5 * gravity * H[j] * H[j] + 0.5 * H[j] * v2j
            # entropy flux of the neighbor dotted with c_ij
            acc_a += (ej + 0.5 * gravity * H[j] * H[j]) * vcj
            # chain-rule form grad E_i . (f(U_j) c_ij)
            gfc = ge0 * qcj
            for m in range(dim):
                gfc += V[i, m] * (Q[j, m] * vcj + 0.5 * gravity * H[j] * H[j] * cij[e, m])
            acc_b += gfc
        num = abs(acc_a - acc_b)
        den = abs(acc_a) + abs(acc_b) + eps_dmax
        a = num / den if den > 0.0 else 0.0
        if a > 1.0:
            a = 1.0
        out[i] = a


@njit(cache=True)
def high_flux_kernel(edge_i, indices, transpose, hstar, V, H, Q, Z, dH, cij, gravity, out):
    dim = cij.shape[1]
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        hi_s = hstar[e]
        hj_s = hstar[transpose[e]]
        vci = 0.0
        vcj = 0.0
        for k in range(dim):
            vci += V[i, k] * cij[e, k]
            vcj += V[j, k] * cij[e, k]
        d = dH[e]
        out[e, 0] = -(H[j] * vcj + H[i] * vci) + d * (hj_s - hi_s)
        topo = H[i] * H[j] + H[i] * (Z[j] - Z[i])
        for k in range(dim):
            out[e, 1 + k] = (-(Q[j, k] * vcj + Q[i, k] * vci)
                             + d * (hj_s * V[j, k] - hi_s * V[i, k])
                             - gravity * topo * cij[e, k])


@njit(cache=True)
def p_kernel(edge_i, indices, transpose, flux_acc, flux_low, flux_acc_node,
             bij, mij, source, msource, has_source, tau, mass, lam, out):
    ncomp = flux_acc.shape[1]
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        t = transpose[e]
        pref = tau / (mass[i] * lam[i])
        for c in range(ncomp):
            val = (flux_acc[e, c] - flux_low[e, c]
                   + bij[e] * flux_acc_node[j, c] - bij[t] * flux_acc_node[i, c])
            if has_source:
                val += (mij[e] * (source[j, c] - source[i, c])
                        + bij[e] * msource[j, c] - bij[t] * msource[i, c])
            out[e, c] = pref * val


@njit(cache=True)
def limiter_kernel(edge_i, indices, ULh, ULq, P, hmin, hmax, v2max,
                   eps_lim, eps_depth, out):
    dim = ULq.shape[1]
    violations = 0
    for e in range(edge_i.shape[0]):
        i = edge_i[e]
        j = indices[e]
        if i == j:
            out[e] = 1.0
            continue
        hl = ULh[i]
        ph = P[e, 0]
        cand = hl + ph
        lo = hmin[i]
        hi = hmax[i]
        if lo <= cand <= hi:
            lh = 1.0
        else:
            den = abs(ph) + eps_lim * hi
            if den <= 0.0:
                lh = 1.0
            elif cand < lo:
                lh = abs(lo - hl) / den
            else:
                lh = abs(hi - hl) / den
            if lh > 1.0:
                lh = 1.0

        # Quadratic velocity bound psi(l) = (h + l ph)^2 v2max - |q + l pq|^2.
        v2 = v2max[i]
        pq2 = 0.0
        qpq = 0.0
        q2 = 0.0
        for k in range(dim):
            pq2 += P[e, 1 + k] * P[e, 1 + k]
            qpq += ULq[i, k] * P[e, 1 + k]
            q2 += ULq[i, k] * ULq[i, k]
        a = ph * ph * v2 - pq2
        b = 2.0 * (hl * ph * v2 - qpq)
        c = hl * hl * v2 - q2
        scale = hl * hl * v2 + q2
        if c < -1.0e-10 * scale and lo >= eps_depth:
            violations += 1
        if c < 0.0:
            c = 0.0
        athresh = 1.0e-14 * (ph * ph * v2 + pq2)
        cap = lh
        if a > athresh:
            disc = b * b - 4.0 * a * c
            if b >= 0.0 or disc <= 0.0:
                lv = cap
            else:
                root = 2.0 * c / (-b + np.sqrt(disc))
                lv = root if root < cap else cap
        elif a < -athresh:
            disc = b * b - 4.0 * a * c
            if disc < 0.0:
                disc = 0.0
            if b > 0.0:
                root = (-b - np.sqrt(disc)) / (2.0 * a)
            else:
                den = -b + np.sqrt(disc)
                root = 2.0 * c / den if den > 0.0 else 0.0
            lv = root if root < cap else cap
        else:
            if b >= 0.0:
                lv = cap
            else:
                root = c / (-b)
                lv = root if root < cap else cap
        if lv < 0.0:
            lv = 0.0
        out[e] = lv
    return violations


@njit(cache=True)
def commit_kernel(indptr, indices, ULh, ULq, P, ell, lam, hout, qout):
    dim = ULq.shape[1]
    for i in range(indptr.shape[0] - 1):
        acc0 = 0.0
        acc1 = 0.0
        acc2 = 0.0
        for e in range(indptr[i], indptr[i + 1]):
            if indices[e] == i:
                continue
            l = ell[e]
            acc0 += l * P[e, 0]
            acc1 += l * P[e, 1]
            if dim == 2:
                acc2 += l * P[e, 2]
        hout[i] = ULh[i] + lam[i] * acc0
        qout[i, 0] = ULq[i, 0] + lam[i] * acc1
        if dim == 2:
            qout[i, 1] = ULq[i, 1] + lam[i] * acc2


@njit(cache=True)
def rowsum_kernel(indptr, values, out):
    ncomp = values.shape[1]
    for i in range(indptr.shape[0] - 1):
        for c in range(ncomp):
            acc = 0.0
            for e in range(indptr[i], indptr[i + 1]):
                acc += values[e, c]
            out[i, c] = acc

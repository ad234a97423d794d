"""Numba @njit implementations of the hot numeric kernels.

Same API as :mod:`oblique.kernels_numpy`; see there for the shared
conventions. These are explicit-loop versions because numba has no einsum.
All kernels are cached to disk, so the compile cost is paid once.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

LANE = "numba"

_JIT = {"cache": True, "fastmath": False}


@njit(**_JIT)
def channel_blocks(rho, D, L, n, R):
    M = L * R
    B = np.zeros((n, M, M), dtype=np.complex128)
    for i in range(n):
        for l in range(L):
            for r in range(R):
                a = l * R + r
                for m in range(L):
                    for r2 in range(R):
                        b = m * R + r2
                        s = 0.0 + 0.0j
                        for j in range(n):
                            rj = (l * n + j) * R + r
                            dj = np.conj(D[j, i])
                            for k in range(n):
                                ck = (m * n + k) * R + r2
                                s += dj * rho[rj, ck] * D[k, i]
                        B[i, a, b] = s
    return B


@njit(**_JIT)
def channel_apply(rho, V, D, L, n, R):
    B = channel_blocks(rho, D, L, n, R)
    M = L * R
    Z = 0.0
    for i in range(n):
        for a in range(M):
            Z += B[i, a, a].real
    d = L * n * R
    out = np.zeros((d, d), dtype=np.complex128)
    for i in range(n):
        for l in range(L):
            for p in range(n):
                for r in range(R):
                    row = (l * n + p) * R + r
                    a = l * R + r
                    for m in range(L):
                        for q in range(n):
                            vq = V[p, i] * np.conj(V[q, i])
                            for r2 in range(R):
                                col = (m * n + q) * R + r2
                                out[row, col] += vq * B[i, a, m * R + r2]
    for row in range(d):
        for col in range(row, d):
            h = 0.5 * (out[row, col] + np.conj(out[col, row]))
            out[row, col] = h
            out[col, row] = np.conj(h)
    return out, Z


@njit(**_JIT)
def ptrace(rho, dims, keep):
    N = dims.shape[0]
    stride = np.ones(N, np.int64)
    for m in range(N - 2, -1, -1):
        stride[m] = stride[m + 1] * dims[m + 1]
    dk = 1
    dd = 1
    for m in range(N):
        if keep[m]:
            dk *= dims[m]
        else:
            dd *= dims[m]
    # offsets of the kept / dropped composite indices in the full index space
    offk = np.zeros(dk, np.int64)
    for a in range(dk):
        rem = a
        for m in range(N - 1, -1, -1):
            if keep[m]:
                offk[a] += (rem % dims[m]) * stride[m]
                rem //= dims[m]
    offd = np.zeros(dd, np.int64)
    for c in range(dd):
        rem = c
        for m in range(N - 1, -1, -1):
            if not keep[m]:
                offd[c] += (rem % dims[m]) * stride[m]
                rem //= dims[m]
    out = np.zeros((dk, dk), dtype=np.complex128)
    for a in range(dk):
        for b in range(dk):
            s = 0.0 + 0.0j
            for c in range(dd):
                s += rho[offk[a] + offd[c], offk[b] + offd[c]]
            out[a, b] = s
    return out


@njit(**_JIT)
def entropy_eigs(rho, clamp):
    w = np.linalg.eigvalsh(rho)
    s = 0.0
    for x in w:
        if x > clamp:
            s -= x * math.log2(x)
    return s


@njit(**_JIT)
def mutual_info(rho, dims, group, ngroups, clamp):
    s = -entropy_eigs(rho, clamp)
    N = dims.shape[0]
    for g in range(ngroups):
        keep = np.zeros(N, np.bool_)
        for m in range(N):
            keep[m] = group[m] == g
        s += entropy_eigs(ptrace(rho, dims, keep), clamp)
    return s


@njit(**_JIT)
def hs_distance(a, b):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            d = a[i, j] - b[i, j]
            s += d.real * d.real + d.imag * d.imag
    return s


@njit(**_JIT)
def residual_max(rho, V, D, L, n, R):
    out, Z = channel_apply(rho, V, D, L, n, R)
    if Z < 1e-300:
        return np.inf
    d = out.shape[0]
    best = 0.0
    for i in range(d):
        for j in range(d):
            r = abs(out[i, j] / Z - rho[i, j])
            if r > best:
                best = r
    return best


@njit(**_JIT)
def basis_from_params(x, n, cap):
    V = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        off = 2 * n * i
        nrm = 0.0
        for a in range(n):
            nrm += x[off + a] * x[off + a] + x[off + n + a] * x[off + n + a]
        nrm = math.sqrt(nrm)
        if nrm < 1e-8:
            return V, V, -1.0
        for a in range(n):
            V[a, i] = complex(x[off + a], x[off + n + a]) / nrm
    u, s, vh = np.linalg.svd(V)
    if s[n - 1] < 1e-300:
        return V, V, -1.0
    cond = s[0] / s[n - 1]
    if cond > cap:
        return V, V, -1.0
    v_inv = (np.conj(vh).T * (1.0 / s)) @ np.conj(u).T
    D = np.ascontiguousarray(np.conj(v_inv).T)
    return V, D, cond


@njit(**_JIT)
def unitary_from_params(x, n):
    Z = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        off = 2 * n * i
        for a in range(n):
            Z[a, i] = complex(x[off + a], x[off + n + a])
    q, r = np.linalg.qr(Z)
    U = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        d = r[i, i]
        ph = d / abs(d) if abs(d) > 1e-300 else 1.0 + 0.0j
        for a in range(n):
            U[a, i] = q[a, i] * ph
    return U


@njit(**_JIT)
def _zod_objective(G, Rb, M, tr_rho2):
    f = tr_rho2
    n = G.shape[0]
    nb = Rb.shape[1]
    for i in range(n):
        acc = 0.0
        for a in range(nb):
            for b in range(nb):
                acc += (np.conj(Rb[i, a, b]) * M[i, a, b]).real
        f -= 2.0 * acc
        for j in range(n):
            acc = 0.0
            for a in range(nb):
                for b in range(nb):
                    acc += (np.conj(M[i, a, b]) * M[j, a, b]).real
            f += G[i, j] * acc
    return f


@njit(**_JIT)
def _zod_project(M):
    n, nb, _ = M.shape
    out = np.empty_like(M)
    total = 0.0
    for i in range(n):
        w, U = np.linalg.eigh(np.ascontiguousarray(M[i]))
        for k in range(nb):
            if w[k] < 0.0:
                w[k] = 0.0
            total += w[k]
        out[i] = (U * w) @ np.conj(U).T
    if total < 1e-14:
        for i in range(n):
            for a in range(nb):
                for b in range(nb):
                    out[i, a, b] = 0.0
                out[i, a, a] = 1.0 / (n * nb)
        return out
    for i in range(n):
        for a in range(nb):
            for b in range(nb):
                out[i, a, b] /= total
    return out


@njit(**_JIT)
def zod_inner(G, Rb, M0, tr_rho2, max_iter, tol):
    M = _zod_project(M0.copy())
    f = _zod_objective(G, Rb, M, tr_rho2)
    step = 0.5
    n = G.shape[0]
    for _ in range(max_iter):
        grad = np.empty_like(M)
        for i in range(n):
            g = -Rb[i].astype(np.complex128)
            for j in range(n):
                g = g + G[i, j] * M[j]
            grad[i] = 2.0 * g
        cand = _zod_project(M - step * grad)
        fc = _zod_objective(G, Rb, cand, tr_rho2)
        if fc < f:
            df = f - fc
            M, f = cand, fc
            if df < tol:
                break
        else:
            step *= 0.5
            if step < 1e-14:
                break
    return f, M

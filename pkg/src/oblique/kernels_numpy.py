"""Pure-numpy implementations of the hot numeric kernels.

Every function here has a numba twin in :mod:`oblique.kernels_numba` with the
same name and signature; :mod:`oblique.backend` picks the active lane. Keep
the two modules in sync (tests/test_kernels.py cross-checks them).

Conventions shared by both lanes:

* density matrices are C-contiguous complex128 arrays,
* a basis is an (n, n) complex matrix whose COLUMNS are the basis vectors,
* the target subsystem of a channel splits the total space as L x n x R,
  where L and R are the products of the dimensions before and after it.
"""

from __future__ import annotations

import numpy as np

LANE = "numpy"


def channel_apply(rho, V, D, L, n, R):
    """Selective dual-basis map: sum_i |v_i><d_i| rho |d_i><v_i|, unnormalized.

    Returns ``(out, Z)`` where ``Z = tr(out)`` is the normalizer. The output
    is hermitized but NOT divided by Z; callers must check Z and rescale.
    """
    rho6 = rho.reshape(L, n, R, L, n, R)
    B = np.einsum("ji,ljrmks,ki->ilrms", D.conj(), rho6, D)
    Z = float(np.einsum("ilrlr->", B).real)
    out = np.einsum("pi,qi,ilrms->lprmqs", V, V.conj(), B)
    out = out.reshape(L * n * R, L * n * R)
    return 0.5 * (out + out.conj().T), Z


def channel_blocks(rho, D, L, n, R):
    """Compressions <d_i| rho |d_i> on the non-target factors, shape (n, LR, LR)."""
    rho6 = rho.reshape(L, n, R, L, n, R)
    B = np.einsum("ji,ljrmks,ki->ilrms", D.conj(), rho6, D)
    return np.ascontiguousarray(B.reshape(n, L * R, L * R))


def ptrace(rho, dims, keep):
    """Partial trace keeping the subsystems flagged in the boolean mask `keep`."""
    N = len(dims)
    t = rho.reshape(tuple(dims) * 2)
    row = list(range(N))
    col = [N + i if keep[i] else i for i in range(N)]
    out_axes = [i for i in range(N) if keep[i]] + [N + i for i in range(N) if keep[i]]
    out = np.einsum(t, row + col, out_axes)
    dk = 1
    for i in range(N):
        if keep[i]:
            dk *= int(dims[i])
    return np.ascontiguousarray(out.reshape(dk, dk))


def entropy_eigs(rho, clamp):
    """Spectral entropy -sum w log2 w over eigenvalues above `clamp`."""
    w = np.linalg.eigvalsh(rho)
    w = w[w > clamp]
    if w.size == 0:
        return 0.0
    return float(-np.sum(w * np.log2(w)))


def mutual_info(rho, dims, group, ngroups, clamp):
    """Total correlation sum_g S(rho_g) - S(rho) for the given grouping.

    `group[k]` is the group id of subsystem k; ids run over 0..ngroups-1.
    """
    s = -entropy_eigs(rho, clamp)
    for g in range(ngroups):
        keep = group == g
        s += entropy_eigs(ptrace(rho, dims, keep), clamp)
    return s


def hs_distance(a, b):
    """Squared Hilbert-Schmidt distance tr[(a-b)^2] for Hermitian a, b."""
    d = a - b
    return float(np.sum(d.real * d.real + d.imag * d.imag))


def residual_max(rho, V, D, L, n, R):
    """Max-norm fixed-point residual ||Phi(rho) - rho||_max."""
    out, Z = channel_apply(rho, V, D, L, n, R)
    if Z < 1e-300:
        return np.inf
    return float(np.max(np.abs(out / Z - rho)))


def basis_from_params(x, n, cap):
    """Decode 2n^2 reals into a normalized basis and its dual columns.

    Vector i occupies ``x[2n i : 2n(i+1)]`` as n real parts then n imaginary
    parts. Returns ``(V, D, cond)``; a negative cond signals a degenerate or
    over-cap draw that the caller must penalize.
    """
    V = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        off = 2 * n * i
        v = x[off : off + n] + 1j * x[off + n : off + 2 * n]
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-8:
            return V, V, -1.0
        V[:, i] = v / nrm
    u, s, vh = np.linalg.svd(V)
    if s[n - 1] < 1e-300:
        return V, V, -1.0
    cond = float(s[0] / s[n - 1])
    if cond > cap:
        return V, V, -1.0
    v_inv = (vh.conj().T * (1.0 / s)) @ u.conj().T
    D = np.ascontiguousarray(v_inv.conj().T)
    return V, D, cond


def unitary_from_params(x, n):
    """Decode 2n^2 reals into a unitary via QR with phase-fixed R diagonal."""
    Z = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        off = 2 * n * i
        Z[:, i] = x[off : off + n] + 1j * x[off + n : off + 2 * n]
    q, r = np.linalg.qr(Z)
    d = np.diagonal(r).copy()
    mag = np.abs(d)
    ph = np.where(mag > 1e-300, d / np.where(mag > 1e-300, mag, 1.0), 1.0)
    return np.ascontiguousarray(q * ph)


def _zod_objective(G, Rb, M, tr_rho2):
    f = tr_rho2
    n = G.shape[0]
    for i in range(n):
        f -= 2.0 * float(np.sum(Rb[i].conj() * M[i]).real)
        for j in range(n):
            f += G[i, j] * float(np.sum(M[i].conj() * M[j]).real)
    return f


def _zod_project(M):
    n, nb, _ = M.shape
    out = np.empty_like(M)
    total = 0.0
    for i in range(n):
        w, U = np.linalg.eigh(M[i])
        w = np.maximum(w, 0.0)
        out[i] = (U * w) @ U.conj().T
        total += float(np.sum(w))
    if total < 1e-14:
        out[:] = 0.0
        for i in range(n):
            out[i] = np.eye(nb, dtype=np.complex128) / (n * nb)
        return out
    return out / total

def zod_inner(G, Rb, M0, tr_rho2, max_iter, tol):
    """Projected-gradient solve of the conditional-block fit.

    Minimizes tr[(rho - sum_i |v_i><v_i| x M_i)^2] over M_i >= 0 with
    sum_i tr M_i = 1, given G[i,j] = |<v_i|v_j>|^2 and the compressions
    Rb[i] = <v_i| rho |v_i>. Projection is eigenvalue clipping followed by
    a global trace rescale; steps that fail to decrease the objective are
    halved. Returns ``(best objective, best M)``.
    """
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

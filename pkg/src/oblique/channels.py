"""Dual bases, the oblique channel, fixed-point tests and composites.

A basis {|v_i>} of normalized, linearly independent (not necessarily
orthogonal) vectors has a unique dual {|d_i>} with <v_i|d_j> = delta_ij.
The channel selects against the duals and reassembles along the vectors:

    Phi(rho) = sum_i |v_i><d_i| rho |d_i><v_i| / tr[sum_i <d_i| rho |d_i>]

Its fixed points are exactly the states sum_i p_i |v_i><v_i| (x) sigma_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .backend import kernels as K
from .qmat import DensityMatrix, make_density

DEFAULT_CONDITION_CAP = 1e8
FIXED_POINT_TOL = 1e-8
ZERO_WEIGHT = 1e-12
VECTOR_NORM_TOL = 1e-10


class ConditionNumberError(ValueError):
    """Raised for linearly dependent or ill-conditioned basis sets."""

    def __init__(self, condition: float, cap: float):
        self.condition = condition
        self.cap = cap
        super().__init__(
            f"basis condition number {condition:.3e} exceeds the cap {cap:.1e}; "
            "the set is (numerically) linearly dependent"
        )


@dataclass(frozen=True)
class ObliqueBasis:
    """Normalized basis vectors (columns of `vectors`) and their dual columns."""

    vectors: np.ndarray
    duals: np.ndarray
    gram_condition: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        """Overlap matrix <v_i|v_j>."""
        return self.vectors.conj().T @ self.vectors


@dataclass(frozen=True)
class ObliqueChannel:
    target: int
    basis: ObliqueBasis


@dataclass(frozen=True)
class CompositeChannel:
    channels: tuple[ObliqueChannel, ...]

    def __post_init__(self):
        targets = [c.target for c in self.channels]
        if len(set(targets)) != len(targets):
            raise ValueError(f"composite channel targets must be distinct, got {targets}")


def _as_columns(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return np.ascontiguousarray(vectors, dtype=np.complex128)
    cols = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    return np.ascontiguousarray(np.column_stack(cols))


def dual_basis(vectors, condition_cap: float = DEFAULT_CONDITION_CAP) -> ObliqueBasis:
    """Compute the unique dual set with <v_i|d_j> = delta_ij.

    `vectors` is either an (n, n) array of columns or an iterable of n
    vectors of dimension n, each unit-norm. The duals are the columns of
    (S^dag)^-1 for the stacked matrix S; the same SVD supplies the
    condition number, and sets beyond `condition_cap` are rejected.
    """
    S = _as_columns(vectors)
    n, m = S.shape
    if n != m:
        raise ValueError(f"need exactly {n} vectors of dimension {n}, got {m}")
    norms = np.linalg.norm(S, axis=0)
    worst = float(np.max(np.abs(norms - 1.0)))
    if worst > VECTOR_NORM_TOL:
        raise ValueError(f"basis vectors must be unit-norm: max deviation {worst:.3e}")
    u, s, vh = np.linalg.svd(S)
    if s[-1] < 1e-300:
        raise ConditionNumberError(np.inf, condition_cap)
    cond = float(s[0] / s[-1])
    if cond > condition_cap:
        raise ConditionNumberError(cond, condition_cap)
    s_inv = (vh.conj().T * (1.0 / s)) @ u.conj().T
    duals = np.ascontiguousarray(s_inv.conj().T)
    S.flags.writeable = False
    duals.flags.writeable = False
    return ObliqueBasis(vectors=S, duals=duals, gram_condition=cond)


def orthonormal_basis(unitary: np.ndarray) -> ObliqueBasis:
    """Wrap a unitary's columns as a (self-dual) basis without re-solving."""
    U = np.ascontiguousarray(unitary, dtype=np.complex128)
    U.flags.writeable = False
    return ObliqueBasis(vectors=U, duals=U, gram_condition=1.0)


def biorthogonality_residual(basis: ObliqueBasis) -> float:
    """max_ij |<v_i|d_j> - delta_ij|."""
    overlap = basis.vectors.conj().T @ basis.duals
    return float(np.max(np.abs(overlap - np.eye(basis.dim))))


def _split_dims(dims: tuple[int, ...], target: int) -> tuple[int, int, int]:
    if not 0 <= target < len(dims):
        raise ValueError(f"channel target {target} out of range for dims {dims}")
    L = int(np.prod(dims[:target], dtype=np.int64)) if target > 0 else 1
    R = int(np.prod(dims[target + 1 :], dtype=np.int64)) if target + 1 < len(dims) else 1
    return L, dims[target], R


def _check_channel(phi: ObliqueChannel, rho: DensityMatrix) -> tuple[int, int, int]:
    L, n, R = _split_dims(rho.dims, phi.target)
    if phi.basis.dim != n:
        raise ValueError(
            f"basis dimension {phi.basis.dim} does not match subsystem "
            f"{phi.target} of dimension {n}"
        )
    return L, n, R


def apply_channel(
    phi: ObliqueChannel,
    rho: DensityMatrix,
    *,
    zmin: float = 1e-12,
    validate: bool = True,
) -> DensityMatrix:
    """Apply the selective dual-basis map and renormalize."""
    L, n, R = _check_channel(phi, rho)
    out, Z = K.channel_apply(rho.mat, phi.basis.vectors, phi.basis.duals, L, n, R)
    if Z <= zmin:
        raise ValueError(f"channel normalizer {Z:.3e} vanishes (<= {zmin:.1e})")
    return make_density(out / Z, rho.dims, validate=validate)


def is_fixed_point(
    phi: ObliqueChannel,
    rho: DensityMatrix,
    tol: float = FIXED_POINT_TOL,
    norm: str = "max",
) -> tuple[bool, float]:
    """Whether Phi(rho) = rho within `tol`; always returns the residual too."""
    L, n, R = _check_channel(phi, rho)
    if norm == "max":
        res = float(K.residual_max(rho.mat, phi.basis.vectors, phi.basis.duals, L, n, R))
    elif norm == "fro":
        out = apply_channel(phi, rho, validate=False)
        res = float(np.linalg.norm(out.mat - rho.mat))
    else:
        raise ValueError(f"unknown norm {norm!r} (use 'max' or 'fro')")
    return res <= tol, res


class ZodComponent(NamedTuple):
    index: int
    weight: float
    state: DensityMatrix


def decompose_fixed_point(
    phi: ObliqueChannel,
    rho: DensityMatrix,
    tol: float = FIXED_POINT_TOL,
    drop: float = ZERO_WEIGHT,
) -> list[ZodComponent]:
    """Extract weights and conditional states of a channel fixed point.

    The weights are the normalized traces of the dual compressions
    <d_i| rho |d_i>; components below `drop` are omitted but the surviving
    entries keep their basis index.
    """
    ok, res = is_fixed_point(phi, rho, tol)
    if not ok:
        raise ValueError(f"state is not a fixed point: residual {res:.3e} > {tol:.1e}")
    L, n, R = _check_channel(phi, rho)
    B = K.channel_blocks(rho.mat, phi.basis.duals, L, n, R)
    traces = np.array([float(np.trace(B[i]).real) for i in range(n)])
    Z = float(np.sum(traces))
    rest_dims = rho.dims[: phi.target] + rho.dims[phi.target + 1 :]
    out: list[ZodComponent] = []
    for i in range(n):
        p = traces[i] / Z
        if p < drop:
            continue
        sigma = make_density(B[i] / traces[i], rest_dims, validate=False)
        out.append(ZodComponent(index=i, weight=p, state=sigma))
    return out


def embed_blocks(
    basis: ObliqueBasis,
    weights,
    blocks,
    dims,
    target: int = 0,
) -> np.ndarray:
    """Assemble sum_i w_i |v_i><v_i| (x)_target block_i as a full matrix."""
    dims = tuple(int(d) for d in dims)
    L, n, R = _split_dims(dims, target)
    V = basis.vectors
    M = L * R
    stack = np.zeros((n, M, M), dtype=np.complex128)
    for i, b in enumerate(blocks):
        stack[i] = np.asarray(b, dtype=np.complex128) * weights[i]
    out = np.einsum("pi,qi,iab->pqab", V, V.conj(), stack)
    out = out.reshape(n, n, L, R, L, R)
    out = np.einsum("pqlrms->lprmqs", out).reshape(L * n * R, L * n * R)
    return out


def apply_composite(
    comp: CompositeChannel,
    rho: DensityMatrix,
    *,
    zmin: float = 1e-12,
    validate: bool = True,
) -> DensityMatrix:
    """Apply the member channels in sequence (order does not matter)."""
    out = rho
    for phi in comp.channels:
        out = apply_channel(phi, out, zmin=zmin, validate=False)
    if validate:
        out = make_density(np.array(out.mat), out.dims)
    return out


def composite_residual(comp: CompositeChannel, rho: DensityMatrix) -> float:
    out = apply_composite(comp, rho, validate=False)
    return float(np.max(np.abs(out.mat - rho.mat)))

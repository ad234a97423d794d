"""Dense complex linear algebra for multipartite density matrices.

Construction and validation of density matrices with a subsystem-dimension
signature, tensor products, partial traces, spectral entropy and mutual
information. All logarithms are base 2; entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import kernels as K

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
ENTROPY_CLAMP = 1e-12
MAX_ORDER = 4096


@dataclass(frozen=True)
class DensityMatrix:
    """A state on a multipartite system.

    `dims` lists the subsystem dimensions in tensor order; `mat` is the
    (prod dims) x (prod dims) matrix, stored read-only. `tags` carries
    provenance markers set by constructors (e.g. "separable").
    """

    dims: tuple[int, ...]
    mat: np.ndarray
    tags: tuple[str, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return self.mat.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


def make_density(mat: np.ndarray, dims, *, tags=(), validate: bool = True) -> DensityMatrix:
    """Build a DensityMatrix, checking hermiticity, unit trace and positivity.

    Raises ValueError when an invariant fails; the message carries the
    offending residual.
    """
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    dims = tuple(int(d) for d in dims)
    if any(d < 2 for d in dims):
        raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
    order = int(np.prod(dims))
    if order > MAX_ORDER:
        raise ValueError(f"matrix order {order} exceeds the cap {MAX_ORDER}")
    if mat.shape != (order, order):
        raise ValueError(f"matrix shape {mat.shape} does not match dims {dims} (order {order})")
    if validate:
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max |M - M^dag| = {herm:.3e}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 by {abs(tr - 1.0):.3e}")
        wmin = float(np.linalg.eigvalsh(mat)[0])
        if wmin < -PSD_TOL:
            raise ValueError(f"not positive semidefinite: min eigenvalue {wmin:.3e}")
    mat.flags.writeable = False
    return DensityMatrix(dims=dims, mat=mat, tags=tuple(tags))


def normalize(vec: np.ndarray) -> np.ndarray:
    """Unit-normalize a state vector."""
    vec = np.asarray(vec, dtype=np.complex128)
    nrm = float(np.linalg.norm(vec))
    if nrm < 1e-300:
        raise ValueError("cannot normalize the zero vector")
    return vec / nrm


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector |v><v| of a (normalized) vector."""
    v = normalize(vec)
    return np.outer(v, v.conj())


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def tensor_all(factors) -> np.ndarray:
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.complex128))
    return out


def _check_subsystems(rho: DensityMatrix, indices) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    if len(idx) == 0:
        raise ValueError("need at least one subsystem index")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate subsystem indices in {idx}")
    for i in idx:
        if not 0 <= i < rho.n_subsystems:
            raise ValueError(f"subsystem index {i} out of range for dims {rho.dims}")
    return idx


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every subsystem not in `keep` (kept order follows `dims`)."""
    idx = sorted(_check_subsystems(rho, keep))
    mask = np.zeros(rho.n_subsystems, dtype=np.bool_)
    mask[list(idx)] = True
    dims_arr = np.asarray(rho.dims, dtype=np.int64)
    red = K.ptrace(rho.mat, dims_arr, mask)
    new_dims = tuple(rho.dims[i] for i in idx)
    return make_density(red, new_dims, validate=False)


def von_neumann_entropy(rho: DensityMatrix, clamp: float = ENTROPY_CLAMP) -> float:
    """Entropy -tr[rho log2 rho] in bits; eigenvalues <= `clamp` contribute 0."""
    return float(K.entropy_eigs(rho.mat, clamp))


def _group_array(rho: DensityMatrix, partition) -> tuple[np.ndarray, int]:
    groups = [tuple(int(i) for i in g) for g in partition]
    seen: set[int] = set()
    for g in groups:
        if not g:
            raise ValueError("empty group in partition")
        for i in g:
            if i in seen:
                raise ValueError(f"subsystem {i} appears in more than one group")
            if not 0 <= i < rho.n_subsystems:
                raise ValueError(f"subsystem index {i} out of range for dims {rho.dims}")
            seen.add(i)
    if len(seen) != rho.n_subsystems:
        missing = sorted(set(range(rho.n_subsystems)) - seen)
        raise ValueError(f"partition does not cover subsystems {missing}")
    gid = np.zeros(rho.n_subsystems, dtype=np.int64)
    for g_index, g in enumerate(groups):
        for i in g:
            gid[i] = g_index
    return gid, len(groups)


def mutual_information(rho: DensityMatrix, partition, clamp: float = ENTROPY_CLAMP) -> float:
    """sum_g S(rho_g) - S(rho) in bits, over the disjoint covering `partition`.

    For a bipartite split pass ``([0], [1])``; for the N-partite total
    correlation pass the per-subsystem split ``([0], [1], ..., [N-1])``.
    """
    gid, ngroups = _group_array(rho, partition)
    dims_arr = np.asarray(rho.dims, dtype=np.int64)
    return float(K.mutual_info(rho.mat, dims_arr, gid, ngroups, clamp))


def hermitian_eigensystem(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    m = np.asarray(m, dtype=np.complex128)
    herm = float(np.max(np.abs(m - m.conj().T)))
    if herm > 1e-8:
        raise ValueError(f"not Hermitian: max |M - M^dag| = {herm:.3e}")
    w, v = np.linalg.eigh(m)
    return w, v


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2)."""
    m = rho.mat
    return float(np.sum(m.real * m.real + m.imag * m.imag))

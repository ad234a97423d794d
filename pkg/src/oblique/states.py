"""State constructors and seeded random ensembles.

Covers the inclusion hierarchy used throughout: separable mixtures,
zero-discord states (orthonormal conditioning basis), zero-oblique-discord
states (merely normalized basis), their multipartite analogue, plus the
Ginibre state ensemble and Gaussian-vector basis ensemble used by the tests
and the conjecture search.

All randomness flows through explicit 64-bit seeds feeding numpy's PCG64
generator, so every sample stream is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (
    DEFAULT_CONDITION_CAP,
    ConditionNumberError,
    ObliqueBasis,
    dual_basis,
    embed_blocks,
)
from .qmat import DensityMatrix, make_density, projector, tensor

WEIGHT_TOL = 1e-12


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < -WEIGHT_TOL):
        raise ValueError(f"negative weight in {w}")
    if abs(float(np.sum(w)) - 1.0) > WEIGHT_TOL:
        raise ValueError(f"weights sum to {float(np.sum(w))}, expected 1")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True)
class SeparableSpec:
    """Convex mixture sum_i p_i a_i (x) b_i of product states."""

    weights: tuple[float, ...]
    a_states: tuple[DensityMatrix, ...]
    b_states: tuple[DensityMatrix, ...]


@dataclass(frozen=True)
class ZodSpec:
    """sum_i p_i |v_i><v_i| (x) sigma_i over a normalized basis on side A."""

    basis: ObliqueBasis
    weights: tuple[float, ...]
    conditionals: tuple[DensityMatrix, ...]


@dataclass(frozen=True)
class GlobalZodSpec:
    """Joint-weight mixture of per-subsystem basis projectors."""

    bases: tuple[ObliqueBasis, ...]
    weights: np.ndarray


def build_separable(spec: SeparableSpec) -> DensityMatrix:
    w = _check_weights(spec.weights)
    if not (len(spec.a_states) == len(spec.b_states) == len(w)):
        raise ValueError("weights and factor lists must have equal length")
    a_dims = spec.a_states[0].dims
    b_dims = spec.b_states[0].dims
    for a, b in zip(spec.a_states, spec.b_states):
        if a.dims != a_dims or b.dims != b_dims:
            raise ValueError("all factors must share their subsystem dimensions")
    order = int(np.prod(a_dims)) * int(np.prod(b_dims))
    out = np.zeros((order, order), dtype=np.complex128)
    for wi, a, b in zip(w, spec.a_states, spec.b_states):
        out += wi * tensor(a.mat, b.mat)
    return make_density(out, a_dims + b_dims, tags=("separable",))


def build_zod(spec: ZodSpec, target: int = 0) -> DensityMatrix:
    """Assemble a zero-oblique-discord state from its defining pieces.

    At most basis.dim terms are allowed (one per basis vector); shorter specs
    are padded with zero weight.
    """
    n = spec.basis.dim
    if len(spec.weights) > n:
        raise ValueError(f"at most {n} terms allowed (one per basis vector), got {len(spec.weights)}")
    if len(spec.conditionals) != len(spec.weights):
        raise ValueError("weights and conditional states must have equal length")
    w = np.zeros(n)
    w[: len(spec.weights)] = _check_weights(spec.weights)
    b_dims = spec.conditionals[0].dims
    nb = int(np.prod(b_dims))
    blocks = np.zeros((n, nb, nb), dtype=np.complex128)
    for i, sigma in enumerate(spec.conditionals):
        if sigma.dims != b_dims:
            raise ValueError("conditional states must share their dimensions")
        blocks[i] = sigma.mat
    if target == 0:
        dims = (n,) + b_dims
    else:
        dims = b_dims[:target] + (n,) + b_dims[target:]
    mat = embed_blocks(spec.basis, w, blocks, dims, target=target)
    return make_density(mat, dims, tags=("separable", "zero-oblique-discord"))


def build_global_zod(spec: GlobalZodSpec) -> DensityMatrix:
    dims = tuple(b.dim for b in spec.bases)
    w = np.asarray(spec.weights, dtype=np.float64)
    if w.shape != dims:
        raise ValueError(f"weight tensor shape {w.shape} must equal dims {dims}")
    _check_weights(w.ravel())
    projs = [
        [projector(b.vectors[:, i]) for i in range(b.dim)]
        for b in spec.bases
    ]
    order = int(np.prod(dims))
    out = np.zeros((order, order), dtype=np.complex128)
    for idx in np.ndindex(*dims):
        p = w[idx]
        if p == 0.0:
            continue
        term = projs[0][idx[0]]
        for j in range(1, len(dims)):
            term = np.kron(term, projs[j][idx[j]])
        out += p * term
    return make_density(out, dims, tags=("separable", "zero-global-oblique-discord"))


def random_density(dims, rank: int, seed) -> DensityMatrix:
    """Ginibre-induced random state G G^dag / tr on the given subsystems."""
    dims = tuple(int(d) for d in dims)
    order = int(np.prod(dims))
    if not 1 <= rank <= order:
        raise ValueError(f"rank must be in [1, {order}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((order, rank)) + 1j * rng.standard_normal((order, rank))
    mat = g @ g.conj().T
    mat /= float(np.trace(mat).real)
    return make_density(mat, dims, validate=False)


def random_oblique_basis(
    dim: int,
    seed,
    *,
    condition_margin: float = 1.0,
    condition_cap: float = DEFAULT_CONDITION_CAP,
    max_resamples: int = 100,
) -> ObliqueBasis:
    """Normalized complex-Gaussian vectors, resampled until well-conditioned.

    A draw is accepted when its condition number is at most
    ``condition_cap / condition_margin``; margins > 1 keep the ensemble away
    from the rejection cap.
    """
    if dim < 2:
        raise ValueError("basis dimension must be >= 2")
    limit = condition_cap / condition_margin
    rng = _rng(seed)
    last = np.inf
    for _ in range(max_resamples):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        g /= np.linalg.norm(g, axis=0, keepdims=True)
        try:
            basis = dual_basis(g, condition_cap=limit)
        except ConditionNumberError as err:
            last = err.condition
            continue
        return basis
    raise ConditionNumberError(last, limit)


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = _rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    ph = np.diagonal(r).copy()
    ph /= np.abs(ph)
    return q * ph


def random_zod_spec(
    n_a: int,
    b_dims,
    seed,
    *,
    condition_margin: float = 1e4,
    rank: int | None = None,
) -> ZodSpec:
    """Random zero-oblique-discord ingredients for tests and demos."""
    rng = _rng(seed)
    sub = rng.integers(0, 2**63 - 1, size=2 + n_a)
    basis = random_oblique_basis(n_a, int(sub[0]), condition_margin=condition_margin)
    w = rng.dirichlet(np.ones(n_a))
    b_dims = tuple(int(d) for d in b_dims)
    order_b = int(np.prod(b_dims))
    conds = tuple(
        random_density(b_dims, rank if rank is not None else order_b, int(sub[2 + i]))
        for i in range(n_a)
    )
    return ZodSpec(basis=basis, weights=tuple(w), conditionals=conds)


def _ket(*amps) -> np.ndarray:
    v = np.asarray(amps, dtype=np.complex128)
    return v / np.linalg.norm(v)


def hierarchy_witnesses() -> dict[str, DensityMatrix]:
    """Three fixed two-qubit states separating the inclusion hierarchy.

    w1: zero discord (orthonormal conditioning basis).
    w2: zero oblique discord but strictly positive discord (its conditioning
        basis {|0>, |+>} is not orthogonal).
    w3: separable but with strictly positive oblique discord (three distinct
        pure directions on A cannot be carried by a two-element basis).
    """
    zero = _ket(1, 0)
    one = _ket(0, 1)
    plus = _ket(1, 1)
    p00 = projector(zero)
    p11 = projector(one)
    ppl = projector(plus)
    w1 = 0.5 * (tensor(p00, p00) + tensor(p11, p11))
    w2 = 0.5 * (tensor(p00, p00) + tensor(ppl, p11))
    w3 = (tensor(p00, p00) + tensor(p11, p11) + tensor(ppl, ppl)) / 3.0
    return {
        "w1": make_density(w1, (2, 2), tags=("separable", "zero-discord")),
        "w2": make_density(w2, (2, 2), tags=("separable", "zero-oblique-discord")),
        "w3": make_density(w3, (2, 2), tags=("separable",)),
    }


def bell_state() -> DensityMatrix:
    """|Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2)."""
    v = _ket(1, 0, 0, 1)
    return make_density(np.outer(v, v.conj()), (2, 2))

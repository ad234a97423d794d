"""Discord-family measures defined by optimization.

Information-theoretic measures minimize the mutual-information loss
I(rho) - I(Phi rho) over measurement/channel bases; geometric measures
minimize the squared Hilbert-Schmidt distance to the relevant zero set.
Every reported value is the best feasible point found by a seeded
multi-start Nelder-Mead search and is therefore an upper bound on the
underlying infimum, never a certificate of it.

Basis search space: each basis vector is an unconstrained real 2n-vector
normalized to a unit complex vector; draws whose basis matrix exceeds the
condition cap get objective 1e6 so the simplex stays total. Orthonormal
(projective) searches use a QR chart with phase-fixed R diagonal instead.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .backend import kernels as K
from .qmat import DensityMatrix, purity

PENALTY = 1e6
CANDIDATE_THRESHOLD = -1e-6
PARAM_SPACES = ("oblique", "orthonormal")


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the shared multi-start simplex search."""

    restarts: int = 32
    max_iterations: int = 2000
    f_tolerance: float = 1e-9
    simplex_scale: float = 0.1
    param_space: str = "oblique"
    seed: int = 0
    condition_cap: float = 1e8
    inner_max_iterations: int = 500
    inner_tolerance: float = 1e-10
    entropy_clamp: float = 1e-12
    polish: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.f_tolerance <= 0 or self.inner_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.param_space not in PARAM_SPACES:
            raise ValueError(f"param_space must be one of {PARAM_SPACES}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative 64-bit integer")


@dataclass
class MeasureResult:
    measure: str
    value: float
    best_parameters: np.ndarray
    best_basis: dict
    converged: bool
    restarts_used: int
    per_restart_values: list[float]
    seed: int
    config: OptimizerConfig
    candidate: bool = False

    def to_json(self) -> dict:
        return {
            "v": 1,
            "measure": self.measure,
            "value": self.value,
            "converged": self.converged,
            "restarts": self.restarts_used,
            "per_restart": list(self.per_restart_values),
            "best_basis": self.best_basis,
            "seed": self.seed,
            "candidate": self.candidate,
            "config": asdict(self.config),
        }


def hs_distance(rho: DensityMatrix, chi: DensityMatrix) -> float:
    """Squared Hilbert-Schmidt distance tr[(rho - chi)^2]."""
    if rho.dims != chi.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {chi.dims}")
    return float(K.hs_distance(rho.mat, chi.mat))


# ---------------------------------------------------------------------------
# parameter charts


def n_params(dim: int) -> int:
    return 2 * dim * dim


def params_from_columns(m: np.ndarray) -> np.ndarray:
    """Inverse of the basis charts: column vectors -> flat real parameters."""
    n = m.shape[0]
    x = np.empty(2 * n * n)
    for i in range(n):
        off = 2 * n * i
        x[off : off + n] = m[:, i].real
        x[off + n : off + 2 * n] = m[:, i].imag
    return x


def _decode(x: np.ndarray, n: int, space: str, cap: float):
    """Returns (V, D) basis/dual columns, or None when penalized."""
    if space == "orthonormal":
        u = K.unitary_from_params(x, n)
        return u, u
    V, D, cond = K.basis_from_params(x, n, cap)
    if cond < 0.0:
        return None
    return V, D


def _split(dims: tuple[int, ...], target: int) -> tuple[int, int, int]:
    L = 1
    for d in dims[:target]:
        L *= d
    R = 1
    for d in dims[target + 1 :]:
        R *= d
    return L, dims[target], R


def _apply_decoded(mat, dims, targets, splits, decoded):
    """Apply the decoded channel of every target in sequence; None on penalty."""
    cur = mat
    for t_pos, _ in enumerate(targets):
        V, D = decoded[t_pos]
        L, n, R = splits[t_pos]
        out, Z = K.channel_apply(cur, V, D, L, n, R)
        if Z <= 1e-12:
            return None
        cur = out / Z
    return cur


def _basis_json(V: np.ndarray, orthonormal: bool) -> dict:
    n = V.shape[0]
    vecs = [[[float(V[a, i].real), float(V[a, i].imag)] for a in range(n)] for i in range(n)]
    return {"dim": n, "vectors": vecs, "orthonormal": orthonormal}


def _result_basis(x, dims, targets, space, cap) -> dict:
    parts = []
    off = 0
    for t in targets:
        n = dims[t]
        sub = x[off : off + n_params(n)]
        decoded = _decode(sub, n, space, cap)
        V = decoded[0] if decoded is not None else np.eye(n, dtype=np.complex128)
        parts.append(_basis_json(V, space == "orthonormal"))
        off += n_params(n)
    if len(parts) == 1:
        return parts[0]
    return {"bases": parts}


# ---------------------------------------------------------------------------
# multi-start engine


def _restart_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed ^ index))


def _simplex(x0: np.ndarray, scale: float) -> np.ndarray:
    n = x0.size
    sim = np.tile(x0, (n + 1, 1))
    for i in range(n):
        sim[i + 1, i] += scale
    return sim


def _nelder_mead(objective, x0, config: OptimizerConfig, scale: float | None = None):
    scale = config.simplex_scale if scale is None else scale
    return minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": config.max_iterations,
            "maxfev": 2 * config.max_iterations,
            "fatol": config.f_tolerance,
            "xatol": 1e-8,
            "initial_simplex": _simplex(np.asarray(x0, dtype=np.float64), scale),
        },
    )


def _multistart(objective, nparams: int, config: OptimizerConfig, warm_starts=()):
    """Best-of-restarts minimization; warm starts occupy the leading slots."""
    n_starts = max(config.restarts, len(warm_starts))
    per_restart: list[float] = []
    best_x = None
    best_f = np.inf
    best_idx = -1
    converged = False
    for k in range(n_starts):
        if k < len(warm_starts):
            x0 = np.asarray(warm_starts[k], dtype=np.float64)
        else:
            x0 = _restart_rng(config.seed, k).standard_normal(nparams)
        res = _nelder_mead(objective, x0, config)
        f = float(res.fun)
        per_restart.append(f)
        if f < best_f:
            best_f, best_x, best_idx = f, res.x, k
            converged = bool(res.success)
    if config.polish and best_x is not None:
        res = _nelder_mead(objective, best_x, config, scale=config.simplex_scale / 20.0)
        if float(res.fun) < best_f:
            best_f, best_x = float(res.fun), res.x
            converged = converged or bool(res.success)
            per_restart[best_idx] = best_f
    return best_f, np.asarray(best_x), per_restart, converged, best_idx


# ---------------------------------------------------------------------------
# shared setup


def _require_bipartite(rho: DensityMatrix):
    if rho.n_subsystems != 2:
        raise ValueError(f"bipartite state required, got dims {rho.dims}")


def _require_multipartite(rho: DensityMatrix):
    if rho.n_subsystems < 2:
        raise ValueError(f"at least two subsystems required, got dims {rho.dims}")


def _warm_starts(rho: DensityMatrix, targets, extra=()):
    """Identity basis and marginal-eigenbasis starting points, then extras."""
    ident = []
    marg = []
    for t in targets:
        n = rho.dims[t]
        ident.append(params_from_columns(np.eye(n, dtype=np.complex128)))
        mask = np.zeros(rho.n_subsystems, dtype=np.bool_)
        mask[t] = True
        red = K.ptrace(rho.mat, np.asarray(rho.dims, dtype=np.int64), mask)
        _, vecs = np.linalg.eigh(red)
        marg.append(params_from_columns(vecs))
    starts = [np.concatenate(ident), np.concatenate(marg)]
    starts.extend(np.asarray(e, dtype=np.float64) for e in extra)
    return starts


def _measure_scaffold(rho, targets, config):
    dims = rho.dims
    splits = [_split(dims, t) for t in targets]
    total_params = sum(n_params(dims[t]) for t in targets)
    offsets = []
    off = 0
    for t in targets:
        offsets.append(off)
        off += n_params(dims[t])
    return dims, splits, total_params, offsets


def _decode_all(x, dims, targets, offsets, space, cap):
    decoded = []
    for pos, t in enumerate(targets):
        n = dims[t]
        sub = x[offsets[pos] : offsets[pos] + n_params(n)]
        d = _decode(sub, n, space, cap)
        if d is None:
            return None
        decoded.append(d)
    return decoded


def _finish(name, rho, targets, config, best, space):
    best_f, best_x, per_restart, converged, _ = best
    return MeasureResult(
        measure=name,
        value=min(per_restart),
        best_parameters=best_x,
        best_basis=_result_basis(best_x, rho.dims, targets, space, config.condition_cap),
        converged=converged,
        restarts_used=len(per_restart),
        per_restart_values=per_restart,
        seed=config.seed,
        config=config,
    )


# ---------------------------------------------------------------------------
# information-theoretic measures


def _info_measure(name, rho, targets, config, space, extra_starts=()):
    dims, splits, total, offsets = _measure_scaffold(rho, targets, config)
    dims_arr = np.asarray(dims, dtype=np.int64)
    if len(targets) == 1:
        gid = np.asarray([0 if i == targets[0] else 1 for i in range(len(dims))], dtype=np.int64)
        ngroups = 2
    else:
        gid = np.arange(len(dims), dtype=np.int64)
        ngroups = len(dims)
    clamp = config.entropy_clamp
    base = float(K.mutual_info(rho.mat, dims_arr, gid, ngroups, clamp))
    cap = config.condition_cap

    def objective(x):
        decoded = _decode_all(x, dims, targets, offsets, space, cap)
        if decoded is None:
            return PENALTY
        cur = _apply_decoded(rho.mat, dims, targets, splits, decoded)
        if cur is None:
            return PENALTY
        return base - float(K.mutual_info(cur, dims_arr, gid, ngroups, clamp))

    warm = _warm_starts(rho, targets, extra_starts)
    best = _multistart(objective, total, config, warm)
    result = _finish(name, rho, targets, config, best, space)
    if name in ("d-o", "d-o-global") and result.value < CANDIDATE_THRESHOLD:
        result.candidate = True
    return result


def discord_info(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Minimal mutual-information loss over projective measurements on A."""
    config = config or OptimizerConfig()
    config = replace(config, param_space="orthonormal")
    _require_bipartite(rho)
    return _info_measure("discord", rho, [0], config, "orthonormal")


def discord_global(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Mutual-information loss under per-subsystem projective measurements."""
    config = config or OptimizerConfig()
    config = replace(config, param_space="orthonormal")
    _require_multipartite(rho)
    return _info_measure("discord-global", rho, list(range(rho.n_subsystems)), config, "orthonormal")


def oblique_info(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Mutual-information loss minimized over dual-basis channels on A.

    Carries no sign guarantee: a converged value below -1e-6 is flagged as a
    counterexample candidate for certification by the search harness.
    """
    config = config or OptimizerConfig()
    _require_bipartite(rho)
    return _info_measure("d-o", rho, [0], config, config.param_space)


def oblique_global_info(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Mutual-information loss under channels on every subsystem."""
    config = config or OptimizerConfig()
    _require_multipartite(rho)
    return _info_measure(
        "d-o-global", rho, list(range(rho.n_subsystems)), config, config.param_space
    )


# ---------------------------------------------------------------------------
# geometric measures


def discord_geometric(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Squared HS distance to the zero-discord set.

    For a fixed orthonormal basis the closest zero-discord state has blocks
    <a|rho|a>, so only the basis is searched.
    """
    config = config or OptimizerConfig()
    config = replace(config, param_space="orthonormal")
    _require_bipartite(rho)
    dims, splits, total, offsets = _measure_scaffold(rho, [0], config)
    L, n, R = splits[0]
    tr2 = purity(rho)

    def objective(x):
        U = K.unitary_from_params(x, n)
        B = K.channel_blocks(rho.mat, U, L, n, R)
        fit = 0.0
        for i in range(n):
            fit += float(np.sum(B[i].real ** 2 + B[i].imag ** 2))
        return tr2 - fit

    warm = _warm_starts(rho, [0])
    best = _multistart(objective, total, config, warm)
    return _finish("discord-geo", rho, [0], config, best, "orthonormal")


def discord_global_geometric(
    rho: DensityMatrix, config: OptimizerConfig | None = None
) -> MeasureResult:
    """Squared HS distance to states diagonal in an orthonormal product basis."""
    config = config or OptimizerConfig()
    config = replace(config, param_space="orthonormal")
    _require_multipartite(rho)
    targets = list(range(rho.n_subsystems))
    dims, splits, total, offsets = _measure_scaffold(rho, targets, config)
    tr2 = purity(rho)

    def objective(x):
        U = None
        for pos, t in enumerate(targets):
            n = dims[t]
            u = K.unitary_from_params(x[offsets[pos] : offsets[pos] + n_params(n)], n)
            U = u if U is None else np.kron(U, u)
        q = np.einsum("ki,kl,li->i", U.conj(), rho.mat, U).real
        return tr2 - float(np.sum(q * q))

    warm = _warm_starts(rho, targets)
    best = _multistart(objective, total, config, warm)
    return _finish("discord-global-geo", rho, targets, config, best, "orthonormal")


def oblique_geometric_phi(
    rho: DensityMatrix, config: OptimizerConfig | None = None
) -> MeasureResult:
    """Squared HS distance between rho and its own channel output, minimized."""
    config = config or OptimizerConfig()
    _require_bipartite(rho)
    space = config.param_space
    dims, splits, total, offsets = _measure_scaffold(rho, [0], config)
    L, n, R = splits[0]
    cap = config.condition_cap

    def objective(x):
        decoded = _decode(x, n, space, cap)
        if decoded is None:
            return PENALTY
        V, D = decoded
        out, Z = K.channel_apply(rho.mat, V, D, L, n, R)
        if Z <= 1e-12:
            return PENALTY
        return float(K.hs_distance(rho.mat, out / Z))

    warm = _warm_starts(rho, [0])
    best = _multistart(objective, total, config, warm)
    return _finish("d-go1", rho, [0], config, best, space)


def oblique_geometric(rho: DensityMatrix, config: OptimizerConfig | None = None) -> MeasureResult:
    """Squared HS distance to the zero-oblique-discord set.

    Outer simplex search over the basis; inner projected-gradient solve for
    the conditional blocks (PSD, total trace one). Two extra starting points
    are injected: the best orthonormal basis found by discord_geometric and
    the best channel basis found by oblique_geometric_phi, so the reported
    value never exceeds either of those measures.
    """
    config = config or OptimizerConfig()
    _require_bipartite(rho)
    dims, splits, total, offsets = _measure_scaffold(rho, [0], config)
    L, n, R = splits[0]
    tr2 = purity(rho)
    cap = config.condition_cap

    geo = discord_geometric(rho, config)
    phi = oblique_geometric_phi(rho, config)
    seeds = [geo.best_parameters, phi.best_parameters]

    def objective(x):
        decoded = _decode(x, n, "oblique", cap)
        if decoded is None:
            return PENALTY
        V, D = decoded
        gram = V.conj().T @ V
        G = np.ascontiguousarray(gram.real**2 + gram.imag**2)
        Rb = K.channel_blocks(rho.mat, V, L, n, R)
        M0 = K.channel_blocks(rho.mat, D, L, n, R)
        Z = float(np.trace(M0.sum(axis=0)).real)
        if Z <= 1e-12:
            return PENALTY
        M0 = M0 / Z
        f, _ = K.zod_inner(
            G, Rb, M0, tr2, config.inner_max_iterations, config.inner_tolerance
        )
        return float(f)

    warm = _warm_starts(rho, [0], seeds)
    best = _multistart(objective, total, config, warm)
    return _finish("d-go", rho, [0], config, best, "oblique")


def oblique_global_geometric(
    rho: DensityMatrix, config: OptimizerConfig | None = None
) -> MeasureResult:
    """Squared HS distance between rho and its all-subsystem channel output."""
    config = config or OptimizerConfig()
    _require_multipartite(rho)
    space = config.param_space
    targets = list(range(rho.n_subsystems))
    dims, splits, total, offsets = _measure_scaffold(rho, targets, config)
    cap = config.condition_cap

    def objective(x):
        decoded = _decode_all(x, dims, targets, offsets, space, cap)
        if decoded is None:
            return PENALTY
        cur = _apply_decoded(rho.mat, dims, targets, splits, decoded)
        if cur is None:
            return PENALTY
        return float(K.hs_distance(rho.mat, cur))

    warm = _warm_starts(rho, targets)
    best = _multistart(objective, total, config, warm)
    return _finish("d-go-global", rho, targets, config, best, space)


MEASURES = {
    "discord": discord_info,
    "discord-geo": discord_geometric,
    "discord-global": discord_global,
    "discord-global-geo": discord_global_geometric,
    "d-go": oblique_geometric,
    "d-go1": oblique_geometric_phi,
    "d-o": oblique_info,
    "d-go-global": oblique_global_geometric,
    "d-o-global": oblique_global_info,
}

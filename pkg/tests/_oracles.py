"""Independent oracles used by the tests.

Everything here is deliberately implemented from scratch with plain numpy
(dense kron/reshape/eigvalsh), so it shares no code path with the package
kernels it checks.
"""

from __future__ import annotations

import itertools

import numpy as np

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def entropy(mat: np.ndarray, clamp: float = 1e-12) -> float:
    w = np.linalg.eigvalsh(mat)
    w = w[w > clamp]
    return float(-np.sum(w * np.log2(w))) if w.size else 0.0


def ptrace_dense(mat: np.ndarray, dims, keep) -> np.ndarray:
    dims = tuple(dims)
    N = len(dims)
    keep = sorted(keep)
    lose = [i for i in range(N) if i not in keep]
    t = mat.reshape(dims * 2)
    perm = keep + [N + i for i in keep] + lose + [N + i for i in lose]
    t = np.transpose(t, perm)
    dk = int(np.prod([dims[i] for i in keep]))
    dl = int(np.prod([dims[i] for i in lose])) if lose else 1
    t = t.reshape(dk, dk, dl, dl)
    return np.trace(t, axis1=2, axis2=3)


def mutual_info_dense(mat: np.ndarray, dims, left, right, clamp: float = 1e-12) -> float:
    a = ptrace_dense(mat, dims, left)
    b = ptrace_dense(mat, dims, right)
    return entropy(a, clamp) + entropy(b, clamp) - entropy(mat, clamp)


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)], dtype=np.complex128
    )


def qubit_frame(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """An orthonormal qubit measurement basis from two angles."""
    m0 = bloch_vector(theta, phi)
    m1 = np.array([np.sin(theta / 2.0), -np.exp(1j * phi) * np.cos(theta / 2.0)])
    return m0, m1


def projective_measure_a(rho4: np.ndarray, frame) -> np.ndarray:
    out = np.zeros_like(rho4)
    for v in frame:
        p = np.kron(np.outer(v, v.conj()), np.eye(2))
        out += p @ rho4 @ p
    return out


def discord_grid_bell(rho4: np.ndarray, n_theta: int = 41, n_phi: int = 41) -> float:
    """Grid minimum of the mutual-information loss over qubit measurements on A."""
    base = mutual_info_dense(rho4, (2, 2), [0], [1])
    best = np.inf
    for theta in np.linspace(0.0, np.pi, n_theta):
        for phi in np.linspace(0.0, 2 * np.pi, n_phi):
            out = projective_measure_a(rho4, qubit_frame(theta, phi))
            best = min(best, base - mutual_info_dense(out, (2, 2), [0], [1]))
    return best


def geometric_discord_closed_form(rho4: np.ndarray) -> float:
    """Two-qubit closed form 1/4 (|x|^2 + |T|^2 - k_max) for the A-side measure."""
    x = np.array(
        [np.trace(rho4 @ np.kron(PAULI[a], np.eye(2))).real for a in "xyz"]
    )
    T = np.array(
        [
            [np.trace(rho4 @ np.kron(PAULI[a], PAULI[b])).real for b in "xyz"]
            for a in "xyz"
        ]
    )
    K = np.outer(x, x) + T @ T.T
    k_max = float(np.linalg.eigvalsh(K)[-1])
    return 0.25 * (float(x @ x) + float(np.sum(T * T)) - k_max)


def oblique_pair_channel(rho4: np.ndarray, v0: np.ndarray, v1: np.ndarray) -> np.ndarray:
    """Dense two-vector dual-basis channel on A, implemented from scratch."""
    S = np.column_stack([v0, v1])
    D = np.linalg.inv(S.conj().T)
    num = np.zeros_like(rho4)
    for i in range(2):
        A = np.kron(np.outer(S[:, i], D[:, i].conj()), np.eye(rho4.shape[0] // 2))
        num += A @ rho4 @ A.conj().T
    Z = np.trace(num).real
    return num / Z


def refine_grid_min(f, bounds, points: int = 9, stages: int = 4, shrink: float = 0.3):
    """Nested full-grid minimization over a small box; returns (value, argmin).

    A brute-force alternative to the simplex optimizers: evaluate f on a
    regular grid, shrink the box around the best point, repeat.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    best_val, best_x = np.inf, None
    for _ in range(stages):
        axes = [np.linspace(lo[k], hi[k], points) for k in range(len(bounds))]
        for combo in itertools.product(*axes):
            val = f(np.array(combo))
            if val < best_val:
                best_val, best_x = val, np.array(combo)
        span = (hi - lo) * shrink
        lo = best_x - span / 2.0
        hi = best_x + span / 2.0
    return best_val, best_x

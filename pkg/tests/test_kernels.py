"""Cross-checks between the numba and pure-numpy kernel lanes."""

import numpy as np
import pytest

from oblique import kernels_numpy as knp
from oblique.measures import params_from_columns

knb = pytest.importorskip("oblique.kernels_numba")


def _case(dims, seed):
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    n = dims[0]
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    s = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    s /= np.linalg.norm(s, axis=0)
    D = np.ascontiguousarray(np.linalg.inv(s.conj().T))
    return np.ascontiguousarray(rho), np.ascontiguousarray(s), D, n, d // n


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (2, 2, 2), (3, 2, 2)])
def test_channel_apply_lanes_agree(dims):
    rho, V, D, n, R = _case(dims, 7)
    o1, z1 = knp.channel_apply(rho, V, D, 1, n, R)
    o2, z2 = knb.channel_apply(rho, V, D, 1, n, R)
    assert abs(z1 - z2) <= 1e-12
    assert np.max(np.abs(o1 - o2)) <= 1e-12


@pytest.mark.parametrize("dims", [(2, 2), (2, 3, 2), (3, 3)])
def test_ptrace_lanes_agree(dims):
    rho, *_ = _case(dims, 8)
    dims_arr = np.asarray(dims, dtype=np.int64)
    for bits in range(1, 2 ** len(dims) - 1):
        keep = np.array([(bits >> i) & 1 == 1 for i in range(len(dims))], dtype=np.bool_)
        a = knp.ptrace(rho, dims_arr, keep)
        b = knb.ptrace(rho, dims_arr, keep)
        assert np.max(np.abs(a - b)) <= 1e-13


def test_entropy_and_mi_lanes_agree():
    for dims in [(2, 2), (2, 3), (3, 3)]:
        rho, *_ = _case(dims, 9)
        dims_arr = np.asarray(dims, dtype=np.int64)
        gid = np.asarray([0, 1], dtype=np.int64)
        assert knp.entropy_eigs(rho, 1e-12) == pytest.approx(
            knb.entropy_eigs(rho, 1e-12), abs=1e-12
        )
        assert knp.mutual_info(rho, dims_arr, gid, 2, 1e-12) == pytest.approx(
            knb.mutual_info(rho, dims_arr, gid, 2, 1e-12), abs=1e-12
        )


def test_residual_and_hs_lanes_agree():
    rho, V, D, n, R = _case((2, 3), 10)
    assert knp.residual_max(rho, V, D, 1, n, R) == pytest.approx(
        knb.residual_max(rho, V, D, 1, n, R), abs=1e-13
    )
    other, *_ = _case((2, 3), 11)
    assert knp.hs_distance(rho, other) == pytest.approx(
        knb.hs_distance(rho, other), abs=1e-13
    )


def test_charts_lanes_agree():
    rng = np.random.default_rng(12)
    for n in (2, 3):
        x = rng.standard_normal(2 * n * n)
        v1, d1, c1 = knp.basis_from_params(x, n, 1e8)
        v2, d2, c2 = knb.basis_from_params(x, n, 1e8)
        assert abs(c1 - c2) <= 1e-9
        assert np.max(np.abs(v1 - v2)) <= 1e-12
        assert np.max(np.abs(d1 - d2)) <= 1e-9
        u1 = knp.unitary_from_params(x, n)
        u2 = knb.unitary_from_params(x, n)
        assert np.max(np.abs(u1 - u2)) <= 1e-12


def test_chart_round_trips_unitary():
    rng = np.random.default_rng(13)
    for n in (2, 3):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        back = knp.unitary_from_params(params_from_columns(q), n)
        assert np.max(np.abs(back - q)) <= 1e-12


def test_chart_penalizes_over_cap():
    x = params_from_columns(np.column_stack([[1.0, 0.0], [1.0, 1e-10]]))
    _, _, cond = knp.basis_from_params(x, 2, 1e8)
    assert cond < 0.0
    _, _, cond_nb = knb.basis_from_params(x, 2, 1e8)
    assert cond_nb < 0.0


def test_zod_inner_lanes_agree_and_are_feasible():
    rho, V, D, n, R = _case((2, 3), 14)
    gram = V.conj().T @ V
    G = np.ascontiguousarray(gram.real**2 + gram.imag**2)
    Rb = knp.channel_blocks(rho, V, 1, n, R)
    M0 = knp.channel_blocks(rho, D, 1, n, R)
    M0 = M0 / np.trace(M0.sum(axis=0)).real
    f1, m1 = knp.zod_inner(G, Rb, M0, float(np.sum(np.abs(rho) ** 2)), 500, 1e-10)
    f2, m2 = knb.zod_inner(G, Rb, M0, float(np.sum(np.abs(rho) ** 2)), 500, 1e-10)
    assert f1 == pytest.approx(f2, abs=1e-9)
    for m in (m1, m2):
        total = 0.0
        for i in range(n):
            w = np.linalg.eigvalsh(m[i])
            assert w[0] >= -1e-12
            total += w.sum()
        assert total == pytest.approx(1.0, abs=1e-10)


def test_zod_inner_never_exceeds_start():
    # the inner solve is monotone: it can only improve on its feasible start
    rho, V, D, n, R = _case((2, 2), 15)
    gram = V.conj().T @ V
    G = np.ascontiguousarray(gram.real**2 + gram.imag**2)
    Rb = knp.channel_blocks(rho, V, 1, n, R)
    M0 = knp.channel_blocks(rho, D, 1, n, R)
    Z = np.trace(M0.sum(axis=0)).real
    M0 = M0 / Z
    tr2 = float(np.sum(np.abs(rho) ** 2))
    start = knp._zod_objective(G, Rb, M0, tr2)
    f, _ = knp.zod_inner(G, Rb, M0, tr2, 500, 1e-10)
    assert f <= start + 1e-12

import numpy as np
import pytest

from oblique import states
from oblique.backend import kernels as K
from oblique.channels import (
    CompositeChannel,
    ConditionNumberError,
    ObliqueChannel,
    apply_channel,
    apply_composite,
    biorthogonality_residual,
    composite_residual,
    decompose_fixed_point,
    dual_basis,
    embed_blocks,
    is_fixed_point,
)
from oblique.qmat import make_density, projector, tensor

from _oracles import oblique_pair_channel

KET0 = np.array([1.0, 0.0], dtype=np.complex128)
KET1 = np.array([0.0, 1.0], dtype=np.complex128)
PLUS = np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0)


def zod_basis():
    return dual_basis(np.column_stack([KET0, PLUS]))


def test_dual_of_orthonormal_is_itself():
    b = dual_basis(np.eye(3, dtype=np.complex128))
    assert np.max(np.abs(b.duals - b.vectors)) <= 1e-12
    assert b.gram_condition == pytest.approx(1.0, abs=1e-12)


def test_dual_of_zero_plus_pair():
    b = zod_basis()
    # solve the biorthogonality system independently: S^dag D = I
    want = np.linalg.solve(np.column_stack([KET0, PLUS]).conj().T, np.eye(2))
    assert np.max(np.abs(b.duals - want)) <= 1e-12
    assert np.allclose(b.duals[:, 0], [1.0, -1.0])
    assert np.allclose(b.duals[:, 1], [0.0, np.sqrt(2.0)])


def test_dual_rejects_dependent_set():
    v = KET0
    w = KET0 * np.exp(1j * 0.3)
    with pytest.raises(ConditionNumberError) as err:
        dual_basis(np.column_stack([v, w]))
    assert err.value.condition > 1e8


def test_dual_rejects_non_normalized():
    with pytest.raises(ValueError, match="unit-norm"):
        dual_basis(np.column_stack([2.0 * KET0, KET1]))


def test_biorthogonality_random_bases():
    worst = 0.0
    for k in range(60):
        dim = 2 + k % 3
        b = states.random_oblique_basis(dim, seed=900 + k)
        worst = max(worst, biorthogonality_residual(b))
    assert worst <= 1e-9


def test_double_dual_recovers_rays():
    for k in range(20):
        dim = 2 + k % 3
        b = states.random_oblique_basis(dim, seed=1300 + k, condition_margin=1e3)
        renorm = b.duals / np.linalg.norm(b.duals, axis=0, keepdims=True)
        bb = dual_basis(renorm)
        double = bb.duals / np.linalg.norm(bb.duals, axis=0, keepdims=True)
        for i in range(dim):
            overlap = abs(np.vdot(b.vectors[:, i], double[:, i]))
            assert overlap == pytest.approx(1.0, abs=1e-8)


def test_channel_computational_basis_on_bell(bell):
    phi = ObliqueChannel(0, dual_basis(np.eye(2, dtype=np.complex128)))
    out = apply_channel(phi, bell)
    want = np.diag([0.5, 0.0, 0.0, 0.5]).astype(np.complex128)
    assert np.max(np.abs(out.mat - want)) <= 1e-12


def test_channel_fixes_zod_state():
    spec = states.random_zod_spec(2, (2,), seed=21)
    rho = states.build_zod(spec)
    out = apply_channel(ObliqueChannel(0, spec.basis), rho)
    assert np.max(np.abs(out.mat - rho.mat)) <= 1e-12


def test_channel_matches_dense_oracle_on_bell(bell):
    b = zod_basis()
    out = apply_channel(ObliqueChannel(0, b), bell)
    want = oblique_pair_channel(bell.mat, KET0, PLUS)
    assert np.max(np.abs(out.mat - want)) <= 1e-12


def test_channel_output_validity_random():
    for k in range(40):
        dims = [(2, 2), (2, 3), (3, 2), (2, 2, 2)][k % 4]
        rho = states.random_density(dims, int(np.prod(dims)), seed=2000 + k)
        b = states.random_oblique_basis(dims[0], seed=3000 + k, condition_margin=1e4)
        out = apply_channel(ObliqueChannel(0, b), rho)  # validates internally
        assert abs(np.trace(out.mat) - 1.0) <= 1e-10


def test_channel_idempotent():
    for k in range(20):
        rho = states.random_density((2, 3), 6, seed=4000 + k)
        b = states.random_oblique_basis(2, seed=5000 + k, condition_margin=1e4)
        phi = ObliqueChannel(0, b)
        once = apply_channel(phi, rho)
        twice = apply_channel(phi, once)
        assert np.max(np.abs(twice.mat - once.mat)) <= 1e-9


def test_channel_scale_invariance():
    rho = states.random_density((2, 2), 4, seed=22)
    b = states.random_oblique_basis(2, seed=23)
    out1, z1 = K.channel_apply(rho.mat, b.vectors, b.duals, 1, 2, 2)
    for c in (0.5, 2.0):
        outc, zc = K.channel_apply(c * rho.mat, b.vectors, b.duals, 1, 2, 2)
        assert np.max(np.abs(outc / zc - out1 / z1)) <= 1e-12


def test_channel_orthonormal_reduces_to_projective_measurement():
    for k in range(10):
        rho = states.random_density((2, 3), 6, seed=6000 + k)
        u = states.haar_unitary(2, seed=6100 + k)
        out = apply_channel(ObliqueChannel(0, dual_basis(u)), rho)
        want = np.zeros_like(rho.mat)
        for i in range(2):
            p = np.kron(projector(u[:, i]), np.eye(3))
            want += p @ rho.mat @ p
        assert np.max(np.abs(out.mat - want)) <= 1e-10


def test_channel_dimension_mismatch():
    rho = states.random_density((3, 2), 6, seed=24)
    b = states.random_oblique_basis(2, seed=25)
    with pytest.raises(ValueError, match="dimension"):
        apply_channel(ObliqueChannel(0, b), rho)


def test_channel_vanishing_denominator_guard():
    rho = states.random_density((2, 2), 4, seed=26)
    b = states.random_oblique_basis(2, seed=27)
    with pytest.raises(ValueError, match="normalizer"):
        apply_channel(ObliqueChannel(0, b), rho, zmin=1e9)


def test_fixed_point_verdicts():
    spec = states.random_zod_spec(2, (2,), seed=28)
    rho = states.build_zod(spec)
    ok, res = is_fixed_point(ObliqueChannel(0, spec.basis), rho, 1e-10)
    assert ok and res <= 1e-10


def test_bell_is_never_a_fixed_point(bell):
    worst = np.inf
    for k in range(100):
        b = states.random_oblique_basis(2, seed=7000 + k)
        ok, res = is_fixed_point(ObliqueChannel(0, b), bell, 1e-8)
        assert not ok
        worst = min(worst, res)
    assert worst > 0.1


def test_zero_discord_state_is_fixed():
    u = states.haar_unitary(2, seed=29)
    basis = dual_basis(u)
    spec = states.ZodSpec(
        basis=basis,
        weights=(0.3, 0.7),
        conditionals=(
            states.random_density((2,), 2, seed=30),
            states.random_density((2,), 2, seed=31),
        ),
    )
    rho = states.build_zod(spec)
    ok, res = is_fixed_point(ObliqueChannel(0, basis), rho, 1e-10)
    assert ok and res <= 1e-10


def test_decompose_round_trip():
    spec = states.random_zod_spec(3, (2,), seed=32)
    rho = states.build_zod(spec)
    comps = decompose_fixed_point(ObliqueChannel(0, spec.basis), rho)
    got = {c.index: c for c in comps}
    for i, w in enumerate(spec.weights):
        if w < 1e-12:
            assert i not in got
            continue
        assert got[i].weight == pytest.approx(w, abs=1e-10)
        assert np.max(np.abs(got[i].state.mat - spec.conditionals[i].mat)) <= 1e-8
    rebuilt = embed_blocks(
        spec.basis,
        [c.weight for c in comps],
        [c.state.mat for c in comps],
        rho.dims,
    )
    assert np.max(np.abs(rebuilt - rho.mat)) <= 1e-8


def test_decompose_single_term():
    basis = zod_basis()
    sigma = states.random_density((2,), 2, seed=33)
    rho = make_density(tensor(projector(KET0), sigma.mat), (2, 2))
    comps = decompose_fixed_point(ObliqueChannel(0, basis), rho)
    assert [c.index for c in comps] == [0]
    assert comps[0].weight == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(comps[0].state.mat - sigma.mat)) <= 1e-10


def test_decompose_non_orthogonal_pair():
    basis = zod_basis()
    rho0 = make_density(projector(KET0), (2,))
    rho1 = make_density(projector(KET1), (2,))
    spec = states.ZodSpec(basis=basis, weights=(0.5, 0.5), conditionals=(rho0, rho1))
    rho = states.build_zod(spec)
    comps = decompose_fixed_point(ObliqueChannel(0, basis), rho)
    assert [c.index for c in comps] == [0, 1]
    assert comps[0].weight == pytest.approx(0.5, abs=1e-12)
    assert np.max(np.abs(comps[0].state.mat - rho0.mat)) <= 1e-10
    assert np.max(np.abs(comps[1].state.mat - rho1.mat)) <= 1e-10


def test_decompose_rejects_non_fixed_points(bell):
    with pytest.raises(ValueError, match="not a fixed point"):
        decompose_fixed_point(ObliqueChannel(0, zod_basis()), bell)


def test_composite_fixes_classical_state():
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = 0.5
    m[3, 3] = 0.5
    rho = make_density(m, (2, 2))
    eye = dual_basis(np.eye(2, dtype=np.complex128))
    comp = CompositeChannel((ObliqueChannel(0, eye), ObliqueChannel(1, eye)))
    out = apply_composite(comp, rho)
    assert np.max(np.abs(out.mat - rho.mat)) <= 1e-12


def test_composite_order_independence():
    for k in range(15):
        rho = states.random_density((2, 2, 2), 8, seed=8000 + k)
        b0 = states.random_oblique_basis(2, seed=8100 + k, condition_margin=1e4)
        b1 = states.random_oblique_basis(2, seed=8200 + k, condition_margin=1e4)
        fwd = apply_composite(
            CompositeChannel((ObliqueChannel(0, b0), ObliqueChannel(2, b1))), rho
        )
        rev = apply_composite(
            CompositeChannel((ObliqueChannel(2, b1), ObliqueChannel(0, b0))), rho
        )
        assert np.max(np.abs(fwd.mat - rev.mat)) <= 1e-10


def test_composite_fixes_global_zod():
    rng = np.random.default_rng(34)
    bases = tuple(states.random_oblique_basis(2, seed=8300 + j, condition_margin=1e4) for j in range(3))
    w = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
    rho = states.build_global_zod(states.GlobalZodSpec(bases=bases, weights=w))
    comp = CompositeChannel(tuple(ObliqueChannel(j, bases[j]) for j in range(3)))
    assert composite_residual(comp, rho) <= 1e-9


def test_composite_rejects_duplicate_targets():
    b = states.random_oblique_basis(2, seed=35)
    with pytest.raises(ValueError, match="distinct"):
        CompositeChannel((ObliqueChannel(0, b), ObliqueChannel(0, b)))

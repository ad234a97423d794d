import json

import numpy as np
import pytest

from oblique import serialize, states
from oblique.channels import dual_basis


def test_state_round_trip_is_bit_exact():
    rho = states.random_density((2, 3), 4, seed=1)
    back = serialize.state_from_json(serialize.state_to_json(rho))
    assert back.dims == rho.dims
    assert back.mat.tobytes() == rho.mat.tobytes()


def test_state_reader_reports_expected_length():
    obj = serialize.state_to_json(states.random_density((2, 2), 2, seed=2))
    obj["data"] = obj["data"][:-1]
    with pytest.raises(ValueError, match="expected 16 entries, got 15"):
        serialize.state_from_json(obj)


def test_state_reader_rejects_bad_pairs():
    with pytest.raises(ValueError, match="pairs"):
        serialize.state_from_json({"dims": [2], "data": [[1.0], [0.0, 0.0], [0, 0], [1, 0]]})


def test_state_reader_validates_invariants():
    obj = {"dims": [2], "data": [[0.9, 0.0], [0.0, 0.0], [0.0, 0.0], [0.9, 0.0]]}
    with pytest.raises(ValueError, match="trace"):
        serialize.state_from_json(obj)


def test_basis_round_trip_recomputes_duals():
    basis = states.random_oblique_basis(3, seed=3)
    back = serialize.basis_from_json(serialize.basis_to_json(basis))
    assert np.max(np.abs(back.vectors - basis.vectors)) == 0.0
    assert np.max(np.abs(back.duals - basis.duals)) <= 1e-12


def test_basis_reader_rejects_wrong_counts():
    basis = states.random_oblique_basis(2, seed=4)
    obj = serialize.basis_to_json(basis)
    with pytest.raises(ValueError, match="expected 2 vectors"):
        serialize.basis_from_json({"dim": 2, "vectors": obj["vectors"][:1]})
    bad = {"dim": 2, "vectors": [obj["vectors"][0], obj["vectors"][1][:1]]}
    with pytest.raises(ValueError, match="expected 2 entries"):
        serialize.basis_from_json(bad)


def test_schemas_load_and_validate_samples():
    jsonschema = pytest.importorskip("jsonschema")
    rho = states.random_density((2, 2), 2, seed=5)
    jsonschema.validate(serialize.state_to_json(rho), serialize.schema_text("state"))
    basis = dual_basis(np.eye(2, dtype=np.complex128))
    jsonschema.validate(serialize.basis_to_json(basis), serialize.schema_text("basis"))


def test_dump_json_is_deterministic():
    obj = {"v": 1, "b": [1.0, 2.5e-17], "a": "x"}
    assert serialize.dump_json(obj) == serialize.dump_json(json.loads(serialize.dump_json(obj)))


def test_zod_spec_round_trip():
    spec = states.random_zod_spec(2, (3,), seed=6)
    back = serialize.zod_spec_from_json(
        json.loads(json.dumps(serialize.zod_spec_to_json(spec)))
    )
    assert np.max(np.abs(back.basis.vectors - spec.basis.vectors)) == 0.0
    assert back.weights == spec.weights
    assert all(
        a.mat.tobytes() == b.mat.tobytes()
        for a, b in zip(back.conditionals, spec.conditionals)
    )
    assert np.max(np.abs(states.build_zod(back).mat - states.build_zod(spec).mat)) == 0.0


def test_separable_spec_round_trip():
    spec = states.SeparableSpec(
        weights=(0.25, 0.75),
        a_states=(states.random_density((2,), 2, seed=7), states.random_density((2,), 1, seed=8)),
        b_states=(states.random_density((3,), 3, seed=9), states.random_density((3,), 2, seed=10)),
    )
    back = serialize.separable_spec_from_json(serialize.separable_spec_to_json(spec))
    assert np.max(np.abs(states.build_separable(back).mat - states.build_separable(spec).mat)) == 0.0


def test_global_zod_spec_round_trip_and_length_check():
    rng = np.random.default_rng(11)
    spec = states.GlobalZodSpec(
        bases=(states.random_oblique_basis(2, seed=12), states.random_oblique_basis(3, seed=13)),
        weights=rng.dirichlet(np.ones(6)).reshape(2, 3),
    )
    obj = serialize.global_zod_spec_to_json(spec)
    back = serialize.global_zod_spec_from_json(obj)
    assert np.max(np.abs(states.build_global_zod(back).mat - states.build_global_zod(spec).mat)) == 0.0
    obj["weights"] = obj["weights"][:-1]
    with pytest.raises(ValueError, match="expected 6 entries"):
        serialize.global_zod_spec_from_json(obj)

"""JSON wire formats for states and bases, plus schema access.

State files: ``{"dims": [2, 2], "data": [[re, im], ...]}`` with the matrix
entries row-major. Basis files: ``{"dim": 2, "vectors": [[[re, im], ...],
...]}``. Duals are never serialized; they are recomputed on load so a file
can never carry an inconsistent pair.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .channels import DEFAULT_CONDITION_CAP, ObliqueBasis, dual_basis
from .qmat import DensityMatrix, make_density


def _pairs(flat: np.ndarray) -> list:
    return [[float(x.real), float(x.imag)] for x in flat]


def _from_pairs(data, expected: int, what: str) -> np.ndarray:
    if not isinstance(data, list) or any(
        not isinstance(p, list) or len(p) != 2 for p in data
    ):
        raise ValueError(f"{what}: entries must be [re, im] pairs")
    if len(data) != expected:
        raise ValueError(f"{what}: expected {expected} entries, got {len(data)}")
    return np.array([complex(re, im) for re, im in data], dtype=np.complex128)


def state_to_json(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "data": _pairs(rho.mat.ravel())}


def state_from_json(obj: dict, *, validate: bool = True) -> DensityMatrix:
    if "dims" not in obj or "data" not in obj:
        raise ValueError("state JSON needs 'dims' and 'data'")
    dims = tuple(int(d) for d in obj["dims"])
    order = int(np.prod(dims))
    flat = _from_pairs(obj["data"], order * order, "state data")
    return make_density(flat.reshape(order, order), dims, validate=validate)


def basis_to_json(basis: ObliqueBasis) -> dict:
    n = basis.dim
    return {
        "dim": n,
        "vectors": [_pairs(basis.vectors[:, i]) for i in range(n)],
    }


def basis_from_json(obj: dict, condition_cap: float = DEFAULT_CONDITION_CAP) -> ObliqueBasis:
    if "dim" not in obj or "vectors" not in obj:
        raise ValueError("basis JSON needs 'dim' and 'vectors'")
    n = int(obj["dim"])
    vectors = obj["vectors"]
    if len(vectors) != n:
        raise ValueError(f"basis: expected {n} vectors, got {len(vectors)}")
    cols = [_from_pairs(v, n, f"basis vector {i}") for i, v in enumerate(vectors)]
    return dual_basis(np.column_stack(cols), condition_cap=condition_cap)


def zod_spec_to_json(spec) -> dict:
    return {
        "basis": basis_to_json(spec.basis),
        "weights": [float(w) for w in spec.weights],
        "conditionals": [state_to_json(c) for c in spec.conditionals],
    }


def zod_spec_from_json(obj: dict, condition_cap: float = DEFAULT_CONDITION_CAP):
    from .states import ZodSpec

    return ZodSpec(
        basis=basis_from_json(obj["basis"], condition_cap),
        weights=tuple(float(w) for w in obj["weights"]),
        conditionals=tuple(state_from_json(c) for c in obj["conditionals"]),
    )


def separable_spec_to_json(spec) -> dict:
    return {
        "weights": [float(w) for w in spec.weights],
        "a_states": [state_to_json(s) for s in spec.a_states],
        "b_states": [state_to_json(s) for s in spec.b_states],
    }


def separable_spec_from_json(obj: dict):
    from .states import SeparableSpec

    return SeparableSpec(
        weights=tuple(float(w) for w in obj["weights"]),
        a_states=tuple(state_from_json(s) for s in obj["a_states"]),
        b_states=tuple(state_from_json(s) for s in obj["b_states"]),
    )


def global_zod_spec_to_json(spec) -> dict:
    return {
        "bases": [basis_to_json(b) for b in spec.bases],
        "weights": np.asarray(spec.weights, dtype=np.float64).ravel().tolist(),
    }


def global_zod_spec_from_json(obj: dict, condition_cap: float = DEFAULT_CONDITION_CAP):
    from .states import GlobalZodSpec

    bases = tuple(basis_from_json(b, condition_cap) for b in obj["bases"])
    dims = tuple(b.dim for b in bases)
    w = np.asarray(obj["weights"], dtype=np.float64)
    expected = int(np.prod(dims))
    if w.size != expected:
        raise ValueError(f"weight tensor: expected {expected} entries, got {w.size}")
    return GlobalZodSpec(bases=bases, weights=w.reshape(dims))


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj) -> str:
    """Canonical pretty form used for all CLI outputs (key order preserved)."""
    return json.dumps(obj, indent=2) + "\n"


def schema_text(name: str) -> dict:
    """Load a packaged JSON schema by bare name, e.g. ``"state"``."""
    path = resources.files("oblique").joinpath("schemas", f"{name}.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))

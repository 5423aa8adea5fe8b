"""JSON data formats for algebras, quantum groups, actions and Cayley tables.

Complex numbers are written as ``[re, im]`` pairs; readers also accept bare
reals.  Coefficient tensors are sparse lists of ``[i, j, k, re, im]``
entries with 0-based indices.  Unknown fields are rejected.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import StarAlgebra
from .errors import ParseError
from .quantum_group import QuantumGroup

QG_FIELDS = {"name", "block_dims", "basis", "unit", "delta", "haar"}
ALGEBRA_FIELDS = {"name", "block_dims", "basis", "unit"}
ACTION_FIELDS = {"group", "algebra", "alpha", "require_injective"}
CAYLEY_FIELDS = {"order", "table"}
PERMUTATION_FIELDS = {"points", "action"}


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ParseError(f"complex number must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise ParseError(f"not a number: {x!r}")


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _check_fields(doc, allowed: set, required: set, what: str):
    if not isinstance(doc, dict):
        raise ParseError(f"{what} must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise ParseError(f"{what}: unknown fields {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise ParseError(f"{what}: missing fields {sorted(missing)}")


def _read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _matrices(raw, what: str) -> np.ndarray:
    try:
        return np.array([[[_complex(z) for z in row] for row in m] for m in raw], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: malformed matrix list") from exc


def _sparse_tensor(entries, shape, what: str) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    for entry in entries:
        if not isinstance(entry, (list, tuple)) or len(entry) != 5:
            raise ParseError(f"{what}: entries must be [i, j, k, re, im]")
        i, j, k = (int(v) for v in entry[:3])
        if not all(0 <= a < s for a, s in zip((i, j, k), shape)):
            raise ParseError(f"{what}: index out of range in {entry!r}")
        out[i, j, k] += complex(float(entry[3]), float(entry[4]))
    return out


def _sparse_entries(tensor) -> list[list]:
    t = np.asarray(tensor)
    out = []
    for i, j, k in zip(*np.nonzero(np.abs(t) > 0)):
        z = t[i, j, k]
        out.append([int(i), int(j), int(k), float(z.real), float(z.imag)])
    return out


# algebras

def algebra_from_dict(doc: dict) -> StarAlgebra:
    _check_fields(doc, ALGEBRA_FIELDS, {"block_dims", "basis"}, "algebra")
    alg = StarAlgebra(_matrices(doc["basis"], "basis"), doc["block_dims"], name=doc.get("name"))
    if "unit" in doc:
        unit = np.array([_complex(z) for z in doc["unit"]])
        if unit.shape != alg.unit.shape or np.abs(unit - alg.unit).max() > 1e-9:
            raise ParseError("declared unit coefficients do not match the basis")
    return alg


def algebra_to_dict(alg: StarAlgebra) -> dict:
    doc = {}
    if alg.name:
        doc["name"] = alg.name
    doc["block_dims"] = list(alg.block_dims)
    doc["basis"] = [[[_pair(z) for z in row] for row in m] for m in alg.basis]
    doc["unit"] = [_pair(z) for z in alg.unit]
    return doc


# quantum groups

def quantum_group_from_dict(doc: dict) -> QuantumGroup:
    _check_fields(doc, QG_FIELDS, {"block_dims", "basis", "delta"}, "quantum group")
    alg = algebra_from_dict({k: doc[k] for k in ALGEBRA_FIELDS if k in doc})
    d = alg.dim
    delta = _sparse_tensor(doc["delta"], (d, d, d), "delta")
    haar = None
    if "haar" in doc:
        haar = np.array([_complex(z) for z in doc["haar"]])
        if haar.shape != (d,):
            raise ParseError("haar must list one value per basis element")
    return QuantumGroup(alg, delta, haar=haar, name=doc.get("name"))


def quantum_group_to_dict(qg: QuantumGroup) -> dict:
    doc = algebra_to_dict(qg.algebra)
    if qg.name:
        doc["name"] = qg.name
    doc["delta"] = _sparse_entries(qg.delta)
    if qg.haar is not None:
        doc["haar"] = [_pair(z) for z in qg.haar.values]
    return doc


def load_quantum_group(path) -> QuantumGroup:
    """Read and fully validate a quantum-group JSON document."""
    return quantum_group_from_dict(_read_json(path))


def dumps_document(doc: dict) -> str:
    """One top-level field per line; stable and diff-friendly."""
    lines = [f" {json.dumps(k)}: {json.dumps(v)}" for k, v in doc.items()]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def save_quantum_group(qg: QuantumGroup, path):
    Path(path).write_text(dumps_document(quantum_group_to_dict(qg)))


def kac_paljutkin() -> QuantumGroup:
    """The 8-dimensional Kac–Paljutkin quantum group shipped with the package."""
    ref = resources.files("qmet") / "data" / "kac_paljutkin.json"
    return quantum_group_from_dict(json.loads(ref.read_text()))


# Cayley tables and permutation actions

def load_cayley(path) -> np.ndarray:
    doc = _read_json(path)
    _check_fields(doc, CAYLEY_FIELDS, CAYLEY_FIELDS, "Cayley table")
    table = np.asarray(doc["table"])
    if table.shape != (int(doc["order"]),) * 2:
        raise ParseError("table shape does not match order")
    return table


def load_permutation(path):
    """Return ``(points, action)`` where ``action[g, x] = g·x``."""
    doc = _read_json(path)
    _check_fields(doc, PERMUTATION_FIELDS, PERMUTATION_FIELDS, "permutation action")
    action = np.asarray(doc["action"], dtype=int)
    points = int(doc["points"])
    if action.ndim != 2 or action.shape[1] != points:
        raise ParseError("action must be a |G| × points integer array")
    return points, action


# actions

def action_doc_parts(doc: dict):
    """Split an action document into ``(group_field, algebra, alpha_entries, require_injective)``."""
    _check_fields(doc, ACTION_FIELDS, {"group", "algebra", "alpha"}, "action")
    alg = algebra_from_dict(doc["algebra"])
    return doc["group"], alg, doc["alpha"], bool(doc.get("require_injective", True))


def alpha_from_entries(entries, source: StarAlgebra, qg: QuantumGroup) -> np.ndarray:
    return _sparse_tensor(entries, (source.dim, qg.algebra.dim, source.dim), "alpha")


def action_to_dict(act, group_field) -> dict:
    return {
        "group": group_field,
        "algebra": algebra_to_dict(act.source),
        "alpha": _sparse_entries(act.alpha),
    }


def read_json(path) -> dict:
    return _read_json(path)

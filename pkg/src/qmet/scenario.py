"""Scenario documents: resolve group/action/state/net specs into objects.

A scenario is a JSON object::

    {
      "name": "z3-translation",
      "group": "function_algebra:cyclic:3",
      "action": "translation",
      "state": "haar-induced",
      "net": {"kind": "cesaro", "generator": "lazy:1", "n_max": 500},
      "tolerances": {"structure": 1e-9, "converged": 5e-3},
      "output": {"json": "out/z3.json", "csv": "out/z3.csv"}
    }

Relative paths are resolved against the scenario file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import groups, io
from .algebra import STRUCTURE_TOL, Functional, StarAlgebra, normalized_trace, state_spanning_family
from .dynamics import (
    Action,
    induced_invariant_state,
    permutation_action,
    translation_action,
    trivial_action,
)
from .ergodic import DEFAULT_TOL
from .errors import ParseError
from .quantum_group import (
    AveragingNet,
    QuantumGroup,
    build_function_algebra,
    build_group_algebra,
    cesaro_net,
    constant_haar_net,
    counit,
    haar_state,
)

SCENARIO_FIELDS = {"name", "group", "action", "algebra", "state", "net", "tolerances", "output", "seed", "classical"}
NET_FIELDS = {"kind", "generator", "n_max"}
TOLERANCE_FIELDS = {"structure", "converged"}
OUTPUT_FIELDS = {"json", "csv"}


@dataclass
class Scenario:
    name: str
    group: str | dict | None = None
    action: str = "translation"
    algebra: list | None = None
    state: object = "haar-induced"
    net: dict = field(default_factory=lambda: {"kind": "cesaro", "generator": "lazy:1", "n_max": 200})
    structure_tol: float = STRUCTURE_TOL
    converged_tol: float = DEFAULT_TOL
    output_json: str | None = None
    output_csv: str | None = None
    seed: int = 0
    classical: dict | None = None
    base_dir: Path = field(default_factory=Path.cwd)

    def path(self, p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p


def _check(doc, allowed, what):
    if not isinstance(doc, dict):
        raise ParseError(f"{what} must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise ParseError(f"{what}: unknown fields {sorted(unknown)}")


def scenario_from_dict(doc: dict, base_dir=None) -> Scenario:
    _check(doc, SCENARIO_FIELDS, "scenario")
    if "name" not in doc:
        raise ParseError("scenario: missing field 'name'")
    sc = Scenario(name=str(doc["name"]), base_dir=Path(base_dir) if base_dir else Path.cwd())
    sc.group = doc.get("group")
    sc.action = doc.get("action", sc.action)
    sc.algebra = doc.get("algebra")
    sc.state = doc.get("state", sc.state)
    if "net" in doc:
        _check(doc["net"], NET_FIELDS, "net")
        sc.net = {**sc.net, **doc["net"]}
    tols = doc.get("tolerances", {})
    _check(tols, TOLERANCE_FIELDS, "tolerances")
    sc.structure_tol = float(tols.get("structure", sc.structure_tol))
    sc.converged_tol = float(tols.get("converged", sc.converged_tol))
    if sc.structure_tol <= 0 or sc.converged_tol <= 0:
        raise ParseError("tolerances must be positive")
    out = doc.get("output", {})
    _check(out, OUTPUT_FIELDS, "output")
    sc.output_json = out.get("json")
    sc.output_csv = out.get("csv")
    sc.seed = int(doc.get("seed", 0))
    sc.classical = doc.get("classical")
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    return scenario_from_dict(io.read_json(path), base_dir=path.parent)


def resolve_finite_group(spec: str, sc: Scenario):
    """``cyclic:n`` / ``symmetric:n`` / ``klein4`` / ``cayley:<path>``."""
    if spec.startswith("cayley:"):
        return io.load_cayley(sc.path(spec.partition(":")[2])), None
    try:
        return groups.builtin_group(spec)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def resolve_group(spec, sc: Scenario) -> QuantumGroup:
    if isinstance(spec, dict):
        return io.quantum_group_from_dict(spec)
    if not isinstance(spec, str):
        raise ParseError(f"bad group spec {spec!r}")
    kind, _, rest = spec.partition(":")
    if kind == "file":
        return io.load_quantum_group(sc.path(rest))
    if spec == "kac_paljutkin":
        return io.kac_paljutkin()
    if kind == "function_algebra":
        table, _ = resolve_finite_group(rest, sc)
        return build_function_algebra(table, name=spec)
    if kind == "group_algebra":
        table, irreps = resolve_finite_group(rest, sc)
        return build_group_algebra(table, irreps, name=spec)
    raise ParseError(f"unknown group spec {spec!r}")


def resolve_action(sc: Scenario):
    """Return ``(qg, action, point_action_or_None)``."""
    spec = sc.action
    kind, _, rest = spec.partition(":")
    if kind == "file":
        doc = io.read_json(sc.path(rest))
        group_field, source, entries, require_injective = io.action_doc_parts(doc)
        if sc.group is not None and isinstance(group_field, str) and group_field != sc.group:
            raise ParseError(f"action file is for group {group_field!r}, scenario says {sc.group!r}")
        qg = resolve_group(group_field, sc)
        alpha = io.alpha_from_entries(entries, source, qg)
        return qg, Action(source, qg, alpha, require_injective=require_injective, name="file"), None
    if sc.group is None:
        raise ParseError("scenario needs a group")
    qg = resolve_group(sc.group, sc)
    if spec == "translation":
        return qg, translation_action(qg), None
    if spec == "trivial":
        source = StarAlgebra.full(sc.algebra) if sc.algebra else qg.algebra
        return qg, trivial_action(qg, source), None
    if kind == "permutation":
        if not sc.group.startswith("function_algebra:"):
            raise ParseError("permutation actions need a function_algebra group")
        table, _ = resolve_finite_group(sc.group.partition(":")[2], sc)
        _, point_action = io.load_permutation(sc.path(rest))
        return qg, permutation_action(qg, table, point_action), point_action
    raise ParseError(f"unknown action spec {spec!r}")


def _values(raw, alg, what) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != alg.dim:
        raise ParseError(f"{what}: expected {alg.dim} values")
    return np.array([io._complex(z) for z in raw])


def resolve_state(sc: Scenario, act: Action) -> Functional:
    spec = sc.state
    if spec == "haar-induced":
        return induced_invariant_state(act, normalized_trace(act.source))
    if spec == "uniform":
        return normalized_trace(act.source)
    return Functional(act.source, _values(spec, act.source, "state"))


def resolve_group_state(spec, qg: QuantumGroup) -> Functional:
    """``haar``, ``counit``, ``family:<i>``, ``lazy:<i>`` or a value list."""
    if isinstance(spec, list):
        return Functional(qg.algebra, _values(spec, qg.algebra, "generator"))
    if not isinstance(spec, str):
        raise ParseError(f"bad state spec {spec!r}")
    kind, _, arg = spec.partition(":")
    if kind == "haar":
        return qg.haar if qg.haar is not None else haar_state(qg)
    if kind == "counit":
        return counit(qg)
    family = state_spanning_family(qg.algebra)
    try:
        member = family[int(arg)]
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad state spec {spec!r}") from exc
    if kind == "family":
        return member
    if kind == "lazy":
        return (counit(qg) + member) / 2
    raise ParseError(f"bad state spec {spec!r}")


def resolve_net(sc: Scenario, qg: QuantumGroup) -> AveragingNet:
    kind = sc.net.get("kind", "cesaro")
    n_max = int(sc.net.get("n_max", 200))
    if kind == "constant_haar":
        return constant_haar_net(qg, n_max)
    if kind == "cesaro":
        return cesaro_net(resolve_group_state(sc.net.get("generator", "lazy:1"), qg), n_max, qg)
    raise ParseError(f"unknown net kind {kind!r}")

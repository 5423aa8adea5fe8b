"""Classical mean ergodic averages and the bridge into the quantum setting.

Haar measure is counting measure on finite Følner sets.  The integers are
handled through explicit truncations ``Λ_n = {0, …, n−1}`` of a single
contraction ``U``; finite groups carry one operator per element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import groups
from .algebra import Functional, StarAlgebra
from .dynamics import Action, check_invariant_measure, koopman_matrix, permutation_action
from .errors import ValidationError
from .linalg import null_space, op_norm, projector
from .quantum_group import QuantumGroup, build_function_algebra

REP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ClassicalSystem:
    """Contractions ``U_g`` with ``U_g U_h = U_{gh}``.

    ``kind`` is ``"finite"`` (``ops[g]`` for each element of ``table``) or
    ``"integers"`` (``ops[0]`` is the generator ``U``, ``U_k = U^k``).
    ``folner`` maps ``n`` to ``Λ_n``; by default ``Λ_n = G`` for finite
    groups and ``{0, …, n−1}`` for the integers.
    """

    kind: str
    ops: np.ndarray = field(repr=False)
    table: np.ndarray | None = field(default=None, repr=False)
    folner_sets: tuple | None = field(default=None, repr=False)

    def op(self, g: int) -> np.ndarray:
        if self.kind == "finite":
            return self.ops[g]
        if g < 0:
            raise ValueError("negative powers are not used by the Følner averages")
        return np.linalg.matrix_power(self.ops[0], g)

    def generators(self) -> list[np.ndarray]:
        return list(self.ops)

    def folner(self, n: int) -> list[int]:
        if n < 1:
            raise ValueError("Følner index starts at 1")
        if self.folner_sets is not None:
            return list(self.folner_sets[n - 1])
        if self.kind == "finite":
            return list(range(self.table.shape[0]))
        return list(range(n))


def finite_system(table, ops, folner_sets=None, require_unitary: bool = True) -> ClassicalSystem:
    t = groups.validate_cayley(table)
    ops = np.asarray(ops, dtype=complex)
    if ops.shape[0] != t.shape[0]:
        raise ValidationError("need one operator per group element")
    for u in ops:
        _check_contraction(u, require_unitary)
    prod = np.einsum("gab,hbc->ghac", ops, ops)
    if np.abs(prod - ops[t]).max() > REP_TOL:
        raise ValidationError("operators do not satisfy U_g U_h = U_gh")
    return ClassicalSystem("finite", ops, t, folner_sets)


def integer_system(u, require_unitary: bool = True) -> ClassicalSystem:
    u = np.asarray(u, dtype=complex)
    _check_contraction(u, require_unitary)
    return ClassicalSystem("integers", u[None])


def _check_contraction(u, require_unitary: bool):
    if require_unitary:
        if np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() > REP_TOL:
            raise ValidationError("operator is not unitary")
    elif op_norm(u) > 1 + REP_TOL:
        raise ValidationError("operator is not a contraction")


def cyclic_shift(n: int) -> np.ndarray:
    """``(S x)_i = x_{i−1}`` on ``ℂ^n``."""
    return np.roll(np.eye(n), 1, axis=0)


def folner_average(sys: ClassicalSystem, n: int) -> np.ndarray:
    """``A_n = (1/|Λ_n|) Σ_{g∈Λ_n} U_g``."""
    lam = sys.folner(n)
    if not lam:
        raise ValueError("empty Følner set")
    if sys.kind == "integers" and lam == list(range(len(lam))):
        u = sys.ops[0]
        total = np.zeros_like(u)
        power = np.eye(u.shape[0], dtype=complex)
        for _ in lam:
            total += power
            power = power @ u
        return total / len(lam)
    return sum(sys.op(g) for g in lam) / len(lam)


def fixed_projection(sys: ClassicalSystem, tol: float = 1e-9) -> np.ndarray:
    """Orthogonal projection onto ``∩_g ker(U_g − I)`` over the generators."""
    gens = sys.generators()
    eye = np.eye(gens[0].shape[0])
    return projector(null_space(np.vstack([u - eye for u in gens]), tol=tol, atol=tol))


def folner_defect(sys: ClassicalSystem, n: int, g: int = 1) -> float:
    """``|Λ_n Δ Λ_n g| / |Λ_n|`` by set counting."""
    lam = set(sys.folner(n))
    if sys.kind == "integers":
        shifted = {x + g for x in lam}
    else:
        shifted = {int(sys.table[x, g]) for x in lam}
    return len(lam ^ shifted) / len(lam)


@dataclass(frozen=True, eq=False)
class Bridge:
    """A finite classical system embedded as ``(C(G), α, ω)``."""

    qg: QuantumGroup
    action: Action
    omega: Functional
    table: np.ndarray = field(repr=False)
    point_action: np.ndarray = field(repr=False)

    def koopman(self, g: int) -> np.ndarray:
        """``f ↦ f(g·)``; this is the classical ``U_{g⁻¹}``."""
        return koopman_matrix(self.point_action, g)

    def koopman_average(self, theta: Functional) -> np.ndarray:
        return sum(theta.values[g] * self.koopman(g) for g in range(self.table.shape[0]))

    def classical_system(self) -> ClassicalSystem:
        """``U_g f = f(g⁻¹·)``, a genuine representation on ``ℂ^X``."""
        inv = groups.inverses(self.table)
        ops = np.array([self.koopman(int(inv[g])) for g in range(self.table.shape[0])])
        return finite_system(self.table, ops)


def bridge_to_quantum(table, point_action, measure=None) -> Bridge:
    """Realize a finite group acting on a probability space inside ``C(G)``.

    ``point_action[g, x] = g·x``; ``measure`` defaults to uniform and must be
    invariant.
    """
    t = groups.validate_cayley(table)
    act = np.asarray(point_action, dtype=int)
    points = act.shape[1]
    m = np.full(points, 1.0 / points) if measure is None else measure
    m = check_invariant_measure(act, m)
    qg = build_function_algebra(t)
    source = StarAlgebra.abelian(points)
    action = permutation_action(qg, t, act, source=source)
    return Bridge(qg, action, Functional(source, m.astype(complex)), t, act)


def to_gns_coordinates(matrix, gns_space) -> np.ndarray:
    """Conjugate an operator on coefficient space into GNS coordinates."""
    return gns_space.gamma @ np.asarray(matrix) @ gns_space.lift

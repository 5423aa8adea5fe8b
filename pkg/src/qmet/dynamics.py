"""Coactions, invariant states, GNS spaces and transfer operators.

An action ``α: A → R⊗A`` is stored as the coefficient tensor ``C`` with
``α(a_i) = Σ_{j,k} C[i, j, k] r_j⊗a_k``.  For a functional ``μ`` on ``R``
the vector ``μ̃(T) = γ((μ⊗ι)T)`` is the unique solution of the Riesz
equations ``⟨γ(d), μ̃(T)⟩ = (μ⊗ω)([1⊗d]*T)``; the transfer operator
``μ̃^α`` sends ``γ(a)`` to ``μ̃(α(a))``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    STRUCTURE_TOL,
    Element,
    Functional,
    StarAlgebra,
    TensorAlgebra,
    dual_norm,
    slice_left,
    tensor_functional,
)
from .errors import (
    AlgebraMismatch,
    NotAState,
    NotCoaction,
    NotHomomorphism,
    NotInjective,
    NotInvariant,
    NotInvariantMeasure,
    NotUnital,
    ValidationError,
)
from .linalg import hermitian_eig, op_norm
from .quantum_group import QuantumGroup, homomorphism_defects

log = logging.getLogger(__name__)

GNS_CUTOFF = 1e-12


class Action:
    """A validated coaction of ``group`` on ``source``.

    Injectivity is required unless ``require_injective=False``; nothing
    downstream depends on it.
    """

    def __init__(
        self,
        source: StarAlgebra,
        group: QuantumGroup,
        alpha,
        require_injective: bool = True,
        tol: float = STRUCTURE_TOL,
        name: str | None = None,
    ):
        alpha = np.asarray(alpha, dtype=complex)
        shape = (source.dim, group.algebra.dim, source.dim)
        if alpha.shape != shape:
            raise ValidationError(f"alpha must have shape {shape}, got {alpha.shape}")
        self.source = source
        self.group = group
        self.alpha = alpha
        self.name = name
        self.tensor = TensorAlgebra(group.algebra, source)

        defects = homomorphism_defects(source, self.tensor, alpha)
        self.defects = dict(defects)
        if max(defects["multiplicative"], defects["adjoint"]) > tol:
            raise NotHomomorphism(f"alpha is not a *-homomorphism: {defects}")
        self.unital = defects["unital"] <= tol
        if not self.unital:
            raise NotUnital(f"alpha(1) differs from 1⊗1 by {defects['unital']:.3g}")
        s = np.linalg.svd(alpha.reshape(source.dim, -1), compute_uv=False)
        self.injective = bool(s.min() > tol)
        if require_injective and not self.injective:
            raise NotInjective(f"alpha has smallest singular value {s.min():.3g}")
        self.defects["coaction"] = coaction_defect(self)
        if self.defects["coaction"] > tol:
            raise NotCoaction(f"coaction defect {self.defects['coaction']:.3g}")

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Action{label} of {self.group!r} on {self.source!r}>"

    def __call__(self, a: Element) -> Element:
        if a.algebra is not self.source:
            raise AlgebraMismatch("element does not belong to the acted-on algebra")
        return Element(self.tensor, np.tensordot(a.coeffs, self.alpha, axes=(0, 0)).reshape(-1))


def coaction_defect(act: Action) -> float:
    """Max over basis ``a_i`` of ``‖(ι⊗α)α(a_i) − (Δ⊗ι)α(a_i)‖`` (Frobenius)."""
    C, D = act.alpha, act.group.delta
    lhs = np.einsum("ijk,klm->ijlm", C, C, optimize=True)
    rhs = np.einsum("ijk,jlm->ilmk", C, D, optimize=True)
    return float(np.linalg.norm((lhs - rhs).reshape(C.shape[0], -1), axis=1).max())


def action_validate(source, group, alpha, require_injective: bool = True, name=None) -> Action:
    return Action(source, group, alpha, require_injective=require_injective, name=name)


def translation_action(qg: QuantumGroup) -> Action:
    """``α = Δ``: the quantum group acting on itself."""
    return Action(qg.algebra, qg, qg.delta, name="translation")


def trivial_action(qg: QuantumGroup, source: StarAlgebra) -> Action:
    """``α(a) = 1⊗a``."""
    d = source.dim
    alpha = np.einsum("j,ik->ijk", qg.algebra.unit, np.eye(d))
    return Action(source, qg, alpha, name="trivial")


def validate_point_action(table, action) -> np.ndarray:
    """Check ``action[g, x] = g·x`` is a left action of the group ``table``."""
    t = np.asarray(table)
    act = np.asarray(action, dtype=int)
    n = t.shape[0]
    if act.ndim != 2 or act.shape[0] != n:
        raise ValidationError("action must have one row per group element")
    points = act.shape[1]
    if act.min(initial=0) < 0 or act.max(initial=0) >= points:
        raise ValidationError("action maps outside the point set")
    if not np.array_equal(act[0], np.arange(points)):
        raise ValidationError("identity does not act trivially")
    lhs = act[np.arange(n)[:, None, None], act[None, :, :]]  # g·(h·x)
    if not np.array_equal(lhs, act[t]):
        raise ValidationError("not a left action: g·(h·x) ≠ (gh)·x")
    return act


def permutation_action(qg: QuantumGroup, table, action, source: StarAlgebra | None = None) -> Action:
    """Coaction of ``C(G)`` on ``C(X)`` from a left action ``g·x``.

    ``α(f)(g, x) = f(g·x)``, i.e. ``α(δ_y) = Σ_{g·x = y} δ_g⊗δ_x``, so that
    slicing with the point mass at ``g`` composes with the action of ``g``.
    """
    act = validate_point_action(table, action)
    n, points = act.shape
    if qg.algebra.dim != n or any(b != 1 for b in qg.algebra.block_dims):
        raise AlgebraMismatch("permutation actions need the function algebra C(G)")
    if source is None:
        source = StarAlgebra.abelian(points)
    alpha = np.zeros((points, n, points), dtype=complex)
    g, x = np.meshgrid(np.arange(n), np.arange(points), indexing="ij")
    alpha[act, g, x] = 1.0
    return Action(source, qg, alpha, name="permutation")


def invariance_check(omega: Functional, act: Action, thetas) -> float:
    """``max_θ max_i |(θ⊗ω)(α(a_i)) − ω(a_i)|``."""
    if omega.algebra is not act.source:
        raise AlgebraMismatch("ω must be a functional on the acted-on algebra")
    worst = 0.0
    for theta in thetas:
        lhs = np.einsum("ijk,j,k->i", act.alpha, theta.values, omega.values)
        worst = max(worst, float(np.abs(lhs - omega.values).max()))
    return worst


def induced_invariant_state(act: Action, seed_state: Functional) -> Functional:
    """``(h⊗σ)∘α``, which is invariant for any state ``σ`` (``h`` the Haar state)."""
    h = act.group.haar
    if h is None:
        from .quantum_group import haar_state

        h = haar_state(act.group)
    return Functional(act.source, np.einsum("ijk,j,k->i", act.alpha, h.values, seed_state.values))


@dataclass(frozen=True, eq=False)
class GnsSpace:
    """The GNS Hilbert space of ``(A, ω)`` in orthonormal coordinates.

    ``gamma`` (``dim × A.dim``) maps coefficient vectors to ``H``; ``lift``
    (``A.dim × dim``) holds representatives with ``gamma @ lift = I``.
    """

    algebra: StarAlgebra
    omega: Functional
    gram: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    lift: np.ndarray = field(repr=False)
    omega_vector: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    cutoff: float
    near_cutoff: bool

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def vector(self, a) -> np.ndarray:
        if isinstance(a, Element):
            if a.algebra is not self.algebra:
                raise AlgebraMismatch("element does not belong to the GNS algebra")
            a = a.coeffs
        return self.gamma @ np.asarray(a)


def gram_matrix(alg: StarAlgebra, omega: Functional) -> np.ndarray:
    """``[ω(b_i* b_j)]``."""
    return np.einsum("il,ljk,k->ij", alg.star, alg.mult, omega.values)


def gns(a: StarAlgebra, omega: Functional, cutoff: float = GNS_CUTOFF) -> GnsSpace:
    if omega.algebra is not a:
        raise AlgebraMismatch("ω is not a functional on this algebra")
    if not omega.is_state():
        raise NotAState("GNS construction needs a state")
    gram = gram_matrix(a, omega)
    w, u = hermitian_eig(gram)
    top = max(w[0], 0.0)
    keep = w > cutoff * top
    near = bool(np.any((w > 1e-3 * cutoff * top) & (w < 1e3 * cutoff * top)))
    if near:
        log.warning("GNS gram matrix has eigenvalues close to the rank cutoff")
    lam = w[keep]
    vecs = u[:, keep]
    gamma = np.sqrt(lam)[:, None] * vecs.conj().T
    lift = vecs / np.sqrt(lam)[None, :]
    return GnsSpace(
        algebra=a,
        omega=omega,
        gram=gram,
        gamma=gamma,
        lift=lift,
        omega_vector=gamma @ a.unit,
        eigenvalues=w,
        cutoff=cutoff,
        near_cutoff=near,
    )


def mu_tilde(mu: Functional, t: Element, g: GnsSpace) -> np.ndarray:
    """``μ̃(T) = γ((μ⊗ι)T)``."""
    if not t.algebra.is_tensor or t.algebra.right is not g.algebra:
        raise AlgebraMismatch("T must lie in R⊗A with A the GNS algebra")
    return g.vector(slice_left(mu, t))


def riesz_pairing(mu: Functional, omega: Functional, t: Element, d: Element) -> complex:
    """``(μ⊗ω)([1⊗d]* T)``, computed by multiplication in ``R⊗A``."""
    alg = t.algebra
    one_d = alg.simple_tensor(alg.left.one(), d)
    return tensor_functional(mu, omega)(one_d.adjoint() * t)


@dataclass(frozen=True, eq=False)
class TransferOperator:
    """Matrix of ``μ̃^α`` in the orthonormal GNS coordinates."""

    matrix: np.ndarray
    functional: Functional = field(repr=False)
    action: Action = field(repr=False)
    gns: GnsSpace = field(repr=False)

    @property
    def norm(self) -> float:
        return op_norm(self.matrix)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def __matmul__(self, other: "TransferOperator") -> np.ndarray:
        return self.matrix @ other.matrix


def invariance_residual(mu: Functional, act: Action, omega: Functional) -> float:
    """``max_i |(μ⊗ω)(α(a_i)) − μ(1)ω(a_i)|``."""
    lhs = np.einsum("ijk,j,k->i", act.alpha, mu.values, omega.values)
    return float(np.abs(lhs - mu.total * omega.values).max())


def transfer_operator(mu: Functional, act: Action, g: GnsSpace, tol: float = STRUCTURE_TOL) -> TransferOperator:
    """Build ``μ̃^α`` column by column from the raw basis of ``A``.

    Raises :class:`NotInvariant` if ``(μ⊗ω)∘α ≠ μ(1)ω`` or if the columns are
    inconsistent on the GNS null space.
    """
    if mu.algebra is not act.group.algebra:
        raise AlgebraMismatch("μ must be a functional on the quantum group's algebra")
    if g.algebra is not act.source:
        raise AlgebraMismatch("GNS space is not built on the acted-on algebra")
    scale = max(1.0, float(np.abs(mu.values).sum()))
    res = invariance_residual(mu, act, g.omega)
    if res > tol * scale:
        raise NotInvariant(f"(μ⊗ω)∘α ≠ μ(1)ω (residual {res:.3g})")
    # column i: coefficients of (μ⊗ι)α(a_i)
    sliced = np.einsum("ijk,j->ki", act.alpha, mu.values)
    images = g.gamma @ sliced
    k = images @ g.lift
    res = float(np.abs(k @ g.gamma - images).max(initial=0.0))
    if res > tol * scale:
        raise NotInvariant(f"μ̃^α is not well defined on the GNS quotient (residual {res:.3g})")
    return TransferOperator(k, mu, act, g)


def koopman_matrix(action, g: int) -> np.ndarray:
    """``f ↦ f(g·)`` on ``ℂ^X`` in the point-mass basis."""
    act = np.asarray(action)
    points = act.shape[1]
    k = np.zeros((points, points))
    k[np.arange(points), act[g]] = 1.0
    return k


def check_invariant_measure(action, measure, tol: float = STRUCTURE_TOL) -> np.ndarray:
    m = np.asarray(measure, dtype=float)
    act = np.asarray(action)
    if m.shape != (act.shape[1],) or m.min() < -tol or abs(m.sum() - 1) > tol:
        raise NotInvariantMeasure("measure must be a probability vector on the points")
    for row in act:
        pushed = np.zeros_like(m)
        np.add.at(pushed, row, m)
        if np.abs(pushed - m).max() > tol:
            raise NotInvariantMeasure("measure is not invariant under the action")
    return m

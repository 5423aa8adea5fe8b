"""Finite quantum groups: comultiplication, Haar state, convolution, nets.

A comultiplication is stored as the coefficient tensor ``D`` with
``Δ(b_i) = Σ_{j,k} D[i, j, k] b_j⊗b_k``.  In finite dimension one two-sided
invariant state (the Haar state) plays the part of both invariant weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import groups
from .algebra import (
    STRUCTURE_TOL,
    Functional,
    StarAlgebra,
    TensorAlgebra,
    dual_norm,
    state_spanning_family,
)
from .errors import (
    AlgebraMismatch,
    MissingBlockData,
    NoHaar,
    NonUniqueHaar,
    NotAState,
    NotCoassociative,
    NotHomomorphism,
    NotPositive,
    ValidationError,
)
from .linalg import null_space


def homomorphism_defects(source: StarAlgebra, target: TensorAlgebra, coeffs) -> dict:
    """Defects of the linear map ``b_i ↦ Σ_{jk} coeffs[i,j,k] l_j⊗r_k``.

    Returns the maximal absolute coefficient errors of multiplicativity,
    adjoint compatibility and unitality.
    """
    c = np.asarray(coeffs)
    d = source.dim
    dl, dr = target.left.dim, target.right.dim
    images = c.reshape(d, dl * dr)
    prod_images = np.einsum("ijk,kab->ijab", source.mult, c).reshape(d, d, -1)
    image_prods = np.einsum(
        "iab,jcd,ace,bdf->ijef", c, c, target.left.mult, target.right.mult, optimize=True
    ).reshape(d, d, -1)
    star_images = source.star @ images
    image_stars = np.array([target.adjoint(x) for x in images])
    unit_image = source.unit @ images
    return {
        "multiplicative": float(np.abs(prod_images - image_prods).max()),
        "adjoint": float(np.abs(star_images - image_stars).max()),
        "unital": float(np.abs(unit_image - target.unit).max()),
    }


class QuantumGroup:
    """A finite quantum group ``(M, Δ)`` with optional Haar state.

    With ``validate=True`` (the default) construction checks that ``Δ`` is a
    unital *-homomorphism, that it is coassociative and, if given, that
    ``haar`` is a two-sided invariant state.
    """

    def __init__(
        self,
        algebra: StarAlgebra,
        delta,
        haar=None,
        name: str | None = None,
        validate: bool = True,
        tol: float = STRUCTURE_TOL,
    ):
        delta = np.asarray(delta, dtype=complex)
        d = algebra.dim
        if delta.shape != (d, d, d):
            raise ValidationError(f"delta must have shape {(d, d, d)}, got {delta.shape}")
        self.algebra = algebra
        self.delta = delta
        self.name = name
        self.tensor = TensorAlgebra(algebra, algebra)
        self.haar: Functional | None = None
        self.group_elements = None
        if validate:
            # coassociativity is purely linear, so it is checked first
            defect = coassociativity_check(self)
            if defect > tol:
                raise NotCoassociative(f"coassociativity defect {defect:.3g}")
            defects = homomorphism_defects(algebra, self.tensor, delta)
            bad = {k: v for k, v in defects.items() if v > tol}
            if bad:
                raise NotHomomorphism(f"comultiplication fails: {bad}")
        if haar is not None:
            h = haar if isinstance(haar, Functional) else Functional(algebra, np.asarray(haar, dtype=complex))
            if validate:
                _verify_haar(self, h, tol)
            self.haar = h

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<QuantumGroup{label} blocks={self.algebra.block_dims}>"

    def delta_of(self, x) -> np.ndarray:
        """Coefficients of ``Δ(x)`` over the product basis."""
        return np.tensordot(np.asarray(x), self.delta, axes=(0, 0)).reshape(-1)


def coassociativity_check(qg: QuantumGroup) -> float:
    """Max over basis elements of ``‖(Δ⊗ι)Δ(b_i) − (ι⊗Δ)Δ(b_i)‖`` (Frobenius)."""
    D = qg.delta
    left = np.einsum("ijk,jlm->ilmk", D, D, optimize=True)
    right = np.einsum("ijk,klm->ijlm", D, D, optimize=True)
    diff = (left - right).reshape(D.shape[0], -1)
    return float(np.linalg.norm(diff, axis=1).max())


def convolve(mu: Functional, nu: Functional, qg: QuantumGroup, check: bool = True) -> Functional:
    """``μ∗ν = (μ⊗ν)∘Δ``; if both inputs are states the result is checked to be one."""
    if mu.algebra is not qg.algebra or nu.algebra is not qg.algebra:
        raise AlgebraMismatch("functionals must live on the quantum group's algebra")
    out = Functional(qg.algebra, np.einsum("ijk,j,k->i", qg.delta, mu.values, nu.values))
    if check and mu.is_state() and nu.is_state() and not out.is_state():
        raise NotAState("convolution of two states is not a state")
    return out


def _haar_system(qg: QuantumGroup) -> np.ndarray:
    # rows: θ∗h − θ(1)h and h∗θ − θ(1)h for θ the coordinate functionals
    D = qg.delta
    d = D.shape[0]
    eye = np.eye(d)
    u = qg.algebra.unit
    left = D.transpose(1, 0, 2) - u[:, None, None] * eye[None, :, :]   # [m, i, k]
    right = D.transpose(2, 0, 1) - u[:, None, None] * eye[None, :, :]  # [m, i, j]
    return np.concatenate([left.reshape(-1, d), right.reshape(-1, d)])


def haar_state(qg: QuantumGroup, tol: float = STRUCTURE_TOL) -> Functional:
    """Solve the two-sided invariance equations for the Haar state.

    The solution is stored on ``qg.haar`` and returned.
    """
    basis = null_space(_haar_system(qg), tol=tol)
    if basis.shape[1] == 0:
        raise NoHaar("invariance equations have only the zero solution")
    if basis.shape[1] > 1:
        raise NonUniqueHaar(f"invariant functionals form a {basis.shape[1]}-dimensional space")
    v = basis[:, 0]
    total = v @ qg.algebra.unit
    if abs(total) < tol:
        raise NoHaar("invariant functional vanishes on the unit")
    h = Functional(qg.algebra, v / total)
    if not h.is_positive():
        raise NotPositive("the unique invariant functional is not positive")
    _verify_haar(qg, h, tol)
    qg.haar = h
    return h


def _verify_haar(qg: QuantumGroup, h: Functional, tol: float):
    if abs(h.total - 1) > tol:
        raise NoHaar("declared Haar state is not normalized")
    residual = np.abs(_haar_system(qg) @ h.values).max()
    if residual > tol:
        raise NoHaar(f"declared Haar state is not invariant (residual {residual:.3g})")
    if not h.is_positive():
        raise NotPositive("declared Haar state is not positive")


def counit(qg: QuantumGroup, tol: float = STRUCTURE_TOL) -> Functional:
    """The character ``ε`` with ``(ε⊗ι)Δ = ι``."""
    D = qg.delta
    d = D.shape[0]
    a = D.transpose(0, 2, 1).reshape(d * d, d)  # row (i, k), column j
    eps, *_ = np.linalg.lstsq(a, np.eye(d).reshape(-1), rcond=None)
    if np.abs(a @ eps - np.eye(d).reshape(-1)).max() > tol:
        raise ValidationError("comultiplication has no counit")
    return Functional(qg.algebra, eps)


def amenability_defect(phi: Functional, qg: QuantumGroup, thetas) -> float:
    """``max_θ ‖θ∗φ − φ‖`` over the given states."""
    thetas = list(thetas)
    if not thetas:
        raise ValueError("thetas must be nonempty")
    return max(dual_norm(convolve(t, phi, qg, check=False) - phi) for t in thetas)


@dataclass(frozen=True)
class AveragingNet:
    """A finite segment ``φ_1, …, φ_N`` of an amenability net.

    ``kind`` is ``"constant_haar"`` (every ``φ_n`` is the Haar state) or
    ``"cesaro"`` (``φ_n = (1/n) Σ_{k≤n} μ^{∗k}``).
    """

    kind: str
    qg: QuantumGroup = field(repr=False)
    length: int
    generator: Functional | None = field(default=None, repr=False)

    def states(self) -> Iterator[Functional]:
        if self.kind == "constant_haar":
            h = self.qg.haar if self.qg.haar is not None else haar_state(self.qg)
            for _ in range(self.length):
                yield h
            return
        mu = self.generator
        power = mu
        total = mu
        for n in range(1, self.length + 1):
            if n > 1:
                power = convolve(power, mu, self.qg, check=False)
                total = total + power
            phi = total / n
            if not phi.is_state():
                raise NotAState(f"net element φ_{n} is not a state")
            yield phi

    def state(self, n: int) -> Functional:
        if not 1 <= n <= self.length:
            raise IndexError(n)
        for k, phi in enumerate(self.states(), start=1):
            if k == n:
                return phi
        raise AssertionError("unreachable")

    def describe(self) -> dict:
        out = {"kind": self.kind, "n_max": self.length}
        if self.generator is not None:
            out["generator"] = [[float(v.real), float(v.imag)] for v in self.generator.values]
        return out


def cesaro_net(mu: Functional, n_max: int, qg: QuantumGroup) -> AveragingNet:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if mu.algebra is not qg.algebra:
        raise AlgebraMismatch("generator must live on the quantum group's algebra")
    if not mu.is_state():
        raise NotAState("net generator must be a state")
    return AveragingNet("cesaro", qg, n_max, mu)


def constant_haar_net(qg: QuantumGroup, n_max: int) -> AveragingNet:
    if qg.haar is None:
        haar_state(qg)
    return AveragingNet("constant_haar", qg, n_max)


def function_algebra_delta(table) -> np.ndarray:
    """``Δf(g,h) = f(gh)`` in the delta basis; no group axioms are checked."""
    t = np.asarray(table)
    n = t.shape[0]
    D = np.zeros((n, n, n), dtype=complex)
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    D[t, j, k] = 1.0
    return D


def build_function_algebra(table, name: str | None = None) -> QuantumGroup:
    """``C(G)`` with the basis of point masses ``δ_g``; Haar is uniform."""
    t = groups.validate_cayley(table)
    n = t.shape[0]
    alg = StarAlgebra.abelian(n, name=name)
    return QuantumGroup(alg, function_algebra_delta(t), haar=np.full(n, 1.0 / n), name=name)


def build_group_algebra(table, irreps=None, name: str | None = None) -> QuantumGroup:
    """``ℂ[G]`` with ``Δ(λ_g) = λ_g⊗λ_g`` in canonical block form.

    For abelian groups the blocks come from the character table; otherwise
    ``irreps`` (a complete list of unitary irreps, each of shape
    ``(|G|, d, d)``) must be supplied.  The Haar state is ``h(λ_g) = δ_{g,e}``.
    The images of the group elements are kept on ``qg.group_elements``
    (row ``g`` holds the coefficients of ``λ_g``).
    """
    t = groups.validate_cayley(table)
    n = t.shape[0]
    if irreps is None:
        if not groups.is_abelian(t):
            raise MissingBlockData("nonabelian group algebra needs a block decomposition")
        chi = groups.abelian_characters(t)
        irreps = [c.reshape(n, 1, 1) for c in chi]
    irreps = groups.validate_irreps(t, irreps)
    dims = [pi.shape[1] for pi in irreps]
    alg = StarAlgebra.full(dims, name=name)
    lam = np.concatenate([pi.reshape(n, -1) for pi in irreps], axis=1)
    # Schur orthogonality: E^k_{ij} = (d_k/n) Σ_g conj(π_k(g)_{ij}) λ_g
    einv = np.concatenate(
        [(pi.shape[1] / n) * pi.reshape(n, -1).conj().T for pi in irreps], axis=0
    )
    D = np.einsum("mg,gj,gk->mjk", einv, lam, lam)
    D[np.abs(D) < 1e-14] = 0.0
    qg = QuantumGroup(alg, D, haar=einv[:, 0], name=name)
    qg.group_elements = lam
    return qg


def spanning_states(qg: QuantumGroup) -> list[Functional]:
    return state_spanning_family(qg.algebra)

"""Finite-dimensional *-algebras in canonical block form.

An algebra is the full direct sum ``M_{n_1} ⊕ … ⊕ M_{n_K}`` realized as
block-diagonal ``N×N`` matrices (``N = Σ n_k``) together with an ordered
basis.  Elements and functionals are stored as coefficient / value vectors
with respect to that basis; products, adjoints and the unit are encoded as
structure constants computed once at construction.

Tensor products are never flattened to ambient Kronecker matrices for
computation: an element of ``L⊗R`` is a coefficient vector over the product
basis ``l_i⊗r_a`` (lexicographic order), so the slice map ``μ⊗ι`` is an exact
contraction.

Normality of functionals is automatic in finite dimension, and every state
is a real-affine combination of the finite family returned by
:func:`state_spanning_family`; statements quantified over "all states" are
therefore checked on that family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlgebraMismatch, BadBlocks, NotClosed, NoUnit
from .linalg import op_norm

STRUCTURE_TOL = 1e-9
POSITIVITY_TOL = 1e-10


def matrix_units(block_dims) -> np.ndarray:
    """Block-diagonal matrix units ``E^k_{ij}`` in block-major, row-major order."""
    block_dims = tuple(int(n) for n in block_dims)
    size = sum(block_dims)
    units = []
    offset = 0
    for n in block_dims:
        for i in range(n):
            for j in range(n):
                e = np.zeros((size, size), dtype=complex)
                e[offset + i, offset + j] = 1.0
                units.append(e)
        offset += n
    return np.array(units)


class StarAlgebra:
    """A validated finite-dimensional *-algebra ``⊕_k M_{n_k}``.

    Parameters
    ----------
    basis : sequence of (N, N) arrays
        Linearly independent block-diagonal matrices spanning the full
        block algebra.  Matrix units in canonical order are the usual
        choice (see :meth:`full`).
    block_dims : sequence of int
        The block sizes ``(n_1, …, n_K)``.

    Raises
    ------
    NotClosed
        A product ``b_i b_j`` or adjoint ``b_i*`` leaves the span.
    NoUnit
        The ambient identity is not in the span.
    BadBlocks
        ``block_dims`` is inconsistent with the basis.
    """

    is_tensor = False

    def __init__(self, basis, block_dims, name: str | None = None, tol: float = STRUCTURE_TOL):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 3 or basis.shape[0] == 0 or basis.shape[1] != basis.shape[2]:
            raise BadBlocks("basis must be a nonempty list of equal-size square matrices")
        self.name = name
        self.basis = basis
        self.block_dims = tuple(int(n) for n in block_dims)
        self.dim = basis.shape[0]
        self.ambient_dim = basis.shape[1]
        N = self.ambient_dim

        flat = basis.reshape(self.dim, N * N)
        if np.linalg.matrix_rank(flat, tol=tol) != self.dim:
            raise BadBlocks("basis elements are linearly dependent")
        self._pinv = np.linalg.pinv(flat)

        prods = np.einsum("iab,jbc->ijac", basis, basis)
        mult, res = self._coords(prods.reshape(self.dim * self.dim, N, N))
        if res > tol:
            raise NotClosed(f"product of basis elements leaves the span (residual {res:.3g})")
        self.mult = mult.reshape(self.dim, self.dim, self.dim)

        star, res = self._coords(basis.conj().transpose(0, 2, 1))
        if res > tol:
            raise NotClosed(f"adjoint of a basis element leaves the span (residual {res:.3g})")
        self.star = star

        unit, res = self._coords(np.eye(N)[None])
        if res > tol:
            raise NoUnit("identity matrix is not in the span")
        self.unit = unit[0]

        if any(n <= 0 for n in self.block_dims) or sum(self.block_dims) != N:
            raise BadBlocks(f"block_dims {self.block_dims} do not partition ambient size {N}")
        if self.dim != sum(n * n for n in self.block_dims):
            raise BadBlocks("basis does not span the full block algebra")
        mask = np.zeros((N, N), dtype=bool)
        offset = 0
        for n in self.block_dims:
            mask[offset:offset + n, offset:offset + n] = True
            offset += n
        if np.abs(basis[:, ~mask]).max(initial=0.0) > tol:
            raise BadBlocks("basis elements are not block diagonal")

        units, res = self._coords(matrix_units(self.block_dims))
        if res > tol:
            raise BadBlocks("matrix units are not in the span")
        self.unit_coeffs = units

    @classmethod
    def full(cls, block_dims, name: str | None = None) -> "StarAlgebra":
        """``⊕ M_{n_k}`` with its canonical matrix-unit basis."""
        return cls(matrix_units(block_dims), block_dims, name=name)

    @classmethod
    def abelian(cls, n: int, name: str | None = None) -> "StarAlgebra":
        """``ℂ^n`` with the basis of minimal projections (delta functions)."""
        return cls.full((1,) * n, name=name)

    def _coords(self, mats):
        flat = mats.reshape(mats.shape[0], -1)
        coeffs = flat @ self._pinv
        back = coeffs @ self.basis.reshape(self.dim, -1)
        res = float(np.abs(back - flat).max(initial=0.0))
        return coeffs, res

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<StarAlgebra{label} blocks={self.block_dims} dim={self.dim}>"

    # coefficient-level operations

    def coeffs_of(self, matrix) -> np.ndarray:
        """Coefficients of an ambient matrix; raises if it is not in the algebra."""
        coeffs, res = self._coords(np.asarray(matrix, dtype=complex)[None])
        if res > STRUCTURE_TOL * max(1.0, op_norm(matrix)):
            raise AlgebraMismatch("matrix does not lie in the algebra")
        return coeffs[0]

    def to_matrix(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs), self.basis, axes=(0, 0))

    def multiply(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.mult)

    def adjoint(self, x) -> np.ndarray:
        return np.conj(x) @ self.star

    def element(self, coeffs) -> "Element":
        return Element(self, np.asarray(coeffs, dtype=complex))

    def one(self) -> "Element":
        return Element(self, self.unit.astype(complex))

    def basis_element(self, i: int) -> "Element":
        c = np.zeros(self.dim, dtype=complex)
        c[i] = 1.0
        return Element(self, c)


class TensorAlgebra:
    """The tensor product ``left ⊗ right`` of two star algebras.

    The basis is all pairs ``l_i⊗r_a`` in lexicographic order, so an element's
    coefficient vector reshapes to a ``(left.dim, right.dim)`` matrix.
    """

    is_tensor = True

    def __init__(self, left: StarAlgebra, right: StarAlgebra):
        self.left = left
        self.right = right
        self.dim = left.dim * right.dim
        self.ambient_dim = left.ambient_dim * right.ambient_dim
        self.unit = np.kron(left.unit, right.unit)
        self._basis = None

    def __eq__(self, other):
        return (
            isinstance(other, TensorAlgebra)
            and other.left is self.left
            and other.right is self.right
        )

    def __hash__(self):
        return hash((id(self.left), id(self.right)))

    def __repr__(self):
        return f"<TensorAlgebra {self.left!r} ⊗ {self.right!r}>"

    @property
    def basis(self) -> np.ndarray:
        if self._basis is None:
            L, R = self.left.basis, self.right.basis
            b = np.einsum("iab,jcd->ijacbd", L, R)
            self._basis = b.reshape(self.dim, self.ambient_dim, self.ambient_dim)
        return self._basis

    def to_matrix(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs).reshape(self.left.dim, self.right.dim)
        m = np.einsum("ij,iab,jcd->acbd", c, self.left.basis, self.right.basis)
        return m.reshape(self.ambient_dim, self.ambient_dim)

    def multiply(self, x, y) -> np.ndarray:
        dl, dr = self.left.dim, self.right.dim
        z = np.einsum(
            "ia,jb,ijk,abc->kc",
            np.asarray(x).reshape(dl, dr),
            np.asarray(y).reshape(dl, dr),
            self.left.mult,
            self.right.mult,
            optimize=True,
        )
        return z.reshape(-1)

    def adjoint(self, x) -> np.ndarray:
        c = np.conj(np.asarray(x)).reshape(self.left.dim, self.right.dim)
        return (self.left.star.T @ c @ self.right.star).reshape(-1)

    def element(self, coeffs) -> "Element":
        return Element(self, np.asarray(coeffs, dtype=complex))

    def one(self) -> "Element":
        return Element(self, self.unit.astype(complex))

    def simple_tensor(self, r: "Element", a: "Element") -> "Element":
        if r.algebra is not self.left or a.algebra is not self.right:
            raise AlgebraMismatch("factors do not belong to the tensor factors")
        return Element(self, np.kron(r.coeffs, a.coeffs))


def _same_algebra(a, b) -> bool:
    return a is b or (a.is_tensor and a == b)


@dataclass(frozen=True, eq=False)
class Element:
    """An element of a (tensor) star algebra, by basis coefficients."""

    algebra: object
    coeffs: np.ndarray

    def _check(self, other: "Element"):
        if not _same_algebra(self.algebra, other.algebra):
            raise AlgebraMismatch("elements belong to different algebras")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            self._check(other)
            return Element(self.algebra, self.algebra.multiply(self.coeffs, other.coeffs))
        return Element(self.algebra, self.coeffs * other)

    def __rmul__(self, scalar):
        return Element(self.algebra, scalar * self.coeffs)

    def adjoint(self) -> "Element":
        return Element(self.algebra, self.algebra.adjoint(self.coeffs))

    @property
    def matrix(self) -> np.ndarray:
        return self.algebra.to_matrix(self.coeffs)

    def norm(self) -> float:
        """C*-norm, i.e. the operator norm of the ambient matrix."""
        return op_norm(self.matrix)


@dataclass(frozen=True, eq=False)
class Functional:
    """A linear functional given by its values on the basis."""

    algebra: object
    values: np.ndarray

    def __call__(self, x) -> complex:
        if isinstance(x, Element):
            if not _same_algebra(self.algebra, x.algebra):
                raise AlgebraMismatch("functional and element live on different algebras")
            x = x.coeffs
        return complex(self.values @ np.asarray(x))

    def _check(self, other: "Functional"):
        if not _same_algebra(self.algebra, other.algebra):
            raise AlgebraMismatch("functionals live on different algebras")

    def __add__(self, other: "Functional") -> "Functional":
        self._check(other)
        return Functional(self.algebra, self.values + other.values)

    def __sub__(self, other: "Functional") -> "Functional":
        self._check(other)
        return Functional(self.algebra, self.values - other.values)

    def __mul__(self, scalar) -> "Functional":
        return Functional(self.algebra, self.values * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Functional":
        return Functional(self.algebra, self.values / scalar)

    @property
    def total(self) -> complex:
        """The value ``f(1)``."""
        return complex(self.values @ self.algebra.unit)

    def block_representatives(self) -> list[np.ndarray]:
        """Matrices ``X_k`` with ``f(a) = Σ_k Tr(X_k a_k)``."""
        alg = self.algebra
        if alg.is_tensor:
            raise AlgebraMismatch("block representatives need a block-form algebra")
        vals = alg.unit_coeffs @ self.values
        reps = []
        offset = 0
        for n in alg.block_dims:
            reps.append(vals[offset:offset + n * n].reshape(n, n).T.copy())
            offset += n * n
        return reps

    def is_positive(self, tol: float = POSITIVITY_TOL) -> bool:
        for x in self.block_representatives():
            if np.abs(x - x.conj().T).max() > tol:
                return False
            if np.linalg.eigvalsh((x + x.conj().T) / 2).min() < -tol:
                return False
        return True

    def is_state(self, tol: float = POSITIVITY_TOL) -> bool:
        return abs(self.total - 1) <= tol and self.is_positive(tol)


def tensor_functional(mu: Functional, nu: Functional) -> Functional:
    """``μ⊗ν`` on ``TensorAlgebra(μ.algebra, ν.algebra)``."""
    return Functional(TensorAlgebra(mu.algebra, nu.algebra), np.kron(mu.values, nu.values))


def slice_left(mu: Functional, t: Element) -> Element:
    """The slice map ``(μ⊗ι)(t)`` for ``t`` in ``R⊗A``."""
    alg = t.algebra
    if not alg.is_tensor or mu.algebra is not alg.left:
        raise AlgebraMismatch("functional is not defined on the left tensor factor")
    c = t.coeffs.reshape(alg.left.dim, alg.right.dim)
    return Element(alg.right, mu.values @ c)


def dual_norm(f: Functional) -> float:
    """Norm of ``f`` dual to the C*-norm: the sum of trace norms of its blocks."""
    return float(sum(np.linalg.norm(x, "nuc") for x in f.block_representatives()))


def functional_from_density(alg: StarAlgebra, rho) -> Functional:
    """``a ↦ Tr(ρ a)`` for a block-diagonal ambient matrix ``ρ``."""
    rho = np.asarray(rho, dtype=complex)
    return Functional(alg, np.einsum("ij,bji->b", rho, alg.basis))


def vector_state(alg: StarAlgebra, block: int, xi) -> Functional:
    """The vector state ``a ↦ ⟨ξ, a_k ξ⟩`` on block ``k``; ``ξ`` is normalized."""
    xi = np.asarray(xi, dtype=complex)
    xi = xi / np.linalg.norm(xi)
    offset = sum(alg.block_dims[:block])
    v = np.zeros(alg.ambient_dim, dtype=complex)
    v[offset:offset + len(xi)] = xi
    return functional_from_density(alg, np.outer(v, v.conj()))


def state_spanning_family(alg: StarAlgebra) -> list[Functional]:
    """Vector states whose real span is the space of Hermitian functionals.

    Within each block of size ``n`` the frame is ``e_i``, then
    ``(e_i+e_j)/√2`` and ``(e_i+i·e_j)/√2`` for ``i < j``: ``n²`` states per
    block, ``dim(alg)`` in total.
    """
    family = []
    for k, n in enumerate(alg.block_dims):
        eye = np.eye(n)
        for i in range(n):
            family.append(vector_state(alg, k, eye[i]))
        for i in range(n):
            for j in range(i + 1, n):
                family.append(vector_state(alg, k, eye[i] + eye[j]))
                family.append(vector_state(alg, k, eye[i] + 1j * eye[j]))
    return family


def normalized_trace(alg: StarAlgebra) -> Functional:
    """``Tr(a) / N`` on the ambient ``N×N`` matrices."""
    return functional_from_density(alg, np.eye(alg.ambient_dim) / alg.ambient_dim)


def random_positive(alg: StarAlgebra, rng: np.random.Generator, total: float = 1.0) -> Functional:
    """A random positive functional with ``f(1) = total``."""
    N = alg.ambient_dim
    rho = np.zeros((N, N), dtype=complex)
    offset = 0
    for n in alg.block_dims:
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho[offset:offset + n, offset:offset + n] = g @ g.conj().T * rng.uniform(0.05, 1.0)
        offset += n
    rho *= total / np.trace(rho).real
    return functional_from_density(alg, rho)


def random_state(alg: StarAlgebra, rng: np.random.Generator) -> Functional:
    return random_positive(alg, rng, 1.0)


def validate_algebra(basis, block_dims, name: str | None = None) -> StarAlgebra:
    """Build a :class:`StarAlgebra`, running all structure checks."""
    return StarAlgebra(basis, block_dims, name=name)

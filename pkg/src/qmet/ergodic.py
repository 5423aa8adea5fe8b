"""Fixed space, mean projection and the weak mean ergodic experiment.

``V`` is the set of vectors fixed by every ``θ̃^α``.  Quantifying over all
states is replaced by the finite spanning family: any state is a real-affine
combination of family members with coefficients summing to 1, and
``θ ↦ θ̃^α`` is linear, so a vector fixed by every family member is fixed by
every state.

Weak convergence ``⟨x, φ̃_n^α y⟩ → ⟨x, Py⟩`` for all ``x, y`` is certified by
the largest matrix entry of ``K_n − P`` in the orthonormal GNS basis; since
all ``K_n`` are contractions this is uniform over the unit ball.  No
transfer operator is assumed normal: ``P`` is built from ``V`` geometrically.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import Element, Functional
from .dynamics import Action, GnsSpace, transfer_operator
from .errors import InconsistentVerdict
from .linalg import null_space, projector, range_space
from .quantum_group import AveragingNet, amenability_defect

DEFAULT_TOL = 5e-3
RANK_TOL = 1e-9


def _operators(act: Action, g: GnsSpace, thetas) -> list[np.ndarray]:
    return [transfer_operator(t, act, g).matrix for t in thetas]


def fixed_space(act: Action, g: GnsSpace, thetas, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``V = ∩_θ ker(θ̃^α − I)``.

    The rank cutoff is relative to ``max(‖stack‖, 1)``: the ``K_θ`` are
    contractions, so roundoff-sized blocks count as zero.
    """
    eye = np.eye(g.dim)
    stacked = np.vstack([k - eye for k in _operators(act, g, thetas)])
    return null_space(stacked, tol=tol, atol=tol)


def complement_space(act: Action, g: GnsSpace, thetas, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of ``N = span{x − θ̃^α x}``."""
    eye = np.eye(g.dim)
    return range_space(np.hstack([eye - k for k in _operators(act, g, thetas)]), tol=tol, atol=tol)


def mean_projection(act: Action, g: GnsSpace, thetas, tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projection of ``H`` onto the fixed space."""
    return projector(fixed_space(act, g, thetas, tol=tol))


def decomposition_check(act: Action, g: GnsSpace, thetas, tol: float = RANK_TOL) -> dict:
    """Compare ``V`` with ``N``: orthogonality defect and dimension count."""
    v = fixed_space(act, g, thetas, tol=tol)
    n = complement_space(act, g, thetas, tol=tol)
    overlap = float(np.abs(v.conj().T @ n).max(initial=0.0))
    return {
        "dim_H": g.dim,
        "dim_V": v.shape[1],
        "dim_N": n.shape[1],
        "orthogonality_defect": overlap,
        "complementary": v.shape[1] + n.shape[1] == g.dim,
    }


def cyclic_vector_check(act: Action, g: GnsSpace, thetas) -> float:
    """``‖PΩ − Ω‖`` for the cyclic vector ``Ω = γ(1)``."""
    p = mean_projection(act, g, thetas)
    return float(np.linalg.norm(p @ g.omega_vector - g.omega_vector))


def correlation_matrix(phi: Functional, act: Action, omega: Functional) -> np.ndarray:
    """``M[i, b] = (φ⊗ω)([1⊗a_i] α(a_b))`` over basis elements of ``A``."""
    w = np.einsum("ikl,l->ik", act.source.mult, omega.values)  # ω(a_i a_k)
    return np.einsum("bjk,j,ik->ib", act.alpha, phi.values, w)


def _pair_coeffs(x):
    return x.coeffs if isinstance(x, Element) else np.asarray(x)


def correlation_defect(phi: Functional, act: Action, omega: Functional, pairs=None) -> float:
    """``max |(φ⊗ω)([1⊗a]α(b)) − ω(a)ω(b)|`` over ``pairs`` (default: basis pairs)."""
    m = correlation_matrix(phi, act, omega)
    if pairs is None:
        return float(np.abs(m - np.outer(omega.values, omega.values)).max())
    worst = 0.0
    for a, b in pairs:
        a, b = _pair_coeffs(a), _pair_coeffs(b)
        val = a @ m @ b - (omega.values @ a) * (omega.values @ b)
        worst = max(worst, abs(val))
    return float(worst)


@dataclass
class ErgodicReport:
    net: dict
    dim_H: int
    dim_V: int
    rows: list = field(default_factory=list)
    final_dev: float = 0.0
    tolerance: float = DEFAULT_TOL
    converged: bool = False
    annihilation: float = 0.0
    dim_N: int = 0

    def deviations(self) -> np.ndarray:
        return np.array([r["dev"] for r in self.rows])

    def to_dict(self) -> dict:
        return asdict(self)


def ergodic_average_experiment(
    net: AveragingNet,
    act: Action,
    g: GnsSpace,
    thetas,
    pairs=None,
    tol: float = DEFAULT_TOL,
    projection: np.ndarray | None = None,
) -> ErgodicReport:
    """Track ``dev(n) = max_{ij} |(K_n − P)_{ij}|`` along the net.

    Each row also carries the amenability defect of ``φ_n`` and the
    correlation defect used by :func:`ergodicity_test`.  ``annihilation`` is
    the largest ``|⟨e_i, K_N y⟩|`` over an orthonormal basis ``y`` of ``N`` at
    the last index.
    """
    thetas = list(thetas)
    p = mean_projection(act, g, thetas) if projection is None else projection
    dim_v = int(round(np.trace(p).real))
    n_basis = complement_space(act, g, thetas)
    report = ErgodicReport(net=net.describe(), dim_H=g.dim, dim_V=dim_v, tolerance=tol, dim_N=n_basis.shape[1])
    k = None
    for n, phi in enumerate(net.states(), start=1):
        k = transfer_operator(phi, act, g).matrix
        report.rows.append(
            {
                "n": n,
                "dev": float(np.abs(k - p).max(initial=0.0)),
                "amenability_defect": amenability_defect(phi, net.qg, thetas),
                "correlation_defect": correlation_defect(phi, act, g.omega, pairs),
            }
        )
    if report.rows:
        report.final_dev = report.rows[-1]["dev"]
        report.annihilation = float(np.abs(k @ n_basis).max(initial=0.0))
    report.converged = report.final_dev <= tol
    return report


@dataclass
class Verdict:
    dim_V: int
    ergodic_by_dimension: bool
    final_correlation_defect: float
    ergodic_by_correlation: bool
    correlation_defects: list
    tolerance: float

    @property
    def ergodic(self) -> bool:
        return self.ergodic_by_dimension

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ergodic"] = self.ergodic
        return out


def ergodicity_test(
    act: Action,
    g: GnsSpace,
    net: AveragingNet,
    test_elements=None,
    thetas=None,
    tol: float = DEFAULT_TOL,
    report: ErgodicReport | None = None,
) -> Verdict:
    """Compare ``dim V = 1`` with factorization of correlations along the net.

    Raises :class:`InconsistentVerdict` when the two criteria disagree at
    the final index.
    """
    if thetas is None:
        from .algebra import state_spanning_family

        thetas = state_spanning_family(act.group.algebra)
    thetas = list(thetas)
    dim_v = fixed_space(act, g, thetas).shape[1]
    if report is not None and test_elements is None:
        defects = [(r["n"], r["correlation_defect"]) for r in report.rows]
    else:
        defects = [
            (n, correlation_defect(phi, act, g.omega, test_elements))
            for n, phi in enumerate(net.states(), start=1)
        ]
    final = defects[-1][1]
    verdict = Verdict(
        dim_V=dim_v,
        ergodic_by_dimension=dim_v == 1,
        final_correlation_defect=final,
        ergodic_by_correlation=final <= tol,
        correlation_defects=defects,
        tolerance=tol,
    )
    if verdict.ergodic_by_dimension != verdict.ergodic_by_correlation:
        raise InconsistentVerdict(
            f"dim V = {dim_v} but final correlation defect is {final:.3g} (tolerance {tol:g})"
        )
    return verdict


def spectral_report(k: np.ndarray, p: np.ndarray, peripheral_tol: float = 1e-9) -> dict:
    """Singular values, eigenvalues and peripheral eigenvectors' distance to ``V``."""
    sv = np.linalg.svd(k, compute_uv=False)
    w, vecs = np.linalg.eig(k)
    order = sorted(range(len(w)), key=lambda i: (-round(abs(w[i]), 10), round(float(np.angle(w[i])), 10)))
    w, vecs = w[order], vecs[:, order]
    radius = float(np.abs(w).max(initial=0.0))
    eye = np.eye(k.shape[0])
    distances = []
    for lam, v in zip(w, vecs.T):
        if abs(lam) >= 1 - peripheral_tol:
            v = v / np.linalg.norm(v)
            distances.append(float(np.linalg.norm((eye - p) @ v)))
    return {
        "singular_values": [float(s) for s in sv],
        "eigenvalues": [[float(z.real), float(z.imag)] for z in w],
        "spectral_radius": radius,
        "peripheral_distance_to_V": distances,
    }

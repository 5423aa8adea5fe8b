"""Dense complex linear algebra shared by the rest of the package.

Everything here is a pure function of its arguments.  Spectral routines
return bases in a canonical form (fixed phases, fixed order inside
degenerate clusters) so that reports built on top of them are reproducible
bit for bit.
"""

from __future__ import annotations

import numpy as np

from .errors import NotHermitian

_ROUND_DECIMALS = 8


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a⊗b)(c⊗d) = ac⊗bd``."""
    return np.kron(np.asarray(a), np.asarray(b))


def op_norm(m) -> float:
    """Operator (largest singular value) norm; 0 for empty matrices."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > 1e-8)
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


def _sort_key(v: np.ndarray):
    r = np.round(v, _ROUND_DECIMALS) + 0.0  # drops negative zeros
    return tuple((float(x.real), float(x.imag)) for x in r)


def canonical_basis(q: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the column span of ``q``.

    ``q`` must have orthonormal columns.  The result depends only on the
    spanned subspace (up to roundoff): columns of the orthogonal projector
    are orthonormalized in index order, phases are fixed so the first
    significant coordinate is real positive, and the vectors are sorted
    lexicographically (descending) on rounded coordinates.
    """
    q = np.asarray(q, dtype=complex)
    n, k = q.shape
    if k == 0:
        return q.copy()
    proj = q @ q.conj().T
    threshold = 0.5 / np.sqrt(n)
    cols: list[np.ndarray] = []
    for j in range(n):
        v = proj[:, j].copy()
        for _ in range(2):
            for c in cols:
                v -= c * np.vdot(c, v)
        nv = np.linalg.norm(v)
        if nv > threshold:
            cols.append(v / nv)
            if len(cols) == k:
                break
    cols = [_fix_phase(c) for c in cols]
    cols.sort(key=_sort_key, reverse=True)
    return np.column_stack(cols)


def hermitian_eig(m, tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real eigenvalues sorted in
    descending order and orthonormal eigenvector columns.  Vectors belonging
    to a degenerate cluster are put into canonical form, see
    :func:`canonical_basis`.

    Raises :class:`NotHermitian` if ``‖m − m*‖ > tol·‖m‖``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    scale = op_norm(m)
    if op_norm(m - m.conj().T) > tol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, u = np.linalg.eigh((m + m.conj().T) / 2)
    w = w[::-1]
    u = u[:, ::-1]
    cluster_tol = 1e-9 * max(scale, 1.0)
    out = np.empty((n, n), dtype=complex)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] <= cluster_tol:
            stop += 1
        out[:, start:stop] = canonical_basis(u[:, start:stop])
        start = stop
    return w.copy(), out


def null_space(m, tol: float = 1e-9, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of ``{x : ‖mx‖ ≤ tol·‖m‖·‖x‖}``.

    The dimension equals the number of right singular vectors whose singular
    value is at most ``max(tol·‖m‖, atol)``.  For ``m = 0`` the whole space is
    returned; ``atol`` lets callers treat roundoff-sized ``m`` as zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, dtype=complex)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    cutoff = max(tol * (s[0] if s.size else 0.0), atol)
    rank = int(np.sum(s > cutoff))
    return canonical_basis(vh[rank:].conj().T)


def range_space(m, tol: float = 1e-9, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``m``."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    cutoff = max(tol * (s[0] if s.size else 0.0), atol)
    rank = int(np.sum(s > cutoff)) if s.size and s[0] > 0 else 0
    return canonical_basis(u[:, :rank])


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection ``B B*`` onto the span of orthonormal columns."""
    basis = np.asarray(basis, dtype=complex)
    return basis @ basis.conj().T

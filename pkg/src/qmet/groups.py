"""Finite groups as Cayley tables with element 0 the identity."""

from __future__ import annotations

import itertools

import numpy as np

from .errors import MissingBlockData, NotAGroup


def validate_cayley(table) -> np.ndarray:
    """Check that ``table[g, h] = gh`` defines a group with identity 0."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotAGroup("Cayley table must be a nonempty square array")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(np.equal(np.mod(t, 1), 0)):
            raise NotAGroup("Cayley table entries must be integers")
        t = t.astype(int)
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise NotAGroup("Cayley table entries out of range")
    if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
        raise NotAGroup("element 0 is not the identity")
    for row in t:
        if len(set(row.tolist())) != n:
            raise NotAGroup("a row is not a permutation (no inverses)")
    lhs = t[t]  # lhs[g, h, k] = (gh)k
    rhs = t[np.arange(n)[:, None, None], t[None, :, :]]  # g(hk)
    if not np.array_equal(lhs, rhs):
        raise NotAGroup("multiplication is not associative")
    return t


def inverses(table) -> np.ndarray:
    t = np.asarray(table)
    return np.argmax(t == 0, axis=1)


def is_abelian(table) -> bool:
    t = np.asarray(table)
    return bool(np.array_equal(t, t.T))


def cyclic(n: int) -> np.ndarray:
    if n < 1:
        raise NotAGroup("cyclic group order must be positive")
    g = np.arange(n)
    return (g[:, None] + g[None, :]) % n


def klein4() -> np.ndarray:
    g = np.arange(4)
    return g[:, None] ^ g[None, :]


def symmetric_permutations(n: int) -> list[tuple[int, ...]]:
    """All permutations of ``range(n)`` in lexicographic order (identity first)."""
    return list(itertools.permutations(range(n)))


def symmetric(n: int) -> np.ndarray:
    """Cayley table of ``S_n``; ``(gh)(x) = g(h(x))``."""
    perms = symmetric_permutations(n)
    index = {p: i for i, p in enumerate(perms)}
    size = len(perms)
    table = np.empty((size, size), dtype=int)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            table[i, j] = index[tuple(g[h[x]] for x in range(n))]
    return table


def symmetric_irreps(n: int) -> list[np.ndarray]:
    """Trivial, sign and standard irreps of ``S_n`` for ``n ≤ 3``.

    Each irrep is an array of shape ``(|G|, d, d)`` indexed like
    :func:`symmetric`.  For ``n = 3`` these exhaust the irreps.
    """
    if n > 3:
        raise MissingBlockData("builtin irreps are only provided for S_n with n ≤ 3")
    perms = symmetric_permutations(n)
    pm = np.array([np.eye(n)[:, list(p)] for p in perms])  # pm[g] e_x = e_{g(x)}
    trivial = np.ones((len(perms), 1, 1), dtype=complex)
    sign = np.array([[[np.linalg.det(m)]] for m in pm], dtype=complex)
    irreps = [trivial]
    if n >= 2:
        irreps.append(sign)
    if n == 3:
        # orthonormal basis of the complement of (1,1,1)
        q = np.array([[1, -1, 0], [1, 1, -2]], dtype=float).T
        q /= np.linalg.norm(q, axis=0)
        irreps.append(np.array([q.T @ m @ q for m in pm], dtype=complex))
    return irreps


def abelian_characters(table) -> np.ndarray:
    """Character table of an abelian group, rows ordered lexicographically.

    Returns ``chi`` with ``chi[c, g]`` the value of character ``c`` at ``g``,
    snapped to exact ``|G|``-th roots of unity.  Rows are sorted by the
    integer exponent vector ``k`` with ``chi[c, g] = exp(2πi k_g / |G|)``.
    """
    t = validate_cayley(table)
    if not is_abelian(t):
        raise MissingBlockData("characters only determine the blocks of an abelian group")
    n = t.shape[0]
    # regular representation L_g δ_h = δ_{gh}
    reg = np.zeros((n, n, n))
    for g in range(n):
        reg[g, t[g], np.arange(n)] = 1.0
    weights = np.exp(1j * np.sqrt(2.0) * np.arange(1, n + 1)) * np.sqrt(np.arange(1, n + 1))
    generic = np.tensordot(weights, reg, axes=(0, 0))
    _, vecs = np.linalg.eig(generic)
    exps = set()
    for v in vecs.T:
        chi = np.conj(v / v[0])  # eigenvector components are conj(χ(h))
        k = np.mod(np.round(np.angle(chi) * n / (2 * np.pi)).astype(int), n)
        exps.add(tuple(int(x) for x in k))
    rows = sorted(exps)
    if len(rows) != n:
        raise MissingBlockData("failed to separate the characters")
    chi = np.exp(2j * np.pi * np.array(rows) / n)
    for c in chi:
        if np.abs(c[t] - np.outer(c, c)).max() > 1e-9:
            raise MissingBlockData("computed character is not multiplicative")
    return chi


def validate_irreps(table, irreps, tol: float = 1e-9) -> list[np.ndarray]:
    """Check that ``irreps`` is a complete set of inequivalent unitary irreps."""
    t = validate_cayley(table)
    n = t.shape[0]
    out = []
    for pi in irreps:
        pi = np.asarray(pi, dtype=complex)
        if pi.ndim != 3 or pi.shape[0] != n or pi.shape[1] != pi.shape[2]:
            raise MissingBlockData("each irrep must have shape (|G|, d, d)")
        d = pi.shape[1]
        if np.abs(pi[0] - np.eye(d)).max() > tol:
            raise MissingBlockData("irrep does not send the identity to 1")
        prod = np.einsum("gab,hbc->ghac", pi, pi)
        if np.abs(prod - pi[t]).max() > tol:
            raise MissingBlockData("block data is not a representation")
        if np.abs(np.einsum("gab,gcb->gac", pi, pi.conj()) - np.eye(d)).max() > tol:
            raise MissingBlockData("block data is not unitary")
        out.append(pi)
    chars = np.array([np.trace(pi, axis1=1, axis2=2) for pi in out])
    gram = chars.conj() @ chars.T / n
    if np.abs(gram - np.eye(len(out))).max() > tol:
        raise MissingBlockData("block data is reducible or has equivalent irreps")
    if sum(pi.shape[1] ** 2 for pi in out) != n:
        raise MissingBlockData("block data is incomplete (Σ d_k² ≠ |G|)")
    return out


def builtin_group(spec: str):
    """Resolve ``cyclic:n``, ``symmetric:n`` or ``klein4`` to ``(table, irreps)``.

    ``irreps`` is ``None`` unless builtin block data exists for a nonabelian
    group.
    """
    kind, _, arg = spec.partition(":")
    if kind == "cyclic":
        return cyclic(int(arg)), None
    if kind == "symmetric":
        n = int(arg)
        irreps = symmetric_irreps(n) if n == 3 else None
        return symmetric(n), irreps
    if kind == "klein4":
        return klein4(), None
    raise ValueError(f"unknown builtin group {spec!r}")

"""Exact integer linear algebra.

Ranks are found by elimination modulo a large prime, which can only
underestimate the rational rank; the result is then certified by checking that
every row is orthogonal to the exact nullspace of the chosen pivot rows. All
returned quantities are exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

PRIME = 2_147_483_629


def as_int_matrix(M) -> np.ndarray:
    """Object array of Python ints; rows holding fractions are cleared of denominators."""
    A = np.array(M, dtype=object)
    if A.ndim == 1:
        A = A[None, :]
    out = np.empty(A.shape, dtype=object)
    for i, row in enumerate(A):
        dens = [Fraction(v).denominator for v in row]
        d = lcm(*dens) if dens else 1
        out[i] = [int(Fraction(v) * d) for v in row]
    return out


def _is_small(A: np.ndarray) -> bool:
    if A.size == 0:
        return True
    if A.dtype != object:
        return True
    return max(abs(int(v)) for v in A.flat) < 2**62


def independent_rows_modp(A, p: int = PRIME) -> list[int]:
    """Indices of rows that are linearly independent modulo p (hence over Q)."""
    A = np.asarray(A)
    R, C = A.shape
    if R == 0 or C == 0:
        return []
    if _is_small(A):
        W = np.mod(A.astype(np.int64), p)
    else:
        W = np.array([[int(v) % p for v in row] for row in A], dtype=np.int64)
    alive = np.ones(R, dtype=bool)
    pivots = []
    for col in range(C):
        cand = np.nonzero(alive & (W[:, col] != 0))[0]
        if len(cand) == 0:
            continue
        piv = cand[0]
        alive[piv] = False
        pivots.append(int(piv))
        inv = pow(int(W[piv, col]), p - 2, p)
        W[piv] = (W[piv] * inv) % p
        rows = np.nonzero(alive & (W[:, col] != 0))[0]
        if len(rows):
            W[rows] = (W[rows] - (W[rows, col][:, None] * W[piv]) % p) % p
        if not alive.any():
            break
    return sorted(pivots)


def gauss_jordan(M):
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(E, pivot_cols, D)``: E has the same row space as M, its first
    ``len(pivot_cols)`` rows hold D on their pivot column and zero on the
    other pivot columns, and the remaining rows are zero.
    """
    E = np.array(M, dtype=object, copy=True)
    if E.ndim == 1:
        E = E[None, :]
    R, C = E.shape
    prev = 1
    row = 0
    pivots = []
    for col in range(C):
        if row == R:
            break
        nz = [i for i in range(row, R) if E[i, col] != 0]
        if not nz:
            continue
        i = nz[0]
        if i != row:
            E[[row, i]] = E[[i, row]]
        piv = E[row, col]
        others = [i for i in range(R) if i != row]
        if others:
            num = E[others] * piv - np.outer(E[others, col], E[row])
            q = num // prev
            assert not np.any(q * prev - num), "inexact fraction-free division"
            E[others] = q
        pivots.append(col)
        prev = piv
        row += 1
    if pivots and prev < 0:
        E[:row] = -E[:row]
        prev = -prev
    return E, pivots, prev if pivots else 1


def primitive(v) -> np.ndarray:
    v = np.array(v, dtype=object)
    g = 0
    for x in v:
        g = gcd(g, int(x))
        if g == 1:
            break
    if g > 1:
        v = np.array([int(x) // g for x in v], dtype=object)
    return v


def canonical_sign(v) -> np.ndarray:
    v = primitive(v)
    for x in v:
        if x != 0:
            return -v if x < 0 else v
    return v


def nullspace_of(M) -> np.ndarray:
    """Integer basis (rows, primitive) of {y : M y = 0}, computed exactly."""
    A = as_int_matrix(M)
    R, C = A.shape
    if R == 0:
        return np.array([[int(i == j) for j in range(C)] for i in range(C)], dtype=object).reshape(C, C)
    E, piv, D = gauss_jordan(A)
    free = [c for c in range(C) if c not in set(piv)]
    out = np.zeros((len(free), C), dtype=object)
    for t, f in enumerate(free):
        out[t, f] = D
        for r, pc in enumerate(piv):
            out[t, pc] = -E[r, f]
        out[t] = canonical_sign(out[t])
    return out


def _certify(A, basis_rows):
    """Grow ``basis_rows`` until every row of A lies in their span (exactly)."""
    basis = list(basis_rows)
    while True:
        N = nullspace_of(A[basis]) if basis else np.eye(A.shape[1], dtype=np.int64).astype(object)
        if N.shape[0] == 0:
            return basis, N
        bad = np.nonzero(np.any(A.dot(N.T) != 0, axis=1))[0]
        if len(bad) == 0:
            return basis, N
        basis = sorted(set(basis) | {int(bad[0])})


def exact_rank(M, target: int | None = None) -> int:
    """Rank over Q. ``target`` is a known upper bound that lets the check stop early."""
    A = as_int_matrix(M) if not (isinstance(M, np.ndarray) and M.dtype != object) else M
    if A.size == 0:
        return 0
    rows = independent_rows_modp(A)
    upper = min(A.shape)
    if target is not None:
        upper = min(upper, target)
    if len(rows) >= upper:
        return len(rows)
    A = as_int_matrix(A) if A.dtype != object else A
    basis, _ = _certify(A, rows)
    return len(basis)


def row_basis(M) -> tuple[list[int], np.ndarray]:
    """(indices of a maximal independent row set, integer basis of the nullspace)."""
    A = as_int_matrix(M)
    return _certify(A, independent_rows_modp(A))


def homogenize(points) -> np.ndarray:
    P = as_int_matrix(points)
    return np.hstack([np.ones((P.shape[0], 1), dtype=object), P])


def affine_dimension(points) -> int:
    P = np.asarray(points)
    if len(P) == 0:
        raise ValueError("affine dimension of an empty set")
    H = homogenize(P)
    return exact_rank(H) - 1


def hull_equations(points) -> list[tuple[np.ndarray, int]]:
    """Affine equations ``a . v == b`` satisfied by all points (a basis, primitive, canonical sign)."""
    H = homogenize(points)
    _, N = row_basis(H)
    out = []
    for row in N:
        b, a = -row[0], row[1:]
        v = canonical_sign(np.concatenate([a, [b]]))
        out.append((v[:-1], int(v[-1])))
    return out


def independent_columns(points) -> list[int]:
    """Coordinates whose projection is injective on the affine hull of the points."""
    P = as_int_matrix(points)
    D = P[1:] - P[0]
    if D.shape[0] == 0:
        return []
    basis, _ = row_basis(D.T)
    return basis

"""Exact linear programming.

``linprog_exact`` maximizes over ``{x : A_ub x <= b_ub, A_eq x == b_eq, x >= 0}``.
Two engines give the same certified answer:

* ``simplex``: two-phase tableau simplex over Fractions with Bland's rule.
* ``highs``: scipy's HiGHS finds a candidate; an exact primal vertex is
  recovered from its support and active rows, and HiGHS's multipliers are
  rationalized (or recomputed from complementary slackness). Only if primal
  feasibility, dual feasibility and equal objective values all hold exactly is
  the answer returned; otherwise the exact simplex runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from eqbell.config import caps
from eqbell.geometry.linalg import as_int_matrix, gauss_jordan, independent_rows_modp
from eqbell.geometry.polytope import InfeasibleError, UnboundedError


@dataclass
class LPResult:
    value: Fraction
    x: list
    engine: str
    dual: list | None = None


def _frac_matrix(M, cols):
    if M is None or len(M) == 0:
        return [[]][:0]
    return [[Fraction(v) for v in row] for row in np.asarray(M, dtype=object).reshape(-1, cols)]


def _frac_vec(v):
    return [] if v is None else [Fraction(x) for x in np.asarray(v, dtype=object).ravel()]


# ---------------------------------------------------------------- simplex

def _pivot(T, r, c):
    pr = T[r]
    inv = 1 / pr[c]
    if inv != 1:
        T[r] = pr = [v * inv for v in pr]
    nzc = [j for j, v in enumerate(pr) if v]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nzc:
                row[j] -= f * pr[j]


def _run(T, basis, ncols, allowed):
    """Maximize the objective stored in the last row (as reduced costs ``-c``)."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        enter = next((j for j in range(ncols) if allowed[j] and obj[j] < 0), None)
        if enter is None:
            return
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise UnboundedError("objective is unbounded")
        _pivot(T, best[1], enter)
        basis[best[1]] = enter


def simplex_exact(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LPResult:
    c = _frac_vec(c)
    n = len(c)
    Au, bu = _frac_matrix(A_ub, n), _frac_vec(b_ub)
    Ae, be = _frac_matrix(A_eq, n), _frac_vec(b_eq)
    mu, me = len(Au), len(Ae)
    caps.check("max_lp_variables", n + mu)
    # columns: x (n), slacks (mu), artificials (mu + me)
    rows = []
    for i in range(mu):
        rows.append((Au[i] + [Fraction(int(j == i)) for j in range(mu)], bu[i]))
    for i in range(me):
        rows.append((Ae[i] + [Fraction(0)] * mu, be[i]))
    m = len(rows)
    nart = m
    ncols = n + mu + nart
    T = []
    for i, (row, rhs) in enumerate(rows):
        sgn = -1 if rhs < 0 else 1
        art = [Fraction(int(j == i)) for j in range(nart)]
        T.append([sgn * v for v in row] + art + [sgn * rhs])
    basis = [n + mu + i for i in range(m)]
    # phase 1: maximize -sum(artificials)
    obj = [Fraction(0)] * (ncols + 1)
    for row in T:
        for j in range(n + mu):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    T.append(obj)
    _run(T, basis, ncols, [True] * ncols)
    if T[-1][-1] != 0:
        raise InfeasibleError("linear program is infeasible")
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n + mu:
            j = next((j for j in range(n + mu) if T[i][j] != 0), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    allowed = [j < n + mu for j in range(ncols)]
    obj = [Fraction(0)] * (ncols + 1)
    for j in range(n):
        obj[j] = -c[j]
    for i, b in enumerate(basis):
        if b < n and c[b]:
            f = c[b]
            for j in range(ncols + 1):
                obj[j] += f * T[i][j]
    T[-1] = obj
    _run(T, basis, ncols, allowed)
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(value, x, "simplex")


# ---------------------------------------------------------------- HiGHS + certificate

def _solve_exact(M, r, hint=None):
    """A solution of ``M y = r`` (Fractions) or None when inconsistent.

    Coordinates left free by the system take the value from ``hint`` (default 0).
    """
    if len(M) == 0:
        return None
    cols = len(M[0])
    aug = as_int_matrix([list(row) + [rv] for row, rv in zip(M, r)])
    E, piv, D = gauss_jordan(aug)
    if cols in piv:
        return None
    free = [j for j in range(cols) if j not in set(piv)]
    y = [Fraction(0)] * cols
    if hint is not None:
        for j in free:
            y[j] = Fraction(hint[j])
    for i, pc in enumerate(piv):
        acc = Fraction(int(E[i, -1]))
        for j in free:
            if y[j] and E[i, j]:
                acc -= int(E[i, j]) * y[j]
        y[pc] = acc / int(D)
    return y


def _highs_candidate(c, Au, bu, Ae, be, n):
    from scipy.optimize import linprog

    kw = {}
    if Au:
        kw["A_ub"] = np.array(Au, dtype=float)
        kw["b_ub"] = np.array(bu, dtype=float)
    if Ae:
        kw["A_eq"] = np.array(Ae, dtype=float)
        kw["b_eq"] = np.array(be, dtype=float)
    res = linprog(-np.array(c, dtype=float), bounds=[(0, None)] * n, method="highs", **kw)
    return res


def _rationalize(v, den=10**6):
    return [Fraction(float(t)).limit_denominator(den) for t in v]


def _check_dual(c, Au, bu, Ae, be, y, z, value) -> bool:
    """Weak-duality certificate for ``max c.x``: ``Ae^T y + Au^T z >= c``, ``z >= 0``, equal value."""
    if any(t < 0 for t in z):
        return False
    n = len(c)
    for j in range(n):
        s = sum((Ae[i][j] * y[i] for i in range(len(Ae)) if y[i]), Fraction(0))
        s += sum((Au[i][j] * z[i] for i in range(len(Au)) if z[i]), Fraction(0))
        if s < c[j]:
            return False
    dual_value = sum((a * b for a, b in zip(y, be)), Fraction(0)) + sum((a * b for a, b in zip(z, bu)), Fraction(0))
    return dual_value == value


def _dual_from_support(c, Au, bu, Ae, be, x, y_hint, z_hint):
    """Exact dual on the complementary-slackness system, free coordinates pinned to the hint."""
    ne, nu = len(Ae), len(Au)
    rows, rhs = [], []
    for j in range(len(c)):
        if x[j] > 0:
            rows.append([Ae[i][j] for i in range(ne)] + [Au[i][j] for i in range(nu)])
            rhs.append(c[j])
    for i in range(nu):
        if sum((a * v for a, v in zip(Au[i], x)), Fraction(0)) < bu[i]:
            rows.append([Fraction(int(q == ne + i)) for q in range(ne + nu)])
            rhs.append(Fraction(0))
    if not rows:
        return None
    sol = _solve_exact(rows, rhs, list(y_hint) + list(z_hint))
    if sol is None:
        return None
    return sol[:ne], sol[ne:]


def _primal_from_support(Au, bu, Ae, be, xf, tol):
    """Exact vertex with the approximate zero pattern and active rows of ``xf``."""
    n = len(xf)
    support = [j for j in range(n) if xf[j] > tol]
    rows = [[r[j] for j in support] for r in Ae]
    rhs = list(be)
    for r, b in zip(Au, bu):
        if abs(sum(float(r[j]) * xf[j] for j in support) - float(b)) <= tol * (1 + abs(float(b))):
            rows.append([r[j] for j in support])
            rhs.append(b)
    if not support:
        return [Fraction(0)] * n
    if not rows:
        return None
    aug = as_int_matrix([row + [b] for row, b in zip(rows, rhs)])
    if len(independent_rows_modp(aug[:, :-1])) < len(support):
        return None  # not a vertex of the face: keep the general path
    xs = _solve_exact(rows, rhs)
    if xs is None:
        return None
    x = [Fraction(0)] * n
    for j, v in zip(support, xs):
        x[j] = v
    return x


def certify(c, Au, bu, Ae, be, x_float, duals=None, tol=1e-7):
    """Exact optimum from approximate HiGHS output, or None if it cannot be certified.

    ``duals`` are approximate multipliers ``(y, z)`` of the equality and
    inequality rows of the maximization.
    """
    xf = [float(v) for v in x_float]
    x = _primal_from_support(Au, bu, Ae, be, xf, tol)
    if x is None or any(v < 0 for v in x):
        return None
    for row, rhs in zip(Ae, be):
        if sum((a * v for a, v in zip(row, x) if v), Fraction(0)) != rhs:
            return None
    for row, rhs in zip(Au, bu):
        if sum((a * v for a, v in zip(row, x) if v), Fraction(0)) > rhs:
            return None
    value = sum((a * v for a, v in zip(c, x)), Fraction(0))
    if duals is None:
        return None
    y, z = _rationalize(duals[0]), _rationalize(duals[1])
    if not _check_dual(c, Au, bu, Ae, be, y, z, value):
        found = _dual_from_support(c, Au, bu, Ae, be, x, y, z)
        if found is None:
            return None
        y, z = found
        if not _check_dual(c, Au, bu, Ae, be, y, z, value):
            return None
    return LPResult(value, x, "highs", list(y) + list(z))


def linprog_exact(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, engine: str = "auto") -> LPResult:
    """Maximize ``c.x`` over ``A_ub x <= b_ub, A_eq x == b_eq, x >= 0`` exactly.

    Raises InfeasibleError or UnboundedError.
    """
    if engine not in ("auto", "highs", "simplex"):
        raise ValueError(f"unknown LP engine {engine!r}")
    cf = _frac_vec(c)
    n = len(cf)
    if engine != "simplex":
        Au, bu = _frac_matrix(A_ub, n), _frac_vec(b_ub)
        Ae, be = _frac_matrix(A_eq, n), _frac_vec(b_eq)
        caps.check("max_lp_variables", n)
        res = _highs_candidate(cf, Au, bu, Ae, be, n)
        if res.status == 2:
            # HiGHS says infeasible; confirm exactly
            return simplex_exact(cf, A_ub, b_ub, A_eq, b_eq)
        if res.status == 3:
            return simplex_exact(cf, A_ub, b_ub, A_eq, b_eq)
        if res.status == 0:
            # scipy reports d(min -c.x)/d(b); the maximization's multipliers are their negatives
            y = -np.asarray(res.eqlin.marginals) if Ae else np.zeros(0)
            z = -np.asarray(res.ineqlin.marginals) if Au else np.zeros(0)
            out = certify(cf, Au, bu, Ae, be, res.x, (y, z))
            if out is not None:
                return out
        if engine == "highs":
            # candidate not certifiable: fall through to the exact engine
            pass
    return simplex_exact(cf, A_ub, b_ub, A_eq, b_eq)


def lp_maximize(objective, h, engine: str = "auto") -> LPResult:
    """Maximize over an H-representation with free variables (split as x+ - x-)."""
    d = h.dim
    c = list(objective) + [-Fraction(v) for v in objective]

    def split(rows):
        return [list(a) + [-v for v in a] for a in rows]

    A_ub = split([a for a, _ in h.facets]) if h.facets else None
    b_ub = [b for _, b in h.facets] if h.facets else None
    A_eq = split([a for a, _ in h.equations]) if h.equations else None
    b_eq = [b for _, b in h.equations] if h.equations else None
    res = linprog_exact(c, A_ub, b_ub, A_eq, b_eq, engine)
    x = [res.x[i] - res.x[d + i] for i in range(d)]
    return LPResult(res.value, x, res.engine, res.dual)


__all__ = ["LPResult", "linprog_exact", "lp_maximize", "simplex_exact", "certify"]

"""Local, signaling, no-signaling and bilocal no-signaling bounds (all exact)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from eqbell.functional import InequalityFunctional
from eqbell.geometry.lp import linprog_exact
from eqbell.geometry.polytope import HRepresentation, vertex_enumeration
from eqbell.geometry.standard import full_shape, lift_to_full_behavior
from eqbell.partitions import enumerate_partitions
from eqbell.scenario import Scenario
from eqbell.strategies import vertex_array


@dataclass
class BoundResult:
    value: Fraction
    witness: object = None
    detail: dict | None = None

    def __float__(self):
        return float(self.value)


def _values(ineq: InequalityFunctional, V: np.ndarray) -> np.ndarray:
    ints, den = ineq.integer_vector()
    return V.astype(object).dot(ints), den


def local_bound(ineq: InequalityFunctional, k: int | None = None, with_witness: bool = False):
    """Maximum over the deterministic local vertices with k outcomes."""
    sc = ineq.scenario
    k = sc.k if k is None else k
    target = sc.with_k(k)
    V = vertex_array(target)
    vals, den = _values(ineq.with_scenario(target), V)
    i = int(np.argmax(vals))
    value = Fraction(int(vals[i]), den)
    if with_witness:
        return BoundResult(value, V[i])
    return value


def signaling_bound(ineq: InequalityFunctional, k: int | None = None) -> Fraction:
    """Best pattern per input tuple, over patterns with at most k blocks (others score 0)."""
    sc = ineq.scenario
    k = sc.k if k is None else k
    reachable = [p for p in enumerate_partitions(sc.n) if p.num_blocks <= k]
    total = Fraction(0)
    for x in sc.input_tuples:
        total += max(ineq.coeffs.get((x, p), Fraction(0)) for p in reachable)
    return total


# ---------------------------------------------------------------- no-signaling polytope

def ns_constraints(inputs, k: int):
    """Equalities (normalization and no-signaling) on ``p[x..., a...]`` flattened C-order.

    Marginals of every set of n-1 parties must not depend on the remaining
    party's input, which implies the same for every smaller set.
    """
    n = len(inputs)
    shape = tuple(inputs) + (k,) * n
    size = int(np.prod(shape))
    idx = np.arange(size).reshape(shape)
    rows = []
    for x in itertools.product(*[range(m) for m in inputs]):
        row = np.zeros(size, dtype=np.int64)
        row[idx[x].ravel()] = 1
        rows.append(row)
    for i in range(n):
        for x in itertools.product(*[range(m) for m in inputs]):
            if x[i] != 0:
                continue
            for xi in range(1, inputs[i]):
                x2 = x[:i] + (xi,) + x[i + 1:]
                for a_rest in itertools.product(range(k), repeat=n - 1):
                    row = np.zeros(size, dtype=np.int64)
                    for ai in range(k):
                        a = a_rest[:i] + (ai,) + a_rest[i:]
                        row[idx[x + a]] += 1
                        row[idx[x2 + a]] -= 1
                    rows.append(row)
    A = np.array(rows, dtype=np.int64)
    b = np.zeros(len(rows), dtype=np.int64)
    b[: int(np.prod(inputs))] = 1
    return A, b, shape


def ns_polytope(sc: Scenario, k: int | None = None) -> HRepresentation:
    """H-representation of the full no-signaling polytope (positivity, normalization, NS)."""
    k = sc.k if k is None else k
    A, b, shape = ns_constraints(sc.inputs, k)
    size = A.shape[1]
    facets = []
    for j in range(size):
        a = np.zeros(size, dtype=object)
        a[j] = -1
        facets.append((a, 0))
    eqs = [(row.astype(object), int(bv)) for row, bv in zip(A, b)]
    return HRepresentation(size, facets, eqs)


def _ns_lp(c_full: np.ndarray, inputs, k: int, engine="auto"):
    A, b, shape = ns_constraints(inputs, k)
    c = c_full.reshape(-1)
    res = linprog_exact(list(c), A_eq=A, b_eq=b, engine=engine)
    return res.value, np.array(res.x, dtype=object).reshape(shape)


def ns_bound(ineq: InequalityFunctional, k: int | None = None, with_witness: bool = False, engine="auto"):
    """Exact maximum of the lifted functional over no-signaling full behaviors."""
    sc = ineq.scenario
    k = sc.k if k is None else k
    value, p = _ns_lp(lift_to_full_behavior(ineq, k), sc.inputs, k, engine)
    if with_witness:
        return BoundResult(value, p)
    return value


def ns_perfect_strategy(sc: Scenario, equal_inputs) -> np.ndarray:
    """Two-outcome behavior winning the unanimous game with winning set ``equal_inputs``.

    Single-party marginals are uniform, so it is single-party no-signaling for any n
    (fully no-signaling for n = 2 only).

    On those inputs the outcomes are all 0 or all 1 with probability 1/2 each;
    elsewhere every non-constant outcome tuple has probability ``1/(2^n - 2)``.
    """
    n = sc.n
    equal_inputs = {tuple(x) for x in equal_inputs}
    p = np.zeros(full_shape(sc, 2), dtype=object)
    p[...] = Fraction(0)
    others = Fraction(1, 2 ** n - 2)
    for x in sc.input_tuples:
        for a in itertools.product(range(2), repeat=n):
            const = len(set(a)) == 1
            if x in equal_inputs:
                p[x + a] = Fraction(1, 2) if const else Fraction(0)
            else:
                p[x + a] = Fraction(0) if const else others
    return p


def marginal(p: np.ndarray, n: int, keep) -> np.ndarray:
    """Marginal ``p(a_keep | x)`` (still indexed by all inputs)."""
    drop = [n + i for i in range(n) if i not in keep]
    out = p
    for ax in sorted(drop, reverse=True):
        out = out.sum(axis=ax)
    return out


def is_no_signaling(p: np.ndarray, inputs, single_party: bool = False) -> bool:
    """Full no-signaling, or with ``single_party`` only each one-party marginal is checked."""
    n = len(inputs)
    p = np.asarray(p, dtype=object)
    flat = p.reshape(-1)
    if any(v < 0 for v in flat):
        return False
    if not single_party:
        A, b, _ = ns_constraints(inputs, p.shape[-1])
        return bool(np.all(A.astype(object).dot(flat) == b))
    if not all(s == 1 for s in marginal(p, n, ()).ravel()):
        return False
    for i in range(n):
        mi = marginal(p, n, (i,))
        # must not depend on any other party's input
        for j in range(n):
            if j == i:
                continue
            first = np.take(mi, [0], axis=j)
            if not np.all(mi == first):
                return False
    return True


# ---------------------------------------------------------------- bilocal NS

def _bipartitions(n: int):
    seen = set()
    for r in range(1, n):
        for G in itertools.combinations(range(n), r):
            H = tuple(i for i in range(n) if i not in G)
            key = frozenset([G, H])
            if key not in seen:
                seen.add(key)
                yield (G, H) if len(G) >= len(H) else (H, G)


def _deterministic_local(inputs, k):
    """Every deterministic behavior of a group of parties acting locally."""
    shape = tuple(inputs) + (k,) * len(inputs)
    nodes = [(i, x) for i, m in enumerate(inputs) for x in range(m)]
    for table in itertools.product(range(k), repeat=len(nodes)):
        out = {}
        for (i, x), a in zip(nodes, table):
            out[(i, x)] = a
        p = np.zeros(shape, dtype=object)
        p[...] = Fraction(0)
        for x in itertools.product(*[range(m) for m in inputs]):
            a = tuple(out[(i, xi)] for i, xi in enumerate(x))
            p[x + a] = Fraction(1)
        yield p


def _ns_vertices(inputs, k):
    A, b, shape = ns_constraints(inputs, k)
    size = A.shape[1]
    facets = []
    for j in range(size):
        a = np.zeros(size, dtype=object)
        a[j] = -1
        facets.append((a, 0))
    h = HRepresentation(size, facets, [(row.astype(object), int(bv)) for row, bv in zip(A, b)])
    for v in vertex_enumeration(h):
        yield np.array(v, dtype=object).reshape(shape)


def _contract(c: np.ndarray, n: int, G, H, pH: np.ndarray) -> np.ndarray:
    """Objective on the G-group behavior after fixing the H-group behavior."""
    # reorder axes to (x_G, x_H, a_G, a_H)
    order = [*G, *H, *(n + i for i in G), *(n + i for i in H)]
    ct = np.transpose(c, order)
    g, h = len(G), len(H)
    # pH axes are (x_H, a_H)
    sh = ct.shape
    xg, xh = sh[:g], sh[g:g + h]
    ag, ah = sh[g + h:g + h + g], sh[g + h + g:]
    ct = ct.reshape(int(np.prod(xg)), int(np.prod(xh)), int(np.prod(ag)), int(np.prod(ah)))
    ph = pH.reshape(int(np.prod(xh)), int(np.prod(ah)))
    out = np.zeros((ct.shape[0], ct.shape[2]), dtype=object)
    out[...] = Fraction(0)
    for j in range(ct.shape[1]):
        for t in range(ct.shape[3]):
            w = ph[j, t]
            if w:
                out = out + ct[:, j, :, t] * w
    return out.reshape(tuple(xg) + tuple(ag))


def bilocal_ns_bound(ineq: InequalityFunctional, k: int | None = None, with_witness: bool = False,
                     engine="auto"):
    """Maximum over mixtures of (no-signaling group) x (other group) behaviors over bipartitions.

    A singleton side ranges over its deterministic strategies; a larger second
    group ranges over the vertices of its own no-signaling polytope. Each fixed
    choice leaves an LP over the first group's no-signaling polytope.
    """
    sc = ineq.scenario
    n = sc.n
    if n < 3:
        raise ValueError("bilocal bounds need at least three parties")
    if k is None:
        k = 2 if ineq.is_unanimous() else sc.k
    c = lift_to_full_behavior(ineq, k)
    best = None
    for G, H in _bipartitions(n):
        ins_G = tuple(sc.inputs[i] for i in G)
        ins_H = tuple(sc.inputs[i] for i in H)
        side = _deterministic_local(ins_H, k) if len(H) == 1 else _ns_vertices(ins_H, k)
        seen = set()
        for pH in side:
            cg = _contract(c, n, G, H, pH)
            key = tuple(cg.ravel())
            if key in seen:
                continue
            seen.add(key)
            value, pG = _ns_lp(cg, ins_G, k, engine)
            if best is None or value > best.value:
                best = BoundResult(value, (G, H, pG, pH), {"split": (G, H)})
    if with_witness:
        return best
    return best.value


__all__ = [
    "BoundResult",
    "local_bound",
    "signaling_bound",
    "ns_constraints",
    "ns_polytope",
    "ns_bound",
    "ns_perfect_strategy",
    "bilocal_ns_bound",
    "is_no_signaling",
    "marginal",
]

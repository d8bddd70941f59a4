"""Relation to the standard Bell scenario with full outcome statistics.

Full behaviors are object arrays ``p[x_1, ..., x_n, a_1, ..., a_n]``.
Deterministic strategies are embedded in Collins-Gisin coordinates
(``p(a_S | x_S)`` for every non-empty party subset S, outcomes ``a_i < k - 1``),
which parametrize the affine hull of the standard local polytope, of dimension
``prod_i (1 + m_i (k - 1)) - 1``.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import prod

import numpy as np

from eqbell.config import caps
from eqbell.functional import InequalityFunctional
from eqbell.geometry.linalg import affine_dimension
from eqbell.partitions import pattern_of_outcomes
from eqbell.scenario import Scenario


def full_shape(sc: Scenario, k: int | None = None) -> tuple:
    k = sc.k if k is None else k
    return tuple(sc.inputs) + (k,) * sc.n


def lift_to_full_behavior(ineq: InequalityFunctional, k: int | None = None) -> np.ndarray:
    """Coefficients on ``p(a|x)``: the reduced coefficient of the pattern of a."""
    sc = ineq.scenario
    k = sc.k if k is None else k
    out = np.zeros(full_shape(sc, k), dtype=object)
    out[...] = Fraction(0)
    pats = {a: pattern_of_outcomes(a) for a in itertools.product(range(k), repeat=sc.n)}
    for (x, sigma), c in ineq.coeffs.items():
        for a, p in pats.items():
            if p == sigma:
                out[x + a] = c
    return out


def evaluate_full(ineq: InequalityFunctional, probs, k: int | None = None) -> Fraction:
    coeffs = lift_to_full_behavior(ineq, k)
    probs = np.asarray(probs, dtype=object)
    if probs.shape != coeffs.shape:
        raise ValueError(f"behavior shape {probs.shape} does not match {coeffs.shape}")
    return sum((c * p for c, p in zip(coeffs.ravel(), probs.ravel()) if c), Fraction(0))


def standard_dimension(sc: Scenario, k: int | None = None) -> int:
    k = sc.k if k is None else k
    return prod(1 + m * (k - 1) for m in sc.inputs) - 1


def deterministic_tables(sc: Scenario, k: int | None = None) -> np.ndarray:
    """Every outcome table (one row per strategy, one column per node)."""
    k = sc.k if k is None else k
    N = sc.num_nodes
    caps.check("max_strategies", k ** N)
    grids = np.indices((k,) * N, dtype=np.int8).reshape(N, -1).T
    return np.ascontiguousarray(grids)


def collins_gisin_vectors(sc: Scenario, tables: np.ndarray, k: int | None = None) -> np.ndarray:
    k = sc.k if k is None else k
    offsets = sc.node_offsets()
    cols = []
    for size in range(1, sc.n + 1):
        for S in itertools.combinations(range(sc.n), size):
            for xs in itertools.product(*[range(sc.inputs[i]) for i in S]):
                nodes = [offsets[i] + x for i, x in zip(S, xs)]
                for a in itertools.product(range(k - 1), repeat=size):
                    hit = np.ones(len(tables), dtype=bool)
                    for node, ai in zip(nodes, a):
                        hit &= tables[:, node] == ai
                    cols.append(hit)
    return np.stack(cols, axis=1).astype(np.int8) if cols else np.zeros((len(tables), 0), dtype=np.int8)


def reduced_values(ineq: InequalityFunctional, tables: np.ndarray) -> np.ndarray:
    """Exact integer multiples of the functional on each strategy: ``(values, scale)``."""
    from eqbell.strategies import pattern_indices, patterns_to_vectors

    sc = ineq.scenario
    V = patterns_to_vectors(sc, pattern_indices(sc, tables))
    ints, den = ineq.integer_vector()
    return V.astype(object).dot(ints), den


def standard_facetness(ineq: InequalityFunctional, k: int | None = None) -> tuple[int, int]:
    """(affine dimension of the saturating deterministic points, standard dimension - 1)."""
    sc = ineq.scenario
    k = sc.k if k is None else k
    tables = deterministic_tables(sc, k)
    vals, den = reduced_values(ineq, tables)
    top = max(vals)
    bound = ineq.bound
    if bound is not None and Fraction(top, den) > bound:
        raise ValueError(f"inequality violated on the standard local polytope: {Fraction(top, den)} > {bound}")
    if bound is not None and Fraction(top, den) < bound:
        raise ValueError(f"inequality not tight on the standard local polytope: max {Fraction(top, den)}")
    sat = tables[vals == top]
    cg = collins_gisin_vectors(sc, sat, k)
    return affine_dimension(cg), standard_dimension(sc, k) - 1


def is_standard_local_facet(ineq: InequalityFunctional, k: int | None = None) -> bool:
    num, den = standard_facetness(ineq, k)
    return num == den


__all__ = [
    "full_shape",
    "lift_to_full_behavior",
    "evaluate_full",
    "standard_dimension",
    "deterministic_tables",
    "collins_gisin_vectors",
    "standard_facetness",
    "is_standard_local_facet",
]

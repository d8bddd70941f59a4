"""Deterministic local strategies, their graphs, and reduced-behavior vertices.

A deterministic strategy assigns an outcome to every node ``(party, input)``.
Reduced behaviors only see which nodes share a label, so strategies are
enumerated up to a global relabeling of outcomes: one restricted-growth
string over all nodes per class.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from eqbell import kernels
from eqbell.config import caps
from eqbell.partitions import SetPartition, iter_rgs, pattern_of_outcomes, stirling2
from eqbell.scenario import ReducedBehavior, Scenario, pattern_lookup


def k_star(n: int, m: int) -> int:
    """Outcome count beyond which the smells local polytope stops growing."""
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    return n * (m + 1) // 2


def k_star_unanimous(inputs) -> int:
    inputs = list(inputs)
    if not inputs or any(m < 1 for m in inputs):
        raise ValueError("input counts must be positive")
    return min(inputs) + 1


def saturation_k(sc: Scenario) -> int:
    """Smallest outcome count that already yields every vertex of ``sc``.

    Inhomogeneous smells scenarios use ``floor((N + n) / 2)`` with N the node
    count: every cross-party component spends two nodes and every party with
    stray nodes spends one, which bounds the labels any strategy graph needs.
    """
    if sc.mode == "unanimous":
        return k_star_unanimous(sc.inputs)
    m = sc.homogeneous_m
    if m is not None:
        return k_star(sc.n, m)
    return (sc.num_nodes + sc.n) // 2


@dataclass(frozen=True)
class DeterministicStrategy:
    table: tuple  # table[i][x] = outcome of party i on input x

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(tuple(int(a) for a in row) for row in self.table))

    @classmethod
    def from_labels(cls, sc: Scenario, labels) -> "DeterministicStrategy":
        labels = list(labels)
        rows, off = [], 0
        for m in sc.inputs:
            rows.append(tuple(labels[off:off + m]))
            off += m
        return cls(tuple(rows))

    def labels(self) -> tuple:
        return tuple(a for row in self.table for a in row)

    def outcomes(self, x) -> tuple:
        return tuple(self.table[i][xi] for i, xi in enumerate(x))

    def check(self, sc: Scenario):
        if len(self.table) != sc.n or any(len(r) != m for r, m in zip(self.table, sc.inputs)):
            raise ValueError("strategy shape does not match the scenario inputs")
        if any(a < 0 or a >= sc.k for row in self.table for a in row):
            raise ValueError(f"strategy uses outcome labels outside 0..{sc.k - 1}")


def reduce_strategy(s: DeterministicStrategy, sc: Scenario) -> ReducedBehavior:
    s.check(sc)
    vals = [0] * sc.dim
    for x in sc.input_tuples:
        key = (x, pattern_of_outcomes(s.outcomes(x)))
        idx = sc.index.get(key)
        if idx is not None:
            vals[idx] = 1
    return ReducedBehavior(sc, tuple(vals))


def _node_index(sc: Scenario) -> np.ndarray:
    offs = sc.node_offsets()
    return np.array([[offs[i] + xi for i, xi in enumerate(x)] for x in sc.input_tuples], dtype=np.int64)


def labeling_count(sc: Scenario, k: int, method: str = "rgs") -> int:
    N = sc.num_nodes
    if method == "rgs":
        return sum(stirling2(N, j) for j in range(1, min(k, N) + 1))
    return k**N


def labelings(sc: Scenario, k: int | None = None, method: str = "rgs") -> np.ndarray:
    """Node labelings with at most ``k`` labels.

    ``rgs`` lists one labeling per global-relabeling class; ``product`` lists
    every assignment (the brute-force oracle).
    """
    k = sc.k if k is None else k
    N = sc.num_nodes
    caps.check("max_strategies", labeling_count(sc, k, method))
    if method == "rgs":
        return kernels.rgs_labelings(N, min(k, N))
    if method == "product":
        grids = np.indices((k,) * N, dtype=np.int8).reshape(N, -1).T
        return np.ascontiguousarray(grids)
    raise ValueError(f"unknown enumeration method {method!r}")


def pattern_indices(sc: Scenario, labels: np.ndarray) -> np.ndarray:
    """Index (rgs-lex over all partitions) of the pattern per strategy and input tuple."""
    lut, _, _ = pattern_lookup(sc.n)
    return kernels.pattern_matrix(labels, _node_index(sc), lut)


def patterns_to_vectors(sc: Scenario, pat: np.ndarray) -> np.ndarray:
    S, X = pat.shape
    if sc.mode == "unanimous":
        return (pat == 0).astype(np.int8)
    npat = len(sc.patterns)  # = B_n - 1; the trivial partition has index npat
    out = np.zeros((S, X * npat), dtype=np.int8)
    rows, cols = np.nonzero(pat < npat)
    out[rows, cols * npat + pat[rows, cols]] = 1
    return out


@lru_cache(maxsize=64)
def _vertex_array_cached(sc: Scenario, k: int, method: str) -> np.ndarray:
    pat = np.unique(pattern_indices(sc, labelings(sc, k, method)), axis=0)
    verts = np.unique(patterns_to_vectors(sc, pat), axis=0)
    caps.check("max_vertices", len(verts))
    verts.setflags(write=False)
    return verts


def vertex_array(sc: Scenario, cap_k_at_saturation: bool = True, method: str = "rgs") -> np.ndarray:
    """Distinct reduced local vertices as a lexicographically sorted 0/1 array."""
    k = min(sc.k, saturation_k(sc)) if cap_k_at_saturation else sc.k
    caps.check("max_strategies", labeling_count(sc, k, method))
    verts = _vertex_array_cached(sc, k, method)
    caps.check("max_vertices", len(verts))
    return verts


def enumerate_vertices(sc: Scenario, cap_k_at_saturation: bool = True, method: str = "rgs") -> list[ReducedBehavior]:
    return [ReducedBehavior(sc, tuple(int(v) for v in row))
            for row in vertex_array(sc, cap_k_at_saturation, method)]


def _partitions_into(items, j):
    """Set partitions of ``items`` into exactly j labeled-by-first-appearance blocks."""
    items = list(items)
    if j == 0:
        if not items:
            yield ()
        return
    if not items:
        return
    for rgs in iter_rgs(len(items), j):
        if max(rgs) + 1 == j:
            yield rgs


def construct_unanimous_vertices(sc: Scenario, return_count: bool = False):
    """Build unanimous vertices directly from isolated-node choices and components.

    Nodes outside every unanimous component are isolated; the others are
    split into j components with at least one node per party, and parties
    after the first match their blocks to components in every possible order.
    """
    if sc.mode != "unanimous" and sc.n != 2:
        raise ValueError("direct construction covers unanimous scenarios (or bipartite smells)")
    n, ms, k = sc.n, sc.inputs, sc.k
    total = 1
    for m in ms:
        total *= 2**m
    caps.check("max_strategies", total)
    xs = sc.input_tuples
    rows = []
    subsets = [list(itertools.chain.from_iterable(itertools.combinations(range(m), r) for r in range(m + 1)))
               for m in ms]
    for iso in itertools.product(*subsets):
        has_iso = [len(s) > 0 for s in iso]
        g = 0 if not any(has_iso) else (2 if all(has_iso) else 1)
        rest = [[v for v in range(m) if v not in set(s)] for m, s in zip(ms, iso)]
        for j in range(0, k - g + 1):
            per_party = [list(_partitions_into(r, j)) for r in rest]
            if any(not p for p in per_party):
                continue
            perms = list(itertools.permutations(range(j)))
            for blocks in itertools.product(*per_party):
                for shuffle in itertools.product(perms, repeat=n - 1):
                    comp = []
                    for l in range(n):
                        lab = {}
                        relabel = None if l == 0 else shuffle[l - 1]
                        for v, b in zip(rest[l], blocks[l]):
                            lab[v] = b if relabel is None else relabel[b]
                        comp.append(lab)
                    row = []
                    for x in xs:
                        c0 = comp[0].get(x[0])
                        row.append(int(c0 is not None and all(comp[l].get(x[l]) == c0 for l in range(1, n))))
                    rows.append(tuple(row))
    if sc.mode == "smells":
        pass  # bipartite: one pattern per input tuple, same layout
    out = sorted(set(rows))
    vecs = [ReducedBehavior(sc, r) for r in out]
    return (vecs, len(rows)) if return_count else vecs


def bipartite_vertex_count(m_a: int, m_b: int, k: int, j_start: int = 1) -> int:
    """Closed-form bipartite vertex count (inner sum from ``j_start``)."""
    total = 0
    for a in range(m_a + 1):
        for b in range(m_b + 1):
            kp = k - (a > 0) - (b > 0)
            inner = sum(stirling2(m_a - a, j) * stirling2(m_b - b, j) * factorial(j)
                        for j in range(j_start, kp + 1))
            total += comb(m_a, a) * comb(m_b, b) * inner
    return total


def unanimous_vertex_count(inputs, k: int, j_start: int = 1) -> int:
    """Closed-form unanimous vertex count for any number of parties."""
    inputs = list(inputs)
    n = len(inputs)
    total = 0
    for iso in itertools.product(*[range(m + 1) for m in inputs]):
        if all(i == 0 for i in iso):
            g = 0
        elif all(i > 0 for i in iso):
            g = 2
        else:
            g = 1
        weight = 1
        for m, i in zip(inputs, iso):
            weight *= comb(m, i)
        inner = 0
        for j in range(j_start, k - g + 1):
            term = factorial(j) ** (n - 1)
            for m, i in zip(inputs, iso):
                term *= stirling2(m - i, j)
            inner += term
        total += weight * inner
    return total


def count_vertices_formula(sc: Scenario, include_empty_term: bool = False) -> int:
    """Closed-form local vertex count.

    As written the inner sums start at one component, which leaves out the
    all-isolated strategy (the all-zero behavior). ``include_empty_term``
    adds that ``j = 0`` term; it matches brute force whenever ``k >= 2``.
    """
    j0 = 0 if include_empty_term else 1
    if sc.mode == "smells":
        if sc.n != 2:
            raise ValueError("the smells closed form covers bipartite scenarios only")
        return bipartite_vertex_count(sc.inputs[0], sc.inputs[1], sc.k, j0)
    return unanimous_vertex_count(sc.inputs, sc.k, j0)


@dataclass(frozen=True)
class StrategyGraph:
    """Nodes are (party, input) pairs in party-major order; blocks are equality groups."""

    inputs: tuple
    partition: SetPartition

    @property
    def nodes(self) -> tuple:
        return tuple((i, x) for i, m in enumerate(self.inputs) for x in range(m))

    def block_parties(self) -> list[set]:
        nodes = self.nodes
        return [{nodes[v][0] for v in block} for block in self.partition.blocks()]

    @classmethod
    def from_strategy(cls, s: DeterministicStrategy) -> "StrategyGraph":
        return cls(tuple(len(r) for r in s.table), pattern_of_outcomes(s.labels()))

    @classmethod
    def from_edges(cls, inputs, edges) -> "StrategyGraph":
        """Edges are pairs of (party, input) nodes from different parties."""
        inputs = tuple(inputs)
        nodes = [(i, x) for i, m in enumerate(inputs) for x in range(m)]
        pos = {v: t for t, v in enumerate(nodes)}
        parent = list(range(len(nodes)))

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for u, v in edges:
            if u[0] == v[0]:
                raise ValueError("edges must join different parties")
            ru, rv = find(pos[u]), find(pos[v])
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        return cls(inputs, pattern_of_outcomes(tuple(find(t) for t in range(len(nodes)))))


def symbols_per_party(g: StrategyGraph) -> list[int]:
    parties = g.block_parties()
    cross = [p for p in parties if len(p) > 1]
    out = []
    for i in range(len(g.inputs)):
        stray = any(p == {i} for p in parties)
        out.append(sum(1 for p in cross if i in p) + int(stray))
    return out


def min_outcomes(g: StrategyGraph) -> int:
    """Labels needed to realize the graph: one per cross-party component plus
    one per party owning nodes linked to no other party."""
    parties = g.block_parties()
    cross = sum(1 for p in parties if len(p) > 1)
    stray = {next(iter(p)) for p in parties if len(p) == 1}
    return cross + len(stray)

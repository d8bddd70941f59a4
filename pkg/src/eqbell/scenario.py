"""Scenarios and the reduced (equality-pattern) coordinate system."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from eqbell.partitions import (
    SetPartition,
    all_partition,
    enumerate_partitions,
    format_partition,
    pattern_of_outcomes,
)

MODES = ("smells", "unanimous")


@dataclass(frozen=True)
class Scenario:
    """``n`` parties, per-party input counts, ``k`` outcomes, and a mode.

    In ``smells`` mode the coordinates are ``p(sigma|x)`` for every
    non-trivial partition sigma; in ``unanimous`` mode only the single-block
    partition is kept.
    """

    n: int
    inputs: tuple
    k: int
    mode: str = "smells"

    def __post_init__(self):
        inputs = tuple(int(m) for m in self.inputs)
        object.__setattr__(self, "inputs", inputs)
        if self.n < 2:
            raise ValueError("need at least two parties")
        if len(inputs) != self.n:
            raise ValueError(f"expected {self.n} input counts, got {len(inputs)}")
        if any(m < 1 for m in inputs) or self.k < 1:
            raise ValueError("input and outcome counts must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @classmethod
    def homogeneous(cls, n, m, k, mode="smells"):
        return cls(n, (m,) * n, k, mode)

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        fields = {}
        for tok in text.replace(";", " ").split():
            if "=" not in tok:
                raise ValueError(f"bad scenario token {tok!r}")
            key, val = tok.split("=", 1)
            if key in fields:
                raise ValueError(f"duplicate scenario key {key!r}")
            fields[key] = val
        unknown = set(fields) - {"n", "m", "k", "mode"}
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        try:
            n = int(fields["n"])
            ms = [int(v) for v in fields["m"].split(",")]
            k = int(fields["k"])
        except KeyError as exc:
            raise ValueError(f"scenario missing {exc.args[0]!r}") from None
        if len(ms) == 1 and n > 1:
            ms = ms * n
        return cls(n, tuple(ms), k, fields.get("mode", "smells"))

    def __str__(self) -> str:
        return f"n={self.n} m={','.join(map(str, self.inputs))} k={self.k} mode={self.mode}"

    def slug(self) -> str:
        return str(self).replace(" ", "_")

    def with_k(self, k: int) -> "Scenario":
        return Scenario(self.n, self.inputs, k, self.mode)

    def with_mode(self, mode: str) -> "Scenario":
        return Scenario(self.n, self.inputs, self.k, mode)

    @property
    def homogeneous_m(self) -> int | None:
        return self.inputs[0] if len(set(self.inputs)) == 1 else None

    @property
    def num_nodes(self) -> int:
        return sum(self.inputs)

    @cached_property
    def input_tuples(self) -> tuple:
        return tuple(itertools.product(*[range(m) for m in self.inputs]))

    @cached_property
    def patterns(self) -> tuple:
        """Partitions carried as coordinates, in rgs-lex order."""
        if self.mode == "unanimous":
            return (all_partition(self.n),)
        return tuple(p for p in enumerate_partitions(self.n) if not p.is_trivial)

    @cached_property
    def coords(self) -> tuple:
        return tuple((x, s) for x in self.input_tuples for s in self.patterns)

    @cached_property
    def index(self) -> dict:
        return {c: i for i, c in enumerate(self.coords)}

    @property
    def dim(self) -> int:
        return len(self.coords)

    def coord_label(self, i: int) -> str:
        x, s = self.coords[i]
        return f"x=({','.join(map(str, x))});sigma={format_partition(s)}"

    def node_offsets(self) -> tuple:
        out, acc = [], 0
        for m in self.inputs:
            out.append(acc)
            acc += m
        return tuple(out)

    def nodes(self) -> tuple:
        return tuple((i, x) for i, m in enumerate(self.inputs) for x in range(m))


@lru_cache(maxsize=16)
def pattern_lookup(n: int):
    """Table mapping a pairwise-equality bitmask to a partition index.

    Bit ``pair_bit(i, j)`` is set when parties i and j agree. Inconsistent
    masks map to -1. Partition indices follow rgs-lex order over all B_n
    partitions.
    """
    parts = enumerate_partitions(n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    lut = np.full(1 << len(pairs), -1, dtype=np.int32)
    for idx, p in enumerate(parts):
        mask = 0
        for b, (i, j) in enumerate(pairs):
            if p.rgs[i] == p.rgs[j]:
                mask |= 1 << b
        lut[mask] = idx
    return lut, pairs, parts


@dataclass(frozen=True)
class ReducedBehavior:
    scenario: Scenario
    coords: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.coords)
        if len(vals) != self.scenario.dim:
            raise ValueError("coordinate count does not match the scenario")
        object.__setattr__(self, "coords", vals)

    def __getitem__(self, key):
        return self.coords[self.scenario.index[key]]

    def is_valid(self) -> bool:
        sc = self.scenario
        npat = len(sc.patterns)
        for xi in range(len(sc.input_tuples)):
            block = self.coords[xi * npat:(xi + 1) * npat]
            if any(v < 0 or v > 1 for v in block) or sum(block) > 1:
                return False
        return True

    def as_array(self, dtype=object) -> np.ndarray:
        return np.array(self.coords, dtype=dtype)


def reduce_full_behavior(sc: Scenario, probs) -> ReducedBehavior:
    """Coarse-grain a full behavior ``probs[x..., a...]`` to equality patterns."""
    probs = np.asarray(probs, dtype=object)
    acc = {c: Fraction(0) for c in sc.coords}
    for x in sc.input_tuples:
        for a in itertools.product(range(sc.k), repeat=sc.n):
            key = (x, pattern_of_outcomes(a))
            if key in acc:
                acc[key] += Fraction(probs[x + a])
    return ReducedBehavior(sc, tuple(acc[c] for c in sc.coords))


def partition_index(p: SetPartition) -> int:
    return enumerate_partitions(p.n).index(p)

"""Set partitions as restricted-growth strings, Bell and Stirling numbers."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from eqbell.config import ResourceError, caps


@dataclass(frozen=True, order=True)
class SetPartition:
    """Partition of ``{0, ..., n-1}`` stored as a restricted-growth string.

    ``rgs[i]`` is the block of element ``i``; blocks are numbered in order of
    first appearance, so equal partitions have equal strings.
    """

    rgs: tuple

    def __post_init__(self):
        rgs = tuple(int(v) for v in self.rgs)
        if not rgs:
            raise ValueError("empty restricted-growth string")
        top = -1
        for v in rgs:
            if v < 0 or v > top + 1:
                raise ValueError(f"not a restricted-growth string: {rgs}")
            top = max(top, v)
        object.__setattr__(self, "rgs", rgs)

    @property
    def n(self) -> int:
        return len(self.rgs)

    @property
    def num_blocks(self) -> int:
        return max(self.rgs) + 1

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for i, b in enumerate(self.rgs):
            out[b].append(i)
        return [tuple(b) for b in out]

    @property
    def is_all(self) -> bool:
        return self.num_blocks == 1

    @property
    def is_trivial(self) -> bool:
        """All-singleton partition; its coordinate is dropped by normalization."""
        return self.num_blocks == self.n

    def __str__(self) -> str:
        return format_partition(self)

    def __repr__(self) -> str:
        return f"SetPartition({format_partition(self)!r})"


def bell_number(n: int) -> int:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sum(stirling2(n, k) for k in range(n + 1))


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("arguments must be nonnegative")
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def stirling2_explicit(n: int, k: int) -> int:
    """Inclusion-exclusion form, kept as an independent cross-check."""
    total = sum((-1) ** (k - l) * comb(k, l) * l**n for l in range(k + 1))
    fact = 1
    for i in range(2, k + 1):
        fact *= i
    return total // fact


def iter_rgs(n: int, max_blocks: int | None = None):
    """Yield restricted-growth strings of length n in lexicographic order."""
    if n < 1:
        return
    limit = n if max_blocks is None else max_blocks
    if limit < 1:
        return
    s = [0] * n
    top = [0] * n  # top[i] = max(s[:i+1])

    def rec(i):
        if i == n:
            yield tuple(s)
            return
        hi = min(top[i - 1] + 1, limit - 1)
        for v in range(hi + 1):
            s[i] = v
            top[i] = max(top[i - 1], v)
            yield from rec(i + 1)

    yield from rec(1)


@lru_cache(maxsize=64)
def _partitions_cached(n: int) -> tuple:
    return tuple(SetPartition(r) for r in iter_rgs(n))


def enumerate_partitions(n: int) -> list[SetPartition]:
    if n < 1:
        raise ValueError("n must be positive")
    size = bell_number(n)
    if size > caps.max_partitions:
        raise ResourceError("max_partitions", size, caps.max_partitions)
    return list(_partitions_cached(n))


def pattern_of_outcomes(outcomes) -> SetPartition:
    """Partition of positions by equality of their labels."""
    if len(outcomes) == 0:
        raise ValueError("empty outcome tuple")
    seen: dict = {}
    rgs = []
    for a in outcomes:
        if a not in seen:
            seen[a] = len(seen)
        rgs.append(seen[a])
    return SetPartition(tuple(rgs))


def all_partition(n: int) -> SetPartition:
    return SetPartition((0,) * n)


def trivial_partition(n: int) -> SetPartition:
    return SetPartition(tuple(range(n)))


def format_partition(p: SetPartition) -> str:
    if p.is_all:
        return "ALL"
    return "|".join("".join(str(i) for i in b) for b in p.blocks())


def parse_partition(text: str, n: int | None = None) -> SetPartition:
    """Parse ``"02|1"`` style syntax; ``"ALL"`` needs ``n``."""
    text = text.strip()
    if text == "ALL":
        if n is None:
            raise ValueError("'ALL' needs the element count")
        return all_partition(n)
    blocks = text.split("|")
    labels: dict[int, int] = {}
    for bi, block in enumerate(blocks):
        if not block or not block.isdigit():
            raise ValueError(f"bad partition syntax: {text!r}")
        for ch in block:
            i = int(ch)
            if i in labels:
                raise ValueError(f"element {i} repeated in {text!r}")
            labels[i] = bi
    size = max(labels) + 1
    if sorted(labels) != list(range(size)):
        raise ValueError(f"partition {text!r} does not cover 0..{size - 1}")
    if n is not None and size != n:
        raise ValueError(f"partition {text!r} has {size} elements, expected {n}")
    return pattern_of_outcomes(tuple(labels[i] for i in range(size)))

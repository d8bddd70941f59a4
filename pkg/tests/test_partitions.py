import itertools

import pytest
from hypothesis import given, strategies as st

from eqbell.partitions import (
    SetPartition,
    bell_number,
    enumerate_partitions,
    format_partition,
    parse_partition,
    pattern_of_outcomes,
    stirling2,
    stirling2_explicit,
)


def brute_partitions(n):
    """Canonical patterns of every labeling of n elements with n labels."""
    return {pattern_of_outcomes(lab) for lab in itertools.product(range(n), repeat=n)}


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)])
def test_bell_numbers(n, expected):
    assert bell_number(n) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_bell_matches_brute_force(n):
    assert len(brute_partitions(n)) == bell_number(n)


def test_stirling_values():
    assert stirling2(0, 0) == 1
    assert stirling2(4, 2) == 7
    assert stirling2(3, 5) == 0
    assert stirling2(5, 0) == 0
    assert all(stirling2(n, 1) == 1 for n in range(1, 10))
    # brute force: 2-block partitions of a 4-set
    assert sum(1 for p in brute_partitions(4) if p.num_blocks == 2) == 7


def test_bell_is_stirling_sum():
    for n in range(13):
        assert bell_number(n) == sum(stirling2(n, k) for k in range(n + 1))


def test_stirling_recurrence_and_explicit_formula():
    for n in range(1, 14):
        for k in range(1, n + 1):
            assert stirling2(n, k) == k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
            assert stirling2(n, k) == stirling2_explicit(n, k)


def test_enumerate_order_and_count():
    assert [p.rgs for p in enumerate_partitions(1)] == [(0,)]
    assert [p.rgs for p in enumerate_partitions(2)] == [(0, 0), (0, 1)]
    parts = enumerate_partitions(3)
    assert len(parts) == 5 and parts[0].is_all and parts[-1].is_trivial
    for n in range(1, 8):
        ps = enumerate_partitions(n)
        assert len(ps) == bell_number(n)
        assert [p.rgs for p in ps] == sorted(p.rgs for p in ps)
        assert len(set(ps)) == len(ps)


def test_pattern_examples():
    assert pattern_of_outcomes((5, 5, 5)).is_all
    assert pattern_of_outcomes((0, 1, 0)).rgs == (0, 1, 0)
    p = pattern_of_outcomes((2, 7))
    assert p.is_trivial and p.num_blocks == 2


@given(st.lists(st.integers(0, 5), min_size=1, max_size=7), st.permutations(range(6)))
def test_pattern_relabel_invariance(labels, perm):
    assert pattern_of_outcomes(labels) == pattern_of_outcomes([perm[a] for a in labels])


def test_invalid_rgs_rejected():
    with pytest.raises(ValueError):
        SetPartition((1, 0))
    with pytest.raises(ValueError):
        SetPartition((0, 2))


def test_text_syntax_round_trip():
    assert format_partition(SetPartition((0, 1, 0))) == "02|1"
    assert format_partition(SetPartition((0, 0, 0))) == "ALL"
    assert parse_partition("ALL", 3).rgs == (0, 0, 0)
    for n in range(1, 6):
        for p in enumerate_partitions(n):
            assert parse_partition(format_partition(p), n) == p
    with pytest.raises(ValueError):
        parse_partition("0|0")

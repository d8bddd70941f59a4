from fractions import Fraction

import pytest

from eqbell import bounds
from eqbell.catalog import (
    catalog_all,
    catalog_get,
    catalog_names,
    parse_entry,
    parse_expectation,
    verify_entry,
)
from eqbell.config import override_caps
from eqbell.functional import format_ineq, parse_ineq
from eqbell.geometry import facetness
from eqbell.geometry.standard import is_standard_local_facet
from eqbell.strategies import vertex_array
from eqbell.symmetry import is_ppi

TABLE_245 = [f"ppi-245-{i:02d}" for i in range(1, 11)]
LFACETS = [f"u422-lfacet-{i}" for i in range(1, 4)]
# printed with a bound its coefficients do not satisfy
INCONSISTENT = {"s222-333"}


def test_names():
    names = set(catalog_names())
    assert {"chsh-smells", "s33", "s4455", "s222", "s222-333", "u4", "ppi-233", "ppi-243"} <= names
    assert set(TABLE_245) <= names and set(LFACETS) <= names
    assert {"f22", "f32", "f42"} <= names


def test_unknown_name_lists_entries():
    with pytest.raises(KeyError, match="chsh-smells"):
        catalog_get("chsh")


@pytest.mark.parametrize("name,terms,bound", [("chsh-smells", 4, 2), ("s33", 8, 3), ("u4", 5, 1)])
def test_entry_shapes(name, terms, bound):
    f = catalog_get(name).ineq
    assert len(f) == terms
    assert f.bound == bound


@pytest.mark.parametrize("name", catalog_names())
def test_entry_round_trips(name):
    e = catalog_get(name)
    text = format_ineq(e.ineq)
    back = parse_ineq(text)
    assert back == e.ineq
    assert e.expected, "every entry carries expectations"
    for exp in e.expected:
        assert exp.origin in ("reported", "derived")
        assert exp.tier in ("gate", "best-effort", "slow")


@pytest.mark.parametrize("name", [
    pytest.param(n, marks=pytest.mark.xfail(strict=True, reason="printed bound is below the local bound"))
    if n in INCONSISTENT else n
    for n in catalog_names()
])
def test_entry_is_tight_on_its_local_bound(name):
    f = catalog_get(name).ineq
    assert bounds.local_bound(f, f.scenario.k) == f.bound


@pytest.mark.parametrize("name", TABLE_245)
def test_table_entries_are_ppi_facets(name):
    f = catalog_get(name).ineq
    assert is_ppi(f)
    ints, den = f.integer_vector()
    num, dim = facetness(ints, f.bound * den, vertex_array(f.scenario))
    assert num == dim


@pytest.mark.parametrize("name", LFACETS)
def test_unanimous_lfacets(name):
    f = catalog_get(name).ineq
    ints, den = f.integer_vector()
    num, dim = facetness(ints, f.bound * den, vertex_array(f.scenario))
    assert num == dim
    assert is_standard_local_facet(f)


def test_parse_expectation():
    e = parse_expectation("seesaw 3.5 d=2 tol=1e-3 origin=derived tier=best-effort")
    assert (e.kind, e.value, e.params, e.origin, e.tier) == ("seesaw", 3.5, {"d": "2", "tol": "1e-3"},
                                                           "derived", "best-effort")
    assert parse_expectation("local 7/2 k=3").value == Fraction(7, 2)
    assert parse_expectation("ppi true").value is True
    for bad in ("local", "volume 3", "ppi maybe", "local 2 k"):
        with pytest.raises(ValueError):
            parse_expectation(bad)


def test_expect_lookup():
    e = catalog_get("s222")
    assert e.expect("local", k=3).value == 2
    assert e.expect("local", k=5) is None


def test_verify_chsh():
    rep = verify_entry(catalog_get("chsh-smells"))
    assert rep.ok
    assert [c.status for c in rep.checks] == ["pass"] * len(rep.checks)
    assert any("seesaw" in line for line in rep.lines())


def test_verify_s222_exact_values():
    rep = verify_entry(catalog_get("s222"), kinds=("local", "bilocal-ns"))
    statuses = {c.expectation.label(): c.status for c in rep.checks}
    assert statuses["local k=2"] == statuses["local k=3"] == statuses["bilocal-ns k=3"] == "pass"


def test_verify_u4_exact_values():
    rep = verify_entry(catalog_get("u4"), kinds=("local", "bilocal-ns", "facetness"))
    assert all(c.status in ("pass", "skipped") for c in rep.checks)
    assert sum(c.status == "pass" for c in rep.checks) == 4


def test_verify_reports_mismatch():
    text = "\n".join([
        "# expect local 3 k=2",
        "scenario n=2 m=2,2 k=2 mode=smells",
        "term x=(0,0) sigma=ALL coeff=1",
        "bound 1",
    ])
    rep = verify_entry(parse_entry("toy", text))
    assert not rep.ok
    assert rep.checks[0].status == "fail"


def test_best_effort_miss_is_not_failure():
    text = "\n".join([
        "# expect seesaw 9 d=2 tier=best-effort",
        "scenario n=2 m=2,2 k=2 mode=smells",
        "term x=(0,0) sigma=ALL coeff=1",
        "bound 1",
    ])
    rep = verify_entry(parse_entry("toy", text), restarts=1)
    assert rep.checks[0].status == "miss"
    assert rep.ok


def test_slow_tier_skipped_by_default():
    text = "\n".join([
        "# expect local 1 k=2 tier=slow",
        "scenario n=2 m=2,2 k=2 mode=smells",
        "term x=(0,0) sigma=ALL coeff=1",
        "bound 1",
    ])
    rep = verify_entry(parse_entry("toy", text))
    assert rep.checks[0].status == "skipped"
    assert verify_entry(parse_entry("toy", text), tiers=("slow",)).checks[0].status == "pass"


def test_resource_cap_marks_check_skipped():
    with override_caps(max_hilbert_dim=2):
        rep = verify_entry(catalog_get("chsh-smells"), kinds=("seesaw",))
    seesaw = [c for c in rep.checks if c.expectation.kind == "seesaw"]
    assert seesaw[0].status == "skipped"
    assert "max_hilbert_dim" in seesaw[0].message


def test_timeout_marks_check_skipped():
    rep = verify_entry(catalog_get("s4455"), kinds=("seesaw",), timeout=0.05)
    statuses = [c.status for c in rep.checks if c.expectation.kind == "seesaw"]
    assert statuses and all(s == "skipped" for s in statuses)


def test_every_entry_loads():
    assert len(catalog_all()) == len(catalog_names())

import itertools

import numpy as np
import pytest

from eqbell.bounds import local_bound, ns_bound
from eqbell.catalog import catalog_get
from eqbell.functional import InequalityFunctional
from eqbell.geometry import facet_enumeration, facetness
from eqbell.scenario import Scenario
from eqbell.strategies import vertex_array
from eqbell.symmetry import (
    SymmetryGroup,
    canonical_form,
    class_is_ppi,
    classify,
    facet_functionals,
    geometry_for,
    group_for,
    is_ppi,
    is_positivity,
    load_classes,
    save_class,
    vertex_permutations,
)

ORBIT_SCENARIOS = [
    "n=2 m=2 k=2",
    "n=2 m=2 k=3",
    "n=2 m=3 k=3",
    "n=3 m=2 k=2",
    "n=3 m=2 k=2 mode=unanimous",
    "n=2 m=2,3 k=2",
]


def image(ineq, group, gi):
    C, b = group.act(ineq.integer_vector()[0], ineq.bound, which=[gi])
    return InequalityFunctional.from_vector(ineq.scenario, list(C[0]), b[0])


def some_facets(sc, count=3):
    h = facet_enumeration(vertex_array(sc))
    fs = facet_functionals(sc, h)
    rng = np.random.default_rng(1)
    return [fs[i] for i in rng.choice(len(fs), size=min(count, len(fs)), replace=False)]


def test_group_sizes():
    # one outcome flip per party and input
    assert len(SymmetryGroup(Scenario.parse("n=2 m=2 k=2"))) == 2 * 4 * 2 ** 4
    assert len(SymmetryGroup(Scenario.parse("n=2 m=4 k=2"))) == 2 * 24 ** 2 * 2 ** 8
    assert len(SymmetryGroup(Scenario.parse("n=2 m=3 k=3"))) == 2 * 36
    assert len(SymmetryGroup(Scenario.parse("n=3 m=2 k=2"))) == 6 * 8
    # parties with different input counts cannot be swapped
    assert len(SymmetryGroup(Scenario.parse("n=2 m=2,3 k=2"))) == 2 * 6 * 2 ** 5


def test_single_input_flip_is_a_symmetry():
    sc = Scenario.parse("n=2 m=2 k=2")
    group = group_for(sc)
    ident = (tuple(range(2)), tuple(range(2)))
    gi = next(i for i, (p, t, f) in enumerate(group.elements) if p == (0, 1) and t == ident and f == ((1, 0), (0, 0)))
    # flipping Alice on x=0 swaps p(=|0,y) and p(!=|0,y)
    C, b = group.act([1, 0, 0, 0], 0, which=[gi])
    assert list(C[0]) == [-1, 0, 0, 0] and b[0] == -1
    perms = vertex_permutations(group, geometry_for(sc))
    assert all(sorted(row) == list(range(len(row))) for row in perms)


def test_flips_rejected_where_they_do_not_act():
    with pytest.raises(ValueError):
        SymmetryGroup(Scenario.parse("n=2 m=2 k=3"), outputs=True)


@pytest.mark.parametrize("text", ORBIT_SCENARIOS)
def test_canonical_form_is_orbit_invariant(text):
    sc = Scenario.parse(text)
    group = group_for(sc)
    geo = geometry_for(sc)
    rng = np.random.default_rng(7)
    for f in some_facets(sc):
        want = canonical_form(f, geo, group)
        for gi in rng.integers(0, len(group), size=100):
            g_f = image(f, group, int(gi))
            assert canonical_form(g_f, geo, group) == want
            assert canonical_form(g_f, geo, group).bound == want.bound


@pytest.mark.parametrize("text", ORBIT_SCENARIOS)
def test_canonical_form_is_idempotent(text):
    sc = Scenario.parse(text)
    for f in some_facets(sc):
        c = canonical_form(f)
        assert canonical_form(c) == c


def test_group_action_preserves_values_on_vertices():
    sc = Scenario.parse("n=3 m=2 k=2")
    group = group_for(sc)
    V = vertex_array(sc).astype(object)
    f = some_facets(sc, 1)[0]
    for gi in range(0, len(group), 5):
        g_f = image(f, group, gi)
        # the image's maximum over the (invariant) vertex set equals the original's
        assert max(V.dot(g_f.integer_vector()[0])) * f.integer_vector()[1] == \
            max(V.dot(f.integer_vector()[0])) * g_f.integer_vector()[1]


def test_chsh_sign_variants_share_one_form():
    sc = Scenario.parse("n=2 m=2 k=2")
    forms = set()
    variants = 0
    for signs in itertools.product((1, -1), repeat=4):
        if signs.count(-1) % 2 == 0:
            continue
        vec = [0] * sc.dim
        for x, s in zip(sc.input_tuples, signs):
            vec[sc.index[(x, next(p for p in sc.patterns if p.num_blocks == 1))]] = s
        f = InequalityFunctional.from_vector(sc, vec)
        f = f.with_bound(local_bound(f))
        forms.add(canonical_form(f))
        variants += 1
    assert variants == 8
    assert len(forms) == 1
    assert forms == {canonical_form(catalog_get("chsh-smells").ineq)}


@pytest.mark.parametrize("text,count", [
    ("n=2 m=2 k=2", 1),
    ("n=2 m=2 k=3", 1),
    ("n=2 m=3 k=2", 1),
    ("n=2 m=3 k=3", 4),
    ("n=2 m=3 k=4", 3),
])
def test_class_counts(text, count):
    sc = Scenario.parse(text)
    classes = classify(facet_enumeration(vertex_array(sc)), sc)
    assert len(classes) == count


def test_chsh_is_the_only_class():
    sc = Scenario.parse("n=2 m=2 k=2")
    (c,) = classify(facet_enumeration(vertex_array(sc)), sc)
    assert c["representative"] == canonical_form(catalog_get("chsh-smells").ineq)
    assert c["ppi"]


def test_positivity_classes_are_flagged():
    sc = Scenario.parse("n=2 m=2 k=2")
    every = classify(facet_enumeration(vertex_array(sc)), sc, include_positivity=True)
    assert sum(c["positivity"] for c in every) == len(every) - 1
    assert sum(c["size"] for c in every) == len(facet_enumeration(vertex_array(sc)).facets)
    with pytest.raises(ValueError):
        is_positivity(every[0]["representative"], rule="nonsense")


def test_mixed_scenarios_rejected():
    a = catalog_get("chsh-smells").ineq
    b = catalog_get("s33").ineq
    with pytest.raises(ValueError):
        classify([a, b])


def test_ppi_examples():
    assert is_ppi(catalog_get("chsh-smells").ineq)
    assert is_ppi(catalog_get("s4455").ineq)
    assert not class_is_ppi(catalog_get("s222").ineq)


@pytest.mark.parametrize("text", ["n=2 m=3 k=3", "n=3 m=2 k=2 mode=unanimous"])
def test_bounds_are_class_invariants(text):
    sc = Scenario.parse(text)
    group = group_for(sc)
    V = vertex_array(sc)
    rng = np.random.default_rng(3)
    for f in some_facets(sc, 2):
        # flips shift the bound, so compare gaps to it
        base = (local_bound(f) - f.bound, ns_bound(f) - f.bound)
        ints, den = f.integer_vector()
        fness = facetness(ints, f.bound * den, V)
        for gi in rng.integers(0, len(group), size=4):
            g_f = image(f, group, int(gi))
            assert (local_bound(g_f) - g_f.bound, ns_bound(g_f) - g_f.bound) == base
            g_ints, g_den = g_f.integer_vector()
            assert facetness(g_ints, g_f.bound * g_den, V) == fness


def test_class_repository_round_trip(tmp_path):
    f = canonical_form(catalog_get("s33").ineq)
    h = save_class(f, {"ppi": True, "facetness": "1"}, root=str(tmp_path))
    (back, meta), = load_classes(f.scenario, root=str(tmp_path))
    assert back == f
    assert meta["ppi"] == "True"
    assert h in {p.stem for p in (tmp_path / f.scenario.slug()).iterdir()}


@pytest.mark.slow
def test_four_input_correlation_scenario_has_three_classes():
    # global per-party flips alone split these facets into 17 orbits
    from eqbell.suite import compute_row
    r = compute_row("n=2 m=4 k=2")
    assert (r.classes, r.lfacets, r.ppi) == (3, 3, 3)
    assert sorted(c["size"] for c in r.class_list) == [288, 9216, 18432]

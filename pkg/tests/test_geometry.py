import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqbell.bounds import ns_polytope
from eqbell.catalog import catalog_get
from eqbell.config import ResourceError, override_caps
from eqbell.geometry import (
    HRepresentation,
    InfeasibleError,
    UnboundedError,
    affine_dimension,
    facet_enumeration,
    facetness,
    is_facet,
    vertex_enumeration,
)
from eqbell.geometry.lp import linprog_exact, lp_maximize
from eqbell.geometry.standard import (
    evaluate_full,
    is_standard_local_facet,
    lift_to_full_behavior,
    standard_dimension,
    standard_facetness,
)
from eqbell.scenario import Scenario, reduce_full_behavior
from eqbell.strategies import vertex_array


def as_set(V):
    return {tuple(Fraction(v) for v in row) for row in np.asarray(V, dtype=object)}


def cube(d):
    facets = []
    for i in range(d):
        e = np.zeros(d, dtype=object)
        e[i] = 1
        facets += [(e.copy(), 1), (-e, 0)]
    return HRepresentation(d, facets)


SMALL = ["n=2 m=2 k=2", "n=2 m=2 k=3", "n=2 m=3 k=2", "n=3 m=2 k=2 mode=unanimous"]


def test_unit_simplex_has_three_facets():
    h = facet_enumeration([[0, 0], [1, 0], [0, 1]])
    assert len(h.facets) == 3
    assert h.equations == []


def test_cube_has_eight_vertices():
    V = vertex_enumeration(cube(3))
    assert as_set(V) == set(itertools.product((0, 1), repeat=3))


def test_normals_are_primitive_with_canonical_sign():
    h = facet_enumeration([[0, 0], [2, 0], [0, 4]])
    for a, b in h.facets:
        g = 0
        for v in list(a) + [b]:
            g = np.gcd(g, int(v))
        assert g == 1


def test_degenerate_input():
    h = facet_enumeration([[1, 2, 3], [1, 2, 3]])
    assert h.facets == []
    assert len(h.equations) == 3


def test_lower_dimensional_hull_reports_equations():
    # a square sitting in the plane z = 1
    pts = [[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]]
    h = facet_enumeration(pts)
    assert len(h.facets) == 4
    assert len(h.equations) == 1
    assert as_set(vertex_enumeration(h)) == as_set(pts)


@pytest.mark.parametrize("text", SMALL)
def test_scenario_round_trip(text):
    V = vertex_array(Scenario.parse(text))
    h = facet_enumeration(V)
    assert as_set(vertex_enumeration(h)) == as_set(V)
    # H -> V -> H as well
    assert facet_enumeration(vertex_enumeration(h)).sorted() == h.sorted()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=4, max_size=9, unique=True))
def test_random_round_trip(points):
    h = facet_enumeration(points)
    V = vertex_enumeration(h) if h.facets else np.array(points[:1], dtype=object)
    back = facet_enumeration(V)
    assert back.sorted() == h.sorted()
    P = np.array(points, dtype=object)
    for a, b in h.facets:
        assert max(P.dot(a)) == b
    for a, b in h.equations:
        assert all(P.dot(a) == b)


def test_every_facet_is_valid_and_tight():
    V = vertex_array(Scenario.parse("n=2 m=3 k=3"))
    h = facet_enumeration(V)
    for a, b in h.facets[:40]:
        assert max(V.astype(object).dot(a)) == b
        assert is_facet(a, b, V)


def test_ns_222_has_24_vertices():
    V = vertex_enumeration(ns_polytope(Scenario.parse("n=2 m=2 k=2")))
    assert len(V) == 24
    deterministic = [v for v in V if all(x in (0, 1) for x in v)]
    assert len(deterministic) == 16
    # the remaining eight are PR-type boxes with entries 0 and 1/2
    assert all(set(v) == {0, Fraction(1, 2)} for v in V if not all(x in (0, 1) for x in v))


def test_unbounded_and_infeasible():
    ray = HRepresentation(1, [(np.array([-1], dtype=object), 0)])
    with pytest.raises(UnboundedError):
        vertex_enumeration(ray)
    empty = HRepresentation(1, [(np.array([1], dtype=object), 0), (np.array([-1], dtype=object), -1)])
    with pytest.raises(InfeasibleError):
        vertex_enumeration(empty)


def test_affine_dimension_examples():
    assert affine_dimension([[3, 1]]) == 0
    assert affine_dimension(vertex_array(Scenario.parse("n=2 m=2 k=2"))) == 4


def test_s222_saturating_set_has_codimension_two():
    # with two outcomes the local bound of S222 drops to 1
    ineq = catalog_get("s222").ineq.with_bound(1)
    num, den = standard_facetness(ineq, k=2)
    assert standard_dimension(ineq.scenario, 2) == 26
    assert (num, den) == (24, 25)


def test_facetness_examples():
    V = vertex_array(Scenario.parse("n=2 m=2 k=2"))
    chsh = catalog_get("chsh-smells").ineq
    ints, d = chsh.integer_vector()
    assert facetness(ints, chsh.bound * d, V) == (3, 3)
    # a supporting hyperplane touching a single vertex
    top = V[0]
    a = np.array([2 * int(v) - 1 for v in top], dtype=object)
    assert facetness(a, int(a.dot(top)), V)[0] == 0
    with pytest.raises(ValueError):
        facetness(ints, chsh.bound * d - 1, V)


def test_u4_is_a_facet():
    u4 = catalog_get("u4").ineq
    ints, d = u4.integer_vector()
    num, den = facetness(ints, u4.bound * d, vertex_array(u4.scenario))
    assert num == den


def test_lp_trivial():
    res = linprog_exact([1], A_ub=[[1]], b_ub=[1])
    assert res.value == 1


@pytest.mark.parametrize("engine", ["simplex", "highs"])
def test_lp_engines_agree_on_chsh(engine):
    chsh = catalog_get("chsh-smells").ineq
    c = lift_to_full_behavior(chsh).reshape(-1)
    res = lp_maximize(list(c), ns_polytope(chsh.scenario), engine=engine)
    assert res.value == 3


def test_lp_matches_vertex_maximum():
    rng = np.random.default_rng(5)
    V = vertex_array(Scenario.parse("n=2 m=2 k=3"))
    h = facet_enumeration(V)
    for _ in range(10):
        c = rng.integers(-4, 5, V.shape[1])
        want = max(V.astype(object).dot(c.astype(object)))
        assert lp_maximize([int(v) for v in c], h).value == want


def test_lp_unbounded_and_infeasible():
    with pytest.raises(UnboundedError):
        linprog_exact([1], A_ub=[[-1]], b_ub=[0], engine="simplex")
    with pytest.raises(InfeasibleError):
        linprog_exact([1], A_ub=[[1]], b_ub=[-1], engine="simplex")
    with pytest.raises(InfeasibleError):
        linprog_exact([1], A_ub=[[1]], b_ub=[-1])


def test_lift_chsh_on_all_zero_outputs():
    chsh = catalog_get("chsh-smells").ineq
    p = np.zeros((2, 2, 2, 2), dtype=object)
    p[:, :, 0, 0] = 1
    # the negative term fires as well
    assert evaluate_full(chsh, p) == 2
    p[1, 1, 0, 0] = 0
    p[1, 1, 0, 1] = 1
    assert evaluate_full(chsh, p) == 3


def test_lift_of_zero_functional():
    chsh = catalog_get("chsh-smells").ineq
    zero = chsh.from_vector(chsh.scenario, [0] * chsh.scenario.dim, 0)
    assert not np.any(lift_to_full_behavior(zero))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_lifted_value_matches_reduced_value(data):
    ineq = catalog_get(data.draw(st.sampled_from(["chsh-smells", "s33", "s222", "u4"]))).ineq
    sc = ineq.scenario
    shape = tuple(sc.inputs) + (sc.k,) * sc.n
    raw = np.array(data.draw(st.lists(st.integers(0, 5), min_size=int(np.prod(shape)),
                                      max_size=int(np.prod(shape)))), dtype=object).reshape(shape)
    raw = raw + 1
    p = np.empty(shape, dtype=object)
    for x in itertools.product(*[range(m) for m in sc.inputs]):
        block = raw[x]
        total = sum(block.ravel())
        p[x] = np.vectorize(lambda v: Fraction(v, total), otypes=[object])(block)
    assert evaluate_full(ineq, p) == ineq.value(reduce_full_behavior(sc, p))


def test_standard_facet_examples():
    assert is_standard_local_facet(catalog_get("chsh-smells").ineq)
    assert not is_standard_local_facet(catalog_get("s222").ineq)


def test_vertex_cap():
    with override_caps(max_vertices=3):
        with pytest.raises(ResourceError):
            facet_enumeration(vertex_array(Scenario.parse("n=2 m=2 k=2")))

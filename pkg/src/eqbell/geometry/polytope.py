"""Facet and vertex enumeration, affine dimension and facetness (all exact)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from eqbell.config import caps
from eqbell.geometry.dd import LinealityError, extreme_rays
from eqbell.geometry.linalg import (
    affine_dimension,
    as_int_matrix,
    canonical_sign,
    hull_equations,
    independent_columns,
    primitive,
)


class UnboundedError(ValueError):
    pass


class InfeasibleError(ValueError):
    pass


@dataclass(eq=False)
class HRepresentation:
    """``a . x <= b`` for each facet, ``a . x == b`` for each equation; integer entries."""

    dim: int
    facets: list = field(default_factory=list)
    equations: list = field(default_factory=list)

    def sorted(self) -> "HRepresentation":
        key = lambda ab: (tuple(int(v) for v in ab[0]), int(ab[1]))
        return HRepresentation(self.dim, sorted(self.facets, key=key), sorted(self.equations, key=key))

    def key(self) -> tuple:
        """Order-independent identity of the representation."""
        return (self.dim, tuple(sorted(_key(a, b) for a, b in self.facets)),
                tuple(sorted(_key(a, b) for a, b in self.equations)))

    def __eq__(self, other):
        return isinstance(other, HRepresentation) and self.key() == other.key()

    def contains(self, x) -> bool:
        x = np.array([Fraction(v) for v in x], dtype=object)
        return all(a.dot(x) <= b for a, b in self.facets) and all(a.dot(x) == b for a, b in self.equations)


def _key(a, b):
    return tuple(int(v) for v in a) + (int(b),)


def facet_enumeration(vertices, order=None) -> HRepresentation:
    """Facets of conv(vertices) relative to its affine hull, plus the hull equations.

    The points are projected onto coordinates that parametrize their affine
    hull, facets are the extreme rays of the polar cone
    ``{(b, a) : b - a . v >= 0}``, and normals are lifted back with zeros on
    the dropped coordinates. Rows are inserted in the given order (the callers
    pass vertices sorted lexicographically).
    """
    V = as_int_matrix(vertices)
    n, d = V.shape
    if n == 0:
        raise ValueError("facet enumeration needs at least one vertex")
    caps.check("max_vertices", n)
    eqs = hull_equations(V)
    cols = independent_columns(V)
    hrep = HRepresentation(d, [], eqs)
    if not cols:
        return hrep
    P = V[:, cols]
    G = np.hstack([np.ones((n, 1), dtype=object), -P])
    rays, _ = extreme_rays(G, order=order)
    seen = set()
    for r in rays:
        b, a_small = r[0], r[1:]
        a = np.zeros(d, dtype=object)
        a[cols] = a_small
        v = primitive(np.concatenate([a, [b]]))
        key = _key(v[:-1], v[-1])
        if key not in seen:
            seen.add(key)
            hrep.facets.append((v[:-1], int(v[-1])))
    return hrep.sorted()


def vertex_enumeration(h: HRepresentation) -> np.ndarray:
    """Vertices (rows of Fractions) of a bounded H-polyhedron."""
    d = h.dim
    A = as_int_matrix([list(a) + [b] for a, b in h.facets]) if h.facets else np.zeros((0, d + 1), dtype=object)
    # cone {(t, x) : t b - a.x >= 0, t >= 0}, equations t e - a.x == 0
    G = np.hstack([A[:, -1:], -A[:, :-1]]) if len(A) else np.zeros((0, d + 1), dtype=object)
    G = np.vstack([G, np.array([[1] + [0] * d], dtype=object)])
    E = None
    if h.equations:
        Eq = as_int_matrix([list(a) + [b] for a, b in h.equations])
        E = np.hstack([Eq[:, -1:], -Eq[:, :-1]])
    try:
        rays, _ = extreme_rays(G, E)
    except LinealityError as exc:
        raise UnboundedError(f"polyhedron contains a line: {exc}") from None
    verts = []
    for r in rays:
        t = r[0]
        if t == 0:
            raise UnboundedError("polyhedron has a recession direction")
        verts.append([Fraction(int(v), int(t)) for v in r[1:]])
    if not verts:
        raise InfeasibleError("empty polyhedron")
    verts.sort()
    return np.array(verts, dtype=object).reshape(len(verts), d)


def saturating(normal, bound, vertices) -> np.ndarray:
    V = as_int_matrix(vertices)
    vals = V.dot(np.array(normal, dtype=object))
    return V[vals == bound]


def facetness(normal, bound, vertices) -> tuple[int, int]:
    """(affine dim of the saturating vertices, facet dimension of the polytope).

    Raises if the inequality is violated or not attained.
    """
    V = as_int_matrix(vertices)
    vals = V.dot(np.array(normal, dtype=object))
    top = max(vals)
    if top > bound:
        raise ValueError(f"inequality violated: max {top} > bound {bound}")
    if top < bound:
        raise ValueError(f"inequality not tight: max {top} < bound {bound}")
    sat = V[vals == bound]
    return affine_dimension(sat), affine_dimension(V) - 1


def facetness_value(normal, bound, vertices) -> Fraction:
    num, den = facetness(normal, bound, vertices)
    return Fraction(num, den) if den else Fraction(1)


def is_facet(normal, bound, vertices) -> bool:
    num, den = facetness(normal, bound, vertices)
    return num == den


__all__ = [
    "HRepresentation",
    "UnboundedError",
    "InfeasibleError",
    "facet_enumeration",
    "vertex_enumeration",
    "affine_dimension",
    "facetness",
    "facetness_value",
    "is_facet",
    "saturating",
    "canonical_sign",
]

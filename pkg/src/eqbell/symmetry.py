"""Symmetries of reduced scenarios, canonical forms and facet classes.

Group elements combine a party permutation (among parties with equal input
counts), one input permutation per party and, for two outcomes, a per-party
outcome flip. Each acts as a permutation of the extended coordinates
``(x, sigma)`` over all partitions; images are brought back to reduced
coordinates using ``sum_sigma p(sigma|x) = 1``.
"""
from __future__ import annotations

import hashlib
import itertools
import os
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

import numpy as np

from eqbell.config import caps
from eqbell.functional import InequalityFunctional, format_ineq, format_rational, parse_ineq
from eqbell.geometry.linalg import affine_dimension, as_int_matrix, exact_rank, gauss_jordan, hull_equations
from eqbell.partitions import enumerate_partitions, pattern_of_outcomes
from eqbell.scenario import Scenario
from eqbell.strategies import vertex_array


def outputs_act(sc: Scenario) -> bool:
    """Outcome flips are used for two parties with two outcomes.

    For more parties they are still symmetries of the smells polytope, but
    the tabulated class counts are taken without them; pass ``outputs=True``
    to ``SymmetryGroup`` to include them anyway.
    """
    return sc.k == 2 and sc.n == 2


class SymmetryGroup:
    """Party permutations, per-party input permutations and, for two outcomes,
    outcome flips chosen independently for every party and input."""

    def __init__(self, sc: Scenario, outputs: bool | None = None):
        self.scenario = sc
        self.outputs = outputs_act(sc) if outputs is None else outputs
        if self.outputs and (sc.k != 2 or (sc.mode == "unanimous" and sc.n > 2)):
            raise ValueError(f"outcome flips do not act on the reduced coordinates of {sc}")
        n = sc.n
        self.party_perms = [p for p in itertools.permutations(range(n))
                            if all(sc.inputs[p[i]] == sc.inputs[i] for i in range(n))]
        self.input_perms = list(itertools.product(*[list(itertools.permutations(range(m))) for m in sc.inputs]))
        # flips[i][x_i] relabels party i's outcome on input x_i
        if self.outputs:
            self.flips = list(itertools.product(*[list(itertools.product((0, 1), repeat=m)) for m in sc.inputs]))
        else:
            self.flips = [tuple((0,) * m for m in sc.inputs)]
        size = len(self.party_perms) * len(self.input_perms) * len(self.flips)
        caps.check("max_group_size", size)
        self._size = size

    def __len__(self):
        return self._size

    @property
    def elements(self):
        """``(party perm, input perms, flips)`` triples in the row order of ``ext_maps``."""
        return itertools.product(self.party_perms, self.input_perms, self.flips)

    @cached_property
    def _ext(self):
        sc = self.scenario
        parts = enumerate_partitions(sc.n)
        pidx = {p: i for i, p in enumerate(parts)}
        xs = sc.input_tuples
        xidx = {x: i for i, x in enumerate(xs)}
        B = len(parts)
        return parts, pidx, xs, xidx, B

    def _map_point(self, g, x, sigma):
        perm, taus, flips = g
        n = self.scenario.n
        labels = list(sigma.rgs)
        if sigma.num_blocks <= 2:
            labels = [a ^ flips[i][x[i]] for i, a in enumerate(labels)]
        x2 = [taus[i][x[i]] for i in range(n)]
        nx = [0] * n
        nl = [0] * n
        for i in range(n):
            nx[perm[i]] = x2[i]
            nl[perm[i]] = labels[i]
        return tuple(nx), pattern_of_outcomes(nl)

    @cached_property
    def ext_maps(self) -> np.ndarray:
        """``maps[g, e]`` = index of the image of extended coordinate e under g."""
        parts, pidx, xs, xidx, B = self._ext
        n = self.scenario.n
        ident_t = self.input_perms[0]
        ident_f = self.flips[0]
        blocks = []
        # the input tuple's image ignores flips and the pattern's image ignores input perms
        for perm in self.party_perms:
            xmap = np.array([[xidx[self._map_point((perm, t, ident_f), x, parts[0])[0]] for x in xs]
                             for t in self.input_perms], dtype=np.int64)
            smap = np.array([[[pidx[self._map_point((perm, ident_t, f), x, s)[1]] for s in parts] for x in xs]
                             for f in self.flips], dtype=np.int64)
            blk = xmap[:, None, :, None] * B + smap[None, :, :, :]
            blocks.append(blk.reshape(-1, len(xs) * B))
        return np.concatenate(blocks, axis=0)

    @cached_property
    def _reduced_cols(self) -> np.ndarray:
        sc = self.scenario
        parts, pidx, xs, xidx, B = self._ext
        return np.array([xidx[x] * B + pidx[s] for x, s in sc.coords], dtype=np.int64)

    def act(self, coeffs, bound, which=None):
        """Images of ``coeffs . p <= bound`` (integer or object arrays) under group elements.

        Returns ``(C, b)`` with one image per row.
        """
        sc = self.scenario
        parts, pidx, xs, xidx, B = self._ext
        maps = self.ext_maps if which is None else self.ext_maps[which]
        G = len(maps)
        a = np.asarray(coeffs)
        ext = np.zeros(len(xs) * B, dtype=a.dtype)
        ext[self._reduced_cols] = a
        img = np.zeros((G, len(xs) * B), dtype=a.dtype)
        img[np.arange(G)[:, None], maps] = ext[None, :]
        img = img.reshape(G, len(xs), B)
        triv = img[:, :, B - 1].copy()
        img = img - triv[:, :, None]
        shift = triv.sum(axis=1)
        img = img.reshape(G, len(xs) * B)[:, self._reduced_cols]
        return img, np.asarray(bound) - shift

    def party_subgroup(self) -> list[int]:
        # input perms and flips both start with the identity
        step = len(self.input_perms) * len(self.flips)
        return [i * step for i in range(len(self.party_perms))]


@lru_cache(maxsize=32)
def group_for(sc: Scenario) -> SymmetryGroup:
    return SymmetryGroup(sc)


class ScenarioGeometry:
    """Vertices, hull equations and the orthogonal projector onto the hull's direction space."""

    def __init__(self, sc: Scenario, vertices=None):
        self.scenario = sc
        self.vertices = vertex_array(sc) if vertices is None else np.asarray(vertices)
        self.equations = hull_equations(self.vertices)
        self.eq_matrix = (np.array([list(a) for a, _ in self.equations], dtype=object)
                          if self.equations else np.zeros((0, sc.dim), dtype=object))

    @cached_property
    def projector(self):
        """Integer matrix ``D * P`` and D, with P the orthogonal projector onto the direction space."""
        d = self.scenario.dim
        A = self.eq_matrix
        if len(A) == 0:
            return None, 1
        # rows of the RREF of A span the equation normals; P = I - A^T (A A^T)^-1 A
        AAt = A.dot(A.T)
        k = len(A)
        aug = np.hstack([AAt, np.eye(k, dtype=np.int64).astype(object)])
        E, piv, D = gauss_jordan(aug)
        inv = E[:, k:]  # (A A^T)^-1 = inv / D
        Pint = D * np.eye(d, dtype=np.int64).astype(object) - A.T.dot(inv).dot(A)
        return Pint, D

    def project(self, coeffs) -> np.ndarray:
        """Primitive integer representative of the projection of ``coeffs`` onto the direction space."""
        a = np.array([Fraction(v) for v in coeffs], dtype=object)
        den = 1
        for v in a:
            den = den * v.denominator // np.gcd(den, v.denominator)
        ints = np.array([int(v * den) for v in a], dtype=object)
        Pint, D = self.projector
        if Pint is not None:
            ints = Pint.dot(ints)
        g = 0
        for v in ints:
            g = np.gcd(g, int(v))
        if g:
            ints = ints // g
        return ints

    @cached_property
    def eliminator(self):
        """``(R, dependent columns)``: ``R @ c`` is a multiple of the unique functional
        equivalent to ``c`` on the hull that vanishes on the dependent columns.

        Dependent columns are the pivots of the reduced equation matrix, i.e. the
        earliest coordinates that the hull equations can solve for.
        """
        d = self.scenario.dim
        A = self.eq_matrix
        if len(A) == 0:
            return None, []
        E, piv, D = gauss_jordan(A)
        E = E[: len(piv)]
        R = D * np.eye(d, dtype=np.int64).astype(object)
        for i, c in enumerate(piv):
            R[:, c] -= E[i]
        return R, list(piv)

    def eliminate(self, coeffs) -> np.ndarray:
        R, _ = self.eliminator
        return _primitive_rows(np.atleast_2d(np.asarray(coeffs, dtype=object)) if R is None
                               else np.atleast_2d(np.asarray(coeffs, dtype=object)).dot(R.T))

    def project_rows(self, C) -> np.ndarray:
        C = np.atleast_2d(np.asarray(C, dtype=object))
        Pint, _ = self.projector
        return _primitive_rows(C if Pint is None else C.dot(Pint.T))

    def bound_of(self, coeffs) -> int:
        return int(max(self.vertices.astype(object).dot(np.asarray(coeffs, dtype=object))))

    def bounds_of(self, C) -> np.ndarray:
        return self.vertices.astype(object).dot(np.asarray(C, dtype=object).T).max(axis=0)


@lru_cache(maxsize=32)
def geometry_for(sc: Scenario) -> ScenarioGeometry:
    return ScenarioGeometry(sc)


def _primitive_rows(C) -> np.ndarray:
    C = np.array(C, dtype=object)
    for i, row in enumerate(C):
        g = 0
        for v in row:
            g = gcd(g, int(v))
        if g > 1:
            C[i] = [int(v) // g for v in row]
    return C


def _unique_rows(C) -> np.ndarray:
    rows = sorted({tuple(int(v) for v in row) for row in C})
    return np.array(rows, dtype=object).reshape(len(rows), np.shape(C)[1])


def _lexmin_row(M) -> tuple:
    # Python tuples compare exactly even when entries exceed int64
    return min(tuple(int(v) for v in row) for row in M)


def orbit_images(ineq: InequalityFunctional, geo: ScenarioGeometry | None = None, group=None):
    """All images ``(rows, bounds)`` of the functional, each projected onto the
    hull's direction space and made primitive; bounds are maxima over the vertices."""
    sc = ineq.scenario
    geo = geo or geometry_for(sc)
    group = group or group_for(sc)
    a = geo.project_rows(ineq.integer_vector()[0])[0]
    C, _ = group.act(a, 0)
    C = _unique_rows(geo.project_rows(C))
    return C, geo.bounds_of(C)


def canonical_key(ineq: InequalityFunctional, geo=None, group=None) -> tuple:
    C, b = orbit_images(ineq, geo, group)
    return _lexmin_row(np.hstack([C, np.asarray(b, dtype=object)[:, None]]))


def canonical_form(ineq: InequalityFunctional, geo=None, group=None) -> InequalityFunctional:
    """Lexicographically least ``(coeffs, bound)`` over the orbit, with coefficients
    projected onto the hull's direction space and the bound tight on the vertices."""
    key = canonical_key(ineq, geo, group)
    sc = ineq.scenario
    return InequalityFunctional.from_vector(sc, key[:-1], key[-1], name=ineq.name)


def _party_invariant(row, geo, pgroup, pidx) -> bool:
    imgs, _ = pgroup.act(np.asarray(row, dtype=object), 0, which=pidx)
    P = geo.project_rows(imgs)
    me = geo.project_rows([row])[0]
    return bool(np.all(P == me[None, :]))


def is_ppi(ineq: InequalityFunctional, geo=None) -> bool:
    """Invariant under every party permutation, up to positive scaling and hull equations."""
    sc = ineq.scenario
    geo = geo or geometry_for(sc)
    pgroup = SymmetryGroup(sc, outputs=False)
    return _party_invariant(ineq.integer_vector()[0], geo, pgroup, pgroup.party_subgroup())


def _tight_set_ppi(tight, geo, group) -> bool:
    """Some image of the vertex set is fixed by every party permutation."""
    perms = vertex_permutations(group, geo)
    imgs = np.unique(np.sort(perms[:, np.asarray(tight, dtype=np.int64)], axis=1), axis=0)
    pgroup = SymmetryGroup(group.scenario, outputs=False)
    pperm = vertex_permutations(pgroup, geo)[pgroup.party_subgroup()]
    ok = np.ones(len(imgs), dtype=bool)
    for pp in pperm:
        ok &= np.all(np.sort(pp[imgs], axis=1) == imgs, axis=1)
    return bool(ok.any())


def class_is_ppi(ineq: InequalityFunctional, geo=None, group=None) -> bool:
    """Some member of the orbit is party-permutation invariant (up to hull equations)."""
    sc = ineq.scenario
    geo = geo or geometry_for(sc)
    group = group or group_for(sc)
    V = geo.vertices
    vals = V.astype(object).dot(ineq.integer_vector()[0])
    tight = np.nonzero(vals == max(vals))[0]
    if affine_dimension(V[tight]) == affine_dimension(V) - 1:
        # a facet is determined by its tight vertices
        return _tight_set_ppi(tight, geo, group)
    C, _ = orbit_images(ineq, geo, group)
    pgroup = SymmetryGroup(sc, outputs=False)
    pidx = pgroup.party_subgroup()
    return any(_party_invariant(row, geo, pgroup, pidx) for row in C)


def _single_event_rows(sc: Scenario):
    """Index sets (per input tuple) whose nonnegativity is a single-pattern positivity."""
    npat = len(sc.patterns)
    full = sc.mode == "smells" or sc.n == 2
    for xi in range(len(sc.input_tuples)):
        block = list(range(xi * npat, (xi + 1) * npat))
        for j in block:
            yield "nonneg", xi, j
        if full:
            yield "complement", xi, block


def _positivity_literal(C, b, sc) -> bool:
    npat = len(sc.patterns)
    full = sc.mode == "smells" or sc.n == 2
    for row, bound in zip(C, b):
        nz = np.nonzero(row)[0]
        if len(nz) == 1 and row[nz[0]] < 0 and bound == 0:
            return True
        if full and bound == 1 and len(nz) == npat and nz[0] % npat == 0 and nz[-1] == nz[0] + npat - 1 \
                and all(row[i] == 1 for i in nz):
            return True
    return False


def _positivity_exact(ineq, geo) -> bool:
    V = geo.vertices.astype(object)
    a = ineq.integer_vector()[0]
    vals = V.dot(a)
    tight = vals == max(vals)
    Vb = geo.vertices
    for kind, xi, j in _single_event_rows(ineq.scenario):
        zero = Vb[:, j] == 0 if kind == "nonneg" else Vb[:, j].sum(axis=1) == 1
        if np.array_equal(tight, zero):
            return True
    return False


POSITIVITY_RULES = ("literal", "exact")


def is_positivity(ineq: InequalityFunctional, geo=None, group=None, rule: str = "literal") -> bool:
    """Whether the facet's class counts as a positivity constraint.

    ``exact``: the facet has the same tight vertices as ``p(sigma|x) >= 0`` for a
    single pattern sigma (the dropped all-distinct pattern included when the
    reduced coordinates cover every other pattern).

    ``literal``: some orbit member, written in elimination form (hull equations
    solved for the earliest coordinates), reads ``-p(sigma|x) <= 0`` or
    ``sum_sigma p(sigma|x) <= 1``. This is coarser: a facet equivalent to a
    positivity whose coordinate gets eliminated is kept as a class.
    """
    sc = ineq.scenario
    geo = geo or geometry_for(sc)
    if rule == "exact":
        return _positivity_exact(ineq, geo)
    if rule != "literal":
        raise ValueError(f"unknown positivity rule {rule!r}; choose from {POSITIVITY_RULES}")
    C, _ = orbit_images(ineq, geo, group)
    E = geo.eliminate(C)
    return _positivity_literal(E, geo.bounds_of(E), sc)


def facet_orbit_key(ineq: InequalityFunctional, geo, group) -> tuple:
    """Orbit key of a facet from its tight vertex set (facets are determined by it)."""
    V = geo.vertices.astype(object)
    vals = V.dot(ineq.integer_vector()[0])
    tight = np.nonzero(vals == max(vals))[0]
    return vertex_orbit_key(tight, group, geo)


def _facet_matrix(facets, sc):
    """Integer normals (one row per facet) from functionals or an H-representation."""
    if hasattr(facets, "facets"):
        rows = [list(a) for a, _ in facets.facets]
    else:
        facets = list(facets)
        if any(f.scenario != sc for f in facets):
            raise ValueError("facets from different scenarios cannot be classified together")
        rows = [list(f.integer_vector()[0]) for f in facets]
    return np.array(rows, dtype=object).reshape(len(rows), sc.dim)


def classify(facets, sc: Scenario | None = None, geo=None, include_positivity=False,
             positivity: str = "literal", group=None):
    """Group facets into orbits; returns one dict per class sorted by canonical key.

    ``facets`` is a list of facet functionals or an H-representation of the
    scenario's local polytope. Each dict has ``key``, ``representative``
    (canonical form), ``size`` (input facets in the class), ``positivity`` and
    ``ppi`` (some member is invariant under party permutations).
    """
    if sc is None:
        if hasattr(facets, "facets"):
            raise ValueError("pass the scenario along with an H-representation")
        facets = list(facets)
        if not facets:
            return []
        sc = facets[0].scenario
    A = _facet_matrix(facets, sc)
    if len(A) == 0:
        return []
    geo = geo or geometry_for(sc)
    group = group or group_for(sc)
    small = all(abs(int(v)) < 2**31 for v in A.flat)
    vals = geo.vertices.astype(np.int64) @ A.astype(np.int64).T if small else geo.vertices.astype(object).dot(A.T)
    tops = vals.max(axis=0)
    tight = [np.nonzero(vals[:, j] == tops[j])[0] for j in range(len(A))]
    by_set = {}
    for j, t in enumerate(tight):
        by_set.setdefault(t.tobytes(), []).append(j)
    perms = vertex_permutations(group, geo)
    seen = np.zeros(len(A), dtype=bool)
    out = []
    for j in range(len(A)):
        if seen[j]:
            continue
        # sweep the orbit of facet j through its tight-vertex images
        imgs = np.unique(np.sort(perms[:, tight[j]], axis=1), axis=0).astype(tight[j].dtype)
        members = [i for img in imgs for i in by_set.get(img.tobytes(), ())]
        seen[members] = True
        first = InequalityFunctional.from_vector(sc, list(A[j]), int(tops[j]))
        key = canonical_key(first, geo, group)
        rep = InequalityFunctional.from_vector(sc, key[:-1], key[-1])
        pos = is_positivity(rep, geo, group, rule=positivity)
        if include_positivity or not pos:
            out.append({"key": key, "representative": rep, "size": len(members), "positivity": pos,
                        "ppi": _tight_set_ppi(tight[j], geo, group)})
    out.sort(key=lambda c: c["key"])
    return out


def vertex_orbit_key(tight_rows, group: SymmetryGroup, geo: ScenarioGeometry) -> tuple:
    """Canonical key of a set of vertices (by index) under the group's action on vertices."""
    perms = vertex_permutations(group, geo)
    idx = np.array(sorted(tight_rows), dtype=np.int64)
    imgs = np.sort(perms[:, idx], axis=1)
    order = np.lexsort(imgs.T[::-1])
    return tuple(int(v) for v in imgs[order[0]])


def _row_hashes(M: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # wrapping int64 arithmetic is fine for a hash
    with np.errstate(over="ignore"):
        return M.astype(np.int64) @ weights


def vertex_permutations(group: SymmetryGroup, geo: ScenarioGeometry, chunk: int = 4096) -> np.ndarray:
    """``perm[g, i]`` = index of the image of vertex i under g."""
    cache = geo.__dict__.setdefault("_vperm", {})
    if id(group) in cache:
        return cache[id(group)]
    parts, pidx, xs, xidx, B = group._ext
    V = np.asarray(geo.vertices).astype(np.int8)
    N = len(V)
    ext = np.zeros((N, len(xs) * B), dtype=np.int8)
    ext[:, group._reduced_cols] = V
    # fill the trivial pattern so every x carries exactly one pattern
    extv = ext.reshape(N, len(xs), B)
    extv[:, :, B - 1] = 1 - extv[:, :, : B - 1].sum(axis=2)
    weights = np.random.default_rng(0).integers(1, 2**62, size=V.shape[1], dtype=np.int64)
    h = _row_hashes(V, weights)
    order = np.argsort(h)
    hs = h[order]
    if len(np.unique(hs)) != N:
        raise RuntimeError("vertex hash collision")
    cols = group._reduced_cols
    maps = group.ext_maps
    out = np.empty((len(group), N), dtype=np.int32 if N < 2**31 else np.int64)
    rows = np.arange(N)[:, None]
    for lo in range(0, len(maps), chunk):
        m = maps[lo:lo + chunk]
        # image of vertex v under g: img[g, v, m[g, e]] = ext[v, e]
        inv = np.argsort(m, axis=1)[:, cols]
        red = ext[rows[None, :, :], inv[:, None, :]]
        hv = _row_hashes(red.reshape(-1, V.shape[1]), weights)
        pos = np.searchsorted(hs, hv)
        pos[pos == N] = 0
        idx = order[pos]
        if not np.array_equal(V[idx], red.reshape(-1, V.shape[1])):
            raise RuntimeError("group element does not map vertices to vertices")
        out[lo:lo + chunk] = idx.reshape(len(m), N)
    cache[id(group)] = out
    return out


def class_hash(ineq: InequalityFunctional) -> str:
    return hashlib.sha1(format_ineq(ineq).encode()).hexdigest()[:16]


def repository_root(path=None) -> str:
    return path or os.environ.get("EQBELL_REPO", os.path.join(os.getcwd(), "eqbell-repo"))


def save_class(ineq: InequalityFunctional, meta: dict, root=None) -> str:
    root = repository_root(root)
    folder = os.path.join(root, ineq.scenario.slug())
    os.makedirs(folder, exist_ok=True)
    h = class_hash(ineq)
    with open(os.path.join(folder, f"{h}.ineq"), "w", encoding="utf-8") as fh:
        fh.write(format_ineq(ineq))
    with open(os.path.join(folder, f"{h}.meta"), "w", encoding="utf-8") as fh:
        for k, v in sorted(meta.items()):
            if isinstance(v, Fraction):
                v = format_rational(v)
            fh.write(f"{k}={v}\n")
    return h


def load_classes(sc: Scenario, root=None) -> list[tuple[InequalityFunctional, dict]]:
    folder = os.path.join(repository_root(root), sc.slug())
    out = []
    if not os.path.isdir(folder):
        return out
    for name in sorted(os.listdir(folder)):
        if not name.endswith(".ineq"):
            continue
        with open(os.path.join(folder, name), encoding="utf-8") as fh:
            ineq = parse_ineq(fh.read())
        meta = {}
        mpath = os.path.join(folder, name[:-5] + ".meta")
        if os.path.exists(mpath):
            with open(mpath, encoding="utf-8") as fh:
                for line in fh:
                    if "=" in line:
                        k, v = line.rstrip("\n").split("=", 1)
                        meta[k] = v
        out.append((ineq, meta))
    return out


def facet_functionals(sc: Scenario, hrep) -> list[InequalityFunctional]:
    return [InequalityFunctional.from_vector(sc, list(a), b) for a, b in hrep.facets]


__all__ = [
    "SymmetryGroup",
    "group_for",
    "geometry_for",
    "facet_functionals",
    "vertex_orbit_key",
    "ScenarioGeometry",
    "canonical_form",
    "canonical_key",
    "classify",
    "is_ppi",
    "class_is_ppi",
    "is_positivity",
    "outputs_act",
    "save_class",
    "load_classes",
    "as_int_matrix",
]

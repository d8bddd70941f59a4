"""Linear functionals on reduced behaviors and the ``.ineq`` text format.

Format, one statement per line (``#`` starts a comment)::

    scenario n=3 m=2,2,2 k=3 mode=smells
    term x=(1,1,0) sigma=01|2 coeff=1
    term x=(0,0,1) sigma=02|1 coeff=-3/2
    bound 2
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from eqbell.partitions import SetPartition, format_partition, parse_partition
from eqbell.scenario import ReducedBehavior, Scenario

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass
class InequalityFunctional:
    """``sum coeffs[(x, sigma)] * p(sigma|x) <= bound``; zero coefficients are dropped."""

    scenario: Scenario
    coeffs: dict
    bound: Fraction | None = None
    name: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, val in self.coeffs.items():
            x, sigma = key
            key = (tuple(int(v) for v in x), sigma)
            if key not in self.scenario.index:
                raise ValueError(f"({key[0]}, {format_partition(sigma)}) is not a coordinate of {self.scenario}")
            val = Fraction(val)
            if val:
                clean[key] = val
        self.coeffs = clean
        if self.bound is not None:
            self.bound = Fraction(self.bound)

    @classmethod
    def from_vector(cls, sc: Scenario, vec, bound=None, **kw) -> "InequalityFunctional":
        return cls(sc, {c: v for c, v in zip(sc.coords, vec) if v}, bound, **kw)

    def vector(self) -> list:
        sc = self.scenario
        out = [Fraction(0)] * sc.dim
        for key, val in self.coeffs.items():
            out[sc.index[key]] = val
        return out

    def integer_vector(self):
        """(integer coefficient array, scale) with ``coeffs == ints / scale``."""
        vec = self.vector()
        den = lcm(*(v.denominator for v in vec)) if vec else 1
        return np.array([int(v * den) for v in vec], dtype=object), den

    def value(self, behavior) -> Fraction:
        if isinstance(behavior, ReducedBehavior):
            coords = behavior.coords
        else:
            coords = list(behavior)
        idx = self.scenario.index
        return sum((c * coords[idx[k]] for k, c in self.coeffs.items()), Fraction(0))

    def values_on(self, points: np.ndarray) -> np.ndarray:
        """Exact values on the rows of an integer point array (object dtype result)."""
        ints, den = self.integer_vector()
        vals = np.asarray(points).astype(object) @ ints
        return np.array([Fraction(int(v), den) for v in vals], dtype=object)

    def is_unanimous(self) -> bool:
        return all(sigma.is_all for _, sigma in self.coeffs)

    def with_scenario(self, sc: Scenario) -> "InequalityFunctional":
        return InequalityFunctional(sc, dict(self.coeffs), self.bound, self.name, dict(self.meta))

    def with_bound(self, bound) -> "InequalityFunctional":
        return InequalityFunctional(self.scenario, dict(self.coeffs), bound, self.name, dict(self.meta))

    def primitive(self) -> "InequalityFunctional":
        """Scale to coprime integer coefficients (bound scaled alongside)."""
        ints, den = self.integer_vector()
        g = 0
        for v in ints:
            g = gcd(g, int(v))
        if g == 0:
            return self
        scale = Fraction(den, g)
        bound = None if self.bound is None else self.bound * scale
        return InequalityFunctional(self.scenario, {k: v * scale for k, v in self.coeffs.items()},
                                    bound, self.name, dict(self.meta))

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, InequalityFunctional):
            return NotImplemented
        return (self.scenario, self.coeffs, self.bound) == (other.scenario, other.coeffs, other.bound)

    def __hash__(self):
        return hash((self.scenario, tuple(sorted((self.scenario.index[k], v) for k, v in self.coeffs.items())),
                     self.bound))

    def terms(self):
        """Terms in canonical coordinate order."""
        idx = self.scenario.index
        return sorted(self.coeffs.items(), key=lambda kv: idx[kv[0]])


def _parse_fields(tokens, allowed, lineno):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"line {lineno}: expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key not in allowed:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ValueError(f"line {lineno}: repeated key {key!r}")
        out[key] = val
    missing = set(allowed) - set(out)
    if missing:
        raise ValueError(f"line {lineno}: missing {sorted(missing)}")
    return out


def parse_ineq(text: str) -> InequalityFunctional:
    sc = None
    terms = {}
    bound = None
    comments = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "scenario":
            if sc is not None:
                raise ValueError(f"line {lineno}: second scenario line")
            f = _parse_fields(rest, ("n", "m", "k", "mode"), lineno)
            ms = tuple(int(v) for v in f["m"].split(","))
            if len(ms) != int(f["n"]):
                raise ValueError(f"line {lineno}: m must list one input count per party")
            sc = Scenario(int(f["n"]), ms, int(f["k"]), f["mode"])
        elif head == "term":
            if sc is None:
                raise ValueError(f"line {lineno}: term before scenario")
            f = _parse_fields(rest, ("x", "sigma", "coeff"), lineno)
            xm = re.fullmatch(r"\((\d+(?:,\d+)*)\)", f["x"])
            if not xm:
                raise ValueError(f"line {lineno}: bad input tuple {f['x']!r}")
            x = tuple(int(v) for v in xm.group(1).split(","))
            sigma = parse_partition(f["sigma"], sc.n)
            key = (x, sigma)
            if key in terms:
                raise ValueError(f"line {lineno}: duplicate term x={f['x']} sigma={f['sigma']}")
            if key not in sc.index:
                raise ValueError(f"line {lineno}: ({f['x']}, {f['sigma']}) is not a coordinate of {sc}")
            terms[key] = parse_rational(f["coeff"])
        elif head == "bound":
            if len(rest) != 1 or bound is not None:
                raise ValueError(f"line {lineno}: expected a single 'bound <rational>'")
            bound = parse_rational(rest[0])
        else:
            raise ValueError(f"line {lineno}: unknown statement {head!r}")
    if sc is None:
        raise ValueError("missing scenario line")
    ineq = InequalityFunctional(sc, terms, bound)
    ineq.meta["comments"] = comments
    for c in comments:
        if c.startswith("name:"):
            ineq.name = c.split(":", 1)[1].strip()
    return ineq


def format_ineq(ineq: InequalityFunctional, header=None) -> str:
    sc = ineq.scenario
    lines = [f"# {h}" for h in (header or [])]
    lines.append(f"scenario n={sc.n} m={','.join(map(str, sc.inputs))} k={sc.k} mode={sc.mode}")
    for (x, sigma), c in ineq.terms():
        lines.append(f"term x=({','.join(map(str, x))}) sigma={format_partition(sigma)} coeff={format_rational(c)}")
    if ineq.bound is not None:
        lines.append(f"bound {format_rational(ineq.bound)}")
    return "\n".join(lines) + "\n"


def load_ineq(path) -> InequalityFunctional:
    with open(path, encoding="utf-8") as fh:
        return parse_ineq(fh.read())


def save_ineq(ineq: InequalityFunctional, path, header=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ineq(ineq, header))


def unanimous_functional(sc: Scenario, beta: dict, bound=None, **kw) -> InequalityFunctional:
    """Functional with coefficient ``beta[x]`` on the all-equal pattern of x."""
    from eqbell.partitions import all_partition

    top = all_partition(sc.n)
    return InequalityFunctional(sc, {(tuple(x), top): v for x, v in beta.items()}, bound, **kw)


def format_facet_line(ineq: InequalityFunctional) -> str:
    """One-line dump ``coeff@(x;sigma) ... <= bound``, e.g. ``-1@(0,1;ALL)``."""
    parts = [f"{format_rational(c)}@({','.join(map(str, x))};{format_partition(s)})" for (x, s), c in ineq.terms()]
    tail = "" if ineq.bound is None else f" <= {format_rational(ineq.bound)}"
    return (" ".join(parts) or "0") + tail


_TERM = re.compile(r"^(-?\d+(?:/\d+)?)@\((\d+(?:,\d+)*);([0-9|]+|ALL)\)$")


def parse_facet_line(line: str, sc: Scenario) -> InequalityFunctional:
    body, _, bound = line.partition("<=")
    coeffs = {}
    for tok in body.split():
        if tok == "0":
            continue
        m = _TERM.match(tok)
        if not m:
            raise ValueError(f"bad facet term {tok!r}")
        key = (tuple(int(v) for v in m.group(2).split(",")), parse_partition(m.group(3), sc.n))
        if key in coeffs:
            raise ValueError(f"duplicate facet term {tok!r}")
        coeffs[key] = parse_rational(m.group(1))
    return InequalityFunctional(sc, coeffs, parse_rational(bound.strip()) if bound.strip() else None)

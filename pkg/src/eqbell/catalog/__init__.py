"""Named inequalities shipped as ``.ineq`` files with expected values.

Expected values live in comment lines of the form::

    # expect <kind> <value> [key=value ...]

with kinds ``local``, ``signaling``, ``ns``, ``bilocal-ns`` (exact, need ``k``),
``facetness`` and ``standard-facet`` (facet checks), ``ppi`` (class is
party-permutation invariant), ``seesaw`` (threshold, needs ``d``) and
``seesaw-state`` (threshold with a fixed two-qubit state). ``origin`` is
``reported`` for published values and ``derived`` for values recomputed here;
``tier`` is ``gate`` (default), ``best-effort`` or ``slow``.
"""
from __future__ import annotations

import math
import signal
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from eqbell.config import ResourceError
from eqbell.functional import InequalityFunctional, parse_ineq, parse_rational

EXACT_KINDS = ("local", "signaling", "ns", "bilocal-ns")
FLOAT_KINDS = ("seesaw", "seesaw-state")
KINDS = EXACT_KINDS + FLOAT_KINDS + ("facetness", "standard-facet", "ppi")
DEFAULT_TOL = 0.01


@dataclass
class Expectation:
    kind: str
    value: object
    params: dict = field(default_factory=dict)
    origin: str = "reported"
    tier: str = "gate"

    def label(self) -> str:
        extra = " ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind} {extra}".strip()


@dataclass
class CatalogEntry:
    name: str
    ineq: InequalityFunctional
    description: str
    expected: list

    def expect(self, kind: str, **params) -> Expectation | None:
        for e in self.expected:
            if e.kind == kind and all(str(e.params.get(k)) == str(v) for k, v in params.items()):
                return e
        return None


def _parse_value(kind: str, text: str):
    if kind in EXACT_KINDS:
        return parse_rational(text)
    if kind in FLOAT_KINDS:
        return float(text)
    if kind == "facetness":
        return parse_rational(text)
    if text not in ("true", "false"):
        raise ValueError(f"{kind} expects true/false, got {text!r}")
    return text == "true"


def parse_expectation(line: str) -> Expectation:
    tokens = line.split()
    if len(tokens) < 2:
        raise ValueError(f"bad expectation line: {line!r}")
    kind, value = tokens[0], tokens[1]
    if kind not in KINDS:
        raise ValueError(f"unknown expectation kind {kind!r}")
    params = {}
    for tok in tokens[2:]:
        key, _, val = tok.partition("=")
        if not val:
            raise ValueError(f"bad expectation field {tok!r}")
        params[key] = val
    origin = params.pop("origin", "reported")
    tier = params.pop("tier", "gate")
    return Expectation(kind, _parse_value(kind, value), params, origin, tier)


def parse_entry(name: str, text: str) -> CatalogEntry:
    ineq = parse_ineq(text)
    ineq.name = name
    desc = []
    expected = []
    for line in text.splitlines():
        if not line.startswith("#"):
            continue
        body = line[1:].strip()
        if body.startswith("expect "):
            expected.append(parse_expectation(body[len("expect "):]))
        elif body and body != name:
            desc.append(body)
    return CatalogEntry(name, ineq, " ".join(desc), expected)


def _data_dir():
    return resources.files("eqbell.catalog") / "data"


def catalog_names() -> list[str]:
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".ineq"))


def catalog_get(name: str) -> CatalogEntry:
    path = _data_dir() / f"{name}.ineq"
    if not path.is_file():
        raise KeyError(f"unknown catalog entry {name!r}; available: {', '.join(catalog_names())}")
    return parse_entry(name, path.read_text(encoding="utf-8"))


def catalog_all() -> list[CatalogEntry]:
    return [catalog_get(n) for n in catalog_names()]


# ---------------------------------------------------------------- verification

class CheckTimeout(Exception):
    pass


@contextmanager
def _time_limit(seconds):
    usable = seconds and hasattr(signal, "SIGALRM") and threading.current_thread() is threading.main_thread()
    if not usable:
        yield
        return

    def handler(signum, frame):
        raise CheckTimeout()

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _angle(text: str) -> float:
    """``0.3``, ``pi/14`` or ``3*pi/7``."""
    t = text.strip()
    scale = math.pi if "pi" in t else 1.0
    t = t.replace("*pi", "").replace("pi", "1")
    num, _, den = t.partition("/")
    return scale * float(num) / float(den or 1)


def compute_expectation(entry: CatalogEntry, e: Expectation, restarts: int = 20, seed: int = 0):
    """Recompute the quantity behind one expectation."""
    from eqbell import bounds

    ineq = entry.ineq
    k = int(e.params["k"]) if "k" in e.params else None
    if e.kind == "local":
        return bounds.local_bound(ineq, k)
    if e.kind == "signaling":
        return bounds.signaling_bound(ineq, k)
    if e.kind == "ns":
        return bounds.ns_bound(ineq, k)
    if e.kind == "bilocal-ns":
        return bounds.bilocal_ns_bound(ineq, k)
    if e.kind == "facetness":
        from eqbell.geometry.polytope import facetness
        from eqbell.strategies import vertex_array

        ints, den = ineq.integer_vector()
        num, dim = facetness(ints, ineq.bound * den, vertex_array(ineq.scenario))
        return Fraction(num, dim)
    if e.kind == "standard-facet":
        from eqbell.geometry.standard import is_standard_local_facet

        return is_standard_local_facet(ineq)
    if e.kind == "ppi":
        from eqbell.symmetry import class_is_ppi

        return class_is_ppi(ineq)
    from eqbell import quantum

    if e.kind == "seesaw":
        return quantum.seesaw(ineq, int(e.params["d"]), restarts, seed).value
    if e.kind == "seesaw-state":
        if e.params.get("state") != "rho_p_theta":
            raise ValueError(f"unknown state {e.params.get('state')!r}")
        rho = quantum.rho_p_theta(float(e.params["p"]), _angle(e.params["theta"]))
        return quantum.seesaw_fixed_state(ineq, rho, restarts, seed).value
    raise ValueError(f"unknown kind {e.kind}")


@dataclass
class CheckResult:
    expectation: Expectation
    got: object
    status: str  # pass, fail, miss (best-effort threshold not reached), skipped
    seconds: float
    message: str = ""


@dataclass
class VerifyReport:
    entry: str
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            e = c.expectation
            got = c.got if c.got is not None else "-"
            if isinstance(got, float):
                got = f"{got:.6f}"
            msg = f" ({c.message})" if c.message else ""
            out.append(f"{self.entry}: {e.label()} expected {e.value} got {got} [{c.status}]{msg}")
        return out


def _judge(e: Expectation, got) -> bool:
    if e.kind in FLOAT_KINDS:
        tol = float(e.params.get("tol", DEFAULT_TOL))
        return got >= e.value - tol
    return got == e.value


def verify_entry(entry: CatalogEntry, restarts: int = 20, seed: int = 0, timeout: float | None = None,
                 tiers=("gate", "best-effort"), kinds=None) -> VerifyReport:
    checks = []
    for e in entry.expected:
        if e.tier not in tiers or (kinds is not None and e.kind not in kinds):
            checks.append(CheckResult(e, None, "skipped", 0.0, f"tier {e.tier}" if e.tier not in tiers else "kind"))
            continue
        t0 = time.perf_counter()
        try:
            with _time_limit(timeout):
                got = compute_expectation(entry, e, restarts, seed)
        except CheckTimeout:
            checks.append(CheckResult(e, None, "skipped", time.perf_counter() - t0, "timeout"))
            continue
        except ResourceError as exc:
            checks.append(CheckResult(e, None, "skipped", time.perf_counter() - t0, str(exc)))
            continue
        except ValueError as exc:
            # e.g. the functional is violated where a facet check expects tightness
            checks.append(CheckResult(e, None, "fail", time.perf_counter() - t0, str(exc)))
            continue
        ok = _judge(e, got)
        status = "pass" if ok else ("miss" if e.tier == "best-effort" else "fail")
        checks.append(CheckResult(e, got, status, time.perf_counter() - t0))
    return VerifyReport(entry.name, checks)


__all__ = [
    "CatalogEntry",
    "Expectation",
    "CheckResult",
    "VerifyReport",
    "catalog_names",
    "catalog_get",
    "catalog_all",
    "parse_entry",
    "verify_entry",
    "compute_expectation",
]

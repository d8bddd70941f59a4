"""Unanimous inequalities as deterministic nonlocal games, and the parity family."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from eqbell.functional import InequalityFunctional, unanimous_functional
from eqbell.geometry.standard import full_shape
from eqbell.scenario import Scenario
from eqbell.strategies import k_star_unanimous, vertex_array


@dataclass
class DeterministicGame:
    """Prior over input tuples plus a 0/1 predicate.

    On ``winning_set`` the players win iff all outcomes agree; on the other
    inputs with positive prior they win iff not all outcomes agree.
    """

    scenario: Scenario
    prior: dict
    winning_set: frozenset
    local_value: Fraction | None = None
    shift: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.prior = {tuple(x): Fraction(v) for x, v in self.prior.items() if v}
        if any(v < 0 for v in self.prior.values()):
            raise ValueError("prior must be nonnegative")
        if sum(self.prior.values()) != 1:
            raise ValueError(f"prior sums to {sum(self.prior.values())}, not 1")
        self.winning_set = frozenset(tuple(x) for x in self.winning_set)
        extra = self.winning_set - set(self.prior)
        if extra:
            raise ValueError(f"winning inputs without prior weight: {sorted(extra)}")

    def predicate(self, a, x) -> int:
        x = tuple(x)
        if x not in self.prior:
            return 0
        equal = len(set(a)) == 1
        return int(equal) if x in self.winning_set else int(not equal)

    def predicate_table(self, k: int) -> np.ndarray:
        sc = self.scenario
        out = np.zeros(full_shape(sc, k), dtype=np.int8)
        for x in sc.input_tuples:
            for a in itertools.product(range(k), repeat=sc.n):
                out[tuple(x) + a] = self.predicate(a, x)
        return out


def unanimous_to_game(ineq: InequalityFunctional, local_bound=None) -> DeterministicGame:
    """``I(p) = scale * G(p) + shift`` with ``scale = sum |beta|`` and ``shift = sum_{beta<0} beta``."""
    if not ineq.is_unanimous():
        raise ValueError("only unanimous functionals (all-equal pattern only) define such a game")
    beta = {x: c for (x, _), c in ineq.coeffs.items()}
    total = sum(abs(v) for v in beta.values())
    if total == 0:
        raise ValueError("zero functional")
    shift = sum((v for v in beta.values() if v < 0), Fraction(0))
    prior = {x: abs(v) / total for x, v in beta.items()}
    win = frozenset(x for x, v in beta.items() if v > 0)
    L = ineq.bound if local_bound is None else Fraction(local_bound)
    value = None if L is None else (L - shift) / total
    return DeterministicGame(ineq.scenario, prior, win, value, shift, total, {"name": ineq.name})


def family_f_n2(N: int, k: int = 3) -> InequalityFunctional:
    """Parity family: coefficient ``(-1)^(x_1 + ... + x_N)`` on every all-equal event."""
    if N < 2:
        raise ValueError("the family needs at least two parties")
    sc = Scenario(N, (2,) * N, k, "unanimous")
    beta = {x: (-1) ** (sum(x) % 2) for x in sc.input_tuples}
    return unanimous_functional(sc, beta, 1 + (N + 1) % 2, name=f"F_{N}2")


def classical_game_value(g: DeterministicGame, k: int | None = None) -> Fraction:
    """Best deterministic winning probability (outcome count capped at min(m_i) + 1)."""
    sc = g.scenario
    k = sc.k if k is None else k
    k = min(k, k_star_unanimous(sc.inputs))
    usc = Scenario(sc.n, sc.inputs, k, "unanimous")
    V = vertex_array(usc)  # p(all equal | x), one column per input tuple
    w_eq = np.zeros(len(usc.input_tuples), dtype=object)
    w_ne = np.zeros(len(usc.input_tuples), dtype=object)
    const = Fraction(0)
    for i, x in enumerate(usc.input_tuples):
        mu = g.prior.get(tuple(x), Fraction(0))
        if x in g.winning_set:
            w_eq[i] = mu
        else:
            w_ne[i] = mu
            const += mu
    # not-all-equal wins contribute mu * (1 - p(=))
    vals = V.astype(object).dot(w_eq - w_ne) + const
    return max(vals)


def game_value(g: DeterministicGame, p) -> Fraction:
    """Average score ``sum_{a,x} mu(x) V(a, x) p(a|x)`` of a full behavior."""
    sc = g.scenario
    p = np.asarray(p, dtype=object)
    k = p.shape[-1]
    if p.shape != full_shape(sc, k):
        raise ValueError(f"behavior shape {p.shape} does not match {full_shape(sc, k)}")
    total = Fraction(0)
    for x, mu in g.prior.items():
        block = p[x]
        for a in itertools.product(range(k), repeat=sc.n):
            if g.predicate(a, x):
                total += mu * Fraction(block[a])
    return total


__all__ = [
    "DeterministicGame",
    "unanimous_to_game",
    "family_f_n2",
    "classical_game_value",
    "game_value",
]

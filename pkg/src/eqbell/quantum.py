"""Quantum lower bounds by seesaw, plus two-qubit entanglement diagnostics.

Everything here is floating point. Measurements are projective; projectors
for an outcome may be zero when there are more outcomes than dimensions.

Conjugation convention: the state is a vector ``psi`` on party 0 ⊗ party 1 ⊗ ...
and probabilities are ``<psi| M_1 ⊗ ... ⊗ M_n |psi>`` with no transposes, so
``(|00> + |11>)/sqrt(2)`` with the same real basis on both sides gives
``p(=) = 1``.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field

import numpy as np

from eqbell.config import caps
from eqbell.functional import InequalityFunctional
from eqbell.geometry.standard import lift_to_full_behavior
from eqbell.partitions import pattern_of_outcomes
from eqbell.scenario import Scenario

_TOL = 1e-10


@dataclass
class QuantumStrategy:
    """State vector on ``d**n`` plus ``measurements[i][x][a]`` (d x d projectors)."""

    d: int
    state: np.ndarray
    measurements: list

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=complex).reshape(-1)
        self.measurements = [[[np.asarray(P, dtype=complex) for P in proj] for proj in party]
                             for party in self.measurements]

    @property
    def n(self) -> int:
        return len(self.measurements)

    @property
    def inputs(self) -> tuple:
        return tuple(len(party) for party in self.measurements)

    @property
    def k(self) -> int:
        return len(self.measurements[0][0])

    def check(self):
        d, n = self.d, self.n
        if self.state.shape != (d ** n,):
            raise ValueError(f"state has {self.state.size} amplitudes, expected {d ** n}")
        if abs(np.linalg.norm(self.state) - 1) > 1e-12:
            raise ValueError("state is not normalized")
        eye = np.eye(d)
        for i, party in enumerate(self.measurements):
            for x, proj in enumerate(party):
                if len(proj) != self.k:
                    raise ValueError("every measurement needs the same number of outcomes")
                total = np.zeros((d, d), dtype=complex)
                for P in proj:
                    if P.shape != (d, d):
                        raise ValueError(f"projector of party {i} input {x} has shape {P.shape}")
                    if np.abs(P - P.conj().T).max() > _TOL or np.abs(P @ P - P).max() > _TOL:
                        raise ValueError(f"party {i} input {x}: not an orthogonal projector")
                    total += P
                if np.abs(total - eye).max() > _TOL:
                    raise ValueError(f"party {i} input {x}: projectors do not sum to identity")
        return self

    def measurement_tensor(self, i: int) -> np.ndarray:
        return np.array(self.measurements[i])  # (m_i, k, d, d)


@dataclass
class QuantumBehavior:
    """Floating reduced behavior; ``remainder[x]`` is the probability of the dropped patterns."""

    scenario: Scenario
    coords: np.ndarray
    remainder: np.ndarray

    def __getitem__(self, key):
        return self.coords[self.scenario.index[key]]


def _letters(count):
    pool = string.ascii_letters
    if count > len(pool):
        raise ValueError("too many parties for the tensor contraction")
    return pool[:count]


def _full_distribution(qs: QuantumStrategy) -> np.ndarray:
    n, d = qs.n, qs.d
    letters = _letters(4 * n + 0)
    X, A, R, S = (letters[j * n:(j + 1) * n] for j in range(4))
    psi = qs.state.reshape((d,) * n)
    ops = [np.array(qs.measurements[i]) for i in range(n)]
    expr = ",".join(f"{X[i]}{A[i]}{R[i]}{S[i]}" for i in range(n))
    expr = f"{R},{expr},{S}->{X}{A}"
    p = np.einsum(expr, psi.conj(), *ops, psi, optimize=True)
    return p.real


def quantum_behavior(qs: QuantumStrategy, mode: str = "smells") -> QuantumBehavior:
    qs.check()
    sc = Scenario(qs.n, qs.inputs, qs.k, mode)
    full = _full_distribution(qs)
    coords = np.zeros(sc.dim)
    remainder = np.zeros(len(sc.input_tuples))
    index = sc.index
    pats = {a: pattern_of_outcomes(a) for a in itertools.product(range(qs.k), repeat=qs.n)}
    for xi, x in enumerate(sc.input_tuples):
        for a, sigma in pats.items():
            v = full[x + a]
            j = index.get((x, sigma))
            if j is None:
                remainder[xi] += v
            else:
                coords[j] += v
    return QuantumBehavior(sc, coords, remainder)


def evaluate(ineq: InequalityFunctional, qb: QuantumBehavior) -> float:
    idx = qb.scenario.index
    return float(sum(float(c) * qb.coords[idx[key]] for key, c in ineq.coeffs.items()))


# ---------------------------------------------------------------- seesaw machinery

class _Model:
    """Bell operator pieces for one functional."""

    def __init__(self, ineq: InequalityFunctional, d: int, k: int):
        sc = ineq.scenario
        self.n, self.d, self.k, self.inputs = sc.n, d, k, sc.inputs
        self.coeff = lift_to_full_behavior(ineq, k).astype(float)
        n = self.n
        letters = _letters(4 * n)
        self.X, self.A, self.R, self.S = (letters[j * n:(j + 1) * n] for j in range(4))

    def bell_operator(self, meas) -> np.ndarray:
        n, d = self.n, self.d
        ops = ",".join(f"{self.X[i]}{self.A[i]}{self.R[i]}{self.S[i]}" for i in range(n))
        expr = f"{self.X}{self.A},{ops}->{self.R}{self.S}"
        B = np.einsum(expr, self.coeff, *meas, optimize=True)
        B = B.reshape(d ** n, d ** n)
        return (B + B.conj().T) / 2

    def effective(self, meas, rho, i: int) -> np.ndarray:
        """``E[x, a]`` with value = sum_{x,a} Tr(E[x,a] M_i[x,a])."""
        n, d = self.n, self.d
        X, A, R, S = self.X, self.A, self.R, self.S
        parts = [f"{X}{A}"]
        operands = [self.coeff]
        for j in range(n):
            if j != i:
                parts.append(f"{X[j]}{A[j]}{R[j]}{S[j]}")
                operands.append(meas[j])
        parts.append(f"{S}{R}")
        operands.append(rho.reshape((d,) * (2 * n)))
        expr = ",".join(parts) + f"->{X[i]}{A[i]}{S[i]}{R[i]}"
        E = np.einsum(expr, *operands, optimize=True)
        return (E + np.conj(np.swapaxes(E, -1, -2))) / 2

    def value(self, meas, rho) -> float:
        return float(np.real(np.trace(rho @ self.bell_operator(meas))))


def _projector(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return np.zeros((vectors.shape[0],) * 2, dtype=complex)
    P = vectors @ vectors.conj().T
    return (P + P.conj().T) / 2


def _split(H: np.ndarray, basis: np.ndarray):
    """Split span(basis) into the positive and non-positive eigenspaces of H restricted to it."""
    if basis.shape[1] == 0:
        z = np.zeros((basis.shape[0],) * 2, dtype=complex)
        return z, z
    Hs = basis.conj().T @ H @ basis
    w, v = np.linalg.eigh((Hs + Hs.conj().T) / 2)
    pos = basis @ v[:, w > 0]
    neg = basis @ v[:, w <= 0]
    return _projector(pos), _projector(neg)


def _range_basis(P: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(P)
    return v[:, w > 0.5]


def _update_party(model: _Model, meas, rho, i: int, tol: float):
    E = model.effective(meas, rho, i)
    new = meas[i].copy()
    d, k = model.d, model.k
    eye = np.eye(d, dtype=complex)
    for x in range(model.inputs[i]):
        if k == 2:
            new[x, 0], new[x, 1] = _split(E[x, 0] - E[x, 1], eye)
            continue
        changed = True
        sweeps = 0
        while changed and sweeps < 100:
            changed = False
            sweeps += 1
            for a, b in itertools.combinations(range(k), 2):
                before = np.real(np.trace(E[x, a] @ new[x, a]) + np.trace(E[x, b] @ new[x, b]))
                basis = _range_basis(new[x, a] + new[x, b])
                Pa, Pb = _split(E[x, a] - E[x, b], basis)
                after = np.real(np.trace(E[x, a] @ Pa) + np.trace(E[x, b] @ Pb))
                if after > before + tol:
                    new[x, a], new[x, b] = Pa, Pb
                    changed = True
    meas[i] = new


def _random_measurements(rng, inputs, d, k):
    meas = []
    for m in inputs:
        party = np.zeros((m, k, d, d), dtype=complex)
        for x in range(m):
            z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            q, r = np.linalg.qr(z)
            q = q * (np.diag(r) / np.abs(np.diag(r)))
            labels = rng.permutation(d) % k
            for a in range(k):
                party[x, a] = _projector(q[:, labels == a])
        meas.append(party)
    return meas


def _random_state(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


@dataclass
class SeesawResult:
    value: float
    strategy: QuantumStrategy | None
    converged: bool
    history: list = field(default_factory=list)

    def __iter__(self):
        # unpack as (value, strategy)
        return iter((self.value, self.strategy))


def _seesaw_pass(model: _Model, meas, state, rho_fixed, tol, max_iter, check=True):
    """Alternate state and measurement updates from one starting point."""
    history = []
    mono_tol = 1e-9
    if rho_fixed is None:
        rho = np.outer(state, state.conj())
    else:
        rho = rho_fixed
    value = model.value(meas, rho)
    history.append(value)
    converged = False
    for _ in range(max_iter):
        start = value
        if rho_fixed is None:
            B = model.bell_operator(meas)
            w, v = np.linalg.eigh(B)
            state = v[:, -1]
            rho = np.outer(state, state.conj())
            new_value = float(w[-1])
            if check:
                assert new_value >= value - mono_tol, "state step decreased the objective"
            value = new_value
            history.append(value)
        for i in range(model.n):
            _update_party(model, meas, rho, i, tol * 1e-3)
            new_value = model.value(meas, rho)
            if check:
                assert new_value >= value - mono_tol, "measurement step decreased the objective"
            value = new_value
            history.append(value)
        if value - start < tol:
            converged = True
            break
    return value, meas, state, converged, history


def _prepare(ineq, d, k):
    sc = ineq.scenario
    k = sc.k if k is None else k
    if d < 2:
        raise ValueError("local dimension must be at least 2")
    caps.check("max_hilbert_dim", d ** sc.n)
    return _Model(ineq, d, k)


def seesaw(ineq: InequalityFunctional, d: int = 2, restarts: int = 20, seed: int = 0, tol: float = 1e-10,
           k: int | None = None, max_iter: int = 2000) -> SeesawResult:
    """Best value over seeded restarts; restart r uses seed ``seed + r``."""
    model = _prepare(ineq, d, k)
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        meas = _random_measurements(rng, model.inputs, d, model.k)
        state = _random_state(rng, d ** model.n)
        value, meas, state, conv, hist = _seesaw_pass(model, meas, state, None, tol, max_iter)
        if best is None or value > best.value:
            qs = QuantumStrategy(d, state, [list(map(list, party)) for party in meas])
            best = SeesawResult(value, qs, conv, hist)
    return best


def seesaw_fixed_state(ineq: InequalityFunctional, rho, restarts: int = 20, seed: int = 0,
                       tol: float = 1e-10, k: int | None = None, max_iter: int = 2000) -> SeesawResult:
    rho = np.asarray(rho, dtype=complex)
    D = rho.shape[0]
    n = ineq.scenario.n
    d = round(D ** (1 / n))
    if d ** n != D or rho.shape != (D, D):
        raise ValueError(f"density matrix of shape {rho.shape} does not fit {n} parties")
    _check_density(rho)
    model = _prepare(ineq, d, k)
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        meas = _random_measurements(rng, model.inputs, d, model.k)
        value, meas, _, conv, hist = _seesaw_pass(model, meas, None, rho, tol, max_iter)
        if best is None or value > best.value:
            best = SeesawResult(value, None, conv, hist)
            best.measurements = meas
    return best


# ---------------------------------------------------------------- two-qubit diagnostics

_PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def _check_density(rho, shape=None):
    rho = np.asarray(rho, dtype=complex)
    if shape is not None and rho.shape != shape:
        raise ValueError(f"expected a {shape} density matrix, got {rho.shape}")
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def concurrence(rho) -> float:
    rho = _check_density(rho, (4, 4))
    yy = np.kron(_PAULI[1], _PAULI[1])
    flipped = yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(rho @ flipped).real)[::-1], 0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def correlation_matrix(rho) -> np.ndarray:
    rho = _check_density(rho, (4, 4))
    return np.array([[np.trace(rho @ np.kron(a, b)).real for b in _PAULI] for a in _PAULI])


def horodecki_chsh(rho) -> float:
    """Sum of the two largest eigenvalues of T^T T (CHSH violable iff > 1)."""
    T = correlation_matrix(rho)
    w = np.sort(np.linalg.eigvalsh(T.T @ T))[::-1]
    return float(w[0] + w[1])


def rho_p_theta(p: float, theta: float) -> np.ndarray:
    """Mixture of ``cos(t)|00> + sin(t)|11>`` (weight p) and ``|01>``."""
    psi1 = np.array([np.cos(theta), 0, 0, np.sin(theta)], dtype=complex)
    psi2 = np.array([0, 1, 0, 0], dtype=complex)
    return p * np.outer(psi1, psi1.conj()) + (1 - p) * np.outer(psi2, psi2.conj())


def maximally_entangled(d: int = 2) -> np.ndarray:
    psi = np.zeros(d * d, dtype=complex)
    for j in range(d):
        psi[j * d + j] = 1
    return psi / np.sqrt(d)


# ---------------------------------------------------------------- text format

def _fmt(z) -> str:
    return f"{float(z.real)!r},{float(z.imag)!r}"


def format_strategy(qs: QuantumStrategy) -> str:
    lines = [f"strategy d={qs.d} n={qs.n} inputs={','.join(map(str, qs.inputs))} k={qs.k}", "state"]
    lines += [_fmt(z) for z in qs.state]
    for i, party in enumerate(qs.measurements):
        for x, proj in enumerate(party):
            for a, P in enumerate(proj):
                lines.append(f"projector party={i} input={x} outcome={a}")
                lines += [" ".join(_fmt(z) for z in row) for row in P]
    return "\n".join(lines) + "\n"


def _parse_complex(tok: str) -> complex:
    re_, im = tok.split(",")
    return complex(float(re_), float(im))


def parse_strategy(text: str) -> QuantumStrategy:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    head = dict(kv.split("=") for kv in lines[0].split()[1:])
    d, n, k = int(head["d"]), int(head["n"]), int(head["k"])
    inputs = [int(v) for v in head["inputs"].split(",")]
    if lines[1] != "state":
        raise ValueError("expected a 'state' block")
    D = d ** n
    state = np.array([_parse_complex(t) for t in lines[2:2 + D]])
    meas = [[[None] * k for _ in range(m)] for m in inputs]
    pos = 2 + D
    while pos < len(lines):
        fields_ = dict(kv.split("=") for kv in lines[pos].split()[1:])
        rows = [[_parse_complex(t) for t in ln.split()] for ln in lines[pos + 1:pos + 1 + d]]
        meas[int(fields_["party"])][int(fields_["input"])][int(fields_["outcome"])] = np.array(rows)
        pos += 1 + d
    return QuantumStrategy(d, state, meas)


__all__ = [
    "QuantumStrategy",
    "QuantumBehavior",
    "SeesawResult",
    "quantum_behavior",
    "evaluate",
    "seesaw",
    "seesaw_fixed_state",
    "concurrence",
    "correlation_matrix",
    "horodecki_chsh",
    "rho_p_theta",
    "maximally_entangled",
    "format_strategy",
    "parse_strategy",
]

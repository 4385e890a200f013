"""Finite-shot measurement emulation with readout error, calibration and mitigation.

Histograms are integer (or, after mitigation, float) arrays of length ``2**n``
indexed by the measured bit string, qubit 0 being the most significant bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import gates
from .errors import SingularCalibration
from .states import DensityMatrix, StateVector, apply_gate, evolve

DEFAULT_SHOTS = 8192
MAX_CONDITION = 1e6
PAULI_LETTERS = "XYZ"


def full_basis_set(n_qubits: int) -> tuple[str, ...]:
    """All ``3**n`` measurement settings, e.g. ``("XX", "XY", ..., "ZZ")``."""
    return tuple("".join(p) for p in itertools.product(PAULI_LETTERS, repeat=n_qubits))


@dataclass(frozen=True)
class ShotPlan:
    shots_per_basis: int = DEFAULT_SHOTS
    rng_seed: int = 0
    basis_set: tuple[str, ...] | None = None

    def __post_init__(self):
        if int(self.shots_per_basis) < 1:
            raise ValueError("shots_per_basis must be positive")
        if self.basis_set is not None:
            object.__setattr__(self, "basis_set", tuple(self.basis_set))

    def bases(self, n_qubits: int) -> tuple[str, ...]:
        if self.basis_set is None:
            return full_basis_set(n_qubits)
        return tuple(b for b in self.basis_set if len(b) == n_qubits)

    def rng(self, *index: int) -> np.random.Generator:
        """Generator for this plan; ``index`` derives an independent stream per task."""
        return np.random.default_rng([int(self.rng_seed), *map(int, index)])


def confusion_matrix(p01: float, p10: float) -> np.ndarray:
    """Columns are the true bit, rows the reported bit; ``p01`` = P(report 1 | true 0)."""
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


@dataclass(frozen=True)
class ReadoutNoise:
    """Independent per-qubit readout confusion matrices."""

    matrices: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        mats = []
        for m in self.matrices:
            m = np.array(m, dtype=float)
            if m.shape != (2, 2) or np.any(m < 0) or np.any(m > 1):
                raise ValueError(f"invalid confusion matrix {m.tolist()}")
            if not np.allclose(m.sum(axis=0), 1.0, atol=1e-12, rtol=0):
                raise ValueError(f"confusion matrix columns must sum to 1: {m.tolist()}")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "matrices", tuple(mats))

    @classmethod
    def uniform(cls, p01: float, p10: float, n_qubits: int) -> ReadoutNoise:
        return cls(tuple(confusion_matrix(p01, p10) for _ in range(n_qubits)))

    @classmethod
    def from_flips(cls, flips: Sequence[tuple[float, float]]) -> ReadoutNoise:
        return cls(tuple(confusion_matrix(a, b) for a, b in flips))

    @classmethod
    def ideal(cls, n_qubits: int) -> ReadoutNoise:
        return cls(tuple(np.eye(2) for _ in range(n_qubits)))

    @property
    def n_qubits(self) -> int:
        return len(self.matrices)

    def for_qubits(self, qubits: Sequence[int]) -> ReadoutNoise:
        return ReadoutNoise(tuple(self.matrices[q] for q in qubits))

    def full_matrix(self) -> np.ndarray:
        return reduce(np.kron, self.matrices)


def _rotate_to_z(state, basis: str, qubits: Sequence[int]):
    for letter, q in zip(basis, qubits):
        if letter == "X":
            ops = [gates.H]
        elif letter == "Y":
            ops = [gates.S.dagger, gates.H]
        elif letter == "Z":
            ops = []
        else:
            raise ValueError(f"unknown measurement basis letter {letter!r}")
        for op in ops:
            if isinstance(state, StateVector):
                state = apply_gate(state, op, [q])
            else:
                state = evolve(state, op, [q])
    return state


def basis_probabilities(
    state: StateVector | DensityMatrix,
    basis: str,
    qubits: Sequence[int] | None = None,
    noise: ReadoutNoise | None = None,
    depolarizing: float = 0.0,
) -> np.ndarray:
    """Exact outcome distribution for measuring ``qubits`` in the Pauli ``basis``.

    Unmeasured qubits are marginalized. ``depolarizing`` mixes the outcome
    distribution with the uniform one before readout error is applied.
    """
    n = state.n_qubits
    qubits = list(range(n)) if qubits is None else list(qubits)
    if len(basis) != len(qubits):
        raise ValueError(f"basis {basis!r} does not match {len(qubits)} measured qubits")
    rotated = _rotate_to_z(state, basis, qubits)
    if isinstance(rotated, StateVector):
        probs = rotated.probabilities()
    else:
        probs = np.real(np.diag(rotated.entries)).clip(min=0.0)
    probs = probs.reshape([2] * n)
    others = tuple(q for q in range(n) if q not in qubits)
    if others:
        probs = probs.sum(axis=others)
    kept = [q for q in range(n) if q in qubits]
    probs = np.transpose(probs, [kept.index(q) for q in qubits]).reshape(-1)
    if depolarizing:
        probs = (1.0 - depolarizing) * probs + depolarizing / probs.size
    if noise is not None:
        probs = noise.full_matrix() @ probs
    probs = probs.clip(min=0.0)
    return probs / probs.sum()


def sample_counts(
    state: StateVector | DensityMatrix,
    basis: str,
    plan: ShotPlan,
    noise: ReadoutNoise | None = None,
    qubits: Sequence[int] | None = None,
    rng: np.random.Generator | None = None,
    depolarizing: float = 0.0,
) -> np.ndarray:
    """Draw ``plan.shots_per_basis`` readouts; the noiseless distribution is pushed through ``noise``."""
    rng = plan.rng() if rng is None else rng
    probs = basis_probabilities(state, basis, qubits, noise, depolarizing)
    return rng.multinomial(int(plan.shots_per_basis), probs)


def calibrate(
    noise: ReadoutNoise | None,
    plan: ShotPlan,
    n_qubits: int | None = None,
    rng: np.random.Generator | None = None,
) -> ReadoutNoise:
    """Estimate per-qubit confusion matrices by preparing every computational basis state.

    Each of the ``2**n`` preparations gets ``plan.shots_per_basis`` shots; the
    column for bit ``b`` of qubit ``q`` pools all preparations with ``q`` in ``b``.
    """
    if noise is None:
        if n_qubits is None:
            raise ValueError("n_qubits is required when noise is None")
        noise = ReadoutNoise.ideal(n_qubits)
    n = noise.n_qubits
    rng = plan.rng() if rng is None else rng
    dim = 2**n
    full = noise.full_matrix()
    tallies = np.zeros((n, 2, 2))  # qubit, reported bit, prepared bit
    for prepared in range(dim):
        counts = rng.multinomial(int(plan.shots_per_basis), full[:, prepared])
        for q in range(n):
            true_bit = (prepared >> (n - 1 - q)) & 1
            reported = counts.reshape([2] * n).sum(axis=tuple(k for k in range(n) if k != q))
            tallies[q, :, true_bit] += reported
    return ReadoutNoise(tuple(t / t.sum(axis=0, keepdims=True) for t in tallies))


def _simplex_lstsq(a: np.ndarray, f: np.ndarray, start: np.ndarray) -> np.ndarray:
    dim = a.shape[1]
    x0 = start.clip(min=0.0)
    x0 = x0 / x0.sum() if x0.sum() > 0 else np.full(dim, 1.0 / dim)
    res = minimize(
        lambda p: float(np.sum((a @ p - f) ** 2)),
        x0,
        jac=lambda p: 2.0 * a.T @ (a @ p - f),
        method="SLSQP",
        bounds=[(0.0, 1.0)] * dim,
        constraints=[{"type": "eq", "fun": lambda p: np.sum(p) - 1.0, "jac": lambda p: np.ones(dim)}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    p = res.x.clip(min=0.0)
    return p / p.sum()


def mitigate(
    histogram: np.ndarray, calibration: ReadoutNoise, method: str = "constrained"
) -> np.ndarray:
    """Undo readout error on one histogram.

    ``method="constrained"`` solves ``min ||M p - f||`` over the probability
    simplex; ``"inverse"`` applies ``M^-1`` directly and may go negative.
    The result keeps the histogram's total count.

    Raises:
        SingularCalibration: if ``cond(M)`` exceeds ``MAX_CONDITION``.
    """
    counts = np.asarray(histogram, dtype=float)
    a = calibration.full_matrix()
    if a.shape[0] != counts.size:
        raise ValueError(f"calibration covers {a.shape[0]} outcomes, histogram has {counts.size}")
    if np.linalg.cond(a) > MAX_CONDITION:
        raise SingularCalibration(f"calibration condition number exceeds {MAX_CONDITION:g}")
    total = counts.sum()
    f = counts / total
    p = np.linalg.solve(a, f)
    if method == "inverse":
        return p * total
    if method != "constrained":
        raise ValueError(f"unknown mitigation method {method!r}")
    if p.min() < -1e-12:
        p = _simplex_lstsq(a, f, p)
    elif p.min() < 0.0:
        p = p.clip(min=0.0)
        p = p / p.sum()
    return p * total

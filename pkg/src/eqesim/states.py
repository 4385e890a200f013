"""Dense state containers and the generic operations the rest of the package uses.

Qubit ``0`` is the most significant bit of a basis index, so for the three
qubits (A, B, B') the index of ``|a b b'>`` is ``4a + 2b + b'``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ZeroProbabilityOutcome

UNITARY_ATOL = 1e-10
HERMITIAN_ATOL = 1e-10
PROB_FLOOR = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    arr.setflags(write=False)
    return arr


def _max_abs(a: np.ndarray) -> float:
    return float(np.abs(a).max())


def _n_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def _check_targets(targets: Sequence[int], n_qubits: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated qubit index in {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise IndexError(f"qubit index {t} out of range for {n_qubits} qubits")
    return targets


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state on ``n_qubits`` qubits; amplitudes are read-only."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        _n_qubits(amps.size)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_label(cls, label: str) -> StateVector:
        """Computational basis state from a bit string such as ``"010"``."""
        amps = np.zeros(2 ** len(label), dtype=complex)
        amps[int(label, 2)] = 1.0
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.amplitudes.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> StateVector:
        norm = self.norm
        if norm < PROB_FLOOR:
            raise ZeroProbabilityOutcome("cannot normalize a zero vector", norm**2)
        return StateVector(self.amplitudes / norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian operator on ``n_qubits`` qubits (trace normalized by ``normalize``)."""

    entries: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        _n_qubits(rho.shape[0])
        if _max_abs(rho - rho.conj().T) > HERMITIAN_ATOL:
            raise ValueError("density matrix is not Hermitian")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> DensityMatrix:
        dim = 2**n_qubits
        return cls(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.dim)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def normalize(self) -> DensityMatrix:
        tr = self.trace
        if tr < PROB_FLOOR:
            raise ZeroProbabilityOutcome("cannot normalize a traceless operator", tr)
        return DensityMatrix(self.entries / tr)

    def purity(self) -> float:
        rho = self.entries
        # Tr(rho^2) for Hermitian rho is the squared Frobenius norm.
        return float(np.sum(np.abs(rho) ** 2))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """A one- or two-qubit unitary, checked at construction."""

    matrix: np.ndarray
    label: str = "U"

    def __post_init__(self):
        u = _frozen(self.matrix)
        if u.shape not in ((2, 2), (4, 4)):
            raise ValueError(f"gate {self.label!r} must be 2x2 or 4x4, got {u.shape}")
        if _max_abs(u.conj().T @ u - np.eye(u.shape[0])) > UNITARY_ATOL:
            raise ValueError(f"gate {self.label!r} is not unitary")
        object.__setattr__(self, "matrix", u)

    @property
    def arity(self) -> int:
        return _n_qubits(self.matrix.shape[0])

    @property
    def dagger(self) -> UnitaryGate:
        return UnitaryGate(self.matrix.conj().T, f"{self.label}^dag")

    def __matmul__(self, other: UnitaryGate) -> UnitaryGate:
        return UnitaryGate(self.matrix @ other.matrix, f"{self.label}*{other.label}")

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def tensor(a, b):
    """Kronecker product of two states of the same kind; ``a`` takes the high qubits."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def _apply_on_axes(tensor_: np.ndarray, matrix: np.ndarray, axes: list[int]) -> np.ndarray:
    k = len(axes)
    u = matrix.reshape([2] * (2 * k))
    out = np.tensordot(u, tensor_, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


def apply_gate(state: StateVector, gate: UnitaryGate, targets: Sequence[int]) -> StateVector:
    """Apply ``gate`` to the listed qubits; ``targets[0]`` is the gate's high qubit."""
    n = state.n_qubits
    targets = _check_targets(targets, n)
    if gate.arity != len(targets):
        raise ValueError(f"gate {gate.label!r} acts on {gate.arity} qubits, got targets {targets}")
    psi = state.amplitudes.reshape([2] * n)
    return StateVector(_apply_on_axes(psi, gate.matrix, targets).reshape(-1))


def evolve(rho: DensityMatrix, gate: UnitaryGate, targets: Sequence[int]) -> DensityMatrix:
    """Conjugate a density matrix by ``gate`` acting on ``targets``."""
    n = rho.n_qubits
    targets = _check_targets(targets, n)
    if gate.arity != len(targets):
        raise ValueError(f"gate {gate.label!r} acts on {gate.arity} qubits, got targets {targets}")
    t = rho.entries.reshape([2] * (2 * n))
    t = _apply_on_axes(t, gate.matrix, targets)
    t = _apply_on_axes(t, gate.matrix.conj(), [n + q for q in targets])
    return DensityMatrix(t.reshape(rho.dim, rho.dim))


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on ``keep`` (in the order given), tracing out every other qubit."""
    n = rho.n_qubits
    keep = _check_targets(keep, n)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    traced = [q for q in range(n) if q not in keep]
    t = rho.entries.reshape([2] * (2 * n))
    t = t.transpose(keep + traced + [n + q for q in keep] + [n + q for q in traced])
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return DensityMatrix(np.einsum("ajbj->ab", t))


def branch(state: StateVector, vector: StateVector, on: Sequence[int]) -> np.ndarray:
    """Unnormalized amplitudes of the remaining qubits after projecting ``on`` onto ``vector``."""
    n = state.n_qubits
    on = _check_targets(on, n)
    if vector.n_qubits != len(on):
        raise ValueError(f"projector spans {vector.n_qubits} qubits, got {len(on)} targets")
    if len(on) == n:
        raise ValueError("projection must leave at least one qubit")
    psi = np.moveaxis(state.amplitudes.reshape([2] * n), on, list(range(len(on))))
    psi = psi.reshape(2 ** len(on), -1)
    return vector.amplitudes.conj() @ psi


def project(
    state: StateVector, vector: StateVector, on: Sequence[int]
) -> tuple[StateVector, float]:
    """Post-select ``on`` in ``vector``; return the normalized remainder and its probability.

    Raises:
        ZeroProbabilityOutcome: if the outcome probability is below ``PROB_FLOOR``.
    """
    if abs(vector.norm - 1.0) > UNITARY_ATOL:
        raise ValueError("projection vector must be normalized")
    amps = branch(state, vector, on)
    prob = float(np.vdot(amps, amps).real)
    if prob < PROB_FLOOR:
        raise ZeroProbabilityOutcome(f"outcome probability {prob:.3e} is below floor", prob)
    return StateVector(amps / np.sqrt(prob)), prob


def align_global_phase(amplitudes: np.ndarray) -> np.ndarray:
    """Rotate the phase so the largest-magnitude amplitude is real and positive."""
    amps = np.asarray(amplitudes, dtype=complex)
    k = int(np.argmax(np.abs(amps)))
    if abs(amps[k]) == 0:
        return amps.copy()
    return amps * (abs(amps[k]) / amps[k])


def equal_up_to_global_phase(a, b, atol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        return False
    overlap = np.vdot(a, b)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return bool(np.max(np.abs(a * phase - b)) < atol)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.entries - b.entries))))

"""Linear-inversion Pauli tomography and the two-step eraser experiment built on it."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping

import numpy as np

from .ccr import CcrTriple, ccr_triple
from .circuit import QUBIT_BP, BellOutcome, CircuitParams, Stage, run_to_stage
from .errors import IncompleteBasisSet, ZeroProbabilityOutcome
from .erasure import density_matrix_postselect
from .gates import VppbsParams
from .sampling import (
    ReadoutNoise,
    ShotPlan,
    basis_probabilities,
    calibrate,
    full_basis_set,
    mitigate,
)
from .states import DensityMatrix

PHYSICALITY_TOL = 1e-6

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(label: str) -> np.ndarray:
    return reduce(np.kron, (_PAULI[c] for c in label))


def pauli_labels(n_qubits: int) -> list[str]:
    return ["".join(p) for p in itertools.product("IXYZ", repeat=n_qubits)]


def pauli_expectations(rho: DensityMatrix) -> dict[str, float]:
    """``Tr(rho P)`` for every Pauli string, identity included."""
    return {
        label: float(np.real(np.trace(rho.entries @ pauli_matrix(label))))
        for label in pauli_labels(rho.n_qubits)
    }


def state_from_expectations(expectations: Mapping[str, float], n_qubits: int) -> np.ndarray:
    """``rho = 2^-n sum_P <P> P``; missing strings count as zero, ``<I..I>`` as one."""
    dim = 2**n_qubits
    rho = np.zeros((dim, dim), dtype=complex)
    for label in pauli_labels(n_qubits):
        value = 1.0 if set(label) == {"I"} else expectations.get(label, 0.0)
        if value:
            rho += value * pauli_matrix(label)
    rho = rho / dim
    return 0.5 * (rho + rho.conj().T)


def _parity_signs(n_qubits: int, positions: list[int]) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    parity = np.zeros_like(idx)
    for q in positions:
        parity ^= (idx >> (n_qubits - 1 - q)) & 1
    return 1.0 - 2.0 * parity


def expectations_from_counts(counts: Mapping[str, np.ndarray]) -> dict[str, float]:
    """Estimate every non-identity Pauli expectation, pooling all compatible settings.

    Raises:
        IncompleteBasisSet: if any of the ``3**n`` settings is missing.
    """
    bases = list(counts)
    if not bases:
        raise IncompleteBasisSet("no measurement settings supplied")
    n = len(bases[0])
    missing = sorted(set(full_basis_set(n)) - set(bases))
    if missing:
        raise IncompleteBasisSet(f"missing {len(missing)} settings, e.g. {missing[:3]}")
    freqs = {}
    for basis, hist in counts.items():
        hist = np.asarray(hist, dtype=float)
        freqs[basis] = hist / hist.sum()
    estimates = {}
    for label in pauli_labels(n):
        support = [q for q, c in enumerate(label) if c != "I"]
        if not support:
            continue
        signs = _parity_signs(n, support)
        compatible = [
            f for basis, f in freqs.items() if all(basis[q] == label[q] for q in support)
        ]
        estimates[label] = float(np.mean([signs @ f for f in compatible]))
    return estimates


@dataclass(frozen=True)
class TomographyResult:
    estimate: DensityMatrix
    raw_counts: dict[str, np.ndarray]
    mitigated: bool
    physicality_adjusted: bool
    expectations: dict[str, float] = field(repr=False, default_factory=dict)


def make_physical(rho: np.ndarray) -> tuple[np.ndarray, bool]:
    """Clip negative eigenvalues and renormalize, if any is below ``-PHYSICALITY_TOL``."""
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() >= -PHYSICALITY_TOL:
        return rho, False
    vals = vals.clip(min=0.0)
    vals = vals / vals.sum()
    fixed = (vecs * vals) @ vecs.conj().T
    return 0.5 * (fixed + fixed.conj().T), True


def tomography(
    counts: Mapping[str, np.ndarray],
    mitigate_readout: bool = False,
    calibration: ReadoutNoise | None = None,
    method: str = "constrained",
    physical: bool = True,
) -> TomographyResult:
    """Reconstruct a density matrix from histograms over the full Pauli setting set.

    Histograms may be raw counts or exact probability vectors; each is normalized.
    With ``mitigate_readout`` every histogram is corrected with ``calibration``
    before expectations are formed.
    """
    raw = {b: np.asarray(h) for b, h in counts.items()}
    used = raw
    if mitigate_readout:
        if calibration is None:
            raise ValueError("mitigation requested without a calibration")
        used = {b: mitigate(h, calibration, method) for b, h in raw.items()}
    expectations = expectations_from_counts(used)
    n = len(next(iter(raw)))
    rho = state_from_expectations(expectations, n)
    adjusted = False
    if physical:
        rho, adjusted = make_physical(rho)
    return TomographyResult(DensityMatrix(rho), raw, mitigate_readout, adjusted, expectations)


@dataclass(frozen=True)
class ExperimentResult:
    """Outcome of the two-step emulation at one parameter point.

    ``after_*`` and ``prob_*`` are ``None`` when the estimated branch is empty.
    """

    before: CcrTriple
    after_plus: CcrTriple | None
    prob_plus: float
    after_minus: CcrTriple | None
    prob_minus: float
    step1: TomographyResult = field(repr=False)
    step2: TomographyResult = field(repr=False)


def _measure(state, bases, qubits, plan, noise, rng, exact, depolarizing):
    out = {}
    for basis in bases:
        probs = basis_probabilities(state, basis, qubits, noise, depolarizing)
        out[basis] = probs if exact else rng.multinomial(int(plan.shots_per_basis), probs)
    return out


def two_step_experiment(
    params: VppbsParams,
    plan: ShotPlan | None = None,
    noise: ReadoutNoise | None = None,
    mitigate_readout: bool = True,
    exact: bool = False,
    depolarizing: float = 0.0,
    rng: np.random.Generator | None = None,
    method: str = "constrained",
    branch_floor: float = 1e-3,
) -> ExperimentResult:
    """Emulate the two measurement steps used to estimate CCRs before and after erasure.

    Step 1 tomographs the path qubit right after the VPPBS. Step 2 appends the
    BBM, tomographs all three qubits and post-selects the readout of the Psi+
    (and Psi-) outcome on (A, B). With ``exact=True`` the histograms are the
    exact outcome distributions (readout error included) and no shots are drawn.
    Sampled branches whose estimated probability is below ``branch_floor`` are
    reported as undefined.
    """
    plan = plan or ShotPlan()
    rng = plan.rng() if rng is None else rng
    use_mitigation = mitigate_readout and noise is not None
    if use_mitigation:
        calib = noise if exact else calibrate(noise, plan, rng=rng)
    else:
        calib = None

    psi2 = run_to_stage(CircuitParams(params, stage=Stage.PSI2)).state
    counts1 = _measure(
        psi2, full_basis_set(1), [QUBIT_BP], plan,
        noise.for_qubits([QUBIT_BP]) if noise else None, rng, exact, depolarizing,
    )
    tomo1 = tomography(
        counts1, use_mitigation, calib.for_qubits([QUBIT_BP]) if calib else None, method
    )
    before = ccr_triple(tomo1.estimate)

    measured = run_to_stage(CircuitParams(params, stage=Stage.PSI2, include_bbm=True)).state
    counts2 = _measure(measured, full_basis_set(3), None, plan, noise, rng, exact, depolarizing)
    tomo2 = tomography(counts2, use_mitigation, calib, method)

    branches = {}
    for outcome in (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS):
        try:
            rho_bp, prob = density_matrix_postselect(tomo2.estimate, outcome, after_bbm=True)
        except ZeroProbabilityOutcome as exc:
            branches[outcome] = (None, exc.probability)
            continue
        if not exact and prob < branch_floor:
            branches[outcome] = (None, prob)
        else:
            branches[outcome] = (ccr_triple(rho_bp), prob)
    after_plus, prob_plus = branches[BellOutcome.PSI_PLUS]
    after_minus, prob_minus = branches[BellOutcome.PSI_MINUS]
    return ExperimentResult(before, after_plus, prob_plus, after_minus, prob_minus, tomo1, tomo2)

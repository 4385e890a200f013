"""Bell-basis erasure with post-selection, for pure pipeline states and for density matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccr import CcrTriple, ccr_triple
from .circuit import (
    PSI_OUTCOMES,
    QUBIT_A,
    QUBIT_B,
    QUBIT_BP,
    BellOutcome,
    CircuitParams,
    Stage,
    run_to_stage,
)
from .errors import NonPhysicalInput, ZeroProbabilityOutcome
from .gates import VppbsParams
from .states import PROB_FLOOR, DensityMatrix, StateVector, branch, partial_trace

TRACE_TOL = 1e-6


@dataclass(frozen=True)
class ErasureRecord:
    """Before/after report for one parameter point.

    Branch-dependent fields are ``None`` when the branch has zero probability.
    """

    vppbs: VppbsParams
    phi: float
    stage: Stage
    prob_psi_plus: float
    prob_psi_minus: float
    before: CcrTriple
    after_plus: CcrTriple | None
    after_minus: CcrTriple | None
    b_prime_plus: StateVector | None
    b_prime_minus: StateVector | None

    @property
    def delta_C_plus(self) -> float | None:
        if self.after_plus is None:
            return None
        return self.after_plus.coherence - self.before.coherence

    @property
    def delta_C_minus(self) -> float | None:
        if self.after_minus is None:
            return None
        return self.after_minus.coherence - self.before.coherence

    def prob(self, outcome: BellOutcome) -> float:
        outcome = BellOutcome.parse(outcome)
        if outcome is BellOutcome.PSI_PLUS:
            return self.prob_psi_plus
        if outcome is BellOutcome.PSI_MINUS:
            return self.prob_psi_minus
        return 0.0

    def after(self, outcome: BellOutcome) -> CcrTriple | None:
        plus = BellOutcome.parse(outcome) is BellOutcome.PSI_PLUS
        return self.after_plus if plus else self.after_minus

    def b_prime_state(self, outcome: BellOutcome) -> StateVector | None:
        plus = BellOutcome.parse(outcome) is BellOutcome.PSI_PLUS
        return self.b_prime_plus if plus else self.b_prime_minus


def erase(params: VppbsParams, phi: float = 0.0, stage: Stage | str = Stage.PSI2) -> ErasureRecord:
    """Run the Bell measurement on (A, B) and post-select each Psi outcome.

    The default evaluates the protocol on the state inside the interferometer;
    ``stage=Stage.PSI4`` uses the output state instead.
    """
    circuit = CircuitParams(params, phi, stage=Stage.parse(stage))
    pipeline = run_to_stage(circuit)
    psi = pipeline.state
    before = ccr_triple(partial_trace(psi.density_matrix(), [QUBIT_BP]))
    probs, afters, states = {}, {}, {}
    for outcome in PSI_OUTCOMES:
        amps = branch(psi, outcome.vector, [QUBIT_A, QUBIT_B])
        prob = float(np.vdot(amps, amps).real)
        probs[outcome] = prob
        if prob < PROB_FLOOR:
            afters[outcome] = states[outcome] = None
            continue
        cond = StateVector(amps / np.sqrt(prob))
        states[outcome] = cond
        afters[outcome] = ccr_triple(cond.density_matrix())
    return ErasureRecord(
        vppbs=params,
        phi=circuit.phi,
        stage=pipeline.stage,
        prob_psi_plus=probs[BellOutcome.PSI_PLUS],
        prob_psi_minus=probs[BellOutcome.PSI_MINUS],
        before=before,
        after_plus=afters[BellOutcome.PSI_PLUS],
        after_minus=afters[BellOutcome.PSI_MINUS],
        b_prime_plus=states[BellOutcome.PSI_PLUS],
        b_prime_minus=states[BellOutcome.PSI_MINUS],
    )


def density_matrix_postselect(
    rho3: DensityMatrix, outcome: BellOutcome | str, after_bbm: bool = False
) -> tuple[DensityMatrix, float]:
    """Condition B' on a Bell outcome of (A, B) in a three-qubit density matrix.

    With ``after_bbm=True`` the matrix is taken to be already rotated by the
    BBM circuit, so the outcome is the computational state of its readout bits.

    Raises:
        NonPhysicalInput: if ``Tr(rho3)`` is more than ``TRACE_TOL`` away from 1.
        ZeroProbabilityOutcome: if the outcome probability is below the floor.
    """
    if rho3.n_qubits != 3:
        raise ValueError(f"expected a 3-qubit density matrix, got {rho3.n_qubits} qubits")
    if abs(rho3.trace - 1.0) > TRACE_TOL:
        raise NonPhysicalInput(f"trace {rho3.trace:.9f} deviates from 1")
    outcome = BellOutcome.parse(outcome)
    vec = StateVector.from_label(outcome.bits) if after_bbm else outcome.vector
    v = vec.amplitudes
    r = rho3.entries.reshape(4, 2, 4, 2)
    sub = np.einsum("i,icjd,j->cd", v.conj(), r, v)
    sub = 0.5 * (sub + sub.conj().T)
    prob = float(np.trace(sub).real)
    if prob < PROB_FLOOR:
        raise ZeroProbabilityOutcome(f"{outcome.label} has probability {prob:.3e}", prob)
    return DensityMatrix(sub / prob), prob

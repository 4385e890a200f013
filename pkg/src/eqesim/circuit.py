"""The eraser circuit on qubits A (0), B (1) and B' (2).

Pipeline: Bell-pair preparation -> VPPBS -> mirrors + phase shifter -> output
beam splitter, with an optional Bell-basis measurement (BBM) on (A, B).
The path mode of photon A never leaves ``|0>`` and is not simulated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import gates
from .gates import VppbsParams, wrap_angle
from .states import StateVector, apply_gate, project

QUBIT_A, QUBIT_B, QUBIT_BP = 0, 1, 2
N_QUBITS = 3


class Stage(enum.IntEnum):
    PSI1 = 1  # Bell pair, path in arm 0
    PSI2 = 2  # after the VPPBS
    PSI3 = 3  # after mirrors and phase shifter
    PSI4 = 4  # after the output beam splitter

    @classmethod
    def parse(cls, value) -> Stage:
        if isinstance(value, cls):
            return value
        text = str(value).strip().upper()
        if text.startswith("PSI"):
            text = text[3:]
        return cls(int(text))


class BellOutcome(enum.Enum):
    """Bell states on (A, B) and the readout bits they map to after ``bbm_transform``."""

    PHI_PLUS = ("Phi+", "00", (1, 0, 0, 1))
    PHI_MINUS = ("Phi-", "10", (1, 0, 0, -1))
    PSI_PLUS = ("Psi+", "01", (0, 1, 1, 0))
    PSI_MINUS = ("Psi-", "11", (0, 1, -1, 0))

    def __init__(self, label, bits, signs):
        self.label = label
        self.bits = bits
        self._signs = signs

    @property
    def vector(self) -> StateVector:
        return StateVector(np.array(self._signs, dtype=complex) / math.sqrt(2.0))

    @classmethod
    def parse(cls, value) -> BellOutcome:
        if isinstance(value, cls):
            return value
        text = str(value).strip().replace("_", "").lower()
        for outcome in cls:
            names = {outcome.label.lower(), outcome.name.replace("_", "").lower()}
            if text in names:
                return outcome
        raise ValueError(f"unknown Bell outcome {value!r}")


PSI_OUTCOMES = (BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS)


@dataclass(frozen=True)
class CircuitParams:
    vppbs: VppbsParams
    phi: float = 0.0
    include_bbm: bool = False
    stage: Stage = Stage.PSI4

    def __post_init__(self):
        object.__setattr__(self, "phi", wrap_angle(self.phi))
        object.__setattr__(self, "stage", Stage.parse(self.stage))


@dataclass(frozen=True)
class PipelineState:
    stage: Stage
    state: StateVector
    bbm_applied: bool = field(default=False)


def prepare_psi1() -> PipelineState:
    """``|Psi+>_{AB} |0>_{B'}`` via H on A, CNOT A->B, X on B."""
    psi = StateVector.from_label("000")
    psi = apply_gate(psi, gates.H, [QUBIT_A])
    psi = apply_gate(psi, gates.CNOT, [QUBIT_A, QUBIT_B])
    psi = apply_gate(psi, gates.X, [QUBIT_B])
    return PipelineState(Stage.PSI1, psi)


def _advance(psi: StateVector, stage: Stage, p: CircuitParams) -> StateVector:
    if stage is Stage.PSI2:
        return apply_gate(psi, gates.vppbs_matrix(p.vppbs), [QUBIT_B, QUBIT_BP])
    if stage is Stage.PSI3:
        # Mirrors are Z then Y on the path qubit; the phase shifter sits on arm 1.
        psi = apply_gate(psi, gates.Z, [QUBIT_BP])
        psi = apply_gate(psi, gates.Y, [QUBIT_BP])
        return apply_gate(psi, gates.phase(p.phi), [QUBIT_BP])
    if stage is Stage.PSI4:
        return apply_gate(psi, gates.beam_splitter(), [QUBIT_BP])
    raise ValueError(f"no transition into {stage!r}")


def run_to_stage(p: CircuitParams) -> PipelineState:
    """Evolve the initial Bell pair up to ``p.stage``; apply the BBM last if requested."""
    out = prepare_psi1()
    psi = out.state
    for stage in Stage:
        if stage is Stage.PSI1:
            continue
        if stage > p.stage:
            break
        psi = _advance(psi, stage, p)
    result = PipelineState(p.stage, psi)
    if p.include_bbm:
        result = bbm_transform(result)
    return result


def bbm_transform(state: PipelineState) -> PipelineState:
    """Rotate the Bell basis of (A, B) onto the computational basis: CNOT A->B, then H on A."""
    psi = apply_gate(state.state, gates.CNOT, [QUBIT_A, QUBIT_B])
    psi = apply_gate(psi, gates.H, [QUBIT_A])
    return PipelineState(state.stage, psi, bbm_applied=True)


def output_probabilities(
    p: CircuitParams, bell_outcome: BellOutcome | str
) -> tuple[float, float, float]:
    """Detector probabilities for B' conditioned on a Bell outcome at the output.

    Returns ``(p_detector0, p_detector1, p_outcome)``.

    Raises:
        ZeroProbabilityOutcome: if ``bell_outcome`` never occurs (always the case
            for the Phi outcomes, since the source emits ``|Psi+>``).
    """
    if p.stage is not Stage.PSI4:
        raise ValueError("detector probabilities are defined at the output stage only")
    outcome = BellOutcome.parse(bell_outcome)
    measured = run_to_stage(CircuitParams(p.vppbs, p.phi, include_bbm=True, stage=Stage.PSI4))
    readout = StateVector.from_label(outcome.bits)
    path, prob = project(measured.state, readout, [QUBIT_A, QUBIT_B])
    p0, p1 = path.probabilities()
    return float(p0), float(p1), prob

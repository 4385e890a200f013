"""Fast property checks behind the ``selftest`` subcommand."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gates
from .circuit import QUBIT_A, QUBIT_B, BellOutcome, CircuitParams, Stage, run_to_stage
from .erasure import erase
from .gates import VppbsParams
from .states import branch

TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    seconds: float

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "seconds": self.seconds,
        }


def _grid(n: int) -> list[VppbsParams]:
    angles = np.linspace(0.0, 2 * math.pi, n)
    return [VppbsParams(h, v) for h in angles for v in angles]


def check_gate_unitarity() -> float:
    worst = 0.0
    for params in _grid(9):
        for phi in (0.0, 1.0, math.pi):
            for gate in gates.catalog(params, phi).values():
                u = gate.matrix
                worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))))
    return worst


def check_coefficient_norms() -> float:
    worst = 0.0
    for phi in np.linspace(0.0, 2 * math.pi, 33):
        t, r = gates.transmission(phi), gates.reflection(phi)
        worst = max(worst, abs(abs(t) ** 2 + abs(r) ** 2 - 1.0))
    return worst


def _stage_states(n: int = 9):
    for params in _grid(n):
        for stage in (Stage.PSI2, Stage.PSI4):
            yield run_to_stage(CircuitParams(params, 0.7, stage=stage)).state


def check_bell_probabilities() -> float:
    worst = 0.0
    for psi in _stage_states():
        total = 0.0
        for outcome in BellOutcome:
            amps = branch(psi, outcome.vector, [QUBIT_A, QUBIT_B])
            total += float(np.vdot(amps, amps).real)
        worst = max(worst, abs(total - 1.0))
    return worst


def check_phi_sector_empty() -> float:
    worst = 0.0
    for psi in _stage_states():
        for outcome in (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS):
            amps = branch(psi, outcome.vector, [QUBIT_A, QUBIT_B])
            worst = max(worst, float(np.vdot(amps, amps).real))
    return worst


def check_post_bbm_purity() -> float:
    worst = 0.0
    for params in _grid(17):
        rec = erase(params)
        for after in (rec.after_plus, rec.after_minus):
            if after is not None:
                worst = max(worst, abs(after.entanglement))
    return worst


def check_ccr_identity() -> float:
    worst = 0.0
    for params in _grid(17):
        worst = max(worst, abs(erase(params).before.total - 0.5))
    return worst


CHECKS: dict[str, Callable[[], float]] = {
    "gate_unitarity": check_gate_unitarity,
    "coefficient_norms": check_coefficient_norms,
    "bell_probabilities_sum_to_one": check_bell_probabilities,
    "phi_sector_empty": check_phi_sector_empty,
    "post_bbm_purity": check_post_bbm_purity,
    "ccr_identity": check_ccr_identity,
}


def run_selftest(tol: float = TOL) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        start = time.perf_counter()
        dev = fn()
        results.append(CheckResult(name, dev < tol, dev, time.perf_counter() - start))
    return results

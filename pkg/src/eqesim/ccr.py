"""Complete complementarity relation: predictability + coherence + entanglement.

For a subsystem of dimension ``d`` of a globally pure state,

    P_hs + C_hs + S_ln = (d - 1) / d

with ``P_hs = sum_j rho_jj^2 - 1/d``, ``C_hs = sum_{j != k} |rho_jk|^2`` and
``S_ln = 1 - Tr(rho^2)``. The coherence normalization is the one that makes the
three terms add up; for a qubit it is ``2 |rho_01|^2``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .circuit import BellOutcome
from .errors import ZeroProbabilityOutcome
from .gates import VppbsParams
from .states import PROB_FLOOR, DensityMatrix

logger = logging.getLogger(__name__)

NEGATIVE_FLAG = -1e-8


@dataclass(frozen=True)
class CcrTriple:
    predictability: float
    coherence: float
    entanglement: float

    @property
    def total(self) -> float:
        return self.predictability + self.coherence + self.entanglement

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.predictability, self.coherence, self.entanglement)


def _entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def predictability_hs(rho) -> float:
    r = _entries(rho)
    diag = np.real(np.diag(r))
    return float(np.sum(diag**2) - 1.0 / r.shape[0])


def coherence_hs(rho) -> float:
    r = _entries(rho)
    off = np.abs(r) ** 2
    return float(np.sum(off) - np.sum(np.diag(off)))


def entanglement_ln(rho) -> float:
    r = _entries(rho)
    return float(1.0 - np.sum(np.abs(r) ** 2))


def ccr_triple(rho) -> CcrTriple:
    """All three CCR terms of a density matrix (any dimension)."""
    return CcrTriple(predictability_hs(rho), coherence_hs(rho), entanglement_ln(rho))


def branch_norm_sq(params: VppbsParams, outcome: BellOutcome) -> float:
    """``|N|^2 = |T_H +- T_V|^2 + |R_H -+ R_V|^2`` for the Psi+ (upper) or Psi- (lower) branch."""
    s = _branch_sign(outcome)
    return abs(params.T_H + s * params.T_V) ** 2 + abs(params.R_H - s * params.R_V) ** 2


def _branch_sign(outcome: BellOutcome) -> int:
    outcome = BellOutcome.parse(outcome)
    if outcome is BellOutcome.PSI_PLUS:
        return 1
    if outcome is BellOutcome.PSI_MINUS:
        return -1
    raise ZeroProbabilityOutcome(f"{outcome.label} never occurs for a |Psi+> source")


def closed_form_before(params: VppbsParams) -> CcrTriple:
    """CCR of the path qubit inside the interferometer, before any Bell measurement."""
    th, rh, tv, rv = params.T_H, params.R_H, params.T_V, params.R_V
    t_sq = abs(th) ** 2 + abs(tv) ** 2
    r_sq = abs(rh) ** 2 + abs(rv) ** 2
    cross = abs(th * np.conj(rh) - tv * np.conj(rv)) ** 2
    p = 0.25 * t_sq**2 + 0.25 * r_sq**2 - 0.5
    c = 0.5 * cross
    s = 1.0 - 0.25 * r_sq**2 - 0.25 * t_sq**2 - 0.5 * cross
    return CcrTriple(float(p), float(c), float(s))


def closed_form_after(params: VppbsParams, outcome: BellOutcome) -> CcrTriple:
    """CCR of the post-selected path qubit; entanglement is zero by construction.

    Raises:
        ZeroProbabilityOutcome: if the branch norm vanishes.
    """
    s = _branch_sign(outcome)
    t = abs(params.T_H + s * params.T_V) ** 2
    r = abs(params.R_H - s * params.R_V) ** 2
    n_sq = t + r
    if n_sq / 4.0 < PROB_FLOOR:
        raise ZeroProbabilityOutcome(f"{BellOutcome.parse(outcome).label} branch vanishes", n_sq / 4.0)
    p = (t**2 + r**2) / n_sq**2 - 0.5
    c = 2.0 * t * r / n_sq**2
    return CcrTriple(float(p), float(c), 0.0)


def ccr_closed_forms(params: VppbsParams) -> tuple[CcrTriple, CcrTriple, CcrTriple]:
    """``(before, after_plus, after_minus)``; raises if either branch is empty."""
    return (
        closed_form_before(params),
        closed_form_after(params, BellOutcome.PSI_PLUS),
        closed_form_after(params, BellOutcome.PSI_MINUS),
    )


def restored_coherence(params: VppbsParams, outcome: BellOutcome) -> float:
    """Coherence gained by the erasure, ``C_after - C_before``; may be negative."""
    delta = closed_form_after(params, outcome).coherence - closed_form_before(params).coherence
    if delta < NEGATIVE_FLAG:
        logger.info(
            "coherence decreased by %.3g after erasure at (%.4f, %.4f)",
            -delta,
            params.phi_H,
            params.phi_V,
        )
    return delta

"""Vectorized exact evaluation of many (phi_H, phi_V, phi) points at once.

Same circuit as ``circuit.run_to_stage``, but states are carried as an
``(N, 4, 2)`` array indexed by point, (A, B) and B'. Undefined post-selected
quantities come back as NaN.
"""

from __future__ import annotations

import numpy as np

from . import gates
from .circuit import BellOutcome, Stage, prepare_psi1
from .states import PROB_FLOOR


def coefficient_arrays(phi) -> tuple[np.ndarray, np.ndarray]:
    phi = np.asarray(phi, dtype=float)
    half = np.exp(0.5j * phi)
    return half * np.cos(phi / 2), 1j * half * np.sin(phi / 2)


def vppbs_matrices(phi_h, phi_v) -> np.ndarray:
    """``(N, 4, 4)`` stack of closed-form VPPBS matrices on (B, B')."""
    th, rh = coefficient_arrays(phi_h)
    tv, rv = coefficient_arrays(phi_v)
    n = th.size
    u = np.zeros((n, 4, 4), dtype=complex)
    u[:, 0, 0] = u[:, 1, 1] = th
    u[:, 0, 1] = -1j * rh
    u[:, 1, 0] = 1j * rh
    u[:, 2, 2] = u[:, 3, 3] = tv
    u[:, 2, 3] = 1j * rv
    u[:, 3, 2] = -1j * rv
    return -u


def stage_states(phi_h, phi_v, phi=0.0, stage: Stage | str = Stage.PSI2) -> np.ndarray:
    """Pipeline states for every point, shape ``(N, 8)``."""
    phi_h = np.atleast_1d(np.asarray(phi_h, dtype=float))
    phi_v = np.atleast_1d(np.asarray(phi_v, dtype=float))
    phi_h, phi_v = np.broadcast_arrays(phi_h, phi_v)
    n = phi_h.size
    phi = np.broadcast_to(np.asarray(phi, dtype=float), (n,))
    stage = Stage.parse(stage)

    psi1 = prepare_psi1().state.amplitudes.reshape(2, 4)  # A, (B B')
    psi = np.broadcast_to(psi1, (n, 2, 4)).astype(complex)
    if stage >= Stage.PSI2:
        psi = np.einsum("nij,naj->nai", vppbs_matrices(phi_h.ravel(), phi_v.ravel()), psi)
    psi = psi.reshape(n, 4, 2)  # (A B), B'
    if stage >= Stage.PSI3:
        mirror = gates.Y.matrix @ gates.Z.matrix
        shifter = np.zeros((n, 2, 2), dtype=complex)
        shifter[:, 0, 0] = 1.0
        shifter[:, 1, 1] = np.exp(1j * phi)
        psi = np.einsum("nij,jk,nak->nai", shifter, mirror, psi)
    if stage >= Stage.PSI4:
        psi = np.einsum("ij,naj->nai", gates.beam_splitter().matrix, psi)
    return psi.reshape(n, 8)


def ccr_arrays(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(P, C, S)`` for a stack of qubit density matrices of shape ``(N, 2, 2)``."""
    diag = np.real(np.einsum("nii->ni", rho))
    p = np.sum(diag**2, axis=1) - 0.5
    c = 2.0 * np.abs(rho[:, 0, 1]) ** 2
    s = 1.0 - np.sum(np.abs(rho) ** 2, axis=(1, 2))
    return p, c, s


def reduced_path_states(states: np.ndarray) -> np.ndarray:
    psi = states.reshape(-1, 4, 2)
    return np.einsum("nai,naj->nij", psi, psi.conj())


def batch_erase(phi_h, phi_v, phi=0.0, stage: Stage | str = Stage.PSI2) -> dict[str, np.ndarray]:
    """Before/after CCR columns for every point (keys follow the sweep CSV names)."""
    states = stage_states(phi_h, phi_v, phi, stage)
    p, c, s = ccr_arrays(reduced_path_states(states))
    out = {"P_before": p, "C_before": c, "S_before": s}
    psi = states.reshape(-1, 4, 2)
    for outcome, tag in ((BellOutcome.PSI_PLUS, "plus"), (BellOutcome.PSI_MINUS, "minus")):
        amps = np.einsum("a,nai->ni", outcome.vector.amplitudes.conj(), psi)
        prob = np.sum(np.abs(amps) ** 2, axis=1)
        defined = prob >= PROB_FLOOR
        amps = amps / np.sqrt(np.where(defined, prob, 1.0))[:, None]
        rho = np.einsum("ni,nj->nij", amps, amps.conj())
        pa, ca, sa = ccr_arrays(rho)
        out[f"prob_psi_{tag}"] = prob
        out[f"P_after_{tag}"] = np.where(defined, pa, np.nan)
        out[f"C_after_{tag}"] = np.where(defined, ca, np.nan)
        out[f"S_after_{tag}"] = np.where(defined, sa, np.nan)
    return out

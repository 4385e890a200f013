"""Optical elements of the eraser written as qubit gates.

Two-qubit gates act on the ordered pair (B, B'): polarization is the high
qubit and the path is the low qubit, so a 4x4 matrix is indexed by
``|b b'>`` with ``|0>`` = horizontal polarization / arm 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .states import UnitaryGate

TWO_PI = 2.0 * math.pi


def wrap_angle(phi: float) -> float:
    """Map an angle into ``[0, 2*pi]``, warning when it had to move."""
    phi = float(phi)
    if 0.0 <= phi <= TWO_PI:
        return phi
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    warnings.warn(f"angle {phi!r} wrapped into [0, 2pi] as {wrapped!r}", stacklevel=3)
    return wrapped


def transmission(phi: float) -> complex:
    return complex(np.exp(0.5j * phi) * math.cos(phi / 2))


def reflection(phi: float) -> complex:
    return complex(1j * np.exp(0.5j * phi) * math.sin(phi / 2))


@dataclass(frozen=True)
class VppbsParams:
    """Angles of the variable partially-polarizing beam splitter.

    ``phi_H`` and ``phi_V`` set the splitting ratio for horizontal and vertical
    polarization: ``|T_j|^2 = cos^2(phi_j / 2)``. Angles outside ``[0, 2pi]``
    are wrapped (the coefficients are 2pi-periodic, so nothing physical moves).
    """

    phi_H: float
    phi_V: float
    T_H: complex = field(init=False, repr=False)
    R_H: complex = field(init=False, repr=False)
    T_V: complex = field(init=False, repr=False)
    R_V: complex = field(init=False, repr=False)

    def __post_init__(self):
        phi_h, phi_v = wrap_angle(self.phi_H), wrap_angle(self.phi_V)
        object.__setattr__(self, "phi_H", phi_h)
        object.__setattr__(self, "phi_V", phi_v)
        object.__setattr__(self, "T_H", transmission(phi_h))
        object.__setattr__(self, "R_H", reflection(phi_h))
        object.__setattr__(self, "T_V", transmission(phi_v))
        object.__setattr__(self, "R_V", reflection(phi_v))


PBS_LIMIT = VppbsParams(0.0, math.pi)


def coefficients(params: VppbsParams) -> tuple[complex, complex, complex, complex]:
    """``(T_H, R_H, T_V, R_V)`` for the given splitter angles."""
    return params.T_H, params.R_H, params.T_V, params.R_V


_SQRT_HALF = 1.0 / math.sqrt(2.0)

I2 = UnitaryGate(np.eye(2), "I")
X = UnitaryGate([[0, 1], [1, 0]], "X")
Y = UnitaryGate([[0, -1j], [1j, 0]], "Y")
Z = UnitaryGate([[1, 0], [0, -1]], "Z")
H = UnitaryGate(_SQRT_HALF * np.array([[1, 1], [1, -1]]), "H")
S = UnitaryGate([[1, 0], [0, 1j]], "S")
CNOT = UnitaryGate([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], "CNOT")

# Half-wave plate as a polarization flip; only used by the legacy single-photon eraser.
HWP = UnitaryGate(X.matrix, "HWP")


def phase(phi: float) -> UnitaryGate:
    """Phase gate ``|0><0| + e^{i phi}|1><1|``."""
    return UnitaryGate(np.diag([1.0, np.exp(1j * phi)]), f"P({phi:.6g})")


def controlled_phase(phi: float) -> UnitaryGate:
    """Two-qubit controlled phase; symmetric in control and target."""
    return UnitaryGate(np.diag([1.0, 1.0, 1.0, np.exp(1j * phi)]), f"CP({phi:.6g})")


def beam_splitter() -> UnitaryGate:
    """Balanced beam splitter ``S H S = [[1, i], [i, 1]] / sqrt(2)``."""
    return UnitaryGate(S.matrix @ H.matrix @ S.matrix, "BS")


def mirror() -> UnitaryGate:
    """Both mirrors of the interferometer together: ``Y Z = [[0, i], [i, 0]]``."""
    return UnitaryGate(Y.matrix @ Z.matrix, "MIRROR")


def vppbs_matrix(params: VppbsParams) -> UnitaryGate:
    """Closed-form VPPBS on (B, B'), including its overall factor of -1."""
    th, rh, tv, rv = coefficients(params)
    u = -np.array(
        [
            [th, -1j * rh, 0, 0],
            [1j * rh, th, 0, 0],
            [0, 0, tv, 1j * rv],
            [0, 0, -1j * rv, tv],
        ]
    )
    return UnitaryGate(u, f"VPPBS({params.phi_H:.6g},{params.phi_V:.6g})")


def controlled_phase_pair(params: VppbsParams) -> tuple[UnitaryGate, UnitaryGate]:
    """Polarization-selective phase shifters ``(PS_V, PS_H)`` on (B, B').

    ``PS_V`` puts ``e^{i phi_V}`` on ``|11>`` (vertical, arm 1). ``PS_H`` is the
    same gate conjugated by ``X (x) X`` and so phases ``|00>`` (horizontal, arm 0).
    """
    ps_v = controlled_phase(params.phi_V)
    xx = np.kron(X.matrix, X.matrix)
    ps_h = UnitaryGate(xx @ controlled_phase(params.phi_H).matrix @ xx, f"PS_H({params.phi_H:.6g})")
    return UnitaryGate(ps_v.matrix, f"PS_V({params.phi_V:.6g})"), ps_h


def vppbs_from_gates(params: VppbsParams) -> UnitaryGate:
    """VPPBS built as an interferometer: ``-(I (x) BS) PS_H PS_V (I (x) BS^dag)``.

    The leading -1 is a global phase kept only so the result matches
    ``vppbs_matrix`` entry for entry.
    """
    ps_v, ps_h = controlled_phase_pair(params)
    bs = np.kron(np.eye(2), beam_splitter().matrix)
    u = -(bs @ ps_h.matrix @ ps_v.matrix @ bs.conj().T)
    return UnitaryGate(u, f"VPPBS_gates({params.phi_H:.6g},{params.phi_V:.6g})")


def catalog(params: VppbsParams | None = None, phi: float = 0.0) -> dict[str, UnitaryGate]:
    """Every named element, instantiated at the given angles."""
    params = params or VppbsParams(0.0, 0.0)
    ps_v, ps_h = controlled_phase_pair(params)
    return {
        "I": I2,
        "H": H,
        "X": X,
        "Y": Y,
        "Z": Z,
        "S": S,
        "HWP": HWP,
        "P": phase(phi),
        "BS": beam_splitter(),
        "MIRROR": mirror(),
        "CNOT": CNOT,
        "CP": controlled_phase(phi),
        "PS_V": ps_v,
        "PS_H": ps_h,
        "VPPBS": vppbs_matrix(params),
        "VPPBS_gates": vppbs_from_gates(params),
        # Bell-basis measurement pair on (A, B): CNOT first, then H on A.
        "BBM": UnitaryGate(np.kron(H.matrix, np.eye(2)) @ CNOT.matrix, "BBM"),
    }

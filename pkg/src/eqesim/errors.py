"""Exceptions raised across the simulator."""


class EqeError(Exception):
    """Base class for all simulator errors."""


class ZeroProbabilityOutcome(EqeError):
    """A post-selected outcome has (numerically) zero probability."""

    def __init__(self, message: str, probability: float = 0.0):
        super().__init__(message)
        self.probability = probability


class NonPhysicalInput(EqeError):
    """Input density matrix is too far from a valid state to be used."""


class SingularCalibration(EqeError):
    """Readout calibration matrix is too ill-conditioned to invert."""


class IncompleteBasisSet(EqeError):
    """Tomography was requested without every required measurement basis."""

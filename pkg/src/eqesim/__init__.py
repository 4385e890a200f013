"""Simulation of the entangled quantum eraser with a variable partially-polarizing beam splitter."""

from .ccr import CcrTriple, ccr_triple, coherence_hs, entanglement_ln, predictability_hs
from .circuit import BellOutcome, CircuitParams, Stage, output_probabilities, run_to_stage
from .erasure import ErasureRecord, density_matrix_postselect, erase
from .errors import (
    IncompleteBasisSet,
    NonPhysicalInput,
    SingularCalibration,
    ZeroProbabilityOutcome,
)
from .gates import PBS_LIMIT, VppbsParams
from .states import DensityMatrix, StateVector, UnitaryGate

__version__ = "0.1.0"

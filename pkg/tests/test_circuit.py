import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from eqesim.circuit import (
    BellOutcome,
    CircuitParams,
    Stage,
    bbm_transform,
    output_probabilities,
    prepare_psi1,
    run_to_stage,
)
from eqesim.errors import ZeroProbabilityOutcome
from eqesim.gates import PBS_LIMIT, VppbsParams
from eqesim.states import partial_trace

angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)
S2 = 1 / math.sqrt(2)


def test_psi1_is_bell_pair_with_path_in_arm_zero():
    psi = prepare_psi1().state.amplitudes
    want = np.zeros(8)
    want[0b010] = want[0b100] = S2
    np.testing.assert_allclose(psi, want, atol=1e-15)


def test_psi1_marginals():
    rho = prepare_psi1().state.density_matrix()
    np.testing.assert_allclose(partial_trace(rho, [0]).entries, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(partial_trace(rho, [2]).entries, np.diag([1, 0]), atol=1e-15)


@pytest.mark.parametrize("stage", [2, 3, 4])
def test_stages_match_amplitude_oracle(stage):
    grid = np.linspace(0.0, 2 * math.pi, 9)
    worst = 0.0
    for h in grid:
        for v in grid:
            for phi in np.linspace(0.0, 2 * math.pi, 5):
                got = run_to_stage(CircuitParams(VppbsParams(h, v), phi, stage=stage)).state.amplitudes
                worst = max(worst, np.abs(got - oracles.psi_stage(h, v, phi, stage)).max())
    assert worst < 1e-12


def test_pbs_limit_psi2():
    psi = run_to_stage(CircuitParams(PBS_LIMIT, stage=Stage.PSI2)).state.amplitudes
    want = np.zeros(8, dtype=complex)
    want[0b100] = -S2  # A=1, B=H, transmitted
    want[0b011] = -1j * S2  # A=0, B=V, reflected
    np.testing.assert_allclose(psi, want, atol=1e-15)


def test_pbs_limit_path_carries_full_which_way_information():
    psi = run_to_stage(CircuitParams(PBS_LIMIT, stage=Stage.PSI2)).state
    rho = partial_trace(psi.density_matrix(), [2]).entries
    np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-15)


def test_stage_four_pbs_limit_output():
    psi = run_to_stage(CircuitParams(PBS_LIMIT, 0.0)).state.amplitudes
    # B' after mirrors, phase 0 and the output splitter, each branch spread evenly
    np.testing.assert_allclose(np.abs(psi) ** 2, [0, 0, 0.25, 0.25, 0.25, 0.25, 0, 0], atol=1e-15)


@pytest.mark.parametrize(
    "bell, bits", [("Phi+", "00"), ("Phi-", "10"), ("Psi+", "01"), ("Psi-", "11")]
)
def test_bbm_transform_maps_bell_to_bits(bell, bits):
    psi = np.kron(oracles.BELL[bell], [1, 0])
    from eqesim.circuit import PipelineState
    from eqesim.states import StateVector

    out = bbm_transform(PipelineState(Stage.PSI1, StateVector(psi))).state.amplitudes
    np.testing.assert_allclose(out, np.eye(8)[2 * int(bits, 2)], atol=1e-15)


def test_include_bbm_flag_matches_explicit_transform():
    p = CircuitParams(VppbsParams(1.0, 2.0), 0.3, stage=Stage.PSI3)
    a = run_to_stage(CircuitParams(p.vppbs, p.phi, include_bbm=True, stage=p.stage))
    b = bbm_transform(run_to_stage(p))
    assert a.bbm_applied and b.bbm_applied
    np.testing.assert_allclose(a.state.amplitudes, b.state.amplitudes)


@pytest.mark.parametrize("phi", np.linspace(0.0, 2 * math.pi, 9))
def test_pbs_fringes(phi):
    p0, p1, prob = output_probabilities(CircuitParams(PBS_LIMIT, phi), "Psi+")
    assert p0 == pytest.approx(math.cos(phi / 2) ** 2, abs=1e-12)
    assert p1 == pytest.approx(math.sin(phi / 2) ** 2, abs=1e-12)
    assert prob == pytest.approx(0.5, abs=1e-12)
    q0, q1, _ = output_probabilities(CircuitParams(PBS_LIMIT, phi), "Psi-")
    assert q0 == pytest.approx(p1, abs=1e-12)


@given(angles, angles, angles, st.sampled_from(["Psi+", "Psi-"]))
def test_detector_probabilities_match_oracle(h, v, phi, bell):
    amps = oracles.conditional_path(oracles.psi_stage(h, v, phi, 4), bell)
    prob = float(np.vdot(amps, amps).real)
    if prob < 1e-9:
        return
    p0, p1, got_prob = output_probabilities(CircuitParams(VppbsParams(h, v), phi), bell)
    assert got_prob == pytest.approx(prob, abs=1e-12)
    assert p0 == pytest.approx(abs(amps[0]) ** 2 / prob, abs=1e-9)
    assert p0 + p1 == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("bell", ["Phi+", "Phi-"])
def test_phi_outcomes_never_occur(bell):
    with pytest.raises(ZeroProbabilityOutcome):
        output_probabilities(CircuitParams(VppbsParams(0.4, 1.9), 0.2), bell)


def test_detector_probabilities_need_output_stage():
    with pytest.raises(ValueError):
        output_probabilities(CircuitParams(PBS_LIMIT, stage=Stage.PSI2), "Psi+")


@pytest.mark.parametrize("text, stage", [("Psi2", Stage.PSI2), ("psi4", Stage.PSI4), (3, Stage.PSI3)])
def test_stage_parse(text, stage):
    assert Stage.parse(text) is stage


def test_stage_parse_rejects_unknown():
    with pytest.raises(ValueError):
        Stage.parse("Psi7")


@pytest.mark.parametrize("text", ["Psi+", "psi_plus", "PSI_PLUS", "psiplus"])
def test_bell_outcome_parse(text):
    assert BellOutcome.parse(text) is BellOutcome.PSI_PLUS


def test_bell_outcome_parse_rejects_unknown():
    with pytest.raises(ValueError):
        BellOutcome.parse("Chi")


def test_circuit_params_wrap_phase():
    with pytest.warns(UserWarning):
        p = CircuitParams(PBS_LIMIT, -math.pi)
    assert p.phi == pytest.approx(math.pi)

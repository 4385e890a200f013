import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from eqesim import gates
from eqesim.errors import ZeroProbabilityOutcome
from eqesim.states import (
    DensityMatrix,
    StateVector,
    UnitaryGate,
    align_global_phase,
    apply_gate,
    branch,
    equal_up_to_global_phase,
    evolve,
    partial_trace,
    project,
    tensor,
    trace_distance,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_from_label_sets_msb_first():
    psi = StateVector.from_label("011")
    assert psi.amplitudes[3] == 1
    assert psi.n_qubits == 3


def test_tensor_high_qubit_first():
    plus = StateVector(np.array([1, 1]) / math.sqrt(2))
    out = tensor(StateVector.from_label("1"), plus)
    np.testing.assert_allclose(out.amplitudes, [0, 0, 1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_tensor_density_matches_kron():
    a = DensityMatrix(np.diag([0.25, 0.75]))
    b = DensityMatrix.maximally_mixed(1)
    np.testing.assert_allclose(tensor(a, b).entries, np.diag([0.125, 0.125, 0.375, 0.375]))


def test_tensor_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        tensor(StateVector.from_label("0"), DensityMatrix.maximally_mixed(1))


def test_bell_pair_preparation():
    psi = StateVector.from_label("00")
    psi = apply_gate(psi, gates.H, [0])
    psi = apply_gate(psi, gates.CNOT, [0, 1])
    np.testing.assert_allclose(psi.amplitudes, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-15)


def test_cnot_target_order_matters():
    psi = StateVector.from_label("01")
    assert apply_gate(psi, gates.CNOT, [0, 1]).amplitudes[1] == 1
    assert apply_gate(psi, gates.CNOT, [1, 0]).amplitudes[3] == 1


def test_apply_gate_matches_dense_oracle_every_placement(rng):
    placements = [[q] for q in range(3)] + [list(p) for p in itertools.permutations(range(3), 2)]
    for _ in range(200):
        psi = oracles.random_pure(rng, 3)
        for targets in placements:
            u = oracles.haar_unitary(rng, 2 ** len(targets))
            got = apply_gate(StateVector(psi), UnitaryGate(u), targets).amplitudes
            want = oracles.dense_operator(u, targets, 3) @ psi
            assert np.abs(got - want).max() < 1e-12


def test_evolve_matches_pure_evolution(rng):
    psi = oracles.random_pure(rng, 3)
    u = oracles.haar_unitary(rng, 4)
    rho = evolve(StateVector(psi).density_matrix(), UnitaryGate(u), [2, 0]).entries
    phi = apply_gate(StateVector(psi), UnitaryGate(u), [2, 0]).amplitudes
    np.testing.assert_allclose(rho, np.outer(phi, phi.conj()), atol=1e-13)


def test_apply_gate_errors():
    psi = StateVector.from_label("000")
    with pytest.raises(IndexError):
        apply_gate(psi, gates.X, [3])
    with pytest.raises(ValueError):
        apply_gate(psi, gates.CNOT, [0])
    with pytest.raises(ValueError):
        apply_gate(psi, gates.CNOT, [1, 1])


def test_non_unitary_gate_rejected():
    with pytest.raises(ValueError):
        UnitaryGate([[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        UnitaryGate(np.eye(8))


def test_non_hermitian_density_rejected():
    with pytest.raises(ValueError):
        DensityMatrix([[1, 1], [0, 0]])


def test_partial_trace_examples():
    bell = StateVector(np.array([0, 1, 1, 0]) / math.sqrt(2)).density_matrix()
    np.testing.assert_allclose(partial_trace(bell, [0]).entries, np.eye(2) / 2, atol=1e-15)
    prod = tensor(StateVector.from_label("1"), StateVector(np.array([1, 1j]) / math.sqrt(2)))
    red = partial_trace(prod.density_matrix(), [1]).entries
    np.testing.assert_allclose(red, [[0.5, -0.5j], [0.5j, 0.5]], atol=1e-15)


def test_partial_trace_keeps_requested_order(rng):
    rho = oracles.random_density(rng, 3)
    for keep in ([0], [2], [0, 2], [2, 0], [1, 2], [2, 1, 0]):
        got = partial_trace(DensityMatrix(rho), keep).entries
        np.testing.assert_allclose(got, oracles.partial_trace_loops(rho, keep, 3), atol=1e-14)


def test_partial_trace_of_everything_rejected():
    with pytest.raises(ValueError):
        partial_trace(DensityMatrix.maximally_mixed(2), [])


def test_project_on_bell_vector():
    psi = StateVector(np.array([0, 0, 1, 0, 1, 0, 0, 0]) / math.sqrt(2))  # |Psi+>|0>
    psi_plus = StateVector(np.array([0, 1, 1, 0]) / math.sqrt(2))
    rest, prob = project(psi, psi_plus, [0, 1])
    assert prob == pytest.approx(1.0)
    np.testing.assert_allclose(rest.amplitudes, [1, 0], atol=1e-15)


def test_project_zero_probability_raises():
    psi = StateVector.from_label("010")
    with pytest.raises(ZeroProbabilityOutcome) as exc:
        project(psi, StateVector.from_label("00"), [0, 1])
    assert exc.value.probability == 0.0


def test_project_requires_normalized_vector():
    with pytest.raises(ValueError):
        project(StateVector.from_label("00"), StateVector(np.array([1.0, 1.0])), [0])


@given(seeds)
def test_bell_branches_are_complete(seed):
    rng = np.random.default_rng(seed)
    psi = StateVector(oracles.random_pure(rng, 3))
    total = 0.0
    for vec in oracles.BELL.values():
        amps = branch(psi, StateVector(vec), [0, 1])
        total += float(np.vdot(amps, amps).real)
    assert total == pytest.approx(1.0, abs=1e-12)


@given(seeds, st.sampled_from([[0], [1], [2], [0, 1], [2, 0], [1, 2]]))
def test_unitary_preserves_norm_and_trace(seed, targets):
    rng = np.random.default_rng(seed)
    psi = StateVector(oracles.random_pure(rng, 3))
    u = UnitaryGate(oracles.haar_unitary(rng, 2 ** len(targets)))
    assert apply_gate(psi, u, targets).norm == pytest.approx(1.0, abs=1e-12)
    rho = DensityMatrix(oracles.random_density(rng, 3))
    out = evolve(rho, u, targets)
    assert out.trace == pytest.approx(1.0, abs=1e-12)
    assert out.purity() == pytest.approx(rho.purity(), abs=1e-12)


@given(seeds)
def test_reduced_purities_of_pure_state_agree(seed):
    rng = np.random.default_rng(seed)
    rho = StateVector(oracles.random_pure(rng, 3)).density_matrix()
    a = partial_trace(rho, [2]).purity()
    b = partial_trace(rho, [0, 1]).purity()
    assert a == pytest.approx(b, abs=1e-12)


@given(seeds, st.floats(0, 2 * math.pi))
def test_global_phase_helpers(seed, theta):
    rng = np.random.default_rng(seed)
    v = oracles.random_pure(rng, 2)
    w = np.exp(1j * theta) * v
    assert equal_up_to_global_phase(v, w)
    np.testing.assert_allclose(align_global_phase(v), align_global_phase(w), atol=1e-12)


def test_global_phase_detects_real_difference():
    assert not equal_up_to_global_phase([1, 0], [0, 1])
    assert not equal_up_to_global_phase([1, 1], [1, -1])


def test_trace_distance_examples():
    zero = StateVector.from_label("0").density_matrix()
    one = StateVector.from_label("1").density_matrix()
    assert trace_distance(zero, one) == pytest.approx(1.0)
    assert trace_distance(zero, DensityMatrix.maximally_mixed(1)) == pytest.approx(0.5)


def test_states_are_read_only():
    psi = StateVector.from_label("0")
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2

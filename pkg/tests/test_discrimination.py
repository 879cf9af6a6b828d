import numpy as np
import pytest
from services.discrimination import (
    audit_povm,
    build_povm,
    closed_form_reciprocals,
    conclusive_probability,
    discrimination_set,
    expected_gram,
    inconclusive_decomposition,
    measure,
    naimark_isometry,
    outcome_distribution,
    phi_states,
    reciprocal_states,
    transform_discrimination_set,
    transform_reciprocals,
    u_prime,
)
from services.states import (
    ChannelSpec,
    LogicalInput,
    apply_pauli_string,
    assemble_system,
    build_Tprime,
    enumerate_state_family,
    prepare_chi_st,
    prepare_ghz,
)
from services.tensor_core import Operator, fidelity, numerical_rank
from utils.errors import ContractViolationError, LinearDependenceError

CHANNEL = ChannelSpec(a=0.8, b=0.6, n=3)


@pytest.fixture
def povm_setup():
    dset = discrimination_set(CHANNEL)
    return dset, build_povm(dset.phi_tilde, CHANNEL)


def test_phi_states_are_unit_vectors_on_expected_indices():
    phi = phi_states(CHANNEL)
    assert [state.num_qubits for state in phi] == [4, 4, 4, 4]
    assert phi[0].amps[0] == pytest.approx(0.8) and phi[0].amps[15] == pytest.approx(0.6)
    assert phi[1].amps[15] == pytest.approx(-0.6)
    assert phi[2].amps[14] == pytest.approx(0.8) and phi[2].amps[1] == pytest.approx(0.6)
    assert phi[3].amps[1] == pytest.approx(-0.6)
    for state in phi:
        assert state.norm() == pytest.approx(1.0)


def test_gram_matrix_has_block_form():
    dset = discrimination_set(CHANNEL)
    assert np.allclose(dset.gram, expected_gram(CHANNEL), atol=1e-12)
    assert dset.gram[0, 1] == pytest.approx(0.28)
    assert dset.gram[0, 2] == pytest.approx(0.0)


def test_reciprocals_match_worked_values():
    phi_tilde = reciprocal_states(phi_states(CHANNEL))
    assert phi_tilde[0].amps[0] == pytest.approx(0.625)
    assert phi_tilde[0].amps[15] == pytest.approx(0.8333333333)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("b", [0.2, 0.6, 1 / np.sqrt(2)])
def test_pseudoinverse_reciprocals_equal_closed_form(n, b):
    channel = ChannelSpec.from_b(b, n)
    numeric = reciprocal_states(phi_states(channel))
    closed = closed_form_reciprocals(channel)
    for u, v in zip(numeric, closed):
        assert np.allclose(u.amps, v.amps, atol=1e-9)


def test_biorthogonality(povm_setup):
    dset, _ = povm_setup
    assert dset.biorthogonality_residual() < 1e-10


def test_zero_b_channel_is_linearly_dependent():
    channel = ChannelSpec(a=1.0, b=0.0, n=2)
    with pytest.raises(LinearDependenceError):
        discrimination_set(channel)
    with pytest.raises(LinearDependenceError):
        closed_form_reciprocals(channel)
    with pytest.raises(LinearDependenceError):
        build_povm(closed_form_reciprocals(ChannelSpec(a=0.8, b=0.6, n=2)), channel)


def test_povm_weight_and_completeness(povm_setup):
    dset, povm = povm_setup
    assert povm.p == pytest.approx(0.72)
    assert povm.completeness_residual() < 1e-10
    assert min(povm.min_eigenvalues()) > -1e-10
    assert conclusive_probability(povm, dset) == pytest.approx(0.72)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_inconclusive_rank_partial_channel(n):
    channel = ChannelSpec.from_b(0.6, n)
    povm = build_povm(discrimination_set(channel).phi_tilde, channel)
    assert numerical_rank(povm.elements[0]) == 2 ** (n + 1) - 2
    assert len(inconclusive_decomposition(povm)) == 2 ** (n + 1) - 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inconclusive_rank_maximally_entangled_channel(n):
    channel = ChannelSpec.from_b(1 / np.sqrt(2), n)
    povm = build_povm(discrimination_set(channel).phi_tilde, channel)
    assert povm.p == pytest.approx(1.0)
    assert numerical_rank(povm.elements[0]) == 2 ** (n + 1) - 4


def test_inconclusive_decomposition_reassembles_pi0(povm_setup):
    _, povm = povm_setup
    pieces = inconclusive_decomposition(povm)
    rebuilt = sum(np.outer(piece.amps, piece.amps.conj()) for piece in pieces)
    assert np.allclose(rebuilt, povm.elements[0].matrix, atol=1e-10)


def test_naimark_isometry_is_isometric(povm_setup):
    dset, povm = povm_setup
    isometry, outcome_of_row = naimark_isometry(povm, dset)
    gram = isometry.matrix.conj().T @ isometry.matrix
    assert np.allclose(gram, np.eye(povm.dim), atol=1e-10)
    assert outcome_of_row[:4] == [1, 2, 3, 4]
    assert set(outcome_of_row[4:]) == {0}


def test_transform_reciprocals_requires_unitary():
    phi_tilde = closed_form_reciprocals(CHANNEL)
    with pytest.raises(ContractViolationError):
        transform_reciprocals(phi_tilde, Operator(np.eye(16)))


@pytest.mark.parametrize("logical_input", enumerate_state_family(2, 0.6, 0.8))
def test_transformed_set_stays_biorthogonal_with_same_gram(logical_input):
    channel = ChannelSpec(a=0.8, b=0.6, n=2)
    base = discrimination_set(channel)
    dset = transform_discrimination_set(base, u_prime(logical_input))
    assert dset.biorthogonality_residual() < 1e-10
    assert np.allclose(dset.gram, base.gram)


@pytest.mark.parametrize("logical_input", enumerate_state_family(2, 0.6, 0.8))
def test_each_conclusive_outcome_has_quarter_weight(logical_input):
    channel = ChannelSpec(a=0.8, b=0.6, n=2)
    dset = transform_discrimination_set(discrimination_set(channel), u_prime(logical_input))
    povm = build_povm(dset.phi_tilde, channel)
    system = assemble_system(prepare_chi_st(logical_input), prepare_ghz(channel))
    probabilities, branches = outcome_distribution(system, povm, dset)
    assert probabilities[0] == pytest.approx(0.28)
    assert np.allclose(probabilities[1:], 0.18)
    assert branches[0] is None


def test_measure_corrected_branch_recovers_input():
    logical_input = LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1))
    dset = transform_discrimination_set(discrimination_set(CHANNEL), u_prime(logical_input))
    povm = build_povm(dset.phi_tilde, CHANNEL)
    chi = prepare_chi_st(logical_input)
    system = assemble_system(chi, prepare_ghz(CHANNEL))
    rng = np.random.default_rng(11)
    seen = set()
    for _ in range(40):
        outcome = measure(system, povm, dset, rng)
        if not outcome.conclusive:
            assert outcome.bob_state is None
            continue
        seen.add(outcome.index)
        m1, m2 = (outcome.index - 1) >> 1, (outcome.index - 1) & 1
        corrected = apply_pauli_string(outcome.bob_state, build_Tprime(logical_input, m1, m2))
        assert fidelity(corrected, chi) == pytest.approx(1.0, abs=1e-10)
    assert seen, "expected at least one conclusive outcome in 40 draws"


def test_measure_is_reproducible_for_a_seed(povm_setup):
    dset, povm = povm_setup
    system = assemble_system(prepare_chi_st(LogicalInput.chi0(0.6, 0.8, 3)), prepare_ghz(CHANNEL))
    indices = [measure(system, povm, dset, 5).index for _ in range(3)]
    assert len(set(indices)) == 1


def test_audit_povm_reports_small_residuals():
    logical_input = LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1))
    audit, _, povm = audit_povm(CHANNEL, logical_input)
    assert audit.p_closed_form == pytest.approx(audit.p_frame_operator)
    assert audit.gram_residual < 1e-12
    assert audit.closed_form_residual < 1e-9
    assert audit.naimark_residual < 1e-9
    assert audit.inconclusive_rank == 14
    assert audit.element_ranks == [14, 1, 1, 1, 1]
    assert not audit.orthogonal_ensemble
    metrics = [row["metric"] for row in audit.as_rows()]
    assert "gram_row_4" in metrics and "p_frame_operator" in metrics


def test_audit_povm_rejects_mismatched_input():
    with pytest.raises(ContractViolationError):
        audit_povm(CHANNEL, LogicalInput.chi0(0.6, 0.8, 2))


def test_random_channels_give_valid_povms():
    rng = np.random.default_rng(77)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        channel = ChannelSpec.from_b(float(rng.uniform(0.05, 1 / np.sqrt(2))), n)
        dset = discrimination_set(channel)
        povm = build_povm(dset.phi_tilde, channel)
        assert dset.biorthogonality_residual() < 1e-10
        assert povm.completeness_residual() < 1e-10
        assert min(povm.min_eigenvalues()) > -1e-10

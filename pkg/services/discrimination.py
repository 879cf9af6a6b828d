"""
Optimal unambiguous discrimination of the four GHZ-branch states on Alice's n+1 qubits.

Expanding χ ⊗ GHZ over Alice's and Bob's qubits gives four terms ½ φᵢ ⊗ (Bob branch i). For a
partially entangled channel (a > b) the φᵢ are not orthogonal, so Alice cannot tell the branches
apart with a projective measurement. This module builds the equal-probability POVM from the
reciprocal states φ̃ᵢ = (ΦΦ†)⁺ φᵢ, whose conclusive outcomes never misidentify a branch.

Functional Overview:
- Builds the four targets φᵢ for a channel and their Gram matrix, and checks the Gram matrix
  against the block form a²·M₁ + b²·M₂.
- Computes the reciprocal states through the pseudoinverse of ΦΦ†, and independently from the
  closed-form expressions, so the two routes can be compared.
- Transforms targets and reciprocals by U′ = U_st ⊗ I for Pauli-frame inputs without recomputing
  any pseudoinverse.
- Builds the POVM {Π₀…Π₄} with the common weight p = 2b², cross-checked against 1/λ_max of the
  frame operator, and verifies positivity, completeness and the rank of each element.
- Computes outcome probabilities ⟨ψ|Πₖ ⊗ I|ψ⟩ on a (2n+1)-qubit system and samples one outcome.
  On a conclusive outcome, Bob's state is the contraction of ⟨φ̃ₖ| against Alice's indices.
- Splits Π₀ into rank-1 pieces and assembles the Naimark isometry of the whole POVM. The
  isometry serves as an independent check of the Born-rule probabilities.
- Produces the audit report behind the `povm-audit` command.

Components:
- DiscriminationSet, PovmSet, MeasurementOutcome, PovmAudit: value types.
- phi_states, reciprocal_states, closed_form_reciprocals, transform_reciprocals.
- build_povm, conclusive_probability, outcome_distribution, measure.
- inconclusive_decomposition, naimark_isometry, audit_povm.

Usage:
Can be used as a standalone module (`python -m services.discrimination`) to log an audit of
the channel configured in config/parameters.yml. The protocol service drives it for every
teleportation run.
"""

# Standard library imports
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

# Related third-party imports
import numpy as np

# Local application/library specific imports
from config.logging_config import setup_global_logger
from services.states import (
    ChannelSpec,
    LogicalInput,
    assemble_system,
    build_Ust,
    prepare_chi_st,
    prepare_ghz,
)
from services.tensor_core import (
    DEFAULT_RANK_TOLERANCE,
    PSD_TOLERANCE,
    Operator,
    StateVector,
    herm_eig,
    identity,
    inner,
    kron,
    numerical_rank,
    outer,
    pinv_psd,
)
from utils.errors import (
    ContractViolationError,
    InternalConsistencyError,
    LinearDependenceError,
    PovmConstructionError,
)
from utils.utils import SeedLike, make_rng, read_yaml_file

DEFAULT_TOLERANCE = 1e-10
DEFAULT_PROBABILITY_TOLERANCE = 1e-8
UNIFORM_PRIORS = (0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class DiscriminationSet:
    """The four targets φᵢ (dimension 2^{n+1}), their unnormalized reciprocals, the priors and
    the Gram matrix d_ij = ⟨φᵢ|φⱼ⟩."""

    phi: Tuple[StateVector, ...]
    phi_tilde: Tuple[StateVector, ...]
    priors: Tuple[float, ...] = UNIFORM_PRIORS
    gram: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.phi) != 4 or len(self.phi_tilde) != 4:
            raise ContractViolationError("A discrimination set holds exactly four targets")
        if len(self.priors) != 4 or abs(sum(self.priors) - 1.0) > DEFAULT_TOLERANCE:
            raise ContractViolationError(f"Priors {self.priors} must be four values summing to 1")
        if self.gram is None:
            object.__setattr__(self, "gram", gram_matrix(self.phi))

    def biorthogonality_residual(self) -> float:
        """max |⟨φᵢ|φ̃ₖ⟩ − δ_ik|."""
        overlaps = np.array([[inner(p, q) for q in self.phi_tilde] for p in self.phi])
        return float(np.max(np.abs(overlaps - np.eye(4))))


@dataclass(frozen=True)
class PovmSet:
    """POVM elements Π₀…Π₄ on Alice's n+1 qubits and the common conclusive weight p."""

    elements: Tuple[Operator, ...]
    p: float

    @property
    def dim(self) -> int:
        return self.elements[0].rows

    def completeness_residual(self) -> float:
        total = sum(element.matrix for element in self.elements)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def min_eigenvalues(self) -> List[float]:
        return [float(herm_eig(element)[0][-1]) for element in self.elements]


@dataclass(frozen=True)
class MeasurementOutcome:
    """One POVM outcome. Index 0 is inconclusive and carries no Bob state."""

    index: int
    probability: float
    bob_state: Optional[StateVector] = None

    @property
    def conclusive(self) -> bool:
        return self.index >= 1


@dataclass(frozen=True)
class PovmAudit:
    """Numbers reported by the povm-audit command."""

    n: int
    a: float
    b: float
    gram: np.ndarray
    gram_residual: float
    biorthogonality_residual: float
    closed_form_residual: float
    p_closed_form: float
    p_frame_operator: float
    completeness_residual: float
    min_eigenvalues: List[float]
    element_ranks: List[int]
    inconclusive_rank: int
    naimark_residual: float
    conclusive_probability: float
    orthogonal_ensemble: bool

    def as_rows(self) -> List[Dict[str, object]]:
        rows = [
            {"metric": "n", "value": self.n},
            {"metric": "a", "value": self.a},
            {"metric": "b", "value": self.b},
            {"metric": "gram_residual", "value": self.gram_residual},
            {"metric": "biorthogonality_residual", "value": self.biorthogonality_residual},
            {"metric": "closed_form_residual", "value": self.closed_form_residual},
            {"metric": "p_closed_form", "value": self.p_closed_form},
            {"metric": "p_frame_operator", "value": self.p_frame_operator},
            {"metric": "completeness_residual", "value": self.completeness_residual},
            {"metric": "min_eigenvalue", "value": min(self.min_eigenvalues)},
            {"metric": "inconclusive_rank", "value": self.inconclusive_rank},
            {"metric": "naimark_residual", "value": self.naimark_residual},
            {"metric": "conclusive_probability", "value": self.conclusive_probability},
            {"metric": "orthogonal_ensemble", "value": self.orthogonal_ensemble},
        ]
        for i, row in enumerate(np.real(self.gram)):
            rows.append({"metric": f"gram_row_{i + 1}", "value": [float(v) for v in row]})
        return rows


def phi_states(channel: ChannelSpec) -> Tuple[StateVector, ...]:
    """φ₁,₂ = a|0^{n+1}⟩ ± b|1^{n+1}⟩ and φ₃,₄ = a|1ⁿ0⟩ ± b|0ⁿ1⟩."""
    dim = 2 ** (channel.n + 1)
    zeros, ones = 0, dim - 1
    ones_then_zero, zeros_then_one = dim - 2, 1

    def vector(first: int, second: int, sign: int) -> StateVector:
        amps = np.zeros(dim, dtype=complex)
        amps[first] = channel.a
        amps[second] = sign * channel.b
        return StateVector(amps)

    return (
        vector(zeros, ones, +1),
        vector(zeros, ones, -1),
        vector(ones_then_zero, zeros_then_one, +1),
        vector(ones_then_zero, zeros_then_one, -1),
    )


def gram_matrix(phi: Sequence[StateVector]) -> np.ndarray:
    return np.array([[inner(u, v) for v in phi] for u in phi])


def expected_gram(channel: ChannelSpec) -> np.ndarray:
    """a²·M₁ + b²·M₂ with the two 2x2-block matrices of the pairwise overlaps."""
    block_plus = np.array([[1, 1], [1, 1]], dtype=float)
    block_minus = np.array([[1, -1], [-1, 1]], dtype=float)
    zeros = np.zeros((2, 2))
    m1 = np.block([[block_plus, zeros], [zeros, block_plus]])
    m2 = np.block([[block_minus, zeros], [zeros, block_minus]])
    return channel.a**2 * m1 + channel.b**2 * m2


def reciprocal_states(
    phi: Sequence[StateVector], rank_tolerance: float = DEFAULT_RANK_TOLERANCE
) -> Tuple[StateVector, ...]:
    """φ̃ᵢ = (ΦΦ†)⁺ φᵢ.

    Raises:
        LinearDependenceError: If the φᵢ do not span four dimensions (b = 0).
    """
    columns = np.column_stack([state.amps for state in phi])
    frame = Operator(columns @ columns.conj().T, hermitian=True)
    rank = numerical_rank(frame, rank_tolerance)
    if rank < len(phi):
        raise LinearDependenceError(
            f"Discrimination targets span only {rank} of {len(phi)} dimensions; "
            "the channel needs b > 0"
        )
    frame_pinv = pinv_psd(frame, rank_tolerance)
    return tuple(frame_pinv @ state for state in phi)


def closed_form_reciprocals(channel: ChannelSpec) -> Tuple[StateVector, ...]:
    """φ̃₁,₂ = (1/2a)|0^{n+1}⟩ ± (1/2b)|1^{n+1}⟩, φ̃₃,₄ = (1/2a)|1ⁿ0⟩ ± (1/2b)|0ⁿ1⟩.

    Raises:
        LinearDependenceError: If b = 0.
    """
    if channel.b <= 0.0:
        raise LinearDependenceError("Closed-form reciprocals need b > 0")
    dim = 2 ** (channel.n + 1)
    inv_a, inv_b = 1.0 / (2.0 * channel.a), 1.0 / (2.0 * channel.b)
    pairs = ((0, dim - 1, +1), (0, dim - 1, -1), (dim - 2, 1, +1), (dim - 2, 1, -1))
    result = []
    for first, second, sign in pairs:
        amps = np.zeros(dim, dtype=complex)
        amps[first] = inv_a
        amps[second] = sign * inv_b
        result.append(StateVector(amps))
    return tuple(result)


def transform_reciprocals(
    phi_tilde: Sequence[StateVector], u_prime: Operator
) -> Tuple[StateVector, ...]:
    """φ̃ᵢ′ = U′φ̃ᵢ, biorthogonal to φᵢ′ = U′φᵢ because U′ is unitary.

    Raises:
        ContractViolationError: If U′ is not flagged unitary.
    """
    if not u_prime.unitary:
        raise ContractViolationError("transform_reciprocals requires a unitary U′")
    return tuple(u_prime @ state for state in phi_tilde)


def discrimination_set(
    channel: ChannelSpec,
    priors: Tuple[float, ...] = UNIFORM_PRIORS,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> DiscriminationSet:
    """Targets and pseudoinverse reciprocals for the χ₀ frame."""
    phi = phi_states(channel)
    return DiscriminationSet(
        phi=phi, phi_tilde=reciprocal_states(phi, rank_tolerance), priors=priors
    )


def transform_discrimination_set(dset: DiscriminationSet, u_prime: Operator) -> DiscriminationSet:
    """Applies U′ to targets and reciprocals alike (the Gram matrix is invariant)."""
    return DiscriminationSet(
        phi=transform_reciprocals(dset.phi, u_prime),
        phi_tilde=transform_reciprocals(dset.phi_tilde, u_prime),
        priors=dset.priors,
        gram=dset.gram,
    )


def u_prime(logical_input: LogicalInput) -> Operator:
    """U′ = U_st ⊗ I on Alice's n+1 qubits."""
    return kron(build_Ust(logical_input).materialize(), identity(2))


def build_povm(
    phi_tilde: Sequence[StateVector],
    channel: ChannelSpec,
    tolerance: float = DEFAULT_TOLERANCE,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> PovmSet:
    """Equal-probability POVM Πᵢ = p·φ̃ᵢφ̃ᵢ†, Π₀ = I − ΣΠᵢ with p = 2b².

    Raises:
        LinearDependenceError: If b = 0.
        InternalConsistencyError: If 2b² and 1/λ_max(S) disagree beyond tolerance.
        PovmConstructionError: If an element is not PSD, the set is incomplete, or a conclusive
            element is not rank 1.
    """
    if channel.b <= 0.0:
        raise LinearDependenceError("The POVM needs a channel with b > 0")

    frame_operator = Operator(sum(outer(state).matrix for state in phi_tilde), hermitian=True)
    lambda_max = herm_eig(frame_operator)[0][0]
    p = 2.0 * channel.b**2
    p_frame = 1.0 / lambda_max
    if abs(p - p_frame) > tolerance:
        raise InternalConsistencyError(
            f"Weight 2b^2 = {p!r} disagrees with 1/lambda_max(S) = {p_frame!r}"
        )

    conclusive = [Operator(p * outer(state).matrix, hermitian=True) for state in phi_tilde]
    dim = conclusive[0].rows
    inconclusive = Operator(
        np.eye(dim) - sum(element.matrix for element in conclusive), hermitian=True
    )
    povm = PovmSet(elements=(inconclusive, *conclusive), p=p)

    min_eigenvalues = povm.min_eigenvalues()
    if min(min_eigenvalues) < -tolerance:
        raise PovmConstructionError(
            f"POVM element with eigenvalue {min(min_eigenvalues):.3e}; reciprocals are broken"
        )
    if povm.completeness_residual() > tolerance:
        raise PovmConstructionError(
            f"POVM elements sum to I only within {povm.completeness_residual():.3e}"
        )
    ranks = [numerical_rank(element, rank_tolerance) for element in conclusive]
    if any(rank != 1 for rank in ranks):
        raise PovmConstructionError(f"Conclusive elements must be rank 1, got ranks {ranks}")

    logging.debug(
        f"POVM built on {dim} dimensions: p = {p:.6f}, min eigenvalue {min(min_eigenvalues):.2e}"
    )
    return povm


def conclusive_probability(povm: PovmSet, dset: DiscriminationSet) -> float:
    """P_con = Σ ηᵢ⟨φᵢ|Πᵢ|φᵢ⟩ (equals 2b² for uniform priors)."""
    total = 0.0
    for prior, state, element in zip(dset.priors, dset.phi, povm.elements[1:]):
        total += prior * float(np.real(np.vdot(state.amps, element.matrix @ state.amps)))
    return total


def _alice_bob_matrix(system: StateVector, alice_dim: int) -> np.ndarray:
    if system.dim % alice_dim:
        raise ContractViolationError(
            f"System dimension {system.dim} is not divisible by Alice's {alice_dim}"
        )
    return system.amps.reshape(alice_dim, system.dim // alice_dim)


def outcome_distribution(
    system: StateVector,
    povm: PovmSet,
    dset: DiscriminationSet,
    probability_tolerance: float = DEFAULT_PROBABILITY_TOLERANCE,
) -> Tuple[np.ndarray, List[Optional[StateVector]]]:
    """Born-rule probabilities of Π₀…Π₄ on Alice's qubits and Bob's normalized branch states.

    The POVM acts on the leading n+1 qubits of the system.

    Returns:
        Tuple[np.ndarray, List[Optional[StateVector]]]: Five probabilities, and for each
        conclusive index the contraction of ⟨φ̃ₖ| against Alice's indices (None at index 0 and
        for outcomes of probability zero).

    Raises:
        InternalConsistencyError: If the probabilities do not sum to 1 within tolerance.
    """
    amplitudes = _alice_bob_matrix(system, povm.dim)

    probabilities = np.empty(5)
    inconclusive = povm.elements[0].matrix
    probabilities[0] = np.real(np.vdot(amplitudes, inconclusive @ amplitudes))

    branches: List[Optional[StateVector]] = [None]
    for k, reciprocal in enumerate(dset.phi_tilde, start=1):
        contracted = reciprocal.amps.conj() @ amplitudes
        weight = float(np.real(np.vdot(contracted, contracted)))
        probabilities[k] = povm.p * weight
        branches.append(StateVector(contracted).normalize() if weight > 0.0 else None)

    total = probabilities.sum()
    if abs(total - 1.0) > probability_tolerance:
        raise InternalConsistencyError(f"Outcome probabilities sum to {total!r}, expected 1")
    probabilities = np.clip(probabilities, 0.0, None)
    return probabilities / probabilities.sum(), branches


def sample_outcome(
    probabilities: np.ndarray, branches: List[Optional[StateVector]], rng: np.random.Generator
) -> MeasurementOutcome:
    index = int(rng.choice(len(probabilities), p=probabilities))
    return MeasurementOutcome(
        index=index, probability=float(probabilities[index]), bob_state=branches[index]
    )


def measure(
    system: StateVector,
    povm: PovmSet,
    dset: DiscriminationSet,
    rng_seed: SeedLike = None,
    probability_tolerance: float = DEFAULT_PROBABILITY_TOLERANCE,
) -> MeasurementOutcome:
    """Samples one POVM outcome on Alice's qubits of a (2n+1)-qubit system.

    Args:
        system (StateVector): Unit state, Alice's n+1 qubits leading.
        povm (PovmSet): The discrimination POVM.
        dset (DiscriminationSet): Supplies the reciprocals used for Bob's branch.
        rng_seed (int or Generator): Explicit seed or an existing Generator.

    Returns:
        MeasurementOutcome: Index, its probability, and Bob's state on a conclusive outcome.
    """
    probabilities, branches = outcome_distribution(system, povm, dset, probability_tolerance)
    return sample_outcome(probabilities, branches, make_rng(rng_seed))


def inconclusive_decomposition(
    povm: PovmSet, rank_tolerance: float = DEFAULT_RANK_TOLERANCE
) -> List[StateVector]:
    """Rank-1 pieces of Π₀ from its eigendecomposition: Π₀ = Σ vⱼvⱼ† with vⱼ = √λⱼ eⱼ."""
    eigenvalues, vectors = herm_eig(povm.elements[0])
    if not eigenvalues.size or eigenvalues[0] <= PSD_TOLERANCE:
        return []
    keep = eigenvalues > rank_tolerance * eigenvalues[0]
    return [
        StateVector(np.sqrt(value) * vectors.matrix[:, j])
        for j, value in enumerate(eigenvalues)
        if keep[j]
    ]


def naimark_isometry(
    povm: PovmSet, dset: DiscriminationSet, rank_tolerance: float = DEFAULT_RANK_TOLERANCE
) -> Tuple[Operator, List[int]]:
    """Isometry V = Σⱼ |j⟩⟨vⱼ| over all rank-1 pieces of the POVM.

    Rows 0…3 carry √p⟨φ̃ₖ|, the remaining rows the pieces of Π₀. A projective measurement of
    the row index on Vψ reproduces ⟨ψ|Πₖ|ψ⟩.

    Returns:
        Tuple[Operator, List[int]]: V (V†V = I) and the POVM index of each row.
    """
    rows = [np.sqrt(povm.p) * state.amps.conj() for state in dset.phi_tilde]
    outcome_of_row = [1, 2, 3, 4]
    for piece in inconclusive_decomposition(povm, rank_tolerance):
        rows.append(piece.amps.conj())
        outcome_of_row.append(0)
    return Operator(np.array(rows)), outcome_of_row


def naimark_probabilities(
    isometry: Operator, outcome_of_row: List[int], alice_state: StateVector
) -> np.ndarray:
    """Outcome probabilities of a pure Alice state through the dilation."""
    weights = np.abs(isometry.matrix @ alice_state.amps) ** 2
    probabilities = np.zeros(5)
    np.add.at(probabilities, outcome_of_row, weights)
    return probabilities


def audit_povm(
    channel: ChannelSpec,
    logical_input: LogicalInput = None,
    tolerance: float = DEFAULT_TOLERANCE,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
    probability_tolerance: float = DEFAULT_PROBABILITY_TOLERANCE,
) -> Tuple[PovmAudit, DiscriminationSet, PovmSet]:
    """Runs the full construction pipeline for a channel (and optionally a Pauli frame) and
    collects every residual the povm-audit command reports.

    Raises:
        LinearDependenceError: If b = 0.
    """
    base = discrimination_set(channel, rank_tolerance=rank_tolerance)
    closed_form = closed_form_reciprocals(channel)
    closed_form_residual = max(
        float(np.max(np.abs(u.amps - v.amps))) for u, v in zip(base.phi_tilde, closed_form)
    )

    dset = base
    if logical_input is not None:
        if logical_input.n != channel.n:
            raise ContractViolationError("Input and channel disagree on n")
        dset = transform_discrimination_set(base, u_prime(logical_input))

    povm = build_povm(dset.phi_tilde, channel, tolerance, rank_tolerance)
    frame_operator = Operator(sum(outer(state).matrix for state in dset.phi_tilde), hermitian=True)
    p_frame = float(1.0 / herm_eig(frame_operator)[0][0])

    isometry, outcome_of_row = naimark_isometry(povm, dset, rank_tolerance)
    gram_v = isometry.matrix.conj().T @ isometry.matrix
    naimark_residual = float(np.max(np.abs(gram_v - np.eye(povm.dim))))
    if logical_input is not None:
        system = assemble_system(prepare_chi_st(logical_input), prepare_ghz(channel))
        expected, _ = outcome_distribution(system, povm, dset, probability_tolerance)
        alice = _alice_bob_matrix(system, povm.dim)
        dilated = np.zeros(5)
        for column in alice.T:
            dilated += naimark_probabilities(isometry, outcome_of_row, StateVector(column))
        naimark_residual = max(naimark_residual, float(np.max(np.abs(dilated - expected))))

    audit = PovmAudit(
        n=channel.n,
        a=channel.a,
        b=channel.b,
        gram=dset.gram,
        gram_residual=float(np.max(np.abs(dset.gram - expected_gram(channel)))),
        biorthogonality_residual=dset.biorthogonality_residual(),
        closed_form_residual=closed_form_residual,
        p_closed_form=povm.p,
        p_frame_operator=p_frame,
        completeness_residual=povm.completeness_residual(),
        min_eigenvalues=povm.min_eigenvalues(),
        element_ranks=[numerical_rank(e, rank_tolerance) for e in povm.elements],
        inconclusive_rank=numerical_rank(povm.elements[0], rank_tolerance),
        naimark_residual=naimark_residual,
        conclusive_probability=conclusive_probability(povm, dset),
        orthogonal_ensemble=channel.maximally_entangled,
    )
    return audit, dset, povm


def main():
    """Demonstrates the POVM construction for the channel of the worked 3-qubit example.

    Steps:
    1. Configuration setup, including logging.
    2. Reads tolerances from the YAML configuration file.
    3. Audits the POVM for a = 0.8, b = 0.6 and the frame s = 1, t = 101.
    4. Logs the weight from both routes, the residuals and the rank of Π₀.
    """
    logging.basicConfig(level=logging.INFO)
    setup_global_logger()

    all_parameters = read_yaml_file("config/parameters.yml")
    config = all_parameters["main_config"]

    channel = ChannelSpec(a=0.8, b=0.6, n=3)
    logical_input = LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1))
    audit, _, _ = audit_povm(channel, logical_input, **config["discrimination"])
    logging.info(
        f"POVM for a={channel.a}, b={channel.b}, n={channel.n}: "
        f"p = {audit.p_closed_form:.6f} (2b^2) / {audit.p_frame_operator:.6f} (1/lambda_max), "
        f"biorthogonality residual {audit.biorthogonality_residual:.2e}, "
        f"rank(Pi_0) = {audit.inconclusive_rank}"
    )


if __name__ == "__main__":
    main()

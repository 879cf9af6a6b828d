"""
End-to-end teleportation runs: the GHZ-channel scheme with POVM discrimination, the standard
Bell-basis scheme, the repetition-code circuits, and the noise models used to compare keeping
the logical state encoded against decoding it for a bare teleport.

Functional Overview:
- `ProposedTeleporter` prepares the U′-transformed POVM of one channel and Pauli frame once and
  then runs Alice's measure-and-retry loop as often as needed. A conclusive outcome k is sent as
  the bits (m1, m2) together with the frame bits (s, t). Bob applies T′ = U_st·T to his n
  qubits.
- `bell_teleport_qubit` teleports one qubit of a register through an ideal EPR pair. It is the
  building block of `run_bell` and of the Bell-basis hops in the network service.
- Bit-flip noise on the n rails of a received logical state, and the receiver's majority-vote
  recovery.
- The n−1 CNOT repetition encoder and decoder. `pathway_b_trial` injects gate failures into
  the decode / bare teleport / re-encode pathway and reports whether decoding corrupted the
  logical amplitudes.
- Closed-form rates (majority-vote logical error, first-order and exact decode failure) and
  their Monte Carlo counterparts.
- `run_batches` splits a Monte Carlo job into fixed-size batches. Each batch gets the seed
  base_seed + batch_index, and the counts are merged by summation. Optionally the batches run
  on a multiprocessing pool.

Components:
- ClassicalMessage, BellMessage, TeleportResult, NoiseModel: value types.
- ProposedTeleporter, run_proposed, run_bell, bell_teleport_qubit.
- encode_repetition, decode_repetition, apply_bitflip_noise, majority_recover.
- pathway_b_trial, pathway_b_failure_rate, logical_error_rate, bitflip_mc.
- teleport_counts, bitflip_failures, pathway_b_failures, run_batches.

Usage:
Run directly (`python -m services.protocol`) to teleport the 3-qubit worked example a few
times and log the error-rate comparison for the configured parameters.
"""

# Standard library imports
import logging
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
from typing import Callable, List, Optional, Sequence, Tuple, Union

# Related third-party imports
import numpy as np
from scipy.stats import binom
from tqdm import tqdm

# Local application/library specific imports
from config.logging_config import setup_global_logger
from services.discrimination import (
    DEFAULT_PROBABILITY_TOLERANCE,
    DEFAULT_TOLERANCE,
    build_povm,
    discrimination_set,
    outcome_distribution,
    transform_discrimination_set,
    u_prime,
)
from services.states import (
    PAULI_MATRICES,
    ChannelSpec,
    LogicalInput,
    apply_pauli_string,
    assemble_system,
    build_Tprime,
    prepare_chi_st,
    prepare_ghz,
)
from services.tensor_core import (
    DEFAULT_MAX_QUBITS,
    DEFAULT_RANK_TOLERANCE,
    StateVector,
    fidelity,
)
from utils.errors import ContractViolationError
from utils.utils import SeedLike, derive_seed, make_rng, read_yaml_file

DEFAULT_MAX_ATTEMPTS = 1000
DEFAULT_POVM_TWO_QUBIT_COST = 2
DEFAULT_BATCH_SIZE = 100_000
CORRUPTION_THRESHOLD = 1.0 - 1e-9
MAX_PATHWAY_B_GATE_ERROR = 0.1
BITFLIP_CHUNK = 1_000_000

SINGLE_QUBIT_PAULIS = {
    "X": PAULI_MATRICES["X"],
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": PAULI_MATRICES["Z"],
}
GATE_ERROR_CHANNELS = {
    "uniform_pauli": ("X", "Y", "Z"),
    "bit_flip": ("X",),
}

# Column layout of the arrays returned by teleport_counts
TELEPORT_COUNT_FIELDS = (
    "runs",
    "conclusive",
    "attempts",
    "outcome_1",
    "outcome_2",
    "outcome_3",
    "outcome_4",
    "fidelity_sum",
    "fidelity_sq_sum",
    "fidelity_min",
)


@dataclass(frozen=True)
class ClassicalMessage:
    """What Alice sends after a conclusive GHZ-channel measurement: the outcome bits (m1, m2)
    and the frame bits (s, t), n + 3 bits in total."""

    m1: int
    m2: int
    s: int
    t: Tuple[int, ...]

    @property
    def payload_bits(self) -> int:
        return 3 + len(self.t)

    def bits(self) -> Tuple[int, ...]:
        return (self.m1, self.m2, self.s, *self.t)


@dataclass(frozen=True)
class BellMessage:
    """Two bits per qubit teleported through an EPR pair: m1 selects the Z correction, m2 the
    X correction."""

    m1: Tuple[int, ...]
    m2: Tuple[int, ...]

    @property
    def payload_bits(self) -> int:
        return len(self.m1) + len(self.m2)


@dataclass(frozen=True)
class TeleportResult:
    conclusive: bool
    attempts: int
    message: Optional[Union[ClassicalMessage, BellMessage]]
    bob_final: Optional[StateVector]
    fidelity: float
    gate_cost: int
    outcome: int = 0


@dataclass(frozen=True)
class NoiseModel:
    """Per-rail bit-flip probability and per-two-qubit-gate failure probability."""

    p_bitflip: float = 0.0
    p_gate: float = 0.0

    def __post_init__(self):
        for name in ("p_bitflip", "p_gate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ContractViolationError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def noiseless(self) -> bool:
        return self.p_bitflip == 0.0 and self.p_gate == 0.0


NOISELESS = NoiseModel()


def outcome_to_bits(k: int) -> Tuple[int, int]:
    """POVM outcome 1…4 to (m1, m2): 1→00, 2→01, 3→10, 4→11."""
    if k not in (1, 2, 3, 4):
        raise ContractViolationError(f"Only conclusive outcomes 1..4 carry bits, got {k!r}")
    return (k - 1) >> 1, (k - 1) & 1


def bits_to_outcome(m1: int, m2: int) -> int:
    return 1 + 2 * m1 + m2


def _apply_single(tensor: np.ndarray, matrix: np.ndarray, qubit: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [qubit])), 0, qubit)


def _apply_cnot(tensor: np.ndarray, control: int, target: int) -> np.ndarray:
    tensor = tensor.copy()
    index = [slice(None)] * tensor.ndim
    index[control] = 1
    index = tuple(index)
    target_axis = target if target < control else target - 1
    tensor[index] = np.flip(tensor[index].copy(), axis=target_axis)
    return tensor


def _as_tensor(state: StateVector) -> np.ndarray:
    return state.amps.reshape([2] * state.num_qubits)


def apply_bitflip_noise(state: StateVector, p: float, rng: SeedLike = None) -> StateVector:
    """Flips each qubit independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ContractViolationError(f"Bit-flip probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return state
    flips = make_rng(rng).random(state.num_qubits) < p
    if not flips.any():
        return state
    tensor = _as_tensor(state)
    for qubit in np.flatnonzero(flips):
        tensor = np.flip(tensor, axis=int(qubit))
    return StateVector(tensor.reshape(-1))


def majority_recover(state: StateVector, logical_input: LogicalInput) -> StateVector:
    """Repetition-code recovery for a state of the frame α|t⟩ ± β|t′⟩ hit by rail bit-flips.

    The syndrome is the support index XOR t, which equals the flip pattern or its complement;
    the lighter of the two is undone.
    """
    n = logical_input.n
    if state.num_qubits != n:
        raise ContractViolationError(f"Recovery for {n} rails got {state.num_qubits} qubits")
    support = int(np.argmax(np.abs(state.amps)))
    frame = int("".join(map(str, logical_input.t)), 2)
    syndrome = support ^ frame
    if 2 * bin(syndrome).count("1") > n:
        syndrome ^= (1 << n) - 1
    if not syndrome:
        return state
    tensor = _as_tensor(state)
    for qubit in range(n):
        if syndrome >> (n - 1 - qubit) & 1:
            tensor = np.flip(tensor, axis=qubit)
    return StateVector(tensor.reshape(-1))


class ProposedTeleporter:
    """Teleports n-qubit states of one Pauli frame over a fixed partially entangled GHZ channel.

    The discrimination set, POVM and, for the frame's own input, the outcome distribution and
    the corrected Bob states are computed once at construction.
    """

    def __init__(
        self,
        channel: ChannelSpec,
        logical_input: LogicalInput,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        povm_two_qubit_cost: int = DEFAULT_POVM_TWO_QUBIT_COST,
        repetition_recovery: bool = True,
        max_qubits: int = DEFAULT_MAX_QUBITS,
        rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
        tolerance: float = DEFAULT_TOLERANCE,
        probability_tolerance: float = DEFAULT_PROBABILITY_TOLERANCE,
    ):
        if channel.n != logical_input.n:
            raise ContractViolationError(
                f"Channel carries n={channel.n} qubits but the input has n={logical_input.n}"
            )
        if max_attempts < 1:
            raise ContractViolationError(f"max_attempts must be at least 1, got {max_attempts}")
        if povm_two_qubit_cost < 0:
            raise ContractViolationError("povm_two_qubit_cost must be nonnegative")

        self.channel = channel
        self.logical_input = logical_input
        self.max_attempts = int(max_attempts)
        self.gate_cost = (channel.n - 1) + int(povm_two_qubit_cost)
        self.repetition_recovery = repetition_recovery
        self.max_qubits = max_qubits
        self.probability_tolerance = probability_tolerance

        base = discrimination_set(channel, rank_tolerance=rank_tolerance)
        self.dset = transform_discrimination_set(base, u_prime(logical_input))
        self.povm = build_povm(self.dset.phi_tilde, channel, tolerance, rank_tolerance)
        self.target = prepare_chi_st(logical_input)
        self.ghz = prepare_ghz(channel)
        self.corrections = {
            k: build_Tprime(logical_input, *outcome_to_bits(k)) for k in (1, 2, 3, 4)
        }

        system = assemble_system(self.target, self.ghz, max_qubits)
        self.probabilities, branches = outcome_distribution(
            system, self.povm, self.dset, probability_tolerance
        )
        self.corrected = self._correct(branches)
        logging.debug(
            f"Teleporter for {logical_input.label()} over a={channel.a:.4f}, b={channel.b:.4f}: "
            f"outcome probabilities {np.round(self.probabilities, 6).tolist()}"
        )

    @property
    def conclusive_probability(self) -> float:
        return float(self.probabilities[1:].sum())

    def _correct(self, branches: List[Optional[StateVector]]) -> List[Optional[StateVector]]:
        corrected: List[Optional[StateVector]] = [None]
        for k in (1, 2, 3, 4):
            branch = branches[k]
            corrected.append(
                None if branch is None else apply_pauli_string(branch, self.corrections[k])
            )
        return corrected

    def _attempt_loop(
        self,
        probabilities: np.ndarray,
        corrected: List[Optional[StateVector]],
        reference: StateVector,
        noise: NoiseModel,
        rng: np.random.Generator,
    ) -> TeleportResult:
        for attempt in range(1, self.max_attempts + 1):
            k = int(rng.choice(5, p=probabilities))
            if k == 0:
                continue
            bob_final = corrected[k]
            if noise.p_bitflip > 0.0:
                bob_final = apply_bitflip_noise(bob_final, noise.p_bitflip, rng)
                if self.repetition_recovery:
                    bob_final = majority_recover(bob_final, self.logical_input)
            m1, m2 = outcome_to_bits(k)
            message = ClassicalMessage(
                m1=m1, m2=m2, s=self.logical_input.s, t=self.logical_input.t
            )
            return TeleportResult(
                conclusive=True,
                attempts=attempt,
                message=message,
                bob_final=bob_final,
                fidelity=min(fidelity(reference, bob_final), 1.0),
                gate_cost=self.gate_cost,
                outcome=k,
            )
        return TeleportResult(
            conclusive=False,
            attempts=self.max_attempts,
            message=None,
            bob_final=None,
            fidelity=0.0,
            gate_cost=self.gate_cost,
        )

    def run(self, rng: SeedLike = None, noise: NoiseModel = NOISELESS) -> TeleportResult:
        """One teleportation of the frame's own input state χ_st."""
        return self._attempt_loop(
            self.probabilities, self.corrected, self.target, noise, make_rng(rng)
        )

    def teleport_state(
        self, chi: StateVector, rng: SeedLike = None, noise: NoiseModel = NOISELESS
    ) -> TeleportResult:
        """Teleports an arbitrary n-qubit state with this frame's POVM and corrections.

        Fidelity is measured against the state handed in. States outside the frame's family
        arrive distorted, as they would physically.
        """
        if chi.num_qubits != self.channel.n:
            raise ContractViolationError(
                f"Teleporter carries {self.channel.n} qubits, got a {chi.num_qubits}-qubit state"
            )
        system = assemble_system(chi.normalize(), self.ghz, self.max_qubits)
        probabilities, branches = outcome_distribution(
            system, self.povm, self.dset, self.probability_tolerance
        )
        return self._attempt_loop(
            probabilities, self._correct(branches), chi, noise, make_rng(rng)
        )


def run_proposed(
    logical_input: LogicalInput,
    channel: ChannelSpec,
    noise: NoiseModel = NOISELESS,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    rng_seed: SeedLike = None,
    **teleporter_options,
) -> TeleportResult:
    """Teleports χ_st over the partially entangled channel, retrying inconclusive outcomes.

    Args:
        logical_input (LogicalInput): Amplitudes and Pauli frame of the n-qubit input.
        channel (ChannelSpec): The (n+1)-qubit GHZ resource.
        noise (NoiseModel): Rail bit-flips applied to Bob's corrected state.
        max_attempts (int): Cap on measurement rounds before giving up.
        rng_seed (int or Generator): Explicit seed or an existing Generator.
        **teleporter_options: Remaining ProposedTeleporter keyword arguments.

    Returns:
        TeleportResult: Inconclusive with attempts = max_attempts when the cap is reached.
    """
    teleporter = ProposedTeleporter(
        channel, logical_input, max_attempts=max_attempts, **teleporter_options
    )
    result = teleporter.run(rng_seed, noise)
    if not result.conclusive:
        logging.warning(
            f"No conclusive outcome in {max_attempts} attempts (P_con = "
            f"{teleporter.conclusive_probability:.4g})"
        )
    return result


def _bell_state(z: int, x: int) -> np.ndarray:
    """(|0,x⟩ + (−1)^z |1,1⊕x⟩)/√2 as a 2x2 array over (sender qubit, EPR half)."""
    state = np.zeros((2, 2))
    state[0, x] = 1.0
    state[1, 1 - x] = (-1.0) ** z
    return state / np.sqrt(2.0)


BELL_BASIS = {(z, x): _bell_state(z, x) for z in (0, 1) for x in (0, 1)}


def bell_teleport_qubit(
    state: StateVector, qubit: int, rng: SeedLike = None
) -> Tuple[StateVector, Tuple[int, int]]:
    """Teleports one qubit of a register through an ideal EPR pair.

    A Bell measurement on the qubit and Alice's EPR half yields (m1, m2). Bob's half then holds
    X^{m2}Z^{m1} applied to the original qubit, and he undoes it. The returned register has Bob's
    qubit in the sender qubit's position.

    Args:
        state (StateVector): Register of m qubits.
        qubit (int): 0-based position of the qubit to teleport.
        rng (int or Generator): Seed or Generator for the measurement.

    Returns:
        Tuple[StateVector, Tuple[int, int]]: Corrected register and the two classical bits.
    """
    m = state.num_qubits
    if not 0 <= qubit < m:
        raise ContractViolationError(f"Qubit {qubit} outside a {m}-qubit register")
    epr = np.eye(2, dtype=complex) / np.sqrt(2.0)
    full = np.multiply.outer(_as_tensor(state.normalize()), epr)

    outcomes = list(BELL_BASIS)
    branches = [
        np.tensordot(full, BELL_BASIS[key].conj(), axes=([qubit, m], [0, 1])) for key in outcomes
    ]
    weights = np.array([np.vdot(branch, branch).real for branch in branches])
    choice = int(make_rng(rng).choice(len(outcomes), p=weights / weights.sum()))
    m1, m2 = outcomes[choice]

    bob = branches[choice] / np.sqrt(weights[choice])
    correction = np.linalg.matrix_power(PAULI_MATRICES["Z"], m1) @ np.linalg.matrix_power(
        PAULI_MATRICES["X"], m2
    )
    bob = _apply_single(bob, correction, bob.ndim - 1)
    bob = np.moveaxis(bob, -1, qubit)
    return StateVector(bob.reshape(-1)), (m1, m2)


def run_bell(
    alpha: complex, beta: complex, noise: NoiseModel = NOISELESS, rng_seed: SeedLike = None
) -> TeleportResult:
    """Standard single-qubit teleportation; bit-flip noise hits the output qubit."""
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ContractViolationError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
    rng = make_rng(rng_seed)
    source = StateVector(np.array([alpha, beta], dtype=complex))
    received, (m1, m2) = bell_teleport_qubit(source, 0, rng)
    received = apply_bitflip_noise(received, noise.p_bitflip, rng)
    return TeleportResult(
        conclusive=True,
        attempts=1,
        message=BellMessage(m1=(m1,), m2=(m2,)),
        bob_final=received,
        fidelity=min(fidelity(source, received), 1.0),
        gate_cost=1,
        outcome=bits_to_outcome(m1, m2),
    )


def encode_repetition(alpha: complex, beta: complex, n: int) -> StateVector:
    """α|0⟩ⁿ + β|1⟩ⁿ from α|0⟩ + β|1⟩ and n−1 fresh |0⟩ rails via a CNOT ladder (n−1 gates)."""
    if n < 1:
        raise ContractViolationError(f"n must be at least 1, got {n}")
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ContractViolationError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
    tensor = np.zeros([2] * n, dtype=complex)
    tensor[(0,) * n] = alpha
    tensor[(1,) + (0,) * (n - 1)] = beta
    for target in range(1, n):
        tensor = _apply_cnot(tensor, 0, target)
    return StateVector(tensor.reshape(-1))


def decode_repetition(state: StateVector) -> Tuple[complex, complex, int]:
    """Inverse CNOT ladder plus majority logic.

    After the ladder the rails 2…n hold a syndrome; a syndrome heavier than n/2 means rail 1
    itself flipped and is corrected with an X.

    Returns:
        Tuple[complex, complex, int]: Recovered (α, β) and the n−1 gates used.
    """
    n = state.num_qubits
    tensor = _as_tensor(state)
    for target in range(n - 1, 0, -1):
        tensor = _apply_cnot(tensor, 0, target)

    matrix = tensor.reshape(2, -1)
    syndrome = int(np.argmax(np.sum(np.abs(matrix) ** 2, axis=0)))
    logical = matrix[:, syndrome]
    if 2 * bin(syndrome).count("1") > n:
        logical = logical[::-1]
    logical = logical / np.linalg.norm(logical)
    return complex(logical[0]), complex(logical[1]), n - 1


def _validate_gate_error(p_gate: float, gate_error_channel: str) -> Tuple[str, ...]:
    if not 0.0 <= p_gate <= MAX_PATHWAY_B_GATE_ERROR:
        raise ValueError(
            f"Gate error rate must lie in [0, {MAX_PATHWAY_B_GATE_ERROR}], got {p_gate!r}"
        )
    if gate_error_channel not in GATE_ERROR_CHANNELS:
        raise ValueError(
            f"Unknown gate error channel {gate_error_channel!r}; "
            f"choose from {sorted(GATE_ERROR_CHANNELS)}"
        )
    return GATE_ERROR_CHANNELS[gate_error_channel]


# Fixed logical amplitudes for pathway B: both nonzero and unequal, so X and Z errors are visible
PATHWAY_B_ALPHA = 0.6
PATHWAY_B_BETA = 0.8


def _ladder_with_errors(
    tensor: np.ndarray,
    targets: Sequence[int],
    failures: Sequence[bool],
    rng: np.random.Generator,
    paulis: Tuple[str, ...],
) -> np.ndarray:
    """CNOT(1 → target) for each target; a failing gate first suffers a random Pauli on one of
    its two qubits."""
    for target, failed in zip(targets, failures):
        if failed:
            qubit = 0 if rng.integers(2) == 0 else target
            letter = paulis[int(rng.integers(len(paulis)))]
            tensor = _apply_single(tensor, SINGLE_QUBIT_PAULIS[letter], qubit)
        tensor = _apply_cnot(tensor, 0, target)
    return tensor


def _decode_corrupted(tensor: np.ndarray, n: int) -> bool:
    bare = np.zeros([2] * n, dtype=complex)
    bare[(0,) * n] = PATHWAY_B_ALPHA
    bare[(1,) + (0,) * (n - 1)] = PATHWAY_B_BETA
    overlap = abs(np.vdot(bare, tensor)) ** 2
    return overlap < CORRUPTION_THRESHOLD


def pathway_b_trial(
    n: int,
    noise: NoiseModel,
    rng_seed: SeedLike = None,
    gate_error_channel: str = "uniform_pauli",
) -> bool:
    """One pass through decode (n−1 CNOTs), ideal bare teleport, re-encode (n−1 CNOTs).

    Returns:
        bool: True if the consolidated register after decoding is no longer the bare logical
        qubit on rail 1 with the other rails in |0⟩.
    """
    if n < 1:
        raise ContractViolationError(f"n must be at least 1, got {n}")
    paulis = _validate_gate_error(noise.p_gate, gate_error_channel)
    rng = make_rng(rng_seed)
    targets = list(range(n - 1, 0, -1))

    tensor = _as_tensor(encode_repetition(PATHWAY_B_ALPHA, PATHWAY_B_BETA, n))
    decode_failures = rng.random(len(targets)) < noise.p_gate
    tensor = _ladder_with_errors(tensor, targets, decode_failures, rng, paulis)
    corrupted = _decode_corrupted(tensor, n)

    register, _ = bell_teleport_qubit(StateVector(tensor.reshape(-1)), 0, rng)
    encode_failures = rng.random(len(targets)) < noise.p_gate
    _ladder_with_errors(_as_tensor(register), targets[::-1], encode_failures, rng, paulis)
    return corrupted


def pathway_b_failures(
    trials: int, seed: SeedLike, n: int, p_gate: float, gate_error_channel: str = "uniform_pauli"
) -> int:
    """Number of decode-corrupted trials out of `trials`.

    Which decode gates fail is drawn for all trials at once; only trials with at least one
    failure are simulated. Re-encode errors cannot change the decode verdict and are skipped.
    """
    paulis = _validate_gate_error(p_gate, gate_error_channel)
    if n < 2 or p_gate == 0.0:
        return 0
    rng = make_rng(seed)
    targets = list(range(n - 1, 0, -1))
    failures = rng.random((trials, n - 1)) < p_gate
    encoded = _as_tensor(encode_repetition(PATHWAY_B_ALPHA, PATHWAY_B_BETA, n))

    corrupted = 0
    for row in failures[failures.any(axis=1)]:
        tensor = _ladder_with_errors(encoded, targets, row, rng, paulis)
        corrupted += int(_decode_corrupted(tensor, n))
    return corrupted


def pathway_b_failure_rate(
    n: int,
    noise: NoiseModel,
    trials: int,
    rng_seed: SeedLike = None,
    gate_error_channel: str = "uniform_pauli",
) -> float:
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    return pathway_b_failures(trials, rng_seed, n, noise.p_gate, gate_error_channel) / trials


def decode_failure_first_order(n: int, p_gate: float) -> float:
    """(n−1)·p_g: one chance per decode gate."""
    return (n - 1) * p_gate


def decode_failure_exact(n: int, p_gate: float) -> float:
    """Probability that at least one of the n−1 decode gates fails."""
    return 1.0 - (1.0 - p_gate) ** (n - 1)


def logical_error_rate(n: int, p: float) -> float:
    """Probability that a majority of n rails flip: Σ_{k>n/2} C(n,k) pᵏ(1−p)^{n−k}.

    Raises:
        ValueError: If n is even or p lies outside [0, 1].
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"Majority vote needs an odd number of rails, got n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return float(binom.sf(n // 2, n, p))


def bitflip_failures(trials: int, seed: SeedLike, n: int, p: float) -> int:
    """Trials, out of `trials`, in which more than half of n independent rails flip."""
    rng = make_rng(seed)
    failures = 0
    for start in range(0, trials, BITFLIP_CHUNK):
        size = min(BITFLIP_CHUNK, trials - start)
        failures += int(np.count_nonzero(2 * rng.binomial(n, p, size=size) > n))
    return failures


def bitflip_mc(n: int, p: float, trials: int, rng_seed: SeedLike = None) -> float:
    """Monte Carlo estimate of logical_error_rate(n, p)."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return bitflip_failures(trials, rng_seed, n, p) / trials


def teleport_counts(
    trials: int,
    seed: SeedLike,
    channel: ChannelSpec,
    logical_input: LogicalInput,
    noise: NoiseModel = NOISELESS,
    **teleporter_options,
) -> np.ndarray:
    """Aggregates `trials` proposed-scheme runs into the counters named in
    TELEPORT_COUNT_FIELDS. fidelity_min is 1.0 when no run was conclusive."""
    teleporter = ProposedTeleporter(channel, logical_input, **teleporter_options)
    rng = make_rng(seed)
    counts = np.zeros(len(TELEPORT_COUNT_FIELDS))
    counts[-1] = 1.0
    for _ in range(trials):
        result = teleporter.run(rng, noise)
        counts[0] += 1
        counts[2] += result.attempts
        if result.conclusive:
            counts[1] += 1
            counts[2 + result.outcome] += 1
            counts[7] += result.fidelity
            counts[8] += result.fidelity**2
            counts[9] = min(counts[9], result.fidelity)
    return counts


def merge_teleport_counts(batches: Sequence[np.ndarray]) -> np.ndarray:
    merged = np.sum(batches, axis=0)
    merged[-1] = min(batch[-1] for batch in batches)
    return merged


def _run_task(task):
    batch_fn, size, seed = task
    return batch_fn(size, seed)


def run_batches(
    batch_fn: Callable,
    trials: int,
    seed: int,
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
    description: str = "Monte Carlo",
    merge: Callable = sum,
):
    """Runs `batch_fn(size, seed)` over fixed-size batches and merges the results.

    Batch i always covers the same trials with seed derive_seed(seed, i), so the merged result
    does not depend on the number of workers.

    Args:
        batch_fn (Callable): Picklable function of (trials, seed) returning a count or array.
        trials (int): Total number of trials.
        seed (int): Base seed.
        batch_size (int): Trials per batch.
        workers (int): Processes; 1 runs in-process.
        description (str): Progress-bar label.
        merge (Callable): Combines the list of batch results, in batch order.

    Returns:
        The merged batch results.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if batch_size < 1 or workers < 1:
        raise ValueError("batch_size and workers must be positive")

    tasks = [
        (batch_fn, min(batch_size, trials - start), derive_seed(seed, index))
        for index, start in enumerate(range(0, trials, batch_size))
    ]
    logging.info(f"{description}: {trials} trials in {len(tasks)} batches on {workers} worker(s)")
    progress = partial(tqdm, total=len(tasks), desc=description, leave=False)

    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            results = list(progress(pool.imap(_run_task, tasks)))
    else:
        results = [_run_task(task) for task in progress(tasks)]
    return merge(results)


def main():
    """Demonstrates the protocol service.

    Steps:
    1. Configuration setup, including logging.
    2. Teleports α|101⟩ − β|010⟩ over a = 0.8, b = 0.6 a handful of times.
    3. Logs the pathway comparison at n = 5, p = 0.01, p_g = 0.005.
    """
    logging.basicConfig(level=logging.INFO)
    setup_global_logger()

    all_parameters = read_yaml_file("config/parameters.yml")
    config = all_parameters["main_config"]
    protocol_config = config["protocol"]

    channel = ChannelSpec(a=0.8, b=0.6, n=3)
    logical_input = LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1))
    teleporter = ProposedTeleporter(
        channel,
        logical_input,
        max_attempts=protocol_config["max_attempts"],
        povm_two_qubit_cost=protocol_config["povm_two_qubit_cost"],
    )
    rng = make_rng(7)
    for _ in range(5):
        result = teleporter.run(rng)
        logging.info(
            f"attempts={result.attempts} outcome={result.outcome} "
            f"bits={result.message.bits()} fidelity={result.fidelity:.12f}"
        )

    noise = NoiseModel(p_bitflip=0.01, p_gate=0.005)
    p_decode = pathway_b_failure_rate(
        5, noise, 100_000, 3, protocol_config["gate_error_channel"]
    )
    p_logical = logical_error_rate(5, noise.p_bitflip)
    logging.info(
        f"P_decode ~ {p_decode:.4f} (first order {decode_failure_first_order(5, 0.005):.4f}), "
        f"P_L = {p_logical:.4e}, ratio {p_decode / p_logical:.0f}"
    )


if __name__ == "__main__":
    main()

"""
Hop-by-hop relay of a logical state along a line of nodes. Each hop picks at random between
the GHZ-channel POVM scheme and n parallel Bell-basis teleports. The public classical
transcript looks alike for both protocols, so an eavesdropper can only guess which channel type
each hop used.

Functional Overview:
- `run_chain` moves the logical state from the first node to the last. Hop i draws its
  protocol with probability p_ghz_choice, teleports whatever state it received, and hands the
  result to hop i+1. GHZ hops send (m1, m2, s, t), n + 3 bits; intermediate nodes forward the
  frame bits (s, t) without interpreting them. Bell-basis hops send two bits per qubit, 2n in
  total.
- A GHZ hop that exhausts its attempts aborts the chain with `ChainAbortedError`, which carries
  the hops completed so far.
- `run_eve_experiment` repeats chains in seeded batches. It lets an `EveStrategy` guess every
  hop's channel type from the transcript and reports how often all guesses are right.
- `transcript_records` flattens hop records into JSON-lines objects for export.

Usage:
`python -m services.network` relays the worked 3-qubit state over the configured nodes and
logs the transcript and Eve's success rate.
"""

# Standard library imports
import logging
from dataclasses import dataclass
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# Related third-party imports
import numpy as np

# Local application/library specific imports
from config.logging_config import setup_global_logger
from services.analysis import eve_guess_probability
from services.discrimination import DEFAULT_PROBABILITY_TOLERANCE, DEFAULT_TOLERANCE
from services.protocol import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_MAX_ATTEMPTS,
    DEFAULT_POVM_TWO_QUBIT_COST,
    NOISELESS,
    BellMessage,
    ClassicalMessage,
    NoiseModel,
    ProposedTeleporter,
    apply_bitflip_noise,
    bell_teleport_qubit,
    majority_recover,
    run_batches,
)
from services.states import ChannelSpec, LogicalInput, prepare_chi_st
from services.tensor_core import DEFAULT_MAX_QUBITS, DEFAULT_RANK_TOLERANCE, StateVector, fidelity
from utils.errors import ChainAbortedError, ContractViolationError
from utils.utils import SeedLike, make_rng, read_yaml_file

GHZ_POVM = "GHZ-POVM"
BELL_BASIS = "Bell-basis"
PROTOCOLS = (GHZ_POVM, BELL_BASIS)
EVE_STRATEGIES = ("uniform", "stationary-bias")


@dataclass(frozen=True)
class ChainConfig:
    """A line of nodes, the logical state Alice relays, and the per-hop channel settings."""

    node_names: Tuple[str, ...]
    logical_input: LogicalInput
    channel: ChannelSpec
    p_ghz_choice: float = 0.5
    noise: NoiseModel = NOISELESS
    rng_seed: int = 0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    povm_two_qubit_cost: int = DEFAULT_POVM_TWO_QUBIT_COST
    repetition_recovery: bool = True
    max_qubits: int = DEFAULT_MAX_QUBITS
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE
    tolerance: float = DEFAULT_TOLERANCE
    probability_tolerance: float = DEFAULT_PROBABILITY_TOLERANCE

    def __post_init__(self):
        object.__setattr__(self, "node_names", tuple(self.node_names))
        if len(self.node_names) < 2:
            raise ContractViolationError("A chain needs at least two nodes (one hop)")
        if self.channel.n != self.logical_input.n:
            raise ContractViolationError(
                f"Channel carries n={self.channel.n} qubits but the input has "
                f"n={self.logical_input.n}"
            )
        if not 0.0 <= self.p_ghz_choice <= 1.0:
            raise ContractViolationError(
                f"p_ghz_choice must lie in [0, 1], got {self.p_ghz_choice!r}"
            )

    @property
    def n(self) -> int:
        return self.logical_input.n

    @property
    def hops(self) -> int:
        return len(self.node_names) - 1

    def teleporter(self) -> ProposedTeleporter:
        return ProposedTeleporter(
            self.channel,
            self.logical_input,
            max_attempts=self.max_attempts,
            povm_two_qubit_cost=self.povm_two_qubit_cost,
            repetition_recovery=self.repetition_recovery,
            max_qubits=self.max_qubits,
            rank_tolerance=self.rank_tolerance,
            tolerance=self.tolerance,
            probability_tolerance=self.probability_tolerance,
        )


@dataclass(frozen=True)
class HopRecord:
    hop_index: int
    sender: str
    receiver: str
    protocol_used: str
    attempts: int
    message: Union[ClassicalMessage, BellMessage]
    hop_fidelity: float

    @property
    def payload_bits(self) -> int:
        return self.message.payload_bits


@dataclass(frozen=True)
class EveRecord:
    guesses: Tuple[str, ...]
    actual: Tuple[str, ...]

    @property
    def all_correct(self) -> bool:
        return self.guesses == self.actual


@dataclass(frozen=True)
class EveStrategy:
    """How Eve names each hop's channel type.

    "uniform" flips a fair coin per hop. "stationary-bias" always names the more probable type
    (GHZ on a tie), which is her best choice when hops pick independently. Neither looks at the
    transcript contents, since those carry no channel information.
    """

    name: str = "uniform"

    def __post_init__(self):
        if self.name not in EVE_STRATEGIES:
            raise ValueError(f"Unknown Eve strategy {self.name!r}; choose from {EVE_STRATEGIES}")

    def guess(
        self, transcript: Sequence[HopRecord], p_ghz_choice: float, rng: np.random.Generator
    ) -> Tuple[str, ...]:
        if self.name == "uniform":
            return tuple(GHZ_POVM if rng.random() < 0.5 else BELL_BASIS for _ in transcript)
        favourite = GHZ_POVM if p_ghz_choice >= 0.5 else BELL_BASIS
        return (favourite,) * len(transcript)

    def success_probability(self, hops: int, p_ghz_choice: float) -> float:
        if self.name == "uniform":
            return 0.5**hops
        return eve_guess_probability(hops, p_ghz_choice)


def _bell_hop(
    state: StateVector, config: ChainConfig, rng: np.random.Generator
) -> Tuple[StateVector, BellMessage]:
    """n parallel single-qubit Bell teleports of the physical qubits."""
    m1, m2 = [], []
    for qubit in range(state.num_qubits):
        state, (z_bit, x_bit) = bell_teleport_qubit(state, qubit, rng)
        m1.append(z_bit)
        m2.append(x_bit)
    if config.noise.p_bitflip > 0.0:
        state = apply_bitflip_noise(state, config.noise.p_bitflip, rng)
        if config.repetition_recovery:
            state = majority_recover(state, config.logical_input)
    return state, BellMessage(m1=tuple(m1), m2=tuple(m2))


def run_chain(
    config: ChainConfig,
    rng: SeedLike = None,
    teleporter: Optional[ProposedTeleporter] = None,
) -> Tuple[List[HopRecord], float]:
    """Relays χ_st from the first node to the last, one synchronous hop at a time.

    Args:
        config (ChainConfig): Nodes, logical state, channel and noise.
        rng (int or Generator): Defaults to a Generator seeded with config.rng_seed.
        teleporter (ProposedTeleporter, optional): Reused across chains when given.

    Returns:
        Tuple[List[HopRecord], float]: Hop records and |⟨χ_st|final⟩|².

    Raises:
        ChainAbortedError: If a GHZ hop finds no conclusive outcome within max_attempts.
    """
    rng = make_rng(config.rng_seed if rng is None else rng)
    teleporter = teleporter or config.teleporter()
    target = prepare_chi_st(config.logical_input)

    state = target
    hops: List[HopRecord] = []
    for index in range(config.hops):
        sender, receiver = config.node_names[index], config.node_names[index + 1]
        if rng.random() < config.p_ghz_choice:
            result = teleporter.teleport_state(state, rng, config.noise)
            if not result.conclusive:
                raise ChainAbortedError(
                    f"Hop {index} ({sender} -> {receiver}) had no conclusive outcome in "
                    f"{result.attempts} attempts",
                    hops,
                )
            protocol, attempts = GHZ_POVM, result.attempts
            message, received = result.message, result.bob_final
        else:
            protocol, attempts = BELL_BASIS, 1
            received, message = _bell_hop(state, config, rng)

        hops.append(
            HopRecord(
                hop_index=index,
                sender=sender,
                receiver=receiver,
                protocol_used=protocol,
                attempts=attempts,
                message=message,
                hop_fidelity=min(fidelity(state, received), 1.0),
            )
        )
        state = received

    return hops, min(fidelity(target, state), 1.0)


def chain_payload_bits(hops: Sequence[HopRecord]) -> int:
    return sum(hop.payload_bits for hop in hops)


def eve_counts(
    trials: int, seed: SeedLike, config: ChainConfig, strategy: str = "uniform"
) -> np.ndarray:
    """[completed chains, chains where Eve named every hop, chains with final fidelity ≥ 1−1e-9]
    over `trials` chains. Eve draws from her own stream."""
    eve = EveStrategy(strategy)
    teleporter = config.teleporter()
    chain_rng = make_rng(seed)
    eve_rng = chain_rng.spawn(1)[0]

    counts = np.zeros(3, dtype=np.int64)
    for _ in range(trials):
        try:
            hops, final_fidelity = run_chain(config, chain_rng, teleporter)
        except ChainAbortedError as e:
            logging.warning(f"Chain aborted after {len(e.hops)} hop(s): {e}")
            continue
        actual = tuple(hop.protocol_used for hop in hops)
        record = EveRecord(guesses=eve.guess(hops, config.p_ghz_choice, eve_rng), actual=actual)
        counts[0] += 1
        counts[1] += int(record.all_correct)
        counts[2] += int(final_fidelity >= 1.0 - 1e-9)
    return counts


def run_eve_experiment(
    config: ChainConfig,
    trials: int,
    strategy: str = "uniform",
    batch_size: int = DEFAULT_BATCH_SIZE,
    workers: int = 1,
) -> float:
    """Fraction of completed chains in which Eve names every hop's channel type.

    Trials run in seeded batches (see protocol.run_batches), so the result depends only on
    config.rng_seed and the batch size.
    """
    counts = run_batches(
        partial(eve_counts, config=config, strategy=strategy),
        trials,
        config.rng_seed,
        batch_size=batch_size,
        workers=workers,
        description="Eve trials",
    )
    if counts[0] == 0:
        raise ChainAbortedError("Every chain aborted; no Eve statistics", [])
    return float(counts[1] / counts[0])


def transcript_records(hops: Sequence[HopRecord], run_index: int = 0) -> List[Dict[str, Any]]:
    """One JSON-serialisable object per hop. Bell-basis hops list m1/m2 per qubit and carry no
    frame bits."""
    records = []
    for hop in hops:
        message = hop.message
        is_ghz = isinstance(message, ClassicalMessage)
        records.append(
            {
                "run": run_index,
                "hop": hop.hop_index,
                "sender": hop.sender,
                "receiver": hop.receiver,
                "protocol": hop.protocol_used,
                "attempts": hop.attempts,
                "m1": message.m1 if is_ghz else list(message.m1),
                "m2": message.m2 if is_ghz else list(message.m2),
                "s": message.s if is_ghz else None,
                "t": list(message.t) if is_ghz else None,
                "fidelity": hop.hop_fidelity,
                "payload_bits": hop.payload_bits,
            }
        )
    return records


def main():
    """Relays α|101⟩ − β|010⟩ from Alice to Dev.

    Steps:
    1. Configuration setup, including logging.
    2. Builds the chain from the configured node names and channel choice probability.
    3. Runs one chain and logs its transcript.
    4. Estimates Eve's all-hops success rate over 2000 chains.
    """
    logging.basicConfig(level=logging.INFO)
    setup_global_logger()

    all_parameters = read_yaml_file("config/parameters.yml")
    config = all_parameters["main_config"]
    network_config = config["network"]

    chain = ChainConfig(
        node_names=network_config["node_names"],
        logical_input=LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1)),
        channel=ChannelSpec(a=0.8, b=0.6, n=3),
        p_ghz_choice=network_config["p_ghz_choice"],
        rng_seed=11,
    )
    hops, final_fidelity = run_chain(chain)
    for record in transcript_records(hops):
        logging.info(record)
    logging.info(f"Final fidelity {final_fidelity:.12f}, {chain_payload_bits(hops)} cbits sent")

    rate = run_eve_experiment(chain, 2000, network_config["eve_strategy"])
    expected = EveStrategy(network_config["eve_strategy"]).success_probability(
        chain.hops, chain.p_ghz_choice
    )
    logging.info(f"Eve named every hop in {rate:.3f} of chains (expected {expected:.3f})")


if __name__ == "__main__":
    main()

"""
Constructors for every state and Pauli-string operator the teleportation scheme names: the
repetition-code input χ₀ = α|0…0⟩ + β|1…1⟩, its Pauli-frame generalisation
χ_st = α|t₁…t_n⟩ + (−1)^s β|t₁′…t_n′⟩, the partially entangled GHZ channel, the combined
(2n+1)-qubit system, and the frame operator U_st together with Bob's corrections T and T′.

Functional Overview:
- Validates the logical input (α, β, s, t) and the channel (a, b, n) as immutable records.
- Prepares χ₀, χ_st, the GHZ channel and their tensor product. Qubits are numbered from 1 and
  qubit 1 is the most significant bit of a basis index; input qubits come first, then the
  channel qubit Alice keeps, then Bob's n qubits.
- Represents local Pauli products as `PauliString`s: one string of X/Z letters per qubit,
  multiplied left to right as matrices. Strings materialize to unitary Operators, reduce to a
  canonical phase·X^x Z^z form, and print as "X ⊗ I ⊗ XZ".
- Builds U_st, T and T′ letter by letter from the frame and message bits.
- Enumerates the 2^{n+1} states an n-qubit input of this family can take.

Components:
- LogicalInput, ChannelSpec, PauliString: value types.
- prepare_chi0, prepare_chi_st, prepare_ghz, assemble_system: state constructors.
- build_Ust, build_T, build_Tprime: Pauli-string constructors.
- apply_pauli_string, operator_overlap, enumerate_state_family: helpers.

Usage:
Imported by the discrimination, protocol and network services.
"""

# Standard library imports
import itertools
from dataclasses import dataclass
from typing import List, Sequence, Tuple

# Related third-party imports
import numpy as np

# Local application/library specific imports
from services.tensor_core import (
    DEFAULT_MAX_QUBITS,
    Operator,
    StateVector,
    kron,
)
from utils.errors import ContractViolationError

NORMALIZATION_TOLERANCE = 1e-12

PAULI_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_bit(name: str, value: int) -> int:
    if value not in (0, 1):
        raise ContractViolationError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class LogicalInput:
    """The generalised input state χ_st = α|t⟩ + (−1)^s β|t′⟩ with t′ᵢ = 1 − tᵢ."""

    alpha: complex
    beta: complex
    s: int
    t: Tuple[int, ...]

    def __post_init__(self):
        t = tuple(_check_bit(f"t[{i}]", bit) for i, bit in enumerate(self.t))
        if len(t) < 1:
            raise ContractViolationError("n must be at least 1 (t needs one entry per qubit)")
        _check_bit("s", self.s)
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ContractViolationError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def t_prime(self) -> Tuple[int, ...]:
        return tuple(1 - bit for bit in self.t)

    @classmethod
    def chi0(cls, alpha: complex, beta: complex, n: int) -> "LogicalInput":
        """The identity frame s = 0, t = 0…0."""
        return cls(alpha=alpha, beta=beta, s=0, t=(0,) * n)

    def label(self) -> str:
        """Ket notation of the state, e.g. 'α|101⟩ − β|010⟩'."""
        sign = "−" if self.s else "+"
        first = "".join(map(str, self.t))
        second = "".join(map(str, self.t_prime))
        return f"α|{first}⟩ {sign} β|{second}⟩"


@dataclass(frozen=True)
class ChannelSpec:
    """The (n+1)-qubit channel a|0…0⟩ + b|1…1⟩ with real a ≥ b ≥ 0 and a² + b² = 1."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ContractViolationError(f"Channel n must be a positive integer, got {self.n!r}")
        if self.a < 0 or self.b < 0:
            raise ContractViolationError("Channel amplitudes a, b must be nonnegative")
        norm = self.a**2 + self.b**2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise ContractViolationError(f"a^2 + b^2 = {norm!r}, expected 1")
        if self.a < self.b:
            raise ContractViolationError(f"Channel requires a >= b, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_b(cls, b: float, n: int) -> "ChannelSpec":
        """Channel with the given b and a = √(1 − b²)."""
        return cls(a=float(np.sqrt(1.0 - b * b)), b=b, n=n)

    @property
    def maximally_entangled(self) -> bool:
        return abs(self.a - self.b) <= NORMALIZATION_TOLERANCE


@dataclass(frozen=True)
class PauliString:
    """Per-qubit products of X and Z letters, e.g. ("X", "", "XZ") for X ⊗ I ⊗ XZ.

    Letters within a factor multiply left to right as matrices, so "XZ" is the matrix X·Z
    (Z acts first).
    """

    factors: Tuple[str, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        for factor in factors:
            if any(letter not in PAULI_MATRICES for letter in factor):
                raise ContractViolationError(f"Unknown Pauli letters in {factor!r}")
        object.__setattr__(self, "factors", factors)

    @property
    def num_qubits(self) -> int:
        return len(self.factors)

    @staticmethod
    def _factor_matrix(factor: str) -> np.ndarray:
        matrix = np.eye(2, dtype=complex)
        for letter in factor:
            matrix = matrix @ PAULI_MATRICES[letter]
        return matrix

    def materialize(self, max_qubits: int = DEFAULT_MAX_QUBITS) -> Operator:
        """The 2^m x 2^m unitary of the string."""
        result = Operator(np.ones((1, 1), dtype=complex), unitary=True)
        for factor in self.factors:
            result = kron(
                result, Operator(self._factor_matrix(factor), unitary=True), max_qubits
            )
        return result

    def reduce(self) -> Tuple[complex, Tuple[str, ...]]:
        """Rewrites each factor as ±X^x Z^z using X² = Z² = I and ZX = −XZ.

        Returns:
            Tuple[complex, Tuple[str, ...]]: Overall phase (±1) and the canonical factors.
        """
        phase = 1
        reduced = []
        for factor in self.factors:
            x_parity, z_parity = 0, 0
            for letter in factor:
                if letter == "X":
                    # Moving this X left past the accumulated Z costs a sign
                    if z_parity:
                        phase = -phase
                    x_parity ^= 1
                else:
                    z_parity ^= 1
            reduced.append("X" * x_parity + "Z" * z_parity)
        return complex(phase), tuple(reduced)

    def label(self) -> str:
        return " ⊗ ".join(factor or "I" for factor in self.factors)

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Qubit-wise product self·other (other acts first)."""
        if other.num_qubits != self.num_qubits:
            raise ContractViolationError("Pauli strings act on different qubit counts")
        return PauliString(tuple(a + b for a, b in zip(self.factors, other.factors)))


def prepare_chi0(alpha: complex, beta: complex, n: int) -> StateVector:
    """χ₀ = α|0…0⟩ + β|1…1⟩ over n qubits.

    Raises:
        ContractViolationError: If n < 1 or the amplitudes are not normalized.
    """
    return prepare_chi_st(LogicalInput.chi0(alpha, beta, n))


def _bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for bit in bits:
        index = (index << 1) | bit
    return index


def prepare_chi_st(logical_input: LogicalInput) -> StateVector:
    """χ_st: amplitude α at basis index t₁…t_n, (−1)^s β at the complemented index."""
    amps = np.zeros(2**logical_input.n, dtype=complex)
    amps[_bits_to_index(logical_input.t)] = logical_input.alpha
    amps[_bits_to_index(logical_input.t_prime)] = (-1) ** logical_input.s * logical_input.beta
    return StateVector(amps)


def build_Ust(logical_input: LogicalInput) -> PauliString:
    """U_st = X^{t₁} ⊗ … ⊗ X^{t_n}Z^s, mapping χ₀ to χ_st."""
    factors = ["X" * bit for bit in logical_input.t]
    factors[-1] += "Z" * logical_input.s
    return PauliString(tuple(factors))


def prepare_ghz(channel: ChannelSpec) -> StateVector:
    """a|0…0⟩ + b|1…1⟩ over n+1 qubits."""
    amps = np.zeros(2 ** (channel.n + 1), dtype=complex)
    amps[0] = channel.a
    amps[-1] = channel.b
    return StateVector(amps)


def assemble_system(
    chi: StateVector, ghz: StateVector, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """χ ⊗ GHZ over 2n+1 qubits: input qubits 1…n, channel qubits n+1…2n+1. Alice holds
    qubits 1…n+1, Bob holds n+2…2n+1.

    Raises:
        ContractViolationError: If the channel does not have exactly one more qubit than χ.
        SizeLimitError: If 2n+1 exceeds max_qubits.
    """
    if ghz.num_qubits != chi.num_qubits + 1:
        raise ContractViolationError(
            f"GHZ channel has {ghz.num_qubits} qubits, expected {chi.num_qubits + 1} "
            f"for an input of {chi.num_qubits} qubits"
        )
    return kron(chi, ghz, max_qubits)


def build_T(m1: int, m2: int, n: int) -> PauliString:
    """T = X^{m1} ⊗ … ⊗ X^{m1} ⊗ X^{m1}Z^{m2} on Bob's n qubits."""
    m1, m2 = _check_bit("m1", m1), _check_bit("m2", m2)
    if n < 1:
        raise ContractViolationError(f"n must be at least 1, got {n}")
    factors = ["X" * m1] * n
    factors[-1] = "X" * m1 + "Z" * m2
    return PauliString(tuple(factors))


def build_Tprime(logical_input: LogicalInput, m1: int, m2: int) -> PauliString:
    """T′ = U_st·T: X^{tᵢ⊕m1} on Bob qubits i < n and X^{t_n}Z^s X^{m1}Z^{m2} on qubit n."""
    m1, m2 = _check_bit("m1", m1), _check_bit("m2", m2)
    factors = ["X" * (bit ^ m1) for bit in logical_input.t[:-1]]
    factors.append("X" * logical_input.t[-1] + "Z" * logical_input.s + "X" * m1 + "Z" * m2)
    return PauliString(tuple(factors))


def apply_pauli_string(state: StateVector, pauli: PauliString) -> StateVector:
    """Applies a Pauli string without materializing its full matrix."""
    if pauli.num_qubits != state.num_qubits:
        raise ContractViolationError(
            f"Pauli string on {pauli.num_qubits} qubits applied to {state.num_qubits} qubits"
        )
    tensor = state.amps.reshape([2] * state.num_qubits)
    for qubit, factor in enumerate(pauli.factors):
        if not factor:
            continue
        matrix = PauliString._factor_matrix(factor)
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [qubit])), 0, qubit)
    return StateVector(tensor.reshape(-1))


def operator_overlap(a: Operator, b: Operator) -> float:
    """|Tr(A†B)| / dim; equals 1 iff two unitaries agree up to a global phase."""
    if a.matrix.shape != b.matrix.shape:
        raise ContractViolationError("Operators have different shapes")
    return float(abs(np.vdot(a.matrix, b.matrix)) / a.rows)


def enumerate_state_family(
    n: int, alpha: complex = 1.0, beta: complex = 0.0
) -> List[LogicalInput]:
    """All 2^{n+1} Pauli frames (s, t) the scheme teleports for n-qubit inputs, in
    lexicographic (s, t) order."""
    if n < 1:
        raise ContractViolationError(f"n must be at least 1, got {n}")
    return [
        LogicalInput(alpha=alpha, beta=beta, s=s, t=t)
        for s in (0, 1)
        for t in itertools.product((0, 1), repeat=n)
    ]


def identity_string(n: int) -> PauliString:
    return PauliString(("",) * n)

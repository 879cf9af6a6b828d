"""
Dense complex linear algebra for the teleportation simulator. Every state and operator the
protocol names (input states, GHZ channels, POVM elements, Pauli corrections) is a numpy array
wrapped in one of two small immutable value types defined here.

Functional Overview:
- Wraps complex vectors (`StateVector`) and matrices (`Operator`) as read-only values, checking
  finiteness, power-of-two dimensions and the optional unitary / Hermitian flags at
  construction.
- Builds tensor products with a configurable ceiling on the total qubit count.
- Diagonalises Hermitian operators (eigenvalues sorted descending) and computes the
  Moore-Penrose pseudoinverse of positive semidefinite operators by inverting the eigenvalues
  above a relative rank tolerance.
- Provides the inner product used for overlaps, fidelities and biorthogonality checks.

Components:
- StateVector, Operator: value types.
- kron: tensor product of two states or two operators.
- herm_eig: Hermitian eigendecomposition.
- pinv_psd: pseudoinverse of a PSD operator.
- inner: conjugate-linear inner product.
- identity, outer, fidelity: small helpers used across the services.

Usage:
Imported by every other service module; no standalone entry point.
"""

# Standard library imports
from dataclasses import dataclass
from typing import Tuple, Union

# Related third-party imports
import numpy as np

# Local application/library specific imports
from utils.errors import ContractViolationError, NotPositiveSemidefiniteError, SizeLimitError

DEFAULT_MAX_QUBITS = 24
DEFAULT_RANK_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10


def _is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector over m qubits, qubit 1 being the most significant index bit.

    Unnormalized vectors (e.g. reciprocal states) are allowed; `normalize` returns a unit copy.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != 1:
            raise ContractViolationError(f"State amplitudes must be 1-D, got shape {amps.shape}")
        if not _is_power_of_two(amps.shape[0]):
            raise ContractViolationError(f"State dimension {amps.shape[0]} is not a power of two")
        if not np.all(np.isfinite(amps)):
            raise ContractViolationError("State amplitudes must be finite")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalize(self) -> "StateVector":
        """Returns the unit vector along this state.

        Raises:
            ContractViolationError: If the vector is zero.
        """
        norm = self.norm()
        if norm == 0.0:
            raise ContractViolationError("Cannot normalize the zero vector")
        return StateVector(self.amps / norm)

    @classmethod
    def basis(cls, index: int, num_qubits: int) -> "StateVector":
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix, optionally flagged unitary or Hermitian. Flags are verified on
    construction (U†U = I within 1e-10, A = A† within 1e-12)."""

    matrix: np.ndarray
    unitary: bool = False
    hermitian: bool = False

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2:
            raise ContractViolationError(f"Operator must be 2-D, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ContractViolationError("Operator entries must be finite")
        if self.unitary:
            rows, cols = matrix.shape
            if rows != cols or not np.allclose(
                matrix.conj().T @ matrix, np.eye(rows), rtol=0.0, atol=UNITARY_TOLERANCE
            ):
                raise ContractViolationError("Operator flagged unitary fails U†U = I")
        if self.hermitian and not is_hermitian(matrix):
            raise ContractViolationError("Operator flagged Hermitian fails A = A†")
        object.__setattr__(self, "matrix", matrix)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T, unitary=self.unitary, hermitian=self.hermitian)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.dim != self.cols:
                raise ContractViolationError(
                    f"Operator with {self.cols} columns cannot act on dimension {other.dim}"
                )
            return StateVector(self.matrix @ other.amps)
        if isinstance(other, Operator):
            if other.rows != self.cols:
                raise ContractViolationError(
                    f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
                )
            return Operator(
                self.matrix @ other.matrix, unitary=self.unitary and other.unitary
            )
        return NotImplemented


def is_hermitian(matrix: np.ndarray, tolerance: float = HERMITIAN_TOLERANCE) -> bool:
    matrix = np.asarray(matrix)
    return matrix.shape[0] == matrix.shape[1] and np.allclose(
        matrix, matrix.conj().T, rtol=0.0, atol=tolerance
    )


def _check_qubit_ceiling(dim: int, max_qubits: int) -> None:
    qubits = max(int(dim).bit_length() - 1, 0)
    if qubits > max_qubits:
        raise SizeLimitError(
            f"Result spans {qubits} qubits, above the configured ceiling of {max_qubits}"
        )


def kron(
    a: Union[StateVector, Operator],
    b: Union[StateVector, Operator],
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> Union[StateVector, Operator]:
    """Tensor product a ⊗ b, the first factor holding the more significant qubits.

    Args:
        a, b: Two StateVectors or two Operators.
        max_qubits (int): Ceiling on the qubit count of the result.

    Returns:
        StateVector or Operator: The product. Operator flags survive when both factors carry
        them.

    Raises:
        SizeLimitError: If the result exceeds max_qubits.
        ContractViolationError: If a state is combined with an operator.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        _check_qubit_ceiling(a.dim * b.dim, max_qubits)
        return StateVector(np.kron(a.amps, b.amps))
    if isinstance(a, Operator) and isinstance(b, Operator):
        _check_qubit_ceiling(max(a.rows * b.rows, a.cols * b.cols), max_qubits)
        return Operator(
            np.kron(a.matrix, b.matrix),
            unitary=a.unitary and b.unitary,
            hermitian=a.hermitian and b.hermitian,
        )
    raise ContractViolationError(
        f"kron needs two states or two operators, got {type(a).__name__}, {type(b).__name__}"
    )


def herm_eig(a: Operator) -> Tuple[np.ndarray, Operator]:
    """Eigendecomposition A = V diag(λ) V† of a Hermitian operator.

    Args:
        a (Operator): Hermitian within 1e-12.

    Returns:
        Tuple[np.ndarray, Operator]: Real eigenvalues sorted descending, and the unitary whose
        columns are the matching eigenvectors.

    Raises:
        ContractViolationError: If the input is not Hermitian.
    """
    if not is_hermitian(a.matrix):
        raise ContractViolationError("herm_eig requires a Hermitian operator")

    # Symmetrise away the sub-tolerance skew part before handing it to LAPACK
    matrix = 0.5 * (a.matrix + a.matrix.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    order = np.argsort(eigenvalues)[::-1]
    return eigenvalues[order], Operator(eigenvectors[:, order], unitary=True)


def pinv_psd(a: Operator, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> Operator:
    """Moore-Penrose pseudoinverse of a Hermitian positive semidefinite operator.

    Eigenvalues λ ≤ rank_tolerance·λ_max are treated as zero; the rest are inverted.

    Args:
        a (Operator): Hermitian PSD operator.
        rank_tolerance (float): Relative cutoff for the numerical rank.

    Returns:
        Operator: Hermitian pseudoinverse.

    Raises:
        NotPositiveSemidefiniteError: If an eigenvalue is below -1e-10.
    """
    eigenvalues, vectors = herm_eig(a)
    if eigenvalues.size and eigenvalues[-1] < -PSD_TOLERANCE:
        raise NotPositiveSemidefiniteError(
            f"Minimum eigenvalue {eigenvalues[-1]:.3e} is below -{PSD_TOLERANCE:g}"
        )

    lambda_max = eigenvalues[0] if eigenvalues.size else 0.0
    keep = eigenvalues > rank_tolerance * lambda_max
    inverted = np.zeros_like(eigenvalues)
    inverted[keep] = 1.0 / eigenvalues[keep]

    v = vectors.matrix
    result = (v * inverted) @ v.conj().T
    result = 0.5 * (result + result.conj().T)
    return Operator(result, hermitian=True)


def numerical_rank(a: Operator, rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> int:
    """Number of eigenvalues above rank_tolerance·λ_max (Hermitian input)."""
    eigenvalues, _ = herm_eig(a)
    if not eigenvalues.size or eigenvalues[0] <= PSD_TOLERANCE:
        return 0
    return int(np.count_nonzero(eigenvalues > rank_tolerance * eigenvalues[0]))


def inner(u: StateVector, v: StateVector) -> complex:
    """⟨u|v⟩, conjugate-linear in u.

    Raises:
        ContractViolationError: On a dimension mismatch.
    """
    if u.dim != v.dim:
        raise ContractViolationError(f"Dimension mismatch: {u.dim} vs {v.dim}")
    return complex(np.vdot(u.amps, v.amps))


def fidelity(u: StateVector, v: StateVector) -> float:
    """Squared overlap |⟨u|v⟩|² of the normalized states; insensitive to global phase."""
    return abs(inner(u.normalize(), v.normalize())) ** 2


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex), unitary=True, hermitian=True)


def outer(u: StateVector, v: StateVector = None) -> Operator:
    """|u⟩⟨v| (|u⟩⟨u| when v is omitted, flagged Hermitian)."""
    if v is None:
        return Operator(np.outer(u.amps, u.amps.conj()), hermitian=True)
    return Operator(np.outer(u.amps, v.amps.conj()))

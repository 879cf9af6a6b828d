"""Error kinds raised by the simulator. Contract and numerical failures are ValueErrors so callers
that only care about "bad input or broken invariant" can catch a single type."""

from typing import Any, List


class SizeLimitError(ValueError):
    """An operation would exceed the configured qubit ceiling."""


class ContractViolationError(ValueError):
    """An input does not satisfy a stated precondition (e.g. Hermitian, unitary)."""


class NotPositiveSemidefiniteError(ValueError):
    """A matrix expected to be PSD has an eigenvalue below the tolerance."""


class LinearDependenceError(ValueError):
    """The discrimination targets are linearly dependent (b = 0)."""


class InternalConsistencyError(ValueError):
    """Measurement probabilities or cross-checks disagree beyond tolerance."""


class PovmConstructionError(ValueError):
    """A constructed POVM fails positivity or completeness."""


class ChainAbortedError(RuntimeError):
    """A hop exhausted its attempts. Carries the hop records completed so far."""

    def __init__(self, message: str, hops: List[Any]):
        super().__init__(message)
        self.hops = hops

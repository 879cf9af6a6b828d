"""
Closed-form calculators behind the resource and success-rate comparisons: relative efficiency
of the GHZ-channel scheme against n parallel Bell-basis teleports, the conclusive-probability
curve over channel quality, and the eavesdropper's best chance of guessing every hop's channel
type.

Functional Overview:
- `resource_counts` gives qubits and cbits per scheme (3n / 2n for Bell-basis, 2n+1 / n+3 for
  the GHZ scheme). `efficiency` turns them into percent savings, which approach 33.33% and
  50% as n grows.
- `success_curve` tabulates P_con = 2b² for evenly spaced b in [b_min, b_max] ⊆ [0, 1/√2].
- `eve_guess_probability` is max(p, 1 − p)^hops for independent per-hop channel choices.

Usage:
Imported by the CLI; `python -m services.analysis` logs the efficiency table for n = 1…10.
"""

# Standard library imports
import logging
from dataclasses import dataclass
from typing import List

# Related third-party imports
import numpy as np

# Local application/library specific imports
from config.logging_config import setup_global_logger

MAX_B = 1.0 / np.sqrt(2.0)
RANGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ResourceCounts:
    bell_qubits: int
    bell_cbits: int
    ghz_qubits: int
    ghz_cbits: int


@dataclass(frozen=True)
class EfficiencyPoint:
    """Relative savings in percent, plus the raw fractions."""

    n: int
    eta_q: float
    eta_c: float

    @property
    def eta_q_fraction(self) -> float:
        return self.eta_q / 100.0

    @property
    def eta_c_fraction(self) -> float:
        return self.eta_c / 100.0


@dataclass(frozen=True)
class SweepRow:
    b: float
    p_success: float


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")


def resource_counts(n: int) -> ResourceCounts:
    _check_n(n)
    return ResourceCounts(
        bell_qubits=3 * n, bell_cbits=2 * n, ghz_qubits=2 * n + 1, ghz_cbits=n + 3
    )


def efficiency(n: int) -> EfficiencyPoint:
    """η_q = (1/3 − 1/(3n))·100 and η_c = (1/2 − 3/(2n))·100.

    Small n gives negative values (n = 1: the GHZ scheme spends more cbits); they are reported
    as is.
    """
    _check_n(n)
    eta_q = (1.0 / 3.0 - 1.0 / (3.0 * n)) * 100.0
    eta_c = (0.5 - 3.0 / (2.0 * n)) * 100.0
    return EfficiencyPoint(n=n, eta_q=eta_q, eta_c=eta_c)


def efficiency_from_counts(n: int) -> EfficiencyPoint:
    """The same savings computed as (Bell − GHZ) / Bell from the raw resource counts."""
    counts = resource_counts(n)
    eta_q = (counts.bell_qubits - counts.ghz_qubits) / counts.bell_qubits * 100.0
    eta_c = (counts.bell_cbits - counts.ghz_cbits) / counts.bell_cbits * 100.0
    return EfficiencyPoint(n=n, eta_q=eta_q, eta_c=eta_c)


def efficiency_table(n_min: int, n_max: int) -> List[EfficiencyPoint]:
    _check_n(n_min)
    if n_max < n_min:
        raise ValueError(f"n_max ({n_max}) must not be below n_min ({n_min})")
    return [efficiency(n) for n in range(n_min, n_max + 1)]


def success_probability(b: float) -> float:
    return 2.0 * b * b


def success_curve(b_min: float, b_max: float, steps: int) -> List[SweepRow]:
    """P_con = 2b² at `steps` evenly spaced b from b_min to b_max inclusive.

    Raises:
        ValueError: If the range leaves [0, 1/√2] or steps < 1.
    """
    if not 0.0 <= b_min <= b_max <= MAX_B + RANGE_TOLERANCE:
        raise ValueError(
            f"Need 0 <= b_min <= b_max <= 1/sqrt(2), got b_min={b_min}, b_max={b_max}"
        )
    if steps < 1 or (steps == 1 and b_min != b_max):
        raise ValueError(f"steps must be at least 1 (2 for a non-empty range), got {steps}")
    b_max = min(b_max, MAX_B)
    return [
        SweepRow(b=float(b), p_success=success_probability(b))
        for b in np.linspace(b_min, b_max, steps)
    ]


def eve_guess_probability(hops: int, p_choice: float) -> float:
    """Eve's best chance of naming every hop's channel type: max(p, 1 − p)^hops."""
    if hops < 1:
        raise ValueError(f"hops must be at least 1, got {hops}")
    if not 0.0 <= p_choice <= 1.0:
        raise ValueError(f"p_choice must lie in [0, 1], got {p_choice!r}")
    return max(p_choice, 1.0 - p_choice) ** hops


def main():
    logging.basicConfig(level=logging.INFO)
    setup_global_logger()

    for point in efficiency_table(1, 10):
        logging.info(f"n={point.n:2d}  eta_q={point.eta_q:7.2f}%  eta_c={point.eta_c:7.2f}%")


if __name__ == "__main__":
    main()

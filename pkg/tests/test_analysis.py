import numpy as np
import pytest
from services.analysis import (
    MAX_B,
    efficiency,
    efficiency_from_counts,
    efficiency_table,
    eve_guess_probability,
    resource_counts,
    success_curve,
    success_probability,
)
from services.discrimination import build_povm, conclusive_probability, discrimination_set
from services.states import ChannelSpec


def test_resource_counts():
    counts = resource_counts(4)
    assert (counts.bell_qubits, counts.bell_cbits) == (12, 8)
    assert (counts.ghz_qubits, counts.ghz_cbits) == (9, 7)


@pytest.mark.parametrize(
    "n,eta_q,eta_c",
    [(1, 0.0, -100.0), (3, 22.2222, 0.0), (10, 30.0, 35.0), (50, 32.6667, 47.0)],
)
def test_efficiency_values(n, eta_q, eta_c):
    point = efficiency(n)
    assert point.eta_q == pytest.approx(eta_q, abs=1e-4)
    assert point.eta_c == pytest.approx(eta_c, abs=1e-4)


@pytest.mark.parametrize("n", [1, 2, 7, 25, 100])
def test_efficiency_formula_matches_resource_counts(n):
    closed, counted = efficiency(n), efficiency_from_counts(n)
    assert closed.eta_q == pytest.approx(counted.eta_q)
    assert closed.eta_c == pytest.approx(counted.eta_c)


def test_efficiency_approaches_limits():
    point = efficiency(100_000)
    assert point.eta_q == pytest.approx(100 / 3, abs=1e-3)
    assert point.eta_c == pytest.approx(50.0, abs=1e-2)
    assert point.eta_c_fraction == pytest.approx(point.eta_c / 100)


def test_efficiency_table_is_monotonic():
    table = efficiency_table(1, 50)
    assert [point.n for point in table] == list(range(1, 51))
    assert all(np.diff([point.eta_q for point in table]) > 0)
    assert all(np.diff([point.eta_c for point in table]) > 0)


@pytest.mark.parametrize("n_min,n_max", [(0, 5), (5, 4)])
def test_efficiency_table_rejects_bad_ranges(n_min, n_max):
    with pytest.raises(ValueError):
        efficiency_table(n_min, n_max)


def test_success_curve_endpoints():
    rows = success_curve(0.0, MAX_B, 11)
    assert len(rows) == 11
    assert rows[0].p_success == 0.0
    assert rows[-1].p_success == pytest.approx(1.0)
    assert rows[5].b == pytest.approx(MAX_B / 2)
    assert rows[5].p_success == pytest.approx(0.25)


def test_success_curve_worked_channel():
    rows = success_curve(0.6, 0.6, 1)
    assert rows[0].p_success == pytest.approx(0.72)
    assert success_probability(0.6) == pytest.approx(0.72)


@pytest.mark.parametrize(
    "b_min,b_max,steps", [(-0.1, 0.5, 5), (0.5, 0.2, 5), (0.1, 0.8, 5), (0.1, 0.5, 1)]
)
def test_success_curve_rejects_bad_ranges(b_min, b_max, steps):
    with pytest.raises(ValueError):
        success_curve(b_min, b_max, steps)


@pytest.mark.parametrize(
    "hops,p,expected", [(3, 0.5, 0.125), (3, 0.7, 0.343), (3, 0.3, 0.343), (4, 1.0, 1.0)]
)
def test_eve_guess_probability(hops, p, expected):
    assert eve_guess_probability(hops, p) == pytest.approx(expected)


def test_eve_guess_probability_validation():
    with pytest.raises(ValueError):
        eve_guess_probability(0, 0.5)
    with pytest.raises(ValueError):
        eve_guess_probability(2, 1.2)


@pytest.mark.parametrize("b", [0.1, 0.3, 0.5, 0.6, MAX_B])
def test_success_curve_matches_povm_conclusive_probability(b):
    channel = ChannelSpec.from_b(b, 2)
    dset = discrimination_set(channel)
    povm = build_povm(dset.phi_tilde, channel)
    (row,) = success_curve(b, b, 1)
    assert row.p_success == pytest.approx(conclusive_probability(povm, dset), abs=1e-10)

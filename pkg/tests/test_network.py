import json
import os

import jsonschema
import numpy as np
import pytest
from services.network import (
    BELL_BASIS,
    GHZ_POVM,
    ChainConfig,
    EveStrategy,
    chain_payload_bits,
    eve_counts,
    run_chain,
    run_eve_experiment,
    transcript_records,
)
from services.protocol import NoiseModel
from services.states import ChannelSpec, LogicalInput
from utils.errors import ChainAbortedError, ContractViolationError
from utils.utils import dumps, read_json_file

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "..", "config", "schemas")
NODES = ("Alice", "Bob", "Charlie", "Dev")
WORKED_EXAMPLE = LogicalInput(alpha=0.6, beta=0.8, s=1, t=(1, 0, 1))
CHANNEL = ChannelSpec(a=0.8, b=0.6, n=3)


def make_config(**overrides):
    settings = {
        "node_names": NODES,
        "logical_input": WORKED_EXAMPLE,
        "channel": CHANNEL,
        "rng_seed": 5,
    }
    settings.update(overrides)
    return ChainConfig(**settings)


def four_sigma(expected, trials):
    return 4 * np.sqrt(expected * (1 - expected) / trials)


@pytest.fixture
def transcript_schema():
    return read_json_file(os.path.join(SCHEMA_DIR, "chain_transcript.schema.json"))


def test_chain_config_validation():
    with pytest.raises(ContractViolationError):
        make_config(node_names=("Alice",))
    with pytest.raises(ContractViolationError):
        make_config(channel=ChannelSpec(a=0.8, b=0.6, n=2))
    with pytest.raises(ContractViolationError):
        make_config(p_ghz_choice=1.5)
    assert make_config().hops == 3


@pytest.mark.parametrize("seed", range(4))
def test_noiseless_chain_delivers_state(seed):
    hops, final_fidelity = run_chain(make_config(rng_seed=seed))
    assert len(hops) == 3
    assert final_fidelity == pytest.approx(1.0, abs=1e-9)
    assert [(hop.sender, hop.receiver) for hop in hops] == list(zip(NODES, NODES[1:]))
    for hop in hops:
        assert hop.hop_fidelity == pytest.approx(1.0, abs=1e-9)


def test_all_ghz_chain_payload_bits():
    hops, _ = run_chain(make_config(p_ghz_choice=1.0))
    assert {hop.protocol_used for hop in hops} == {GHZ_POVM}
    assert all(hop.payload_bits == 6 for hop in hops)
    assert chain_payload_bits(hops) == 18
    # Intermediate nodes forward the frame bits unchanged
    assert all((hop.message.s, hop.message.t) == (1, (1, 0, 1)) for hop in hops)


def test_all_bell_chain_payload_bits():
    hops, final_fidelity = run_chain(make_config(p_ghz_choice=0.0))
    assert {hop.protocol_used for hop in hops} == {BELL_BASIS}
    assert all(hop.attempts == 1 and hop.payload_bits == 6 for hop in hops)
    assert final_fidelity == pytest.approx(1.0, abs=1e-9)


def test_bell_hops_recover_single_bitflips():
    config = make_config(p_ghz_choice=0.0, noise=NoiseModel(p_bitflip=0.02), rng_seed=3)
    fidelities = [run_chain(config, seed)[1] for seed in range(30)]
    assert sum(f > 0.999 for f in fidelities) >= 25


def test_run_chain_is_reproducible():
    first, _ = run_chain(make_config(rng_seed=9))
    second, _ = run_chain(make_config(rng_seed=9))
    assert transcript_records(first) == transcript_records(second)


def test_chain_aborts_when_hop_runs_out_of_attempts():
    config = make_config(
        channel=ChannelSpec.from_b(0.01, 3), p_ghz_choice=1.0, max_attempts=1, rng_seed=0
    )
    with pytest.raises(ChainAbortedError) as excinfo:
        run_chain(config)
    assert excinfo.value.hops == []


def test_eve_strategy_validation_and_guesses():
    with pytest.raises(ValueError):
        EveStrategy("oracle")
    hops, _ = run_chain(make_config())
    guesses = EveStrategy("stationary-bias").guess(hops, 0.3, None)
    assert guesses == (BELL_BASIS,) * 3
    assert EveStrategy("uniform").success_probability(3, 0.9) == pytest.approx(0.125)
    assert EveStrategy("stationary-bias").success_probability(3, 0.3) == pytest.approx(0.343)


def test_eve_uniform_rate_matches_prediction():
    trials = 20_000
    config = make_config()
    rate = run_eve_experiment(config, trials=trials, strategy="uniform", batch_size=5000)
    expected = 0.5**config.hops
    assert abs(rate - expected) < four_sigma(expected, trials)


@pytest.mark.parametrize("p", [0.3, 0.7])
def test_eve_stationary_bias_rate_matches_prediction(p):
    trials = 4000
    config = make_config(p_ghz_choice=p, rng_seed=13)
    rate = run_eve_experiment(config, trials=trials, strategy="stationary-bias", batch_size=1000)
    expected = max(p, 1 - p) ** config.hops
    assert abs(rate - expected) < four_sigma(expected, trials)


def test_eve_always_right_with_a_single_channel_type():
    config = make_config(p_ghz_choice=1.0)
    assert run_eve_experiment(config, trials=50, strategy="stationary-bias") == 1.0


def test_eve_counts_columns():
    counts = eve_counts(40, 2, make_config())
    assert counts[0] == 40
    assert 0 <= counts[1] <= 40
    assert counts[2] == 40


def test_eve_experiment_fails_when_every_chain_aborts(caplog):
    config = make_config(
        channel=ChannelSpec.from_b(0.01, 3), p_ghz_choice=1.0, max_attempts=1, rng_seed=0
    )
    with pytest.raises(ChainAbortedError):
        run_eve_experiment(config, trials=3)
    assert "Chain aborted" in caplog.text


def test_transcript_records_match_schema(transcript_schema):
    hops, _ = run_chain(make_config(rng_seed=21))
    for record in transcript_records(hops, run_index=2):
        line = json.loads(dumps(record))
        jsonschema.validate(line, transcript_schema)
        assert line["run"] == 2
        if line["protocol"] == BELL_BASIS:
            assert line["s"] is None and len(line["m1"]) == 3
        else:
            assert line["t"] == [1, 0, 1]


def test_teleporter_uses_configured_numerics(mocker):
    teleporter_cls = mocker.patch("services.network.ProposedTeleporter")
    config = make_config(
        max_qubits=16, rank_tolerance=1e-8, tolerance=1e-9, probability_tolerance=1e-6
    )
    config.teleporter()
    kwargs = teleporter_cls.call_args.kwargs
    assert kwargs["max_qubits"] == 16
    assert kwargs["rank_tolerance"] == 1e-8
    assert kwargs["tolerance"] == 1e-9
    assert kwargs["probability_tolerance"] == 1e-6

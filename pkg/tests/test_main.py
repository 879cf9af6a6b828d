import csv
import io
import os

import jsonschema
import pytest
from app.main import build_run_config, main, parse_arguments
from services.network import ChainConfig
from utils.utils import load_operators_hdf5, read_json_file, read_jsonl_file, read_yaml_file

ROOT = os.path.join(os.path.dirname(__file__), "..")
SCHEMA_DIR = os.path.join(ROOT, "config", "schemas")
WORKED_CHANNEL = ["--n", "3", "--a", "0.8", "--b", "0.6", "--alpha", "0.6", "--beta", "0.8"]


@pytest.fixture
def parameters():
    return read_yaml_file(os.path.join(ROOT, "config", "parameters.yml"))


@pytest.fixture
def report_schema():
    return read_json_file(os.path.join(SCHEMA_DIR, "report.schema.json"))


def csv_rows(text):
    body = "".join(line for line in io.StringIO(text) if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def run_config_for(parameters, argv):
    config = parameters["main_config"]
    return build_run_config(parse_arguments(config, parameters["file_paths"], argv), config)


def test_efficiency_csv_to_stdout(capsys):
    assert main(["efficiency", "--n-max", "10"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# artifact: \"ghzport\"")
    rows = csv_rows(out)
    assert len(rows) == 10
    assert float(rows[0]["eta_c"]) == pytest.approx(-100.0)
    assert float(rows[-1]["eta_q"]) == pytest.approx(30.0)
    assert float(rows[-1]["eta_c"]) == pytest.approx(35.0)


def test_family_json_matches_schema(tmp_path, report_schema):
    output = tmp_path / "family.json"
    assert main(["family", "--n", "3", "--format", "json", "--output", str(output)]) == 0
    report = read_json_file(str(output))
    jsonschema.validate(report, report_schema)
    assert report["metadata"]["command"] == "family"
    assert report["metadata"]["seed"] is None
    assert len(report["results"]) == 16
    labels = {row["label"] for row in report["results"]}
    assert "α|101⟩ − β|010⟩" in labels
    assert all(row["cbits"] == 6 and row["qubits"] == 7 for row in report["results"])


def test_povm_audit_json_and_operators(tmp_path, report_schema):
    output = tmp_path / "audit.json"
    operators = tmp_path / "ops" / "operators.h5"
    argv = ["povm-audit", *WORKED_CHANNEL, "--s", "1", "--t", "101", "--format", "json"]
    argv += ["--output", str(output), "--operators-out", str(operators)]
    assert main(argv) == 0

    report = read_json_file(str(output))
    jsonschema.validate(report, report_schema)
    metrics = {row["metric"]: row["value"] for row in report["results"]}
    assert metrics["p_closed_form"] == pytest.approx(0.72)
    assert metrics["p_frame_operator"] == pytest.approx(0.72)
    assert metrics["inconclusive_rank"] == 14
    assert metrics["orthogonal_ensemble"] is False
    assert "operators_out" not in report["metadata"]["parameters"]

    arrays = load_operators_hdf5(str(operators))
    assert {"pi_0", "pi_4", "phi", "phi_tilde", "gram"} <= set(arrays)
    assert arrays["pi_1"].shape == (16, 16)
    assert arrays["phi_tilde"].shape == (4, 16)


def test_missing_b_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["teleport", "--n", "3", "--seed", "1"])
    assert excinfo.value.code == 2


def test_zero_b_channel_fails_with_logged_reason(caplog):
    assert main(["teleport", "--n", "2", "--b", "0", "--seed", "1"]) == 1
    assert "teleport failed" in caplog.text


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport", "--n", "0", "--b", "0.6", "--seed", "1"],
        ["teleport", "--n", "3", "--b", "0.6", "--t", "10", "--seed", "1"],
        ["teleport", "--n", "3", "--a", "0.9", "--b", "0.6", "--seed", "1"],
        ["teleport", "--n", "3", "--a", "0.6", "--b", "0.8", "--seed", "1"],
        ["sweep", "--trials", "100"],
        ["error-compare", "--n", "4", "--trials", "10", "--seed", "1"],
        ["error-compare", "--pg", "0.5", "--trials", "10", "--seed", "1"],
    ],
)
def test_invalid_parameters_exit_with_status_1(argv):
    assert main(argv) == 1


def test_missing_configuration_exits_with_status_1(monkeypatch, tmp_path, caplog):
    monkeypatch.setenv("GHZPORT_CONFIG", str(tmp_path / "missing.yml"))
    assert main(["efficiency"]) == 1
    assert "Cannot load configuration" in caplog.text


def test_nearly_normalized_amplitudes_are_accepted(parameters):
    argv = ["teleport", "--n", "2", "--a", "0.70710678", "--b", "0.70710678", "--seed", "1"]
    run_config = run_config_for(parameters, argv)
    assert run_config.channel.a == pytest.approx(run_config.channel.b)
    assert run_config.channel.maximally_entangled
    assert run_config.logical_input.t == (0, 0)


def test_missing_amplitude_is_completed(parameters):
    run_config = run_config_for(parameters, ["chain", "--n", "3", "--b", "0.6", "--seed", "1"])
    assert run_config.channel.a == pytest.approx(0.8)
    assert run_config.parameters["nodes"] == ["Alice", "Bob", "Charlie", "Dev"]


def test_metadata_excludes_output_options(parameters):
    argv = ["teleport", *WORKED_CHANNEL, "--seed", "4", "--workers", "3", "--output", "x.csv"]
    metadata = run_config_for(parameters, argv).metadata()
    assert metadata["seed"] == 4
    assert "workers" not in metadata["parameters"]
    assert "output" not in metadata["parameters"]
    assert metadata["parameters"]["t"] == "000"


def test_teleport_output_is_reproducible(tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        output = tmp_path / name
        argv = ["teleport", *WORKED_CHANNEL, "--s", "1", "--t", "101", "--trials", "2000"]
        argv += ["--max-attempts", "1", "--seed", "7", "--batch-size", "500"]
        assert main(argv + ["--output", str(output)]) == 0
        outputs.append(output.read_bytes())
    assert outputs[0] == outputs[1]

    row = csv_rows(outputs[0].decode("utf-8"))[0]
    assert int(row["trials"]) == 2000
    assert float(row["conclusive_rate"]) == pytest.approx(0.72, abs=0.045)
    assert float(row["fidelity_min"]) == pytest.approx(1.0, abs=1e-9)
    outcome_total = sum(int(row[f"outcome_{bits}"]) for bits in ("00", "01", "10", "11"))
    assert outcome_total == int(row["conclusive"])


def test_sweep_with_empirical_rate(capsys):
    assert main(["sweep", "--steps", "3", "--trials", "300", "--seed", "2"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert [float(row["p_success"]) for row in rows] == pytest.approx([0.0, 0.25, 1.0])
    assert float(rows[0]["p_empirical"]) == 0.0
    assert float(rows[1]["p_empirical"]) == pytest.approx(0.25, abs=0.1)
    assert float(rows[2]["p_empirical"]) >= 0.99


def test_sweep_without_trials_leaves_empirical_empty(capsys):
    assert main(["sweep", "--steps", "2"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert [row["p_empirical"] for row in rows] == ["", ""]


def test_error_compare_json(tmp_path, report_schema):
    output = tmp_path / "compare.json"
    argv = ["error-compare", "--n", "3", "--p", "0.1", "--pg", "0.05", "--trials", "4000"]
    argv += ["--bitflip-trials", "40000", "--seed", "3", "--format", "json"]
    assert main(argv + ["--output", str(output)]) == 0
    report = read_json_file(str(output))
    jsonschema.validate(report, report_schema)
    row = report["results"][0]
    assert row["p_logical"] == pytest.approx(0.028)
    assert row["p_logical_mc"] == pytest.approx(0.028, abs=0.005)
    assert row["p_decode_first_order"] == pytest.approx(0.1)
    assert row["p_decode_exact"] == pytest.approx(0.0975)
    assert row["p_decode_mc"] == pytest.approx(0.0975, abs=0.025)
    assert row["ratio_analytic"] == pytest.approx(0.1 / 0.028)


def test_chain_transcript_lines_match_schema(tmp_path):
    output = tmp_path / "transcript.jsonl"
    argv = ["chain", *WORKED_CHANNEL, "--s", "1", "--t", "101", "--runs", "2"]
    argv += ["--eve-trials", "200", "--seed", "5", "--output", str(output)]
    assert main(argv) == 0

    schema = read_json_file(os.path.join(SCHEMA_DIR, "chain_transcript.schema.json"))
    lines = read_jsonl_file(str(output))
    for line in lines:
        jsonschema.validate(line, schema)
    assert "metadata" in lines[0]
    assert len(lines) == 1 + 2 * 3 + 1
    summary = lines[-1]["summary"]
    assert summary["completed"] == 2
    assert summary["final_fidelities"] == pytest.approx([1.0, 1.0], abs=1e-9)
    assert summary["eve_expected"] == pytest.approx(0.125)
    assert 0.0 <= summary["eve_success_rate"] <= 1.0
    assert lines[0]["metadata"]["parameters"]["nodes"] == ["Alice", "Bob", "Charlie", "Dev"]


def test_unreadable_configuration_is_reported(mocker, caplog):
    mocker.patch("app.main.read_yaml_file", return_value=None)
    assert main(["family", "--n", "2"]) == 1
    assert "Cannot load configuration" in caplog.text


def test_operator_save_failure_exits_with_status_1(mocker, caplog):
    mocker.patch("app.main.save_operators_hdf5", side_effect=IOError("Failed to save operators."))
    argv = ["povm-audit", *WORKED_CHANNEL, "--operators-out", "unused.h5", "--output", "-"]
    assert main(argv) == 1
    assert "povm-audit failed: Failed to save operators." in caplog.text


def test_chain_writes_transcript_through_jsonl_writer(mocker):
    writer = mocker.patch("app.main.write_jsonl")
    argv = ["chain", *WORKED_CHANNEL, "--runs", "2", "--seed", "5", "--output", "t.jsonl"]
    assert main(argv) == 0
    records, path, metadata = writer.call_args.args
    assert path == "t.jsonl"
    assert len(records) == 2 * 3 + 1
    assert set(records[-1]) == {"summary"}
    assert metadata["command"] == "chain"


def test_chain_passes_configured_tolerances(mocker, parameters):
    chain_config_cls = mocker.patch("app.main.ChainConfig", wraps=ChainConfig)
    mocker.patch("app.main.write_jsonl")
    assert main(["chain", *WORKED_CHANNEL, "--seed", "5"]) == 0
    kwargs = chain_config_cls.call_args.kwargs
    config = parameters["main_config"]
    assert kwargs["rank_tolerance"] == config["tensor_core"]["rank_tolerance"]
    assert kwargs["max_qubits"] == config["tensor_core"]["max_qubits"]
    assert kwargs["tolerance"] == config["discrimination"]["tolerance"]
    assert kwargs["probability_tolerance"] == config["discrimination"]["probability_tolerance"]

import json

import numpy as np
import pytest
from utils.utils import (
    build_metadata,
    derive_seed,
    dumps,
    format_csv_report,
    load_operators_hdf5,
    make_rng,
    read_jsonl_file,
    read_yaml_file,
    save_operators_hdf5,
    write_json_report,
    write_jsonl,
)


@pytest.fixture
def metadata():
    return build_metadata("efficiency", {"n_max": 3, "n_min": 1, "format": "csv"})


def test_build_metadata_sorts_parameters(metadata):
    assert list(metadata["parameters"]) == ["format", "n_max", "n_min"]
    assert metadata["artifact"] == "ghzport"
    assert metadata["generator"] == "numpy.random.Philox"
    assert metadata["seed"] is None


def test_make_rng_is_deterministic():
    assert np.array_equal(make_rng(3).random(5), make_rng(3).random(5))
    assert not np.array_equal(make_rng(3).random(5), make_rng(4).random(5))
    generator = make_rng(1)
    assert make_rng(generator) is generator
    assert derive_seed(10, 4) == 14


def test_dumps_converts_numpy_and_complex_values():
    text = dumps({"b": np.float64(0.5), "a": np.arange(2), "z": 1 + 2j, "flag": np.bool_(True)})
    assert json.loads(text) == {"a": [0, 1], "b": 0.5, "flag": True, "z": {"re": 1.0, "im": 2.0}}
    assert text.index('"a"') < text.index('"b"')


def test_format_csv_report_has_metadata_comments(metadata):
    text = format_csv_report(
        [{"n": 1, "label": "a,b", "values": [1, 2]}], ("n", "label", "values"), metadata
    )
    lines = text.splitlines()
    comments = [line for line in lines if line.startswith("# ")]
    assert len(comments) == len(metadata)
    assert '# command: "efficiency"' in comments
    assert lines[len(comments)] == "n,label,values"
    assert lines[len(comments) + 1] == '1,"a,b","[1, 2]"'


def test_write_jsonl_and_read_back(tmp_path, metadata):
    path = tmp_path / "nested" / "records.jsonl"
    write_jsonl([{"hop": 0}, {"hop": 1}], str(path), metadata)
    lines = read_jsonl_file(str(path))
    assert lines[0] == {"metadata": json.loads(dumps(metadata))}
    assert [line["hop"] for line in lines[1:]] == [0, 1]


def test_write_json_report_envelope(tmp_path, metadata):
    path = tmp_path / "report.json"
    write_json_report([{"n": 1}], str(path), metadata)
    report = json.loads(path.read_text(encoding="utf-8"))
    assert report["results"] == [{"n": 1}]
    assert report["metadata"]["command"] == "efficiency"


# Test for missing and malformed configuration files
def test_read_yaml_file_failures(tmp_path, caplog):
    assert read_yaml_file(str(tmp_path / "absent.yml")) is None
    assert "YAML file not found" in caplog.text
    broken = tmp_path / "broken.yml"
    broken.write_text("main_config: [unclosed", encoding="utf-8")
    assert read_yaml_file(str(broken)) is None
    assert "Error parsing YAML file" in caplog.text


def test_read_jsonl_file_missing(tmp_path):
    with pytest.raises(IOError):
        read_jsonl_file(str(tmp_path / "absent.jsonl"))


def test_save_and_load_operators(tmp_path):
    path = tmp_path / "ops" / "operators.h5"
    pi = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    save_operators_hdf5({"pi_1": pi, "gram": np.eye(2)}, str(path), {"n": 1, "b": 0.6})
    loaded = load_operators_hdf5(str(path))
    assert np.allclose(loaded["pi_1"], pi)
    assert set(loaded) == {"pi_1", "gram"}


def test_save_operators_requires_arrays(tmp_path):
    with pytest.raises(ValueError):
        save_operators_hdf5({}, str(tmp_path / "empty.h5"))

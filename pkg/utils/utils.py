# Standard library imports
import csv
import io
import json
import logging
import os
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Union

# Related third-party imports
import h5py
import numpy as np
import yaml

ARTIFACT_NAME = "ghzport"
ARTIFACT_VERSION = "1.0.0"
GENERATOR_NAME = "numpy.random.Philox"

SeedLike = Union[int, np.random.Generator, None]


def read_yaml_file(file_path):
    """Reads a YAML file and returns its content.

    Args:
        file_path (str): The path of the YAML file to read.

    Returns:
        dict or None: The content of the YAML file if successfully read and parsed, or None if
        an error occurs.
    """
    try:
        with open(file_path, "r") as file:
            return yaml.safe_load(file)
    except FileNotFoundError:
        logging.error(f"YAML file not found: {file_path}")
        return None
    except yaml.YAMLError as exc:
        logging.error(f"Error parsing YAML file: {file_path} - {exc}")
        return None


def read_json_file(file_path: str) -> Any:
    """Reads a JSON file and returns its content.

    Args:
        file_path (str): The path of the JSON file to read.

    Returns:
        Any: The content of the JSON file.

    Raises:
        IOError: If there is an error reading the JSON file.
    """
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            return json.load(file)
    except IOError as e:
        raise IOError(f"Error reading JSON file: {e}")


def read_jsonl_file(file_path: str) -> List[Dict[str, Any]]:
    """Reads a JSON-lines file into a list of objects, skipping blank lines."""
    try:
        with open(file_path, "r", encoding="utf-8") as file:
            return [json.loads(line) for line in file if line.strip()]
    except IOError as e:
        raise IOError(f"Error reading JSON-lines file: {e}")


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Returns a Generator on the counter-based Philox bit generator. An existing Generator is
    passed through untouched so trial loops can share one stream."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(base_seed: int, index: int) -> int:
    """Seed of the index-th batch or worker stream."""
    return int(base_seed) + int(index)


def build_metadata(
    command: str, parameters: Dict[str, Any], seed: Optional[int] = None
) -> Dict[str, Any]:
    """Builds the metadata block prepended to every output file. Contains nothing that varies
    between two runs with the same arguments.

    Args:
        command (str): The CLI subcommand name.
        parameters (Dict[str, Any]): Validated run parameters.
        seed (int, optional): Base seed of the run, None for deterministic commands.

    Returns:
        Dict[str, Any]: Metadata with sorted parameters.
    """
    return {
        "artifact": ARTIFACT_NAME,
        "version": ARTIFACT_VERSION,
        "command": command,
        "parameters": {key: parameters[key] for key in sorted(parameters)},
        "seed": seed,
        "generator": GENERATOR_NAME,
        "numpy_version": np.__version__,
    }


@contextmanager
def open_output(file_path: str) -> Iterator[TextIO]:
    """Opens an output target for text writing. "-" means stdout; otherwise parent directories
    are created.

    Raises:
        IOError: If the path cannot be opened for writing.
    """
    if file_path in (None, "-"):
        yield sys.stdout
        return

    directory = os.path.dirname(file_path)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        file = open(file_path, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise IOError(f"Cannot write output file {file_path}: {e}") from e

    with file:
        yield file
    logging.info(f"Data written to {file_path}")


def _to_serialisable(value: Any) -> Any:
    """Converts numpy scalars and arrays to plain Python values for JSON."""
    if isinstance(value, np.ndarray):
        return [_to_serialisable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): _to_serialisable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_serialisable(v) for v in value]
    return value


def dumps(data: Any) -> str:
    """Deterministic single-line JSON encoding."""
    return json.dumps(_to_serialisable(data), sort_keys=True, ensure_ascii=False)


def write_json_file(data: Any, file_path: str) -> None:
    """Writes the given data to a JSON file.

    Args:
        data (Any): The data to write.
        file_path (str): The file path to write the data to.
    """
    with open_output(file_path) as file:
        json.dump(_to_serialisable(data), file, indent=2, sort_keys=True, ensure_ascii=False)
        file.write("\n")


def write_json_report(results: Any, file_path: str, metadata: Dict[str, Any]) -> None:
    """Writes the JSON envelope {"metadata": ..., "results": ...}."""
    write_json_file({"metadata": metadata, "results": results}, file_path)


def format_csv_report(
    rows: Iterable[Dict[str, Any]], columns: Sequence[str], metadata: Dict[str, Any]
) -> str:
    """Renders rows as RFC-4180 CSV preceded by '#'-prefixed metadata comment lines.

    Args:
        rows (Iterable[Dict[str, Any]]): Records keyed by column name.
        columns (Sequence[str]): Column order, also written as the header row.
        metadata (Dict[str, Any]): Metadata block, one comment line per key.

    Returns:
        str: The CSV text.
    """
    buffer = io.StringIO()
    for key in sorted(metadata):
        buffer.write(f"# {key}: {dumps(metadata[key])}\n")

    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                column: dumps(value) if isinstance(value, (list, tuple, dict)) else value
                for column, value in ((c, _to_serialisable(row.get(c))) for c in columns)
            }
        )
    return buffer.getvalue()


def write_csv_report(
    rows: Iterable[Dict[str, Any]],
    columns: Sequence[str],
    file_path: str,
    metadata: Dict[str, Any],
) -> None:
    """Writes rows as CSV with a metadata comment header. See format_csv_report."""
    text = format_csv_report(rows, columns, metadata)
    with open_output(file_path) as file:
        file.write(text)


def write_jsonl(records: Iterable[Dict[str, Any]], file_path: str, metadata: Dict[str, Any]):
    """Writes a JSON-lines file: one {"metadata": ...} line, then one object per record."""
    with open_output(file_path) as file:
        file.write(dumps({"metadata": metadata}) + "\n")
        for record in records:
            file.write(dumps(record) + "\n")


def save_operators_hdf5(
    arrays: Dict[str, np.ndarray], file_path: str, attributes: Dict[str, Any] = None
) -> None:
    """Saves named (complex) arrays into an HDF5 file, one dataset per array.

    Args:
        arrays (Dict[str, np.ndarray]): Dataset name to array.
        file_path (str): Destination .h5 path; parent directories are created.
        attributes (Dict[str, Any], optional): Scalar attributes stored on the root group.

    Raises:
        ValueError: If no arrays are given.
        IOError: If there's an error in file operations.
    """
    if not arrays:
        raise ValueError("No arrays provided for saving.")

    directory = os.path.dirname(file_path)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        with h5py.File(file_path, "w") as hdf5_file:
            for name, array in arrays.items():
                hdf5_file.create_dataset(name, data=np.asarray(array))
            for key, value in (attributes or {}).items():
                hdf5_file.attrs[key] = value
        logging.info(f"{len(arrays)} operator datasets saved to {file_path}")
    except Exception as e:
        logging.error(f"Error occurred while saving operators: {e}")
        raise IOError("Failed to save operators.") from e


def load_operators_hdf5(file_path: str) -> Dict[str, np.ndarray]:
    """Reads every dataset of an HDF5 file into a dictionary.

    Raises:
        IOError: If there is an error reading the HDF5 file.
    """
    operators = {}
    try:
        with h5py.File(file_path, "r") as file:
            for key in file.keys():
                operators[key] = file[key][:]
        return operators
    except IOError as e:
        raise IOError(f"Error reading HDF5 file: {e}")

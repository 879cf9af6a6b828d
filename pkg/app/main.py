"""
ghzport - n-qubit teleportation over partially entangled GHZ channels.

Main Application Orchestrator:
This script is the command-line entry point of the simulator. It loads configuration, validates
the command-line parameters against the preconditions of the service each command drives, runs
the computation with explicit seeds, and writes CSV or JSON reports. Every report starts with a
metadata block (parameters, seed, generator, version), so any output file can be regenerated
from its own header.

Key Components:
- Argument parsing with one subcommand per experiment.
- RunConfig: the validated parameter record handed to a command.
- cmd_* handlers that call the services and shape their results into report rows.

CLI Commands:
- teleport: Runs the proposed scheme once or `--trials` times and reports the conclusive rate,
  mean attempts, fidelity statistics and the (m1, m2) histogram.
  Usage: `ghzport teleport --n 3 --s 1 --t 101 --a 0.8 --b 0.6 --alpha 0.6 --beta 0.8
  --trials 100000 --seed 7`
- povm-audit: Builds the POVM for a channel and frame and reports every construction check.
  Usage: `ghzport povm-audit --n 3 --a 0.8 --b 0.6 [--operators-out operators.h5]`
- sweep: Success probability 2b² over b, optionally with an empirical single-attempt rate.
  Usage: `ghzport sweep --steps 11 [--trials 10000 --seed 1]`
- efficiency: Qubit and cbit savings against Bell-basis teleportation for a range of n.
  Usage: `ghzport efficiency --n-max 50`
- error-compare: Decode-stage gate failure against idle majority-vote logical error.
  Usage: `ghzport error-compare --n 5 --p 0.01 --pg 0.005 --trials 1000000 --seed 3`
- chain: Hop-by-hop relay transcript (JSON lines) plus eavesdropper statistics.
  Usage: `ghzport chain --n 3 --b 0.6 --runs 5 --eve-trials 100000 --seed 5`
- family: The 2^{n+1} Pauli-frame states an n-qubit input can take.
  Usage: `ghzport family --n 3`

Environment Configuration:
A `.env` file is loaded at start. GHZPORT_CONFIG points to an alternative parameters file and
GHZPORT_LOG_LEVEL sets the root log level.

Exit status is 0 on success, 1 when a parameter or construction check fails (the reason is
logged at ERROR), and 2 for usage errors.
"""

# Standard library imports
import argparse
import logging
import math
import os
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

# Related third-party imports
import numpy as np
from dotenv import load_dotenv

# Local application/library specific imports
from config.logging_config import setup_global_logger
from services.analysis import (
    MAX_B,
    efficiency_table,
    resource_counts,
    success_curve,
)
from services.discrimination import audit_povm
from services.network import (
    EVE_STRATEGIES,
    ChainConfig,
    EveStrategy,
    chain_payload_bits,
    run_chain,
    run_eve_experiment,
    transcript_records,
)
from services.protocol import (
    TELEPORT_COUNT_FIELDS,
    NoiseModel,
    bitflip_failures,
    decode_failure_exact,
    decode_failure_first_order,
    logical_error_rate,
    merge_teleport_counts,
    pathway_b_failures,
    run_batches,
    teleport_counts,
)
from services.states import ChannelSpec, LogicalInput, enumerate_state_family
from utils.errors import ChainAbortedError
from utils.utils import (
    build_metadata,
    derive_seed,
    read_yaml_file,
    save_operators_hdf5,
    write_csv_report,
    write_json_report,
    write_jsonl,
)

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CONFIG_PATH = os.path.join(ROOT_DIR, "config", "parameters.yml")
AMPLITUDE_TOLERANCE = 1e-6
# Options that change where or how fast output is produced, never its content
NON_CONTENT_OPTIONS = ("command", "output", "workers", "operators_out")


@dataclass
class RunConfig:
    """Validated parameters of one CLI invocation."""

    command: str
    parameters: Dict[str, Any]
    seed: Optional[int] = None
    output: str = "-"
    format: str = "csv"
    workers: int = 1
    batch_size: int = 100_000
    channel: Optional[ChannelSpec] = None
    logical_input: Optional[LogicalInput] = None
    noise: NoiseModel = field(default_factory=NoiseModel)

    def metadata(self) -> Dict[str, Any]:
        parameters = {
            key: value
            for key, value in self.parameters.items()
            if key not in NON_CONTENT_OPTIONS and key != "seed"
        }
        return build_metadata(self.command, parameters, self.seed)


def _add_output_options(parser: argparse.ArgumentParser, cli_config: Dict[str, Any]) -> None:
    parser.add_argument(
        "--format", choices=("csv", "json"), default=cli_config["format"], help="Report format"
    )
    parser.add_argument("--output", default="-", help="Output file path, '-' for stdout")


def _add_monte_carlo_options(
    parser: argparse.ArgumentParser, cli_config: Dict[str, Any], seed_required: bool = True
) -> None:
    parser.add_argument(
        "--seed", type=int, required=seed_required, help="Base seed of the Monte Carlo run"
    )
    parser.add_argument("--workers", type=int, default=cli_config["workers"])
    parser.add_argument("--batch-size", type=int, default=cli_config["batch_size"])


def _add_channel_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="Physical qubits of the input")
    parser.add_argument("--a", type=float, help="Channel amplitude a (default sqrt(1 - b^2))")
    parser.add_argument("--b", type=float, required=True, help="Channel amplitude b")
    parser.add_argument("--alpha", type=float, help="Logical amplitude alpha")
    parser.add_argument("--beta", type=float, help="Logical amplitude beta")
    parser.add_argument("--s", type=int, default=0, help="Phase frame bit s")
    parser.add_argument("--t", type=str, help="Bit frame t1...tn, e.g. 101 (default all zeros)")


def parse_arguments(
    config: Dict[str, Any], file_paths: Dict[str, Any], argv: Sequence[str] = None
) -> Dict[str, Any]:
    """Parse command line arguments for the ghzport subcommands.

    Defaults for output format, worker count, batch size and the network come from the
    configuration.

    Args:
        config (dict): The `main_config` block of the parameters file.
        file_paths (dict): Default locations used when --operators-out or the chain --output
            is given without a value.
        argv (Sequence[str], optional): Arguments to parse instead of sys.argv.

    Returns:
        dict: A dictionary containing the command and its associated arguments.
    """
    cli_config = config["cli"]
    network_config = config["network"]
    protocol_config = config["protocol"]

    parser = argparse.ArgumentParser(
        prog="ghzport", description="n-qubit teleportation over partially entangled GHZ channels"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, help="commands")

    parser_teleport = subparsers.add_parser("teleport", help="Run the proposed scheme")
    _add_channel_options(parser_teleport)
    parser_teleport.add_argument("--trials", type=int, default=1)
    parser_teleport.add_argument("--p", type=float, default=0.0, help="Rail bit-flip rate")
    parser_teleport.add_argument(
        "--max-attempts", type=int, default=protocol_config["max_attempts"]
    )
    _add_monte_carlo_options(parser_teleport, cli_config)
    _add_output_options(parser_teleport, cli_config)

    parser_audit = subparsers.add_parser("povm-audit", help="Audit the discrimination POVM")
    _add_channel_options(parser_audit)
    parser_audit.add_argument(
        "--operators-out",
        nargs="?",
        const=file_paths["povm_audit"]["output_operators_file_path"],
        help="Save POVM operators to this HDF5 file",
    )
    _add_output_options(parser_audit, cli_config)

    parser_sweep = subparsers.add_parser("sweep", help="Success probability against b")
    parser_sweep.add_argument("--n", type=int, default=1)
    parser_sweep.add_argument("--b-min", type=float, default=0.0)
    parser_sweep.add_argument("--b-max", type=float, default=MAX_B)
    parser_sweep.add_argument("--steps", type=int, default=11)
    parser_sweep.add_argument(
        "--trials", type=int, default=0, help="Single-attempt trials per b (0 skips)"
    )
    _add_monte_carlo_options(parser_sweep, cli_config, seed_required=False)
    _add_output_options(parser_sweep, cli_config)

    parser_efficiency = subparsers.add_parser("efficiency", help="Resource savings against n")
    parser_efficiency.add_argument("--n-min", type=int, default=1)
    parser_efficiency.add_argument("--n-max", type=int, default=50)
    _add_output_options(parser_efficiency, cli_config)

    parser_compare = subparsers.add_parser(
        "error-compare", help="Decode-stage failure against idle logical error"
    )
    parser_compare.add_argument("--n", type=int, default=5)
    parser_compare.add_argument("--p", type=float, default=0.01, help="Rail bit-flip rate")
    parser_compare.add_argument("--pg", type=float, default=0.005, help="Two-qubit gate error")
    parser_compare.add_argument("--trials", type=int, default=1_000_000, help="Decode trials")
    parser_compare.add_argument(
        "--bitflip-trials", type=int, help="Bit-flip trials (default 100 x --trials)"
    )
    _add_monte_carlo_options(parser_compare, cli_config)
    _add_output_options(parser_compare, cli_config)

    parser_chain = subparsers.add_parser("chain", help="Hop-by-hop relay transcript")
    _add_channel_options(parser_chain)
    parser_chain.add_argument("--nodes", nargs="+", default=network_config["node_names"])
    parser_chain.add_argument("--p-ghz", type=float, default=network_config["p_ghz_choice"])
    parser_chain.add_argument("--p", type=float, default=0.0, help="Rail bit-flip rate")
    parser_chain.add_argument("--runs", type=int, default=1, help="Chains to transcribe")
    parser_chain.add_argument("--eve-trials", type=int, default=0)
    parser_chain.add_argument(
        "--eve-strategy", choices=EVE_STRATEGIES, default=network_config["eve_strategy"]
    )
    _add_monte_carlo_options(parser_chain, cli_config)
    parser_chain.add_argument(
        "--output",
        nargs="?",
        default="-",
        const=file_paths["chain"]["output_transcript_file_path"],
        help="JSON-lines output, '-' for stdout",
    )

    parser_family = subparsers.add_parser("family", help="States teleportable for n qubits")
    parser_family.add_argument("--n", type=int, required=True)
    _add_output_options(parser_family, cli_config)

    args = parser.parse_args(argv)
    return vars(args)


def _pair(first: Optional[float], second: Optional[float], names: str) -> Tuple[float, float]:
    """Completes or renormalizes an amplitude pair given on the command line."""
    if first is None and second is None:
        return 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)
    if first is None or second is None:
        given = first if first is not None else second
        if not 0.0 <= given <= 1.0:
            raise ValueError(f"{names} amplitude {given} must lie in [0, 1]")
        other = math.sqrt(1.0 - given * given)
        return (given, other) if first is not None else (other, given)
    norm = first * first + second * second
    if abs(norm - 1.0) > AMPLITUDE_TOLERANCE:
        raise ValueError(f"{names} amplitudes must satisfy x^2 + y^2 = 1, got {norm}")
    scale = math.sqrt(norm)
    return first / scale, second / scale


def _frame_bits(t: Optional[str], n: int) -> Tuple[int, ...]:
    if t is None:
        return (0,) * n
    if len(t) != n or any(bit not in "01" for bit in t):
        raise ValueError(f"--t must be {n} characters of 0/1, got {t!r}")
    return tuple(int(bit) for bit in t)


def _check_positive(parameters: Dict[str, Any], *names: str) -> None:
    for name in names:
        if parameters.get(name) is not None and parameters[name] < 1:
            raise ValueError(f"--{name.replace('_', '-')} must be at least 1")


def build_run_config(cli_args: Dict[str, Any], config: Dict[str, Any]) -> RunConfig:
    """Validates parsed arguments and builds the domain objects the command needs.

    Raises:
        ValueError: Naming the violated precondition.
    """
    parameters = dict(cli_args)
    command = parameters["command"]
    _check_positive(parameters, "n", "steps", "workers", "batch_size", "runs")
    minimum_trials = 0 if command == "sweep" else 1
    if parameters.get("trials") is not None and parameters["trials"] < minimum_trials:
        raise ValueError(f"--trials must be at least {minimum_trials}")

    run_config = RunConfig(
        command=command,
        parameters=parameters,
        seed=parameters.get("seed"),
        output=parameters.get("output", "-"),
        format=parameters.get("format", "csv"),
        workers=parameters.get("workers") or 1,
        batch_size=parameters.get("batch_size") or config["cli"]["batch_size"],
    )

    if command in ("teleport", "povm-audit", "chain"):
        n = parameters["n"]
        if parameters["b"] is None:
            raise ValueError("--b is required")
        a, b = _pair(parameters["a"], parameters["b"], "Channel")
        alpha, beta = _pair(parameters["alpha"], parameters["beta"], "Logical")
        run_config.channel = ChannelSpec(a=a, b=b, n=n)
        run_config.logical_input = LogicalInput(
            alpha=alpha, beta=beta, s=parameters["s"], t=_frame_bits(parameters["t"], n)
        )
        frame = "".join(map(str, run_config.logical_input.t))
        parameters.update(a=a, b=b, alpha=alpha, beta=beta, t=frame)

    if command in ("teleport", "chain"):
        run_config.noise = NoiseModel(p_bitflip=parameters["p"])
    if command == "sweep" and parameters["trials"] > 0 and parameters["seed"] is None:
        raise ValueError("--seed is required when --trials > 0")
    if command == "chain" and parameters["eve_trials"] < 0:
        raise ValueError("--eve-trials must be nonnegative")
    if command == "error-compare":
        run_config.noise = NoiseModel(p_bitflip=parameters["p"], p_gate=parameters["pg"])
        if parameters["bitflip_trials"] is None:
            parameters["bitflip_trials"] = 100 * parameters["trials"]
        _check_positive(parameters, "bitflip_trials")

    return run_config


def emit_report(rows: List[Dict[str, Any]], columns: Sequence[str], run_config: RunConfig):
    metadata = run_config.metadata()
    if run_config.format == "json":
        write_json_report(rows, run_config.output, metadata)
    else:
        write_csv_report(rows, columns, run_config.output, metadata)


def _teleporter_options(config: Dict[str, Any]) -> Dict[str, Any]:
    protocol_config = config["protocol"]
    return {
        "povm_two_qubit_cost": protocol_config["povm_two_qubit_cost"],
        "repetition_recovery": protocol_config["repetition_recovery"],
        **config["tensor_core"],
        **config["discrimination"],
    }


def cmd_teleport(run_config: RunConfig, config: Dict[str, Any]):
    parameters = run_config.parameters
    batch_fn = partial(
        teleport_counts,
        channel=run_config.channel,
        logical_input=run_config.logical_input,
        noise=run_config.noise,
        max_attempts=parameters["max_attempts"],
        **_teleporter_options(config),
    )
    counts = dict(
        zip(
            TELEPORT_COUNT_FIELDS,
            run_batches(
                batch_fn,
                parameters["trials"],
                run_config.seed,
                batch_size=run_config.batch_size,
                workers=run_config.workers,
                description="Teleport trials",
                merge=merge_teleport_counts,
            ),
        )
    )

    trials, conclusive = int(counts["runs"]), int(counts["conclusive"])
    mean = counts["fidelity_sum"] / conclusive if conclusive else None
    variance = counts["fidelity_sq_sum"] / conclusive - mean**2 if conclusive else None
    row = {
        "trials": trials,
        "conclusive": conclusive,
        "conclusive_rate": conclusive / trials,
        "expected_conclusive_probability": 2.0 * run_config.channel.b**2,
        "mean_attempts": counts["attempts"] / trials,
        "fidelity_mean": mean,
        "fidelity_min": counts["fidelity_min"] if conclusive else None,
        "fidelity_std": math.sqrt(max(variance, 0.0)) if conclusive else None,
        "gate_cost": (run_config.channel.n - 1) + config["protocol"]["povm_two_qubit_cost"],
    }
    for k, bits in enumerate(("00", "01", "10", "11"), start=1):
        row[f"outcome_{bits}"] = int(counts[f"outcome_{k}"])
    logging.info(
        f"Conclusive rate {row['conclusive_rate']:.5f} "
        f"(expected {row['expected_conclusive_probability']:.5f}) over {trials} trials"
    )
    emit_report([row], list(row), run_config)
    return 0


def cmd_povm_audit(run_config: RunConfig, config: Dict[str, Any]):
    audit, dset, povm = audit_povm(
        run_config.channel,
        run_config.logical_input,
        **config["discrimination"],
        rank_tolerance=config["tensor_core"]["rank_tolerance"],
    )
    logging.info(
        f"p = {audit.p_closed_form:.10f} (2b^2) vs {audit.p_frame_operator:.10f} "
        f"(1/lambda_max); rank(Pi_0) = {audit.inconclusive_rank}"
    )
    operators_out = run_config.parameters.get("operators_out")
    if operators_out:
        arrays = {f"pi_{k}": element.matrix for k, element in enumerate(povm.elements)}
        arrays["phi"] = np.array([state.amps for state in dset.phi])
        arrays["phi_tilde"] = np.array([state.amps for state in dset.phi_tilde])
        arrays["gram"] = dset.gram
        save_operators_hdf5(
            arrays,
            operators_out,
            {"n": audit.n, "a": audit.a, "b": audit.b, "p": audit.p_closed_form},
        )
    emit_report(audit.as_rows(), ("metric", "value"), run_config)
    return 0


def _empirical_rate(
    b: float, n: int, trials: int, seed: int, run_config: RunConfig, config: Dict[str, Any]
) -> float:
    """Single-attempt conclusive frequency at channel amplitude b."""
    if b == 0.0:
        return 0.0
    batch_fn = partial(
        teleport_counts,
        channel=ChannelSpec.from_b(b, n),
        logical_input=LogicalInput.chi0(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), n),
        max_attempts=1,
        **_teleporter_options(config),
    )
    counts = run_batches(
        batch_fn,
        trials,
        seed,
        batch_size=run_config.batch_size,
        workers=run_config.workers,
        description=f"b={b:.4f}",
        merge=merge_teleport_counts,
    )
    return float(counts[1] / counts[0])


def cmd_sweep(run_config: RunConfig, config: Dict[str, Any]):
    parameters = run_config.parameters
    rows = success_curve(parameters["b_min"], parameters["b_max"], parameters["steps"])
    trials = parameters["trials"]
    batches_per_row = math.ceil(trials / run_config.batch_size) if trials else 0

    report = []
    for index, row in enumerate(rows):
        empirical = None
        if trials:
            seed = derive_seed(run_config.seed, index * batches_per_row)
            empirical = _empirical_rate(row.b, parameters["n"], trials, seed, run_config, config)
        report.append(
            {"b": row.b, "p_success": row.p_success, "p_empirical": empirical, "trials": trials}
        )
    emit_report(report, ("b", "p_success", "p_empirical", "trials"), run_config)
    return 0


def cmd_efficiency(run_config: RunConfig, config: Dict[str, Any]):
    parameters = run_config.parameters
    rows = []
    for point in efficiency_table(parameters["n_min"], parameters["n_max"]):
        counts = resource_counts(point.n)
        rows.append(
            {
                "n": point.n,
                "eta_q": point.eta_q,
                "eta_c": point.eta_c,
                "eta_q_fraction": point.eta_q_fraction,
                "eta_c_fraction": point.eta_c_fraction,
                "bell_qubits": counts.bell_qubits,
                "ghz_qubits": counts.ghz_qubits,
                "bell_cbits": counts.bell_cbits,
                "ghz_cbits": counts.ghz_cbits,
            }
        )
    emit_report(rows, list(rows[0]), run_config)
    return 0


def cmd_error_compare(run_config: RunConfig, config: Dict[str, Any]):
    parameters = run_config.parameters
    n, noise = parameters["n"], run_config.noise
    trials, bitflip_trials = parameters["trials"], parameters["bitflip_trials"]
    gate_error_channel = config["protocol"]["gate_error_channel"]

    p_logical = logical_error_rate(n, noise.p_bitflip)
    decode_failures = run_batches(
        partial(
            pathway_b_failures, n=n, p_gate=noise.p_gate, gate_error_channel=gate_error_channel
        ),
        trials,
        run_config.seed,
        batch_size=run_config.batch_size,
        workers=run_config.workers,
        description="Decode trials",
    )
    decode_batches = math.ceil(trials / run_config.batch_size)
    logical_failures = run_batches(
        partial(bitflip_failures, n=n, p=noise.p_bitflip),
        bitflip_trials,
        derive_seed(run_config.seed, decode_batches),
        batch_size=max(run_config.batch_size, 1_000_000),
        workers=run_config.workers,
        description="Bit-flip trials",
    )

    p_decode_mc = decode_failures / trials
    row = {
        "n": n,
        "p": noise.p_bitflip,
        "p_gate": noise.p_gate,
        "p_decode_first_order": decode_failure_first_order(n, noise.p_gate),
        "p_decode_exact": decode_failure_exact(n, noise.p_gate),
        "p_decode_mc": p_decode_mc,
        "decode_trials": trials,
        "p_logical": p_logical,
        "p_logical_mc": logical_failures / bitflip_trials,
        "bitflip_trials": bitflip_trials,
        "ratio_analytic": decode_failure_first_order(n, noise.p_gate) / p_logical
        if p_logical
        else None,
        "ratio_mc_decode": p_decode_mc / p_logical if p_logical else None,
    }
    logging.info(
        f"P_decode {row['p_decode_mc']:.5f} (first order {row['p_decode_first_order']:.5f}), "
        f"P_L {p_logical:.4e}, measured ratio {row['ratio_mc_decode']}"
    )
    emit_report([row], list(row), run_config)
    return 0


def cmd_chain(run_config: RunConfig, config: Dict[str, Any]):
    parameters = run_config.parameters
    chain_config = ChainConfig(
        node_names=tuple(parameters["nodes"]),
        logical_input=run_config.logical_input,
        channel=run_config.channel,
        p_ghz_choice=parameters["p_ghz"],
        noise=run_config.noise,
        rng_seed=run_config.seed,
        max_attempts=config["protocol"]["max_attempts"],
        **_teleporter_options(config),
    )
    teleporter = chain_config.teleporter()

    records: List[Dict[str, Any]] = []
    final_fidelities: List[Optional[float]] = []
    payload_bits, aborted = 0, 0
    for run in range(parameters["runs"]):
        try:
            hops, final_fidelity = run_chain(
                chain_config, derive_seed(run_config.seed, run), teleporter
            )
        except ChainAbortedError as e:
            logging.warning(f"Chain run {run} aborted: {e}")
            hops, final_fidelity = e.hops, None
            aborted += 1
        records.extend(transcript_records(hops, run))
        payload_bits += chain_payload_bits(hops)
        final_fidelities.append(final_fidelity)

    summary: Dict[str, Any] = {
        "runs": parameters["runs"],
        "completed": parameters["runs"] - aborted,
        "aborted": aborted,
        "hops_per_chain": chain_config.hops,
        "total_payload_bits": payload_bits,
        "final_fidelities": final_fidelities,
        "eve_strategy": parameters["eve_strategy"],
        "eve_trials": parameters["eve_trials"],
        "eve_success_rate": None,
        "eve_expected": EveStrategy(parameters["eve_strategy"]).success_probability(
            chain_config.hops, chain_config.p_ghz_choice
        ),
    }
    if parameters["eve_trials"]:
        eve_config = replace(
            chain_config, rng_seed=derive_seed(run_config.seed, parameters["runs"])
        )
        summary["eve_success_rate"] = run_eve_experiment(
            eve_config,
            parameters["eve_trials"],
            parameters["eve_strategy"],
            batch_size=run_config.batch_size,
            workers=run_config.workers,
        )
        logging.info(
            f"Eve named every hop in {summary['eve_success_rate']:.4f} of chains "
            f"(expected {summary['eve_expected']:.4f})"
        )

    write_jsonl([*records, {"summary": summary}], run_config.output, run_config.metadata())
    return 0


def cmd_family(run_config: RunConfig, config: Dict[str, Any]):
    n = run_config.parameters["n"]
    rows = [
        {
            "s": member.s,
            "t": "".join(map(str, member.t)),
            "label": member.label(),
            "qubits": 2 * n + 1,
            "cbits": n + 3,
        }
        for member in enumerate_state_family(n)
    ]
    emit_report(rows, ("s", "t", "label", "qubits", "cbits"), run_config)
    return 0


COMMANDS = {
    "teleport": cmd_teleport,
    "povm-audit": cmd_povm_audit,
    "sweep": cmd_sweep,
    "efficiency": cmd_efficiency,
    "error-compare": cmd_error_compare,
    "chain": cmd_chain,
    "family": cmd_family,
}


def main(argv: Sequence[str] = None) -> int:
    """Entry point of the ghzport command.

    Steps:
    1. Loads environment variables, then initializes logging.
    2. Reads configurations from the parameters file (GHZPORT_CONFIG or config/parameters.yml)
       and from command-line arguments.
    3. Validates the arguments and dispatches to the command handler.
    4. Maps failures to the exit status: 1 for rejected parameters, failed checks or I/O.

    Returns:
        int: The process exit status.
    """
    load_dotenv()
    logging.basicConfig(level=logging.INFO)
    setup_global_logger()

    config_path = os.getenv("GHZPORT_CONFIG", DEFAULT_CONFIG_PATH)
    all_parameters = read_yaml_file(config_path)
    if all_parameters is None:
        logging.error(f"Cannot load configuration from {config_path}")
        return 1
    config = all_parameters["main_config"]
    file_paths = all_parameters["file_paths"]
    cli_args = parse_arguments(config, file_paths, argv)

    try:
        run_config = build_run_config(cli_args, config)
        return COMMANDS[run_config.command](run_config, config)
    except (ValueError, IOError) as e:
        logging.error(f"{cli_args['command']} failed: {e}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

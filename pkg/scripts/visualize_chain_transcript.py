import argparse
import logging
from typing import Any, Dict, List

from utils.utils import read_jsonl_file


def render_markdown(lines: List[Dict[str, Any]]) -> str:
    """Formats the lines of a chain transcript as a markdown table per run, followed by the
    summary."""
    metadata, summary, hops = {}, {}, []
    for line in lines:
        if "metadata" in line:
            metadata = line["metadata"]
        elif "summary" in line:
            summary = line["summary"]
        else:
            hops.append(line)

    title = f"{metadata.get('artifact', '?')} {metadata.get('version', '')}".strip()
    parts = [f"# Chain transcript ({title})\n"]
    parameters = metadata.get("parameters", {})
    if parameters:
        parts.append(f"**Nodes:** {' -> '.join(parameters.get('nodes', []))}\n")
        parts.append(f"**Seed:** {metadata.get('seed')}\n")

    for run in sorted({hop["run"] for hop in hops}):
        parts.append(f"## Run {run}\n")
        parts.append("| hop | link | protocol | attempts | m1 | m2 | s | t | bits | fidelity |")
        parts.append("|---|---|---|---|---|---|---|---|---|---|")
        for hop in (h for h in hops if h["run"] == run):
            t = "".join(map(str, hop["t"])) if hop["t"] is not None else "-"
            s = hop["s"] if hop["s"] is not None else "-"
            parts.append(
                f"| {hop['hop']} | {hop['sender']} → {hop['receiver']} | {hop['protocol']} "
                f"| {hop['attempts']} | {hop['m1']} | {hop['m2']} | {s} | {t} "
                f"| {hop['payload_bits']} | {hop['fidelity']:.6f} |"
            )
        parts.append("")

    if summary:
        parts.append("## Summary\n")
        for key in sorted(summary):
            parts.append(f"- **{key}:** {summary[key]}")
    return "\n".join(parts) + "\n"


def main():
    """Loads a chain transcript written by `ghzport chain` and converts it into a markdown file
    for easier reading.

    Inputs:
        A JSON-lines transcript (metadata line, hop lines, summary line).

    Outputs:
        A markdown file with one hop table per run and the run summary.
    """
    logging.basicConfig(level=logging.INFO)
    parser = argparse.ArgumentParser(description="Render a chain transcript as markdown")
    parser.add_argument("--input", default="data/chain/transcript.jsonl")
    parser.add_argument("--output", default="data/debug/chain_transcript.md")
    args = parser.parse_args()

    try:
        lines = read_jsonl_file(args.input)
    except IOError as e:
        logging.error(e)
        lines = []

    with open(args.output, "w", encoding="utf-8") as file:
        file.write(render_markdown(lines))

    logging.info(f"Markdown file created at: {args.output}")


if __name__ == "__main__":
    main()

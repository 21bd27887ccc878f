"""Turn a simulated load into a span tree and export it as JSON lines.

Run from the repository root:
  python demos/04_trace_export.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fedplan import (
    LoadStrategy,
    NetworkModel,
    build_graph,
    build_share_scope,
    export_jsonl,
    from_sim,
    load_workspace,
    plan,
    resolve_shares,
    simulate,
    validate_trace,
)

HOST = Path(__file__).resolve().parents[1] / "fixtures" / "fig1" / "host" / "federation.json"


def main():
    workspace, _ = load_workspace(str(HOST))
    resolution = resolve_shares(build_share_scope(workspace))
    graph, _ = build_graph(workspace, resolution)
    report = simulate(
        plan(graph, resolution, LoadStrategy.LAZY),
        NetworkModel(rtt_ms=100, bandwidth_bytes_per_ms=100),
    )

    log = from_sim(report)
    print(f"trace {log.trace_id}: {len(log.spans)} spans, "
          f"well-formed: {validate_trace(log) == []}")
    for span in log.spans:
        indent = "  " if span.parent_span_id else ""
        print(f"{indent}{span.span_id} {span.name:14s} [{span.start_ms:7.1f}, {span.end_ms:7.1f}] "
              f"{span.attributes}")

    print("\nJSON-lines export (one span per line):")
    print(export_jsonl(log), end="")


if __name__ == "__main__":
    main()

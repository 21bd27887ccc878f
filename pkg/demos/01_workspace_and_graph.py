"""Load a two-application federation, validate it, and export its module graph.

Run from the repository root:
  python demos/01_workspace_and_graph.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fedplan import (
    build_graph,
    build_share_scope,
    export_dot,
    load_workspace,
    reachable_set,
    resolve_shares,
    validate_workspace,
    waterfall_depth,
)

HOST = Path(__file__).resolve().parents[1] / "fixtures" / "fig1" / "host" / "federation.json"


def main():
    workspace, load_warnings = load_workspace(str(HOST))
    print(f"loaded workspace: host={workspace.host.name!r}, remotes={sorted(workspace.remotes)}")

    diagnostics = load_warnings + validate_workspace(workspace)
    print(f"validation findings: {len(diagnostics)}")
    for d in diagnostics:
        print(f"  {d}")

    resolution = resolve_shares(build_share_scope(workspace))
    graph, _ = build_graph(workspace, resolution)
    print(f"\nmodule graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    print(f"statically reachable from the entry: {sorted(reachable_set(graph, False))}")
    print(f"reachable once dynamic imports fire: {sorted(reachable_set(graph, True))}")
    print(f"waterfall depth (sequential fetch rounds for a naive lazy loader): {waterfall_depth(graph)}")

    print("\nDOT export (dashed = dynamic import):")
    print(export_dot(graph))


if __name__ == "__main__":
    main()

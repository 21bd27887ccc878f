"""Race the four load strategies over a fast link and a slow one.

Lazy reproduces the request waterfall; prefetch trades one manifest round for
parallelism; eager ships duplicated shared packages; SSR ships one composed
payload plus hydration. Run from the repository root:
  python demos/03_strategy_race.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fedplan import (
    NetworkModel,
    build_graph,
    build_share_scope,
    compare_strategies,
    load_workspace,
    resolve_shares,
)

HOST = (
    Path(__file__).resolve().parents[1] / "fixtures" / "fig1_shared" / "host" / "federation.json"
)

FAST = NetworkModel(rtt_ms=40, bandwidth_bytes_per_ms=1000, parse_ms_per_kb=0.05)
SLOW = NetworkModel(
    rtt_ms=300,
    bandwidth_bytes_per_ms=40,
    max_concurrent=4,
    parse_ms_per_kb=0.2,
    server_compose_ms=120,
    hydration_factor=1.6,
    interaction_delay_ms=0,
)


def race(title: str, net: NetworkModel):
    workspace, _ = load_workspace(str(HOST))
    resolution = resolve_shares(build_share_scope(workspace))
    graph, _ = build_graph(workspace, resolution)
    print(f"== {title} ==")
    header = f"{'strategy':9s} {'firstRender':>12s} {'interactive':>12s} {'bytes':>8s} {'rounds':>6s}"
    print(header)
    for report in compare_strategies(graph, resolution, net):
        print(
            f"{report.strategy.value:9s} {report.time_to_first_render_ms:10.1f}ms "
            f"{report.time_to_interactive_ms:10.1f}ms {report.total_bytes:8d} "
            f"{report.waterfall_rounds:6d}"
        )
    print()


def main():
    race("fast connection", FAST)
    race("slow connection", SLOW)
    print("the waterfall gap between lazy and prefetch widens as latency grows;")
    print("eager pays the duplicated shared bytes regardless of the network.")


if __name__ == "__main__":
    main()

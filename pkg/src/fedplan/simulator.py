"""Deterministic discrete-event simulation of a load plan over a network model.

Bandwidth is processor-shared: every in-flight transfer receives an equal
slice of the link, and completion horizons are recomputed at each start or
finish event. That is what makes prefetch bursts pay a visible cost instead
of getting free infinite parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import ToolError
from .graph import ModuleGraph
from .planner import LoadPlan, LoadStrategy, longest_chain, plan, required_bytes
from .shares import ShareResolution

_EPS = 1e-9

ALL_STRATEGIES = (
    LoadStrategy.LAZY,
    LoadStrategy.PREFETCH,
    LoadStrategy.EAGER,
    LoadStrategy.SSR,
)


@dataclass(frozen=True)
class NetworkModel:
    rtt_ms: float = 100.0
    bandwidth_bytes_per_ms: float = 100.0
    max_concurrent: int = 6
    parse_ms_per_kb: float = 0.0
    server_compose_ms: float = 0.0
    hydration_factor: float = 1.0
    interaction_delay_ms: float = 0.0

    def __post_init__(self) -> None:
        if (
            min(
                self.rtt_ms,
                self.parse_ms_per_kb,
                self.server_compose_ms,
                self.hydration_factor,
                self.interaction_delay_ms,
            )
            < 0
        ):
            raise ToolError("E-BAD-NET", "network parameters must be >= 0")
        if self.bandwidth_bytes_per_ms <= 0:
            raise ToolError("E-BAD-NET", "bandwidthBytesPerMs must be > 0")
        if self.max_concurrent < 1:
            raise ToolError("E-BAD-NET", "maxConcurrent must be >= 1")


_NET_FIELDS = {
    "rttMs": "rtt_ms",
    "bandwidthBytesPerMs": "bandwidth_bytes_per_ms",
    "maxConcurrent": "max_concurrent",
    "parseMsPerKb": "parse_ms_per_kb",
    "serverComposeMs": "server_compose_ms",
    "hydrationFactor": "hydration_factor",
    "interactionDelayMs": "interaction_delay_ms",
}


def network_from_json(obj: object) -> NetworkModel:
    if not isinstance(obj, dict):
        raise ToolError("E-BAD-NET", "network model must be a JSON object")
    kwargs = {}
    for key, value in obj.items():
        if key not in _NET_FIELDS:
            raise ToolError("E-BAD-NET", f"unknown network field {key!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ToolError("E-BAD-NET", f"network field {key!r} must be a number")
        kwargs[_NET_FIELDS[key]] = int(value) if key == "maxConcurrent" else float(value)
    return NetworkModel(**kwargs)


@dataclass(frozen=True)
class TimelineEntry:
    request_id: int
    start_ms: float
    headers_ms: float
    done_ms: float
    parse_done_ms: float
    size_bytes: int

    def to_json(self) -> dict:
        return {
            "requestId": self.request_id,
            "startMs": self.start_ms,
            "headersMs": self.headers_ms,
            "doneMs": self.done_ms,
            "parseDoneMs": self.parse_done_ms,
            "sizeBytes": self.size_bytes,
        }


@dataclass(frozen=True)
class SimReport:
    strategy: LoadStrategy
    time_to_first_render_ms: float
    time_to_interactive_ms: float
    total_bytes: int
    request_count: int
    max_observed_concurrency: int
    waterfall_rounds: int
    timeline: tuple[TimelineEntry, ...]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "timeToFirstRenderMs": self.time_to_first_render_ms,
            "timeToInteractiveMs": self.time_to_interactive_ms,
            "totalBytes": self.total_bytes,
            "requestCount": self.request_count,
            "maxObservedConcurrency": self.max_observed_concurrency,
            "waterfallRounds": self.waterfall_rounds,
            "timeline": [entry.to_json() for entry in self.timeline],
        }


def simulate(p: LoadPlan, net: NetworkModel) -> SimReport:
    """Run the plan to completion and report the realized timeline.

    A request becomes eligible once every dependsOn request has finished
    parsing (plus the interaction delay for dynamically triggered requests),
    waits FIFO for a concurrency slot, pays one round trip, transfers under
    fair-share bandwidth, then parses. SSR pays server composition before its
    transfer and hydration-weighted parsing after it.
    """
    requests = {r.id: r for r in p.requests}
    if not requests:
        return SimReport(p.strategy, 0.0, 0.0, 0, 0, 0, 0, ())

    is_ssr = p.strategy is LoadStrategy.SSR
    compose = net.server_compose_ms if is_ssr else 0.0
    parse_factor = net.hydration_factor if is_ssr else 1.0

    def parse_ms(size: int) -> float:
        return size / 1000.0 * net.parse_ms_per_kb * parse_factor

    children: dict[int, list[int]] = {rid: [] for rid in requests}
    blocked_on: dict[int, int] = {}
    for r in p.requests:
        blocked_on[r.id] = len(r.depends_on)
        for dep in r.depends_on:
            if dep not in requests:
                raise ToolError("E-DEADLOCK", f"request {r.id} depends on unknown request {dep}")
            children[dep].append(r.id)

    ready: list[tuple[float, int]] = sorted(
        (0.0 + (net.interaction_delay_ms if requests[rid].dynamic_trigger else 0.0), rid)
        for rid, count in blocked_on.items()
        if count == 0
    )
    latency: dict[int, float] = {}  # id -> transfer start time
    flows: dict[int, float] = {}  # id -> remaining bytes
    parsing: dict[int, float] = {}  # id -> parse done time

    start_at: dict[int, float] = {}
    headers_at: dict[int, float] = {}
    done_at: dict[int, float] = {}
    parse_done_at: dict[int, float] = {}

    in_flight = 0
    max_in_flight = 0
    t = 0.0

    def rate() -> float:
        return net.bandwidth_bytes_per_ms / len(flows)

    while len(parse_done_at) < len(requests):
        progressed = True
        while progressed:
            progressed = False

            finished = sorted(rid for rid, remaining in flows.items() if remaining <= _EPS)
            for rid in finished:
                del flows[rid]
                done_at[rid] = t
                parsing[rid] = t + parse_ms(requests[rid].size_bytes)
                in_flight -= 1
                progressed = True

            begun = sorted(rid for rid, begin in latency.items() if begin <= t + _EPS)
            for rid in begun:
                del latency[rid]
                flows[rid] = float(requests[rid].size_bytes)
                progressed = True

            parsed = sorted(rid for rid, when in parsing.items() if when <= t + _EPS)
            for rid in parsed:
                del parsing[rid]
                parse_done_at[rid] = t
                for child in children[rid]:
                    blocked_on[child] -= 1
                    if blocked_on[child] == 0:
                        delay = (
                            net.interaction_delay_ms
                            if requests[child].dynamic_trigger
                            else 0.0
                        )
                        ready.append((t + delay, child))
                progressed = True
            if parsed:
                ready.sort()

            while in_flight < net.max_concurrent and ready and ready[0][0] <= t + _EPS:
                eligible, rid = ready.pop(0)
                start_at[rid] = t
                headers_at[rid] = t + net.rtt_ms + compose
                latency[rid] = headers_at[rid]
                in_flight += 1
                max_in_flight = max(max_in_flight, in_flight)
                progressed = True

        if len(parse_done_at) == len(requests):
            break

        candidates = []
        if in_flight < net.max_concurrent and ready:
            candidates.append(ready[0][0])
        if latency:
            candidates.append(min(latency.values()))
        if flows:
            candidates.append(t + min(flows.values()) / rate())
        if parsing:
            candidates.append(min(parsing.values()))
        if not candidates:
            raise ToolError("E-DEADLOCK", "no runnable request; dependsOn cycle in plan")

        t_next = max(t, min(candidates))
        if flows and t_next > t:
            drained = (t_next - t) * rate()
            for rid in flows:
                flows[rid] -= drained
        t = t_next

    timeline = tuple(
        TimelineEntry(
            rid,
            start_at[rid],
            headers_at[rid],
            done_at[rid],
            parse_done_at[rid],
            requests[rid].size_bytes,
        )
        for rid in sorted(requests, key=lambda rid: (start_at[rid], rid))
    )
    root_request = next(r.id for r in p.requests if p.root_key in r.payload)
    return SimReport(
        strategy=p.strategy,
        time_to_first_render_ms=parse_done_at[root_request],
        time_to_interactive_ms=max(parse_done_at.values()),
        total_bytes=required_bytes(p),
        request_count=len(requests),
        max_observed_concurrency=max_in_flight,
        waterfall_rounds=longest_chain(p),
        timeline=timeline,
    )


def compare_strategies(
    g: ModuleGraph,
    res: ShareResolution,
    net: NetworkModel,
    strategies: tuple[LoadStrategy, ...] = ALL_STRATEGIES,
    manifest_bytes: int = 2000,
) -> list[SimReport]:
    """One report per strategy over identical inputs, in the order given."""
    return [
        simulate(plan(g, res, strategy, manifest_bytes=manifest_bytes), net)
        for strategy in strategies
    ]

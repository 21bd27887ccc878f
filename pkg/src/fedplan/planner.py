"""Turn a module graph plus share resolution into per-strategy fetch plans.

A plan is purely structural: requests, payloads, sizes, and a causal DAG of
dependsOn edges. Timing (latency, bandwidth, interaction delays) belongs to
the simulator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import ToolError
from .graph import ModuleGraph, fetch_units, node_label, reachable_set
from .shares import ShareResolution

MANIFEST_PSEUDO_MODULE = "__manifest__"
DEFAULT_MANIFEST_BYTES = 2000


class LoadStrategy(enum.Enum):
    LAZY = "lazy"
    PREFETCH = "prefetch"
    EAGER = "eager"
    SSR = "ssr"


@dataclass(frozen=True)
class Trigger:
    kind: str  # root | parse | manifest
    node: tuple[str, str] | None = None

    def to_json(self):
        if self.kind == "parse":
            return {"kind": "parse", "node": node_label(self.node)}
        return {"kind": self.kind}


@dataclass(frozen=True)
class FetchRequest:
    id: int
    payload: frozenset
    size_bytes: int
    depends_on: frozenset
    trigger: Trigger
    # True when every in-plan edge discovering this payload is a dynamic
    # import; the simulator then charges the interaction delay (Lazy only).
    dynamic_trigger: bool = False

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "payload": sorted(node_label(k) for k in self.payload),
            "sizeBytes": self.size_bytes,
            "dependsOn": sorted(self.depends_on),
            "trigger": self.trigger.to_json(),
            "dynamicTrigger": self.dynamic_trigger,
        }


@dataclass(frozen=True)
class LoadPlan:
    strategy: LoadStrategy
    requests: tuple[FetchRequest, ...]
    duplicate_bytes: int
    root_key: tuple[str, str]

    def request(self, request_id: int) -> FetchRequest:
        return self.requests[request_id]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "root": node_label(self.root_key),
            "requests": [r.to_json() for r in self.requests],
            "duplicateBytes": self.duplicate_bytes,
        }


def required_bytes(p: LoadPlan) -> int:
    return sum(r.size_bytes for r in p.requests)


def _app_shared_copies(res: ShareResolution, app: str) -> list[tuple[tuple[str, str], int]]:
    """Private (node key, size) copies one application would bundle pre-federation."""
    copies = []
    if res.scope is None:
        return copies
    for entry_app, spec in res.scope.entries:
        if entry_app != app:
            continue
        version = spec.provided_version
        if version is None and spec.package in res.bindings:
            version = res.bindings[spec.package][0]
        if version is None:
            continue  # nothing to bundle and nothing negotiated; surfaced as E-NO-PROVIDER
        copies.append(((app, f"{spec.package}@{version}"), spec.size_bytes))
    return copies


def _eager_duplicate_bytes(res: ShareResolution, apps: list[str]) -> int:
    """Bytes beyond one canonical copy per package when every app bundles its own."""
    per_package: dict[str, list[int]] = {}
    canonical: dict[str, int] = {}
    if res.scope is None:
        return 0
    for app in apps:
        for (app_key, label), size in _app_shared_copies(res, app):
            package = label.rsplit("@", 1)[0]
            per_package.setdefault(package, []).append(size)
    for package, sizes in per_package.items():
        if package in res.bindings:
            provider = res.bindings[package][1]
            for entry_app, spec in res.scope.entries:
                if entry_app == provider and spec.package == package:
                    canonical[package] = spec.size_bytes
                    break
        canonical.setdefault(package, max(sizes))
    return sum(sum(sizes) - canonical[pkg] for pkg, sizes in per_package.items())


def _plan_lazy(g: ModuleGraph, res: ShareResolution) -> LoadPlan:
    units, unit_edges, unit_of = fetch_units(g)
    root_unit = unit_of[g.root]

    succs: dict[int, set[int]] = {}
    preds: dict[int, set[int]] = {}
    edge_modes: dict[tuple[int, int], set[str]] = {}
    for a, b, mode in unit_edges:
        succs.setdefault(a, set()).add(b)
        preds.setdefault(b, set()).add(a)
        edge_modes.setdefault((a, b), set()).add(mode)

    reached = {root_unit}
    frontier = [root_unit]
    while frontier:
        u = frontier.pop()
        for v in succs.get(u, set()):
            if v not in reached:
                reached.add(v)
                frontier.append(v)

    # Deterministic ids in causal order: Kahn's algorithm with a sorted frontier.
    pending = {u: len(preds.get(u, set()) & reached) for u in reached}
    ready = sorted((u for u in reached if pending[u] == 0), key=lambda u: units[u][0])
    order: list[int] = []
    while ready:
        u = ready.pop(0)
        order.append(u)
        for v in sorted(succs.get(u, set()) & reached, key=lambda v: units[v][0]):
            pending[v] -= 1
            if pending[v] == 0:
                ready.append(v)
        ready.sort(key=lambda u: units[u][0])
    if len(order) != len(reached):
        raise ToolError("E-CYCLIC", "fetch units do not form a DAG")

    request_id = {u: i for i, u in enumerate(order)}
    requests = []
    for u in order:
        unit_preds = sorted(preds.get(u, set()) & reached)
        deps = frozenset(request_id[p] for p in unit_preds)
        if unit_preds:
            modes = set()
            for p in unit_preds:
                modes |= edge_modes[(p, u)]
            dynamic = modes == {"dynamic"}
            trigger = Trigger("parse", min(units[p][0] for p in unit_preds))
        else:
            dynamic = False
            trigger = Trigger("root")
        payload = frozenset(units[u])
        requests.append(
            FetchRequest(
                id=request_id[u],
                payload=payload,
                size_bytes=sum(g.nodes[k].size_bytes for k in payload),
                depends_on=deps,
                trigger=trigger,
                dynamic_trigger=dynamic,
            )
        )
    return LoadPlan(LoadStrategy.LAZY, tuple(requests), res.duplicate_bytes, g.root)


def _plan_prefetch(g: ModuleGraph, res: ShareResolution, manifest_bytes: int) -> LoadPlan:
    host = g.root[0]
    required = sorted(reachable_set(g, True))
    remote_apps = sorted({key[0] for key in g.nodes} - {host})

    requests = []
    manifest_id = None
    if remote_apps:
        payload = frozenset((app, MANIFEST_PSEUDO_MODULE) for app in remote_apps)
        manifest_id = 0
        requests.append(
            FetchRequest(
                id=0,
                payload=payload,
                size_bytes=manifest_bytes * len(remote_apps),
                depends_on=frozenset(),
                trigger=Trigger("manifest"),
            )
        )
    next_id = len(requests)
    for key in required:
        local = key[0] == host
        deps = frozenset() if local or manifest_id is None else frozenset({manifest_id})
        requests.append(
            FetchRequest(
                id=next_id,
                payload=frozenset({key}),
                size_bytes=g.nodes[key].size_bytes,
                depends_on=deps,
                trigger=Trigger("root") if local else Trigger("manifest"),
            )
        )
        next_id += 1
    return LoadPlan(LoadStrategy.PREFETCH, tuple(requests), res.duplicate_bytes, g.root)


def _plan_eager(g: ModuleGraph, res: ShareResolution) -> LoadPlan:
    from .graph import KIND_SHARED

    host = g.root[0]
    required = reachable_set(g, True)
    module_keys = [k for k in sorted(required) if g.nodes[k].kind != KIND_SHARED]
    apps = sorted({key[0] for key in module_keys}, key=lambda a: (a != host, a))

    requests = []
    for i, app in enumerate(apps):
        payload = {k for k in module_keys if k[0] == app}
        size = sum(g.nodes[k].size_bytes for k in payload)
        for copy_key, copy_size in _app_shared_copies(res, app):
            if copy_key not in payload:
                payload.add(copy_key)
                size += copy_size
        requests.append(
            FetchRequest(
                id=i,
                payload=frozenset(payload),
                size_bytes=size,
                depends_on=frozenset(),
                trigger=Trigger("root"),
            )
        )
    return LoadPlan(
        LoadStrategy.EAGER, tuple(requests), _eager_duplicate_bytes(res, apps), g.root
    )


def _plan_ssr(g: ModuleGraph, res: ShareResolution) -> LoadPlan:
    payload = set(reachable_set(g, True))
    for package, (version, provider) in res.bindings.items():
        payload.add((provider, f"{package}@{version}"))
    size = sum(g.nodes[k].size_bytes for k in payload if k in g.nodes)
    request = FetchRequest(
        id=0,
        payload=frozenset(payload),
        size_bytes=size,
        depends_on=frozenset(),
        trigger=Trigger("root"),
    )
    return LoadPlan(LoadStrategy.SSR, (request,), res.duplicate_bytes, g.root)


def plan(
    g: ModuleGraph,
    res: ShareResolution,
    strategy: LoadStrategy,
    manifest_bytes: int = DEFAULT_MANIFEST_BYTES,
) -> LoadPlan:
    """Build the fetch schedule one strategy implies for this graph.

    Lazy reproduces the discovery waterfall (one request per fetch unit, gated
    on every importer). Prefetch spends one manifest round, then fans out flat.
    Eager bundles each application self-contained, duplicating shared packages.
    SSR ships everything as a single server-composed payload.
    """
    if strategy is LoadStrategy.LAZY:
        built = _plan_lazy(g, res)
    elif strategy is LoadStrategy.PREFETCH:
        built = _plan_prefetch(g, res, manifest_bytes)
    elif strategy is LoadStrategy.EAGER:
        built = _plan_eager(g, res)
    else:
        built = _plan_ssr(g, res)

    covered = set()
    for request in built.requests:
        covered |= request.payload
    required = reachable_set(g, True)
    if strategy in (LoadStrategy.LAZY, LoadStrategy.PREFETCH, LoadStrategy.SSR):
        missing = required - covered
        if missing:
            raise ToolError(
                "E-UNPLANNABLE",
                "required nodes missing from plan: "
                + ", ".join(node_label(k) for k in sorted(missing)),
            )
    return built


def longest_chain(p: LoadPlan) -> int:
    """Length in requests of the longest dependsOn chain."""
    memo: dict[int, int] = {}
    by_id = {r.id: r for r in p.requests}

    def depth(rid: int) -> int:
        if rid in memo:
            return memo[rid]
        request = by_id[rid]
        memo[rid] = 1 + max((depth(d) for d in sorted(request.depends_on)), default=0)
        return memo[rid]

    return max((depth(r.id) for r in p.requests), default=0)

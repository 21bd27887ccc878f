"""Cross-application module graph: construction, reachability, depth, cycles, DOT.

Nodes are (application, module id) pairs; shared packages get their own
provider-attributed nodes so deduplication is visible in the topology. Module
cycles inside one application are tolerated (bundlers chunk them together);
cycles that span applications have no load order and are hard errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticBag, ToolError
from .manifest import LocalImport, RemoteImport, Workspace
from .shares import ShareResolution

KIND_ENTRY = "entry"
KIND_EXPOSED = "exposed"
KIND_INTERNAL = "internal"
KIND_SHARED = "sharedPkg"


@dataclass(frozen=True)
class ModuleNode:
    key: tuple[str, str]
    size_bytes: int
    kind: str


@dataclass(frozen=True)
class Edge:
    src: tuple[str, str]
    dst: tuple[str, str]
    mode: str  # static | dynamic


@dataclass(frozen=True)
class ModuleGraph:
    nodes: dict[tuple[str, str], ModuleNode]
    edges: tuple[Edge, ...]
    root: tuple[str, str]

    def outgoing(self) -> dict[tuple[str, str], list[Edge]]:
        out: dict[tuple[str, str], list[Edge]] = {key: [] for key in self.nodes}
        for edge in self.edges:
            out[edge.src].append(edge)
        return out

    def incoming(self) -> dict[tuple[str, str], list[Edge]]:
        inc: dict[tuple[str, str], list[Edge]] = {key: [] for key in self.nodes}
        for edge in self.edges:
            inc[edge.dst].append(edge)
        return inc


def node_label(key: tuple[str, str]) -> str:
    return f"{key[0]}/{key[1]}"


def build_graph(w: Workspace, res: ShareResolution) -> tuple[ModuleGraph, list[Diagnostic]]:
    """Link every application's declared modules into one graph.

    Local imports stay inside their application; remote imports resolve through
    the target's expose table; shared imports land on the bound package node,
    or on the importer's private fallback node when it opted out of the winner.
    """
    bag = DiagnosticBag()
    nodes: dict[tuple[str, str], ModuleNode] = {}
    fallback_node: dict[tuple[str, str], tuple[str, str]] = {}  # (app, pkg) -> node key

    for app in w.applications():
        exposed = {e.module for e in app.exposes}
        for mod in app.modules:
            if mod.id == app.entry:
                kind = KIND_ENTRY
            elif mod.id in exposed:
                kind = KIND_EXPOSED
            else:
                kind = KIND_INTERNAL
            nodes[(app.name, mod.id)] = ModuleNode((app.name, mod.id), mod.size_bytes, kind)

    def shared_size(app_name: str, package: str) -> int:
        app = w.app(app_name)
        if app is not None:
            for spec in app.shared:
                if spec.package == package:
                    return spec.size_bytes
        return 0

    bound_node: dict[str, tuple[str, str]] = {}
    for package, (version, provider) in res.bindings.items():
        key = (provider, f"{package}@{version}")
        bound_node[package] = key
        nodes[key] = ModuleNode(key, shared_size(provider, package), KIND_SHARED)
    for app_name, package, version in res.fallbacks:
        key = (app_name, f"{package}@{version}")
        fallback_node[(app_name, package)] = key
        nodes[key] = ModuleNode(key, shared_size(app_name, package), KIND_SHARED)

    edges: set[Edge] = set()
    for app in w.applications():
        for mod in app.modules:
            src = (app.name, mod.id)
            for mode, refs in (("static", mod.static_imports), ("dynamic", mod.dynamic_imports)):
                for ref in refs:
                    if isinstance(ref, LocalImport):
                        dst = (app.name, ref.module)
                        if dst not in nodes:
                            raise ToolError(
                                "E-DANGLING-LOCAL",
                                f"{app.name}:{mod.id} imports undeclared module {ref.module!r}",
                            )
                    elif isinstance(ref, RemoteImport):
                        target = w.resolve_alias(app.name, ref.remote)
                        if target is None:
                            raise ToolError(
                                "E-DANGLING-REMOTE",
                                f"{app.name}:{mod.id} imports unknown remote {ref.remote!r}",
                            )
                        module_id = target.expose_target(ref.expose)
                        if module_id is None or (target.name, module_id) not in nodes:
                            raise ToolError(
                                "E-DANGLING-REMOTE",
                                f"{app.name}:{mod.id} imports {ref.remote}/{ref.expose}, "
                                f"which {target.name} does not expose",
                            )
                        dst = (target.name, module_id)
                        if app.name != w.host.name:
                            bag.warning(
                                "W-TRANSITIVE-REMOTE",
                                f"{app.name}:{mod.id}",
                                f"remote application imports {ref.remote}/{ref.expose} transitively",
                            )
                    else:  # SharedImport
                        dst = fallback_node.get((app.name, ref.package)) or bound_node.get(
                            ref.package
                        )
                        if dst is None:
                            raise ToolError(
                                "E-UNRESOLVED-SHARED",
                                f"{app.name}:{mod.id} imports shared package "
                                f"{ref.package!r} absent from the resolution",
                            )
                    edges.add(Edge(src, dst, mode))

    root = (w.host.name, w.host.entry)
    if root not in nodes:
        raise ToolError("E-DANGLING-LOCAL", f"host entry {w.host.entry!r} is not a declared module")
    graph = ModuleGraph(nodes, tuple(sorted(edges, key=lambda e: (e.src, e.dst, e.mode))), root)
    fetch_units(graph)  # raises E-XAPP-CYCLE on cross-application cycles
    return graph, bag.items


def reachable_set(g: ModuleGraph, include_dynamic: bool) -> set[tuple[str, str]]:
    """Nodes reachable from root; dynamic edges are followed only when asked."""
    out = g.outgoing()
    seen = {g.root}
    frontier = [g.root]
    while frontier:
        key = frontier.pop()
        for edge in out[key]:
            if edge.mode == "dynamic" and not include_dynamic:
                continue
            if edge.dst not in seen:
                seen.add(edge.dst)
                frontier.append(edge.dst)
    return seen


def _tarjan_sccs(g: ModuleGraph) -> list[list[tuple[str, str]]]:
    out = g.outgoing()
    index: dict[tuple[str, str], int] = {}
    low: dict[tuple[str, str], int] = {}
    on_stack: set[tuple[str, str]] = set()
    stack: list[tuple[str, str]] = []
    sccs: list[list[tuple[str, str]]] = []
    counter = [0]

    def visit(start) -> None:
        # Iterative Tarjan: (node, edge iterator) pairs.
        work = [(start, iter(out[start]))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, edges = work[-1]
            advanced = False
            for edge in edges:
                succ = edge.dst
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(out[succ])))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                scc = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    scc.append(member)
                    if member == node:
                        break
                sccs.append(sorted(scc))

    for key in sorted(g.nodes):
        if key not in index:
            visit(key)
    return sccs


def fetch_units(g: ModuleGraph):
    """Contract intra-application cycles into single fetch units.

    Returns (units, unit_edges, unit_of): units are sorted key tuples, edges a
    set of (i, j, mode) triples over unit indices, unit_of maps keys to unit
    indices. Raises E-XAPP-CYCLE when a cycle spans applications.
    """
    sccs = sorted(_tarjan_sccs(g), key=lambda s: s[0])
    for scc in sccs:
        apps = {key[0] for key in scc}
        if len(scc) > 1 and len(apps) > 1:
            raise ToolError(
                "E-XAPP-CYCLE",
                "cycle spans applications: " + ", ".join(node_label(k) for k in scc),
            )
    unit_of = {}
    units = []
    for i, scc in enumerate(sccs):
        units.append(tuple(scc))
        for key in scc:
            unit_of[key] = i
    unit_edges: set[tuple[int, int, str]] = set()
    for edge in g.edges:
        a, b = unit_of[edge.src], unit_of[edge.dst]
        if a != b:
            unit_edges.add((a, b, edge.mode))
    return units, unit_edges, unit_of


def waterfall_depth(g: ModuleGraph) -> int:
    """Sequential fetch rounds of a naive lazy loader along its worst chain.

    Counts contracted fetch units on the longest path from the root, following
    static and dynamic edges alike (dynamic discovery is what builds the
    waterfall in the first place).
    """
    if not g.nodes:
        return 0
    units, unit_edges, unit_of = fetch_units(g)
    succs: dict[int, set[int]] = {}
    for a, b, _ in unit_edges:
        succs.setdefault(a, set()).add(b)
    memo: dict[int, int] = {}

    def depth_from(u: int) -> int:
        if u in memo:
            return memo[u]
        memo[u] = 1 + max((depth_from(v) for v in sorted(succs.get(u, ()))), default=0)
        return memo[u]

    return depth_from(unit_of[g.root])


def detect_cycles(g: ModuleGraph) -> list[list[tuple[str, str]]]:
    """Strongly connected components with more than one node, plus self-loops."""
    self_loops = {e.src for e in g.edges if e.src == e.dst}
    cycles = [scc for scc in _tarjan_sccs(g) if len(scc) > 1 or scc[0] in self_loops]
    return sorted(cycles, key=lambda scc: scc[0])


def export_dot(g: ModuleGraph) -> str:
    """Deterministic DOT rendering: dashed dynamic edges, boxed shared packages."""
    lines = ["digraph modules {", "  rankdir=LR;"]
    for key in sorted(g.nodes):
        node = g.nodes[key]
        attrs = ["shape=box"] if node.kind == KIND_SHARED else ["shape=ellipse"]
        if node.kind == KIND_ENTRY:
            attrs.append("style=bold")
        lines.append(f'  "{node_label(key)}" [{", ".join(attrs)}];')
    for edge in sorted(g.edges, key=lambda e: (e.src, e.dst, e.mode)):
        suffix = " [style=dashed]" if edge.mode == "dynamic" else ""
        lines.append(f'  "{node_label(edge.src)}" -> "{node_label(edge.dst)}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: ModuleGraph) -> dict:
    return {
        "nodes": [
            {
                "key": node_label(key),
                "app": key[0],
                "id": key[1],
                "kind": g.nodes[key].kind,
                "sizeBytes": g.nodes[key].size_bytes,
            }
            for key in sorted(g.nodes)
        ],
        "edges": [
            {"from": node_label(e.src), "to": node_label(e.dst), "mode": e.mode}
            for e in sorted(g.edges, key=lambda e: (e.src, e.dst, e.mode))
        ],
    }

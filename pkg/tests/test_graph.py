from __future__ import annotations

import pytest

from fedplan.diagnostics import ToolError
from fedplan.graph import (
    Edge,
    KIND_SHARED,
    ModuleGraph,
    ModuleNode,
    build_graph,
    detect_cycles,
    export_dot,
    reachable_set,
    waterfall_depth,
)
from fedplan.manifest import load_workspace
from fedplan.shares import build_share_scope, empty_resolution, resolve_shares

from conftest import FIXTURES, app, module, shared_spec, workspace
from oracles import bfs_reachable, brute_sccs, dfs_longest_path


def fig1_workspace():
    return workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", size=10000, dynamic=("remote/./Header",)),),
            remotes=("remote",),
        ),
        app(
            "remote",
            modules=(
                module("./Header", size=10000, static=("./Nav",)),
                module("./Nav", size=10000),
            ),
            exposes=(("./Header", "./Header"),),
        ),
    )


def fig1_graph():
    g, warnings = build_graph(fig1_workspace(), empty_resolution())
    assert warnings == []
    return g


def make_graph(nodes, edges, root):
    node_map = {key: ModuleNode(key, size, kind) for key, size, kind in nodes}
    return ModuleGraph(node_map, tuple(Edge(s, d, m) for s, d, m in edges), root)


def test_build_fig1_topology():
    g = fig1_graph()
    assert len(g.nodes) == 3
    assert len(g.edges) == 2
    assert g.root == ("host", "entry")
    assert g.nodes[("host", "entry")].kind == "entry"
    assert g.nodes[("remote", "./Header")].kind == "exposed"
    assert g.nodes[("remote", "./Nav")].kind == "internal"
    modes = {(e.src, e.dst): e.mode for e in g.edges}
    assert modes[("host", "entry"), ("remote", "./Header")] == "dynamic"
    assert modes[("remote", "./Header"), ("remote", "./Nav")] == "static"


def test_build_shared_node_deduplicates():
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", size=10000, static=("react",), dynamic=("remote/./Header",)),),
            remotes=("remote",),
            shared=(shared_spec("react", "^18.0.0", "18.2.0", singleton=True, size=130000),),
        ),
        app(
            "remote",
            modules=(
                module("./Header", size=10000, static=("./Nav", "react")),
                module("./Nav", size=10000),
            ),
            exposes=(("./Header", "./Header"),),
            shared=(shared_spec("react", "^18.1.0", "18.1.0", singleton=True, size=130000),),
        ),
    )
    res = resolve_shares(build_share_scope(w))
    g, _ = build_graph(w, res)
    shared_nodes = [n for n in g.nodes.values() if n.kind == KIND_SHARED]
    # Node-count oracle from the resolution: one node per binding plus one per fallback.
    assert len(shared_nodes) == len(res.bindings) + len(res.fallbacks) == 1
    key = shared_nodes[0].key
    assert key == ("host", "react@18.2.0")
    assert shared_nodes[0].size_bytes == 130000
    incoming = [e for e in g.edges if e.dst == key]
    assert len(incoming) == 2


def test_build_fallback_gets_private_node():
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", static=("lodash",), dynamic=("remote/./Chart",)),),
            remotes=("remote",),
            shared=(shared_spec("lodash", "~4.17.0", "4.17.21", size=70000),),
        ),
        app(
            "remote",
            modules=(module("./Chart", static=("lodash",)),),
            exposes=(("./Chart", "./Chart"),),
            shared=(shared_spec("lodash", "^3.0.0", "3.10.1", size=60000),),
        ),
    )
    res = resolve_shares(build_share_scope(w))
    g, _ = build_graph(w, res)
    shared_nodes = sorted(n.key for n in g.nodes.values() if n.kind == KIND_SHARED)
    assert shared_nodes == [("host", "lodash@4.17.21"), ("remote", "lodash@3.10.1")]
    assert len(shared_nodes) == 1 + len(res.fallbacks)
    edges_to_fallback = [e for e in g.edges if e.dst == ("remote", "lodash@3.10.1")]
    assert [e.src for e in edges_to_fallback] == [("remote", "./Chart")]


def test_build_dangling_remote():
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", dynamic=("remote/./Missing",)),),
            remotes=("remote",),
        ),
        app("remote", modules=(module("./Header"),), exposes=(("./Header", "./Header"),)),
    )
    with pytest.raises(ToolError) as err:
        build_graph(w, empty_resolution())
    assert err.value.code == "E-DANGLING-REMOTE"


def test_build_unresolved_shared():
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", static=("react",)),),
            shared=(shared_spec("react", "^18.0.0"),),  # consumer only, never provided
        )
    )
    res = resolve_shares(build_share_scope(w))
    with pytest.raises(ToolError) as err:
        build_graph(w, res)
    assert err.value.code == "E-UNRESOLVED-SHARED"


def test_build_transitive_remote_warns():
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(module("entry", dynamic=("r1/./A",)),),
            remotes=("r1",),
        ),
        app(
            "r1",
            modules=(module("./A", static=("r2/./B",)),),
            exposes=(("./A", "./A"),),
            remotes=("r2",),
        ),
        app("r2", modules=(module("./B"),), exposes=(("./B", "./B"),)),
    )
    g, warnings = build_graph(w, empty_resolution())
    assert [w.code for w in warnings] == ["W-TRANSITIVE-REMOTE"]
    assert waterfall_depth(g) == 3


def test_build_cross_app_cycle_is_error():
    # host/./X -> remote/./A -> host/./X
    w = workspace(
        app(
            "host",
            entry="entry",
            modules=(
                module("entry", static=("remote/./A",)),
                module("./X", static=("remote/./A",)),
            ),
            exposes=(("./X", "./X"),),
            remotes=("remote",),
        ),
        app(
            "remote",
            modules=(module("./A", static=("host/./X",)),),
            exposes=(("./A", "./A"),),
            remotes=("host",),
        ),
    )
    with pytest.raises(ToolError) as err:
        build_graph(w, empty_resolution())
    assert err.value.code == "E-XAPP-CYCLE"


def test_reachable_set_static_vs_dynamic():
    g = fig1_graph()
    assert reachable_set(g, include_dynamic=False) == {("host", "entry")}
    # BFS oracle over the raw edge list.
    edges = [(e.src, e.dst, e.mode) for e in g.edges]
    assert reachable_set(g, include_dynamic=True) == bfs_reachable(edges, g.root, True)
    assert len(reachable_set(g, include_dynamic=True)) == 3


def test_reachable_set_isolated_root():
    g = make_graph([(("a", "m"), 1, "entry")], [], ("a", "m"))
    assert reachable_set(g, True) == {("a", "m")}
    assert reachable_set(g, True) >= reachable_set(g, False)


def test_waterfall_depth_single_node():
    g = make_graph([(("a", "m"), 1, "entry")], [], ("a", "m"))
    assert waterfall_depth(g) == 1


def test_waterfall_depth_fig1_chain():
    g = fig1_graph()
    edges = [(e.src, e.dst, e.mode) for e in g.edges]
    assert waterfall_depth(g) == dfs_longest_path(edges, g.root) == 3


def test_waterfall_depth_diamond():
    nodes = [(("a", n), 1, "internal") for n in ("root", "x", "y", "z")]
    edges = [
        (("a", "root"), ("a", "x"), "static"),
        (("a", "root"), ("a", "y"), "static"),
        (("a", "x"), ("a", "z"), "static"),
        (("a", "y"), ("a", "z"), "static"),
    ]
    g = make_graph(nodes, edges, ("a", "root"))
    assert waterfall_depth(g) == dfs_longest_path(edges, g.root) == 3


def test_waterfall_depth_contracts_intra_app_cycle():
    nodes = [(("a", n), 1, "internal") for n in ("root", "x", "y")]
    edges = [
        (("a", "root"), ("a", "x"), "static"),
        (("a", "x"), ("a", "y"), "static"),
        (("a", "y"), ("a", "x"), "static"),
    ]
    g = make_graph(nodes, edges, ("a", "root"))
    # x and y fetch as one unit.
    assert waterfall_depth(g) == 2


def test_detect_cycles_acyclic_and_minimal():
    assert detect_cycles(fig1_graph()) == []
    nodes = [(("a", n), 1, "internal") for n in ("A", "B")]
    edges = [(("a", "A"), ("a", "B"), "static"), (("a", "B"), ("a", "A"), "static")]
    g = make_graph(nodes, edges, ("a", "A"))
    assert detect_cycles(g) == [[("a", "A"), ("a", "B")]]


def test_detect_cycles_two_disjoint_sorted():
    names = ["A", "B", "C", "D", "root"]
    nodes = [(("a", n), 1, "internal") for n in names]
    edges = [
        (("a", "root"), ("a", "A"), "static"),
        (("a", "root"), ("a", "C"), "static"),
        (("a", "A"), ("a", "B"), "static"),
        (("a", "B"), ("a", "A"), "static"),
        (("a", "C"), ("a", "D"), "static"),
        (("a", "D"), ("a", "C"), "static"),
    ]
    g = make_graph(nodes, edges, ("a", "root"))
    got = detect_cycles(g)
    assert got == [[("a", "A"), ("a", "B")], [("a", "C"), ("a", "D")]]
    # SCC oracle via pairwise reachability.
    oracle = [s for s in brute_sccs([k for k, _, _ in nodes], edges) if len(s) > 1]
    assert got == oracle


def test_detect_self_loop():
    nodes = [(("a", "A"), 1, "internal")]
    edges = [(("a", "A"), ("a", "A"), "static")]
    g = make_graph(nodes, edges, ("a", "A"))
    assert detect_cycles(g) == [[("a", "A")]]


def test_export_dot_fig1():
    dot = export_dot(fig1_graph())
    assert '"host/entry" -> "remote/./Header" [style=dashed]' in dot
    assert '"remote/./Header" -> "remote/./Nav";' in dot


def test_export_dot_lone_root():
    dot = export_dot(make_graph([(("a", "m"), 1, "entry")], [], ("a", "m")))
    assert dot.count("->") == 0
    assert '"a/m"' in dot


def test_export_dot_deterministic_and_discriminating(fig1_host_path):
    g = fig1_graph()
    assert export_dot(g) == export_dot(g)
    w, _ = load_workspace(fig1_host_path)
    g2, _ = build_graph(w, empty_resolution())
    assert export_dot(g2) == export_dot(g)  # same topology, same bytes
    other = make_graph([(("a", "m"), 1, "entry")], [], ("a", "m"))
    assert export_dot(other) != export_dot(g)


def test_shared_nodes_render_as_boxes():
    w, _ = load_workspace(str(FIXTURES / "fig1_shared" / "host" / "federation.json"))
    res = resolve_shares(build_share_scope(w))
    g, _ = build_graph(w, res)
    dot = export_dot(g)
    assert '"host/react@18.2.0" [shape=box];' in dot

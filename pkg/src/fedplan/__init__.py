"""fedplan: static analysis and load simulation for module federations."""

from .diagnostics import Diagnostic, ToolError
from .graph import (
    Edge,
    ModuleGraph,
    ModuleNode,
    build_graph,
    detect_cycles,
    export_dot,
    reachable_set,
    waterfall_depth,
)
from .interfaces import (
    Expectation,
    InterfaceDecl,
    check_compatibility,
    collect_expectations,
    is_subtype,
    parse_interface,
)
from .manifest import (
    FederationManifest,
    Workspace,
    load_workspace,
    parse_manifest,
    serialize_manifest,
    validate_manifest,
    validate_workspace,
)
from .planner import FetchRequest, LoadPlan, LoadStrategy, plan, required_bytes
from .semver import (
    Version,
    VersionRange,
    highest_satisfying,
    intersect,
    parse_range,
    parse_version,
    render_range,
    satisfies,
)
from .shares import ShareResolution, ShareScope, build_share_scope, resolve_shares
from .simulator import NetworkModel, SimReport, compare_strategies, simulate
from .trace import Span, TraceLog, export_jsonl, from_sim, validate_trace

__version__ = "0.1.0"

__all__ = [
    "Diagnostic",
    "Edge",
    "Expectation",
    "FederationManifest",
    "FetchRequest",
    "InterfaceDecl",
    "LoadPlan",
    "LoadStrategy",
    "ModuleGraph",
    "ModuleNode",
    "NetworkModel",
    "ShareResolution",
    "ShareScope",
    "SimReport",
    "Span",
    "ToolError",
    "TraceLog",
    "Version",
    "VersionRange",
    "Workspace",
    "build_graph",
    "build_share_scope",
    "check_compatibility",
    "collect_expectations",
    "compare_strategies",
    "detect_cycles",
    "export_dot",
    "export_jsonl",
    "from_sim",
    "highest_satisfying",
    "intersect",
    "is_subtype",
    "load_workspace",
    "parse_interface",
    "parse_manifest",
    "parse_range",
    "parse_version",
    "plan",
    "reachable_set",
    "render_range",
    "required_bytes",
    "resolve_shares",
    "satisfies",
    "serialize_manifest",
    "simulate",
    "validate_manifest",
    "validate_trace",
    "validate_workspace",
    "waterfall_depth",
]

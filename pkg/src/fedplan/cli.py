"""Command-line front end: validate, resolve, type-check, plan, simulate, trace.

Exit codes: 0 when the analysis found no errors, 1 when diagnostics of
severity error were produced (validation failures, share conflicts, type
mismatches), 2 for usage and IO failures (bad arguments, unreadable files,
malformed network configs).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .diagnostics import Diagnostic, ERROR, ToolError, has_errors
from .graph import build_graph, export_dot, graph_to_json
from .interfaces import check_compatibility, collect_expectations
from .manifest import Workspace, load_workspace, validate_workspace
from .planner import DEFAULT_MANIFEST_BYTES, LoadStrategy, plan
from .shares import build_share_scope, resolve_shares
from .simulator import ALL_STRATEGIES, network_from_json, simulate
from .trace import export_jsonl, from_sim

_USAGE_CODES = {"E-IO", "E-BAD-NET"}


def _color_enabled() -> bool:
    if os.environ.get("FEDPLAN_COLOR") == "0":
        return False
    return sys.stderr.isatty()


def _paint(severity: str, text: str) -> str:
    if not _color_enabled():
        return text
    code = "31" if severity == ERROR else "33"
    return f"\x1b[{code}m{text}\x1b[0m"


class _Output:
    def __init__(self, args: argparse.Namespace) -> None:
        self.fmt = getattr(args, "format", "table")
        self.quiet = getattr(args, "quiet", False)

    @property
    def json_mode(self) -> bool:
        return self.fmt == "json"

    def emit_json(self, doc) -> None:
        print(json.dumps(doc, indent=2))

    def emit_diagnostics(self, diags: list[Diagnostic]) -> None:
        if self.quiet:
            return
        for d in diags:
            print(_paint(d.severity, str(d)), file=sys.stderr)

    def emit_line(self, text: str) -> None:
        if not self.quiet:
            print(text)

    def emit_table(self, headers: list[str], rows: list[list[str]]) -> None:
        if self.quiet:
            return
        widths = [len(h) for h in headers]
        for row in rows:
            widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
        line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
        print(line)
        print("  ".join("-" * w for w in widths))
        for row in rows:
            print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _fmt_ms(value: float) -> str:
    return f"{value:g}"


def _finish_diagnostics(out: _Output, diags: list[Diagnostic], extra: dict | None = None) -> int:
    """Emit diagnostics in the active mode and map them to an exit code."""
    if out.json_mode:
        doc = {"diagnostics": [d.to_json() for d in diags]}
        if extra:
            doc.update(extra)
        out.emit_json(doc)
    else:
        out.emit_diagnostics(diags)
    return 1 if has_errors(diags) else 0


def _load_checked(args, out: _Output) -> tuple[Workspace, list[Diagnostic]] | int:
    """Load + validate the workspace; on errors, report and return exit code 1."""
    w, diags = load_workspace(args.host)
    diags = diags + validate_workspace(w)
    if has_errors(diags):
        return _finish_diagnostics(out, diags)
    return w, diags


def cmd_validate(args: argparse.Namespace) -> int:
    out = _Output(args)
    w, diags = load_workspace(args.host)
    diags = diags + validate_workspace(w)
    apps = [a.name for a in w.applications()]
    if out.json_mode:
        out.emit_json({"applications": apps, "diagnostics": [d.to_json() for d in diags]})
    else:
        out.emit_diagnostics(diags)
        errors = sum(1 for d in diags if d.severity == ERROR)
        warnings = len(diags) - errors
        out.emit_line(
            f"{len(apps)} application(s): {', '.join(apps)} "
            f"({errors} error(s), {warnings} warning(s))"
        )
    return 1 if has_errors(diags) else 0


def _analysis(args, out: _Output):
    """Shared pipeline: workspace -> share resolution -> module graph."""
    loaded = _load_checked(args, out)
    if isinstance(loaded, int):
        return loaded
    w, diags = loaded
    res = resolve_shares(build_share_scope(w))
    g, graph_warnings = build_graph(w, res)
    if not out.json_mode:
        out.emit_diagnostics(diags + graph_warnings)
    return w, res, g


def cmd_graph(args: argparse.Namespace) -> int:
    out = _Output(args)
    result = _analysis(args, out)
    if isinstance(result, int):
        return result
    _, _, g = result
    if args.format == "json":
        out.emit_json(graph_to_json(g))
    else:
        print(export_dot(g), end="")
    return 0


def cmd_resolve_shared(args: argparse.Namespace) -> int:
    out = _Output(args)
    loaded = _load_checked(args, out)
    if isinstance(loaded, int):
        return loaded
    w, diags = loaded
    res = resolve_shares(build_share_scope(w))
    if out.json_mode:
        out.emit_json(res.to_json())
    else:
        out.emit_diagnostics(diags)
        rows = [
            [pkg, str(version), provider]
            for pkg, (version, provider) in res.bindings.items()
        ]
        out.emit_table(["package", "version", "provider"], rows)
        for c in res.conflicts:
            print(
                _paint(c.severity, f"{c.severity} {c.code} {c.package}@{c.application}: "
                f"requires {c.required_range}, chose {c.chosen_version}"),
                file=sys.stderr,
            )
        if res.fallbacks:
            out.emit_line(
                "fallbacks: "
                + ", ".join(f"{app}:{pkg}@{version}" for app, pkg, version in res.fallbacks)
                + f" (duplicateBytes={res.duplicate_bytes})"
            )
    return 1 if any(c.severity == ERROR for c in res.conflicts) else 0


def cmd_check_types(args: argparse.Namespace) -> int:
    out = _Output(args)
    loaded = _load_checked(args, out)
    if isinstance(loaded, int):
        return loaded
    w, diags = loaded
    type_diags = check_compatibility(w, collect_expectations(w), strict_types=args.strict_types)
    if out.json_mode:
        out.emit_json({"diagnostics": [d.to_json() for d in type_diags]})
    else:
        out.emit_diagnostics(diags + type_diags)
        out.emit_line(f"{len(type_diags)} finding(s)")
    return 1 if has_errors(type_diags) else 0


def cmd_plan(args: argparse.Namespace) -> int:
    out = _Output(args)
    result = _analysis(args, out)
    if isinstance(result, int):
        return result
    _, res, g = result
    built = plan(g, res, LoadStrategy(args.strategy), manifest_bytes=args.manifest_bytes)
    if out.json_mode:
        out.emit_json(built.to_json())
    else:
        rows = [
            [
                str(r.id),
                ",".join(sorted(f"{a}/{m}" for a, m in r.payload)),
                str(r.size_bytes),
                ",".join(str(d) for d in sorted(r.depends_on)) or "-",
            ]
            for r in built.requests
        ]
        out.emit_table(["id", "payload", "bytes", "dependsOn"], rows)
    return 0


def _read_network(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ToolError("E-IO", f"cannot read network model: {exc}", path)
    except ValueError as exc:
        raise ToolError("E-BAD-NET", f"{path}: invalid JSON: {exc}")
    return network_from_json(doc)


def _report_rows(reports) -> list[list[str]]:
    return [
        [
            r.strategy.value,
            _fmt_ms(r.time_to_first_render_ms),
            _fmt_ms(r.time_to_interactive_ms),
            str(r.total_bytes),
            str(r.request_count),
            str(r.waterfall_rounds),
            str(r.max_observed_concurrency),
        ]
        for r in reports
    ]


_REPORT_HEADERS = ["strategy", "firstRenderMs", "interactiveMs", "bytes", "requests", "rounds", "maxConc"]


def cmd_simulate(args: argparse.Namespace) -> int:
    out = _Output(args)
    net = _read_network(args.net)
    result = _analysis(args, out)
    if isinstance(result, int):
        return result
    _, res, g = result
    report = simulate(plan(g, res, LoadStrategy(args.strategy), manifest_bytes=args.manifest_bytes), net)
    if out.json_mode:
        out.emit_json(report.to_json())
    else:
        out.emit_table(_REPORT_HEADERS, _report_rows([report]))
        rows = [
            [
                str(e.request_id),
                _fmt_ms(e.start_ms),
                _fmt_ms(e.headers_ms),
                _fmt_ms(e.done_ms),
                _fmt_ms(e.parse_done_ms),
                str(e.size_bytes),
            ]
            for e in report.timeline
        ]
        out.emit_table(["request", "start", "headers", "done", "parsed", "bytes"], rows)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    out = _Output(args)
    net = _read_network(args.net)
    result = _analysis(args, out)
    if isinstance(result, int):
        return result
    _, res, g = result
    reports = [
        simulate(plan(g, res, strategy, manifest_bytes=args.manifest_bytes), net)
        for strategy in ALL_STRATEGIES
    ]
    if out.json_mode:
        out.emit_json([r.to_json() for r in reports])
    else:
        out.emit_table(_REPORT_HEADERS, _report_rows(reports))
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    out = _Output(args)
    net = _read_network(args.net)
    result = _analysis(args, out)
    if isinstance(result, int):
        return result
    _, res, g = result
    report = simulate(plan(g, res, LoadStrategy(args.strategy), manifest_bytes=args.manifest_bytes), net)
    log = from_sim(report)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(export_jsonl(log))
    except OSError as exc:
        raise ToolError("E-IO", f"cannot write trace: {exc}", args.out)
    if out.json_mode:
        out.emit_json({"out": args.out, "traceId": log.trace_id, "spans": len(log.spans)})
    else:
        out.emit_line(f"wrote {len(log.spans)} span(s) to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fedplan",
        description="Static analysis and load simulation for bundler-independent module federations.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "table"], default="table")
    common.add_argument("--quiet", action="store_true", help="suppress tables and diagnostics")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a workspace's manifests")
    p.add_argument("host", help="path to the host federation.json")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("graph", help="export the cross-application module graph")
    p.add_argument("host")
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("resolve-shared", parents=[common], help="negotiate shared package versions")
    p.add_argument("host")
    p.set_defaults(func=cmd_resolve_shared)

    p = sub.add_parser("check-types", parents=[common], help="check consumer expectations against exposed interfaces")
    p.add_argument("host")
    p.add_argument("--strict-types", action="store_true", help="treat missing interfaces as errors")
    p.set_defaults(func=cmd_check_types)

    strategies = [s.value for s in ALL_STRATEGIES]

    p = sub.add_parser("plan", parents=[common], help="build the fetch plan for one strategy")
    p.add_argument("host")
    p.add_argument("--strategy", choices=strategies, required=True)
    p.add_argument("--manifest-bytes", type=int, default=DEFAULT_MANIFEST_BYTES)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", parents=[common], help="simulate one strategy over a network model")
    p.add_argument("host")
    p.add_argument("--strategy", choices=strategies, required=True)
    p.add_argument("--net", required=True, help="network model JSON file")
    p.add_argument("--manifest-bytes", type=int, default=DEFAULT_MANIFEST_BYTES)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", parents=[common], help="simulate all four strategies")
    p.add_argument("host")
    p.add_argument("--net", required=True)
    p.add_argument("--manifest-bytes", type=int, default=DEFAULT_MANIFEST_BYTES)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("trace", parents=[common], help="export the simulated timeline as JSON-lines spans")
    p.add_argument("host")
    p.add_argument("--strategy", choices=strategies, required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--out", required=True, help="output spans.jsonl path")
    p.add_argument("--manifest-bytes", type=int, default=DEFAULT_MANIFEST_BYTES)
    p.set_defaults(func=cmd_trace)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except ToolError as exc:
        out = _Output(args)
        diag = exc.to_diagnostic()
        if exc.code in _USAGE_CODES:
            print(_paint(ERROR, str(diag)), file=sys.stderr)
            return 2
        if out.json_mode:
            out.emit_json({"diagnostics": [diag.to_json()]})
        else:
            out.emit_diagnostics([diag])
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

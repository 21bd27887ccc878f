"""Walk through shared-dependency negotiation: clean win, conflict, fallback.

Run from the repository root:
  python demos/02_share_negotiation.py
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fedplan import build_share_scope, load_workspace, resolve_shares

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def show(title: str, fixture: str):
    workspace, _ = load_workspace(str(FIXTURES / fixture / "host" / "federation.json"))
    resolution = resolve_shares(build_share_scope(workspace))
    print(f"== {title} ==")
    for package, (version, provider) in resolution.bindings.items():
        print(f"  binding: {package} -> {version} (provided by {provider})")
    for application, package, version in resolution.fallbacks:
        print(f"  fallback: {application} keeps its own {package}@{version}")
    for conflict in resolution.conflicts:
        print(
            f"  conflict [{conflict.severity}] {conflict.application} requires "
            f"{conflict.package} {conflict.required_range}, negotiation chose "
            f"{conflict.chosen_version}"
        )
    print(f"  duplicate bytes beyond the single shared copy: {resolution.duplicate_bytes}\n")


def main():
    show("both ranges admit the highest provided version", "fig1_shared")
    show("strict singleton cannot accept the winner", "conflict_singleton")
    show("non-singleton falls back to its own copy", "fallback")


if __name__ == "__main__":
    main()

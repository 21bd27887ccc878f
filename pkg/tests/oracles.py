"""Independent oracle implementations used to cross-check the library.

Everything here is deliberately written against the declared semantics, not
the library's internals: the range oracle evaluates comparator predicates
directly on integer triples, the subtype oracle re-derives the rules
case by case, and the fluid integrator steps time forward instead of jumping
between events.
"""

from __future__ import annotations

import re

_ATOM = re.compile(r"^(>=|<=|>|<|=|\^|~)?(\d+)\.(\d+)\.(\d+)$")


def oracle_atom(atom: str, v: tuple[int, int, int]) -> bool:
    if atom == "*":
        return True
    m = _ATOM.match(atom)
    if not m:
        raise ValueError(f"bad atom {atom!r}")
    op = m.group(1) or "="
    w = (int(m.group(2)), int(m.group(3)), int(m.group(4)))
    if op == "=":
        return v == w
    if op == ">=":
        return v >= w
    if op == ">":
        return v > w
    if op == "<=":
        return v <= w
    if op == "<":
        return v < w
    if op == "^":
        if w[0] > 0:
            hi = (w[0] + 1, 0, 0)
        elif w[1] > 0:
            hi = (0, w[1] + 1, 0)
        else:
            hi = (0, 0, w[2] + 1)
        return w <= v < hi
    # "~"
    return w <= v < (w[0], w[1] + 1, 0)


def oracle_satisfies(range_text: str, v: tuple[int, int, int]) -> bool:
    return any(
        all(oracle_atom(atom, v) for atom in disjunct.split())
        for disjunct in range_text.split("||")
    )


def all_versions(limit: int = 5) -> list[tuple[int, int, int]]:
    return [
        (a, b, c)
        for a in range(limit + 1)
        for b in range(limit + 1)
        for c in range(limit + 1)
    ]


def random_range_text(rng) -> str:
    def atom() -> str:
        if rng.random() < 0.05:
            return "*"
        op = rng.choice(["", "=", ">=", ">", "<=", "<", "^", "~"])
        return f"{op}{rng.randint(0, 5)}.{rng.randint(0, 5)}.{rng.randint(0, 5)}"

    disjuncts = []
    for _ in range(rng.randint(1, 3)):
        disjuncts.append(" ".join(atom() for _ in range(rng.randint(1, 2))))
    return " || ".join(disjuncts)


def oracle_subtype(actual, expected) -> bool:
    """Rule-by-rule re-derivation of the structural subtype relation."""
    from fedplan.interfaces import (
        ArrayType,
        FunctionType,
        PrimitiveType,
        RecordType,
        UnknownType,
    )

    if isinstance(expected, UnknownType):
        return True
    if isinstance(actual, UnknownType):
        return False
    if isinstance(expected, PrimitiveType):
        return isinstance(actual, PrimitiveType) and actual.name == expected.name
    if isinstance(expected, ArrayType):
        return isinstance(actual, ArrayType) and oracle_subtype(actual.element, expected.element)
    if isinstance(expected, RecordType):
        if not isinstance(actual, RecordType):
            return False
        actual_fields = {f.name: f for f in actual.fields}
        for want in expected.fields:
            if want.optional:
                continue  # admission-only; deep checks here break transitivity
            have = actual_fields.get(want.name)
            if have is None or have.optional:
                return False
            if not oracle_subtype(have.type, want.type):
                return False
        return True
    if isinstance(expected, FunctionType):
        if not isinstance(actual, FunctionType):
            return False
        if len(actual.params) > len(expected.params):
            return False
        for ap, ep in zip(actual.params, expected.params):
            if not oracle_subtype(ep, ap):
                return False
        return oracle_subtype(actual.returns, expected.returns)
    return False


def bfs_reachable(edges, root, include_dynamic: bool) -> set:
    adjacency: dict = {}
    for src, dst, mode in edges:
        if mode == "dynamic" and not include_dynamic:
            continue
        adjacency.setdefault(src, []).append(dst)
    seen = {root}
    queue = [root]
    while queue:
        node = queue.pop(0)
        for nxt in adjacency.get(node, []):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def dfs_longest_path(edges, root) -> int:
    """Longest root-to-leaf path in node count; acyclic inputs only."""
    adjacency: dict = {}
    for src, dst, _ in edges:
        adjacency.setdefault(src, []).append(dst)

    def walk(node) -> int:
        return 1 + max((walk(nxt) for nxt in adjacency.get(node, [])), default=0)

    return walk(root)


def brute_sccs(nodes, edges) -> list[list]:
    """SCCs via pairwise reachability; fine for test-sized graphs."""
    adjacency: dict = {n: set() for n in nodes}
    for src, dst, _ in edges:
        adjacency[src].add(dst)

    def reaches(a, b) -> bool:
        seen = {a}
        queue = [a]
        while queue:
            n = queue.pop()
            for nxt in adjacency[n]:
                if nxt == b:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    remaining = set(nodes)
    sccs = []
    while remaining:
        n = min(remaining)
        group = {m for m in remaining if m == n or (reaches(n, m) and reaches(m, n))}
        sccs.append(sorted(group))
        remaining -= group
    return sorted(sccs)


def fluid_integrate(load_plan, net, dt: float = 0.05, horizon: float = 1e6):
    """Forward-stepping fair-share integrator; returns per-request timings.

    The quantization error is bounded by one dt per state transition, so
    comparisons against the event engine should allow a few multiples of dt.
    """
    from fedplan.planner import LoadStrategy

    is_ssr = load_plan.strategy is LoadStrategy.SSR
    compose = net.server_compose_ms if is_ssr else 0.0
    factor = net.hydration_factor if is_ssr else 1.0

    requests = {r.id: r for r in load_plan.requests}
    blocked = set(requests)
    eligible_at: dict[int, float] = {}
    latency_left: dict[int, float] = {}
    transfer_left: dict[int, float] = {}
    parse_left: dict[int, float] = {}
    start_at: dict[int, float] = {}
    done_at: dict[int, float] = {}
    parse_done_at: dict[int, float] = {}

    t = 0.0
    while len(parse_done_at) < len(requests):
        if t > horizon:
            raise RuntimeError("integrator exceeded horizon")

        for rid in sorted(blocked):
            if all(dep in parse_done_at for dep in requests[rid].depends_on):
                delay = net.interaction_delay_ms if requests[rid].dynamic_trigger else 0.0
                eligible_at[rid] = t + delay
                blocked.discard(rid)

        in_flight = len(latency_left) + len(transfer_left)
        waiting = sorted(
            (when, rid) for rid, when in eligible_at.items() if when <= t
        )
        for when, rid in waiting:
            if in_flight >= net.max_concurrent:
                break
            del eligible_at[rid]
            start_at[rid] = t
            latency_left[rid] = net.rtt_ms + compose
            in_flight += 1

        for rid in sorted(latency_left):
            latency_left[rid] -= dt
            if latency_left[rid] <= 0:
                del latency_left[rid]
                transfer_left[rid] = float(requests[rid].size_bytes)

        if transfer_left:
            share = dt * net.bandwidth_bytes_per_ms / len(transfer_left)
            for rid in sorted(transfer_left):
                transfer_left[rid] -= share
                if transfer_left[rid] <= 0:
                    del transfer_left[rid]
                    done_at[rid] = t + dt
                    parse_left[rid] = (
                        requests[rid].size_bytes / 1000.0 * net.parse_ms_per_kb * factor
                    )

        for rid in sorted(parse_left):
            parse_left[rid] -= dt
            if parse_left[rid] <= 0:
                del parse_left[rid]
                parse_done_at[rid] = t + dt

        t += dt

    return {
        rid: (start_at[rid], done_at[rid], parse_done_at[rid]) for rid in requests
    }

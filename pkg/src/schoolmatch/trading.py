"""Trading cycles over a matching: the directed weighted graph of a
matching, trading/null clique detection, the clique-application mechanism
run on top of the deferred-acceptance baseline, and exhaustive enumeration
of all terminal dominating matchings."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Optional

import networkx as nx

from .errors import CycleLimitExceededError, SearchLimitExceededError
from .mechanisms import sosm
from .model import Instance, Matching, tie_break

DEFAULT_CYCLE_LIMIT = 10**6


@dataclass(frozen=True)
class MatchGraph:
    """Directed graph on students; edge (i, j) means i weakly prefers j's
    seat to her own, with weight 1 iff the preference is strict."""

    vertices: tuple[str, ...]
    weights: dict[tuple[str, str], int]

    def edges_from(self, i: str) -> list[str]:
        return [j for (a, j) in self.weights if a == i]


class CliqueKind(enum.Enum):
    TRADING = "trading"
    NULL = "null"


@dataclass(frozen=True)
class Clique:
    """A cycle of students; each receives the assignment of the next."""

    cycle: tuple[str, ...]
    kind: CliqueKind


def build_graph(instance: Instance, matching: Matching) -> MatchGraph:
    pref_rank = instance.pref_rank
    n_classes = {i: len(instance.prefs[i].classes) for i in instance.students}

    def rank_of(i: str, school) -> int:
        if school is None:
            return n_classes[i] + 1
        # Schools absent from a (truncated) list rank below everything.
        return pref_rank[i].get(school, n_classes[i] + 2)

    weights: dict[tuple[str, str], int] = {}
    for i in instance.students:
        own = rank_of(i, matching[i])
        for j in instance.students:
            if i == j:
                continue
            other = rank_of(i, matching[j])
            if other < own:
                weights[(i, j)] = 1
            elif other == own:
                weights[(i, j)] = 0
    return MatchGraph(instance.students, weights)


def prune(graph: MatchGraph) -> MatchGraph:
    """Iteratively delete vertices with no incoming or no outgoing edge."""
    alive = set(graph.vertices)
    weights = dict(graph.weights)
    changed = True
    while changed:
        changed = False
        outs = {v: 0 for v in alive}
        ins = {v: 0 for v in alive}
        for (i, j) in weights:
            outs[i] += 1
            ins[j] += 1
        dead = {v for v in alive if not outs[v] or not ins[v]}
        if dead:
            changed = True
            alive -= dead
            weights = {
                e: w for e, w in weights.items() if e[0] in alive and e[1] in alive
            }
    vertices = tuple(v for v in graph.vertices if v in alive)
    return MatchGraph(vertices, weights)


def _canonical_cycle(cycle: list[str], order: dict[str, int]) -> tuple[str, ...]:
    k = min(range(len(cycle)), key=lambda idx: order[cycle[idx]])
    return tuple(cycle[k:] + cycle[:k])


def find_cliques(
    graph: MatchGraph,
    instance: Instance,
    limit: int = DEFAULT_CYCLE_LIMIT,
) -> list[Clique]:
    """All elementary cycles of the graph, classified trading or null.

    Cycles are rotated to start at the canonically smallest student and
    sorted; exceeding ``limit`` raises with the partial list attached.
    """
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.vertices)
    digraph.add_edges_from(graph.weights)
    order = instance.student_index

    cliques = []
    for count, cycle in enumerate(nx.simple_cycles(digraph), start=1):
        if count > limit:
            cliques.sort(key=lambda c: c.cycle)
            raise CycleLimitExceededError(
                f"more than {limit} cycles", partial=cliques
            )
        canon = _canonical_cycle(cycle, order)
        edges = list(zip(canon, canon[1:] + canon[:1]))
        kind = (
            CliqueKind.TRADING
            if any(graph.weights[e] == 1 for e in edges)
            else CliqueKind.NULL
        )
        cliques.append(Clique(canon, kind))
    cliques.sort(key=lambda c: tuple(order[v] for v in c.cycle))
    return cliques


def has_trading_clique(graph: MatchGraph) -> bool:
    """True iff some cycle carries a weight-1 edge.

    A cycle with a strict edge exists iff some strongly connected
    component (of the full graph) contains a weight-1 edge.
    """
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.vertices)
    digraph.add_edges_from(graph.weights)
    for comp in nx.strongly_connected_components(digraph):
        if len(comp) < 2:
            continue
        for (i, j), w in graph.weights.items():
            if w == 1 and i in comp and j in comp:
                return True
    return False


def apply_clique(instance: Instance, matching: Matching, clique: Clique) -> Matching:
    """Give each student in the cycle the seat of the student she points to."""
    graph_weights = build_graph(instance, matching).weights
    cycle = clique.cycle
    assignment = matching.as_dict()
    for i, j in zip(cycle, cycle[1:] + cycle[:1]):
        if (i, j) not in graph_weights:
            raise ValueError(f"stale clique: edge {i}->{j} no longer valid")
        assignment[i] = matching[j]
    return Matching.of(assignment, instance)


@dataclass(frozen=True)
class TadamResult:
    matching: Matching
    baseline: Matching
    applied: tuple[Clique, ...]
    tiebreak_seed: int


def tadam_run(
    instance: Instance,
    policy: "str | int" = "canonical",
    cycle_limit: int = DEFAULT_CYCLE_LIMIT,
) -> TadamResult:
    """Run deferred acceptance, then apply trading cliques until none remain.

    ``policy`` is either ``"canonical"`` (always take the canonically least
    trading clique) or an integer seed for a reproducible random choice.
    Ties in preferences or priorities are broken with seed 0 for the
    baseline run; the trading graph always uses the true weak preferences.
    Null cliques are never applied (they change no ranks).
    """
    rng = None if policy == "canonical" else random.Random(policy)
    strict = instance if instance.is_strict else tie_break(instance, 0)
    baseline, _ = sosm(strict)
    current = baseline
    applied: list[Clique] = []
    while True:
        graph = prune(build_graph(instance, current))
        trading = [
            c for c in find_cliques(graph, instance, cycle_limit)
            if c.kind is CliqueKind.TRADING
        ]
        if not trading:
            return TadamResult(current, baseline, tuple(applied), 0)
        pick = trading[0] if rng is None else rng.choice(trading)
        current = apply_clique(instance, current, pick)
        applied.append(pick)


@dataclass(frozen=True)
class TadamEnumeration:
    terminals: frozenset[Matching]
    # Null-clique closures of the terminals; equal closures mean the
    # terminals differ only by swaps among indifferent students.
    classes: tuple[frozenset[Matching], ...]


def tadam_enumerate(
    instance: Instance,
    max_visited: int = 100_000,
    cycle_limit: int = DEFAULT_CYCLE_LIMIT,
) -> TadamEnumeration:
    """All matchings reachable from the deferred-acceptance baseline by
    trading-clique sequences that admit no further trading clique."""
    strict = instance if instance.is_strict else tie_break(instance, 0)
    baseline, _ = sosm(strict)

    terminals: set[Matching] = set()
    seen = {baseline}
    stack = [baseline]
    while stack:
        current = stack.pop()
        graph = prune(build_graph(instance, current))
        trading = [
            c for c in find_cliques(graph, instance, cycle_limit)
            if c.kind is CliqueKind.TRADING
        ]
        if not trading:
            terminals.add(current)
            continue
        for clique in trading:
            nxt = apply_clique(instance, current, clique)
            if nxt not in seen:
                if len(seen) >= max_visited:
                    raise SearchLimitExceededError(
                        f"visited more than {max_visited} matchings",
                        partial=frozenset(terminals),
                    )
                seen.add(nxt)
                stack.append(nxt)

    classes = _null_classes(instance, terminals, cycle_limit)
    return TadamEnumeration(frozenset(terminals), classes)


def null_closure(
    instance: Instance, matching: Matching, cycle_limit: int = DEFAULT_CYCLE_LIMIT
) -> frozenset[Matching]:
    """All matchings reachable via null cliques alone (includes the start)."""
    seen = {matching}
    stack = [matching]
    while stack:
        current = stack.pop()
        graph = build_graph(instance, current)
        for clique in find_cliques(graph, instance, cycle_limit):
            if clique.kind is not CliqueKind.NULL:
                continue
            nxt = apply_clique(instance, current, clique)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def _null_classes(instance, terminals, cycle_limit) -> tuple[frozenset[Matching], ...]:
    classes: list[frozenset[Matching]] = []
    placed: set[Matching] = set()
    for terminal in sorted(terminals, key=lambda m: m.pairs):
        if terminal in placed:
            continue
        closure = null_closure(instance, terminal, cycle_limit)
        placed |= closure
        classes.append(closure)
    return tuple(classes)


def realize_domination(
    instance: Instance, target: Matching
) -> Optional[list[Clique]]:
    """Clique sequence turning the deferred-acceptance baseline into
    ``target``, trading cliques first; None if ``target`` does not
    dominate-or-equal the baseline."""
    from .analysis import dominates
    from .model import rank

    strict = instance if instance.is_strict else tie_break(instance, 0)
    baseline, _ = sosm(strict)
    if target == baseline:
        return []
    if not dominates(instance, target, baseline):
        return None

    moved = [i for i in instance.students if target[i] != baseline[i]]
    # Each moved student points to a giver of the seat she receives; seats
    # of one school are interchangeable, so any per-school pairing works.
    givers: dict = {}
    for i in moved:
        givers.setdefault(baseline[i], []).append(i)
    succ = {}
    for i in moved:
        pool = givers.get(target[i])
        if not pool:
            raise ValueError(
                "target assigns a seat nobody gives up; "
                "not realizable by seat trades"
            )
        succ[i] = pool.pop()

    cliques: list[Clique] = []
    placed: set[str] = set()
    for start in moved:
        if start in placed:
            continue
        cycle = [start]
        node = succ[start]
        while node != start:
            cycle.append(node)
            node = succ[node]
        placed.update(cycle)
        strict_edge = any(
            rank(instance.prefs[i], target[i]) < rank(instance.prefs[i], baseline[i])
            for i in cycle
        )
        cliques.append(
            Clique(
                _canonical_cycle(cycle, instance.student_index),
                CliqueKind.TRADING if strict_edge else CliqueKind.NULL,
            )
        )
    cliques.sort(key=lambda c: c.kind is CliqueKind.NULL)  # trading first
    return cliques


def to_dot(graph: MatchGraph) -> str:
    """Export in DOT syntax with a ``w`` attribute on each edge."""
    lines = ["digraph matching {"]
    for v in graph.vertices:
        lines.append(f'  "{v}";')
    for (i, j), w in sorted(graph.weights.items()):
        lines.append(f'  "{i}" -> "{j}" [w={w}];')
    lines.append("}")
    return "\n".join(lines)

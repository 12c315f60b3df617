"""Action-graph game data model: strategies, graph, types, utility tables, profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

PROB_TOL = 1e-12


class GameError(ValueError):
    """Raised for malformed games or profiles (type/strategy mismatch etc.)."""


@dataclass(frozen=True)
class Strategy:
    id: int
    label: str


@dataclass(frozen=True)
class StrategyGraph:
    node_count: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Sequence[int]]) -> "StrategyGraph":
        pairs = [(int(a), int(b)) for a, b in edges]
        if len(set(pairs)) != len(pairs):
            raise GameError("duplicate edge")
        return cls(node_count, frozenset(pairs))

    @cached_property
    def _in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        acc: list[list[int]] = [[] for _ in range(self.node_count)]
        for src, dst in self.edges:
            if 0 <= dst < self.node_count:
                acc[dst].append(src)
        return tuple(tuple(sorted(a)) for a in acc)

    def neighbors(self, s: int) -> tuple[int, ...]:
        """In-neighbourhood nu(s) = {s' : (s', s) in edges}, ascending."""
        return self._in_neighbors[s]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    @cached_property
    def undirected_adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency of the underlying simple undirected graph (self-loops dropped)."""
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for a, b in self.edges:
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        return tuple(tuple(sorted(s)) for s in adj)

    def max_degree(self) -> int:
        return max((len(a) for a in self.undirected_adjacency), default=0)

    def max_in_degree(self) -> int:
        return max((len(self.neighbors(s)) for s in range(self.node_count)), default=0)

    def components(self) -> list[list[int]]:
        seen = [False] * self.node_count
        out = []
        for start in range(self.node_count):
            if seen[start]:
                continue
            comp, stack = [], [start]
            seen[start] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.undirected_adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def is_forest(self) -> bool:
        und = sum(len(a) for a in self.undirected_adjacency) // 2
        return und == self.node_count - len(self.components())

    def is_tree(self) -> bool:
        return self.node_count > 0 and self.is_forest() and len(self.components()) == 1

    def longest_path(self) -> int:
        """Longest simple path (edge count) in the underlying forest; -1 if cyclic."""
        if not self.is_forest():
            return -1
        best = 0
        adj = self.undirected_adjacency
        for comp in self.components():
            # two BFS sweeps give the diameter of a tree
            far, _ = self._bfs_far(comp[0], adj)
            _, dist = self._bfs_far(far, adj)
            best = max(best, dist)
        return best

    @staticmethod
    def _bfs_far(start: int, adj) -> tuple[int, int]:
        dist = {start: 0}
        order = [start]
        for u in order:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    order.append(w)
        far = max(order, key=lambda x: (dist[x], -x))
        return far, dist[far]


@dataclass(frozen=True)
class PlayerType:
    id: int
    agent_count: int
    allowed_strategies: tuple[int, ...]


@dataclass(frozen=True)
class Configuration:
    scope: tuple[int, ...]
    counts: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.scope, self.counts))


def enumerate_configurations(scope: Sequence[int], n: int) -> list[Configuration]:
    """All count vectors over ``scope`` summing to at most ``n``, lexicographic."""
    scope = tuple(scope)
    if len(set(scope)) != len(scope):
        raise GameError("scope contains duplicate strategy ids")
    if n < 0:
        raise GameError("n must be nonnegative")
    return [Configuration(scope, c) for c in config_tuples(len(scope), n)]


def config_tuples(width: int, n: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int) -> None:
        if len(prefix) == width:
            out.append(tuple(prefix))
            return
        for c in range(left + 1):
            prefix.append(c)
            rec(prefix, left - c)
            prefix.pop()

    rec([], n)
    return out


def configuration_count(width: int, n: int) -> int:
    return comb(n + width, width)


@dataclass(frozen=True)
class UtilityTable:
    strategy: int
    scope: tuple[int, ...]
    entries: Mapping[tuple[int, ...], Fraction]

    def __call__(self, counts: tuple[int, ...]) -> Fraction:
        return self.entries[counts]

    @cached_property
    def as_float(self) -> dict[tuple[int, ...], float]:
        return {k: float(v) for k, v in self.entries.items()}


@dataclass(frozen=True, eq=False)
class ActionGraphGame:
    """Immutable AGG.  Agents are numbered type by type (type 0 first)."""

    n: int
    types: tuple[PlayerType, ...]
    graph: StrategyGraph
    utilities: tuple[UtilityTable, ...]
    labels: tuple[str, ...]
    meta: Mapping[str, object] = field(default_factory=dict)

    @property
    def num_strategies(self) -> int:
        return self.graph.node_count

    @property
    def num_agents(self) -> int:
        return sum(t.agent_count for t in self.types)

    @cached_property
    def agent_types(self) -> tuple[int, ...]:
        out: list[int] = []
        for t in self.types:
            out.extend([t.id] * t.agent_count)
        return tuple(out)

    def agents_of_type(self, j: int) -> range:
        start = sum(t.agent_count for t in self.types[:j])
        return range(start, start + self.types[j].agent_count)

    def allowed(self, agent: int) -> tuple[int, ...]:
        return self.types[self.agent_types[agent]].allowed_strategies

    @cached_property
    def payoff_bounds(self) -> tuple[Fraction, Fraction]:
        vals = [v for t in self.utilities for v in t.entries.values()]
        if not vals:
            return Fraction(0), Fraction(0)
        return min(vals), max(vals)

    @cached_property
    def orphans(self) -> tuple[int, ...]:
        used = {s for t in self.types for s in t.allowed_strategies}
        return tuple(s for s in range(self.num_strategies) if s not in used)

    def utility(self, s: int, counts: Mapping[int, int]) -> Fraction:
        """u_s evaluated on a configuration given as {strategy: count} (missing = 0)."""
        table = self.utilities[s]
        return table.entries[tuple(counts.get(x, 0) for x in table.scope)]

    def structurally_equal(self, other: "ActionGraphGame") -> bool:
        return (
            self.n == other.n
            and self.types == other.types
            and self.graph == other.graph
            and self.labels == other.labels
            and all(a.scope == b.scope and dict(a.entries) == dict(b.entries)
                    for a, b in zip(self.utilities, other.utilities))
            and len(self.utilities) == len(other.utilities)
            and dict(self.meta) == dict(other.meta)
        )

    @classmethod
    def from_function(
        cls,
        types: Sequence[tuple[int, Sequence[int]]],
        edges: Iterable[Sequence[int]],
        labels: Sequence[str],
        utility: Callable[[int, dict[int, int]], object],
        meta: Mapping[str, object] | None = None,
    ) -> "ActionGraphGame":
        """Build a game whose tables are filled by ``utility(s, {strategy: count})``.

        ``types`` is a list of ``(agent_count, allowed_strategies)``.
        """
        ptypes = tuple(
            PlayerType(j, int(c), tuple(sorted(set(int(s) for s in strat))))
            for j, (c, strat) in enumerate(types)
        )
        n = sum(t.agent_count for t in ptypes)
        graph = StrategyGraph.from_edges(len(labels), edges)
        tables = []
        for s in range(graph.node_count):
            scope = graph.neighbors(s)
            entries = {
                c: Fraction(utility(s, dict(zip(scope, c))))
                for c in config_tuples(len(scope), n)
            }
            tables.append(UtilityTable(s, scope, entries))
        return cls(n, ptypes, graph, tuple(tables), tuple(labels), dict(meta or {}))

    def replace_utilities(self, fn: Callable[[int, tuple[int, ...], Fraction], Fraction]) -> "ActionGraphGame":
        tables = tuple(
            UtilityTable(t.strategy, t.scope, {k: fn(t.strategy, k, v) for k, v in t.entries.items()})
            for t in self.utilities
        )
        return ActionGraphGame(self.n, self.types, self.graph, tables, self.labels, dict(self.meta))


# --------------------------------------------------------------------------- profiles


@dataclass(frozen=True)
class MixedProfile:
    """Per-agent probability vectors, each aligned with the agent's allowed strategies."""

    probs: tuple[tuple[float, ...], ...]

    def dense(self, game: ActionGraphGame) -> list[dict[int, float]]:
        return [dict(zip(game.allowed(i), p)) for i, p in enumerate(self.probs)]


@dataclass(frozen=True)
class TypeSymmetricProfile:
    """One probability vector per player type, aligned with its allowed strategies."""

    probs: tuple[tuple[float, ...], ...]

    def by_strategy(self, game: ActionGraphGame, j: int) -> dict[int, float]:
        return dict(zip(game.types[j].allowed_strategies, self.probs[j]))


def _check_vector(vec: Sequence[float], size: int, what: str) -> None:
    if len(vec) != size:
        raise GameError(f"{what}: expected {size} probabilities, got {len(vec)}")
    if any(p < -PROB_TOL for p in vec):
        raise GameError(f"{what}: negative probability")
    if abs(sum(vec) - 1.0) > PROB_TOL * max(1, size):
        raise GameError(f"{what}: probabilities sum to {sum(vec)!r}, not 1")


def check_mixed(game: ActionGraphGame, profile: MixedProfile) -> None:
    if len(profile.probs) != game.num_agents:
        raise GameError("profile has wrong number of agents")
    for i, vec in enumerate(profile.probs):
        _check_vector(vec, len(game.allowed(i)), f"agent {i}")


def check_type_symmetric(game: ActionGraphGame, tsp: TypeSymmetricProfile) -> None:
    if len(tsp.probs) != len(game.types):
        raise GameError("profile has wrong number of types")
    for t, vec in zip(game.types, tsp.probs):
        _check_vector(vec, len(t.allowed_strategies), f"type {t.id}")


def expand_profile(tsp: TypeSymmetricProfile, game: ActionGraphGame) -> MixedProfile:
    check_type_symmetric(game, tsp)
    return MixedProfile(tuple(tuple(tsp.probs[j]) for j in game.agent_types))


def collapse_profile(profile: MixedProfile, game: ActionGraphGame) -> TypeSymmetricProfile:
    """Inverse of :func:`expand_profile`; fails if agents of one type disagree."""
    check_mixed(game, profile)
    out = []
    for t in game.types:
        vecs = {tuple(profile.probs[i]) for i in game.agents_of_type(t.id)}
        if len(vecs) != 1:
            raise GameError(f"agents of type {t.id} play different strategies")
        out.append(vecs.pop())
    return TypeSymmetricProfile(tuple(out))


def pure_to_mixed(game: ActionGraphGame, choice: Sequence[int]) -> MixedProfile:
    """Mixed profile putting all mass of agent i on strategy ``choice[i]``."""
    rows = []
    for i, s in enumerate(choice):
        allowed = game.allowed(i)
        if s not in allowed:
            raise GameError(f"strategy {s} not allowed for agent {i}")
        rows.append(tuple(1.0 if x == s else 0.0 for x in allowed))
    return MixedProfile(tuple(rows))


# --------------------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    violations: list[str]
    max_degree: int
    max_in_degree: int
    is_forest: bool
    is_tree: bool
    type_count: int
    orphans: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(game: ActionGraphGame) -> ValidationReport:
    v: list[str] = []
    g = game.graph
    S = g.node_count
    if len(game.labels) != S:
        v.append("label count differs from strategy count")
    if any(not lab for lab in game.labels):
        v.append("empty strategy label")
    for a, b in g.edges:
        if not (0 <= a < S and 0 <= b < S):
            v.append(f"edge ({a},{b}) out of range")
    for j, t in enumerate(game.types):
        if t.id != j:
            v.append(f"type ids not dense at {j}")
        if t.agent_count < 1:
            v.append(f"type {j} has no agents")
        if not t.allowed_strategies:
            v.append(f"type {j} has no allowed strategies")
        if list(t.allowed_strategies) != sorted(set(t.allowed_strategies)):
            v.append(f"type {j} strategies not ascending/unique")
        if any(not (0 <= s < S) for s in t.allowed_strategies):
            v.append(f"type {j} references unknown strategy")
    if sum(t.agent_count for t in game.types) != game.n:
        v.append("agent count mismatch")
    if len(game.utilities) != S:
        v.append("utilities do not cover all strategies")
    else:
        for s, table in enumerate(game.utilities):
            if table.strategy != s:
                v.append(f"utility table {s} labelled {table.strategy}")
                continue
            if 0 <= s < S and table.scope != g.neighbors(s):
                v.append(f"utility table {s} scope differs from neighbourhood")
                continue
            expected = configuration_count(len(table.scope), game.n)
            keys = set(table.entries)
            valid_keys = {k for k in keys if len(k) == len(table.scope) and all(c >= 0 for c in k) and sum(k) <= game.n}
            if len(valid_keys) != expected:
                v.append(f"incomplete utility table for strategy {s}")
            if len(valid_keys) != len(keys):
                v.append(f"utility table {s} has out-of-range configurations")
    in_range = all(0 <= a < S and 0 <= b < S for a, b in g.edges)
    return ValidationReport(
        violations=v,
        max_degree=g.max_degree() if in_range else -1,
        max_in_degree=g.max_in_degree() if in_range else -1,
        is_forest=g.is_forest() if in_range else False,
        is_tree=g.is_tree() if in_range else False,
        type_count=len(game.types),
        orphans=game.orphans,
    )

"""Rooting of tree strategy graphs and type-region closures."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import GameError, StrategyGraph

MAX_TREE_DEGREE = 3


class GateError(GameError):
    """Input violates a structural precondition of the solver (tree, degree, type count...)."""


@dataclass(frozen=True)
class RootedTree:
    root: int
    parent: tuple[int | None, ...]
    right: tuple[int | None, ...]
    left: tuple[int | None, ...]
    postorder: tuple[int, ...]

    def children(self, i: int) -> list[int]:
        return [c for c in (self.right[i], self.left[i]) if c is not None]

    def is_leaf(self, i: int) -> bool:
        return self.right[i] is None

    def subtree(self, i: int) -> list[int]:
        out, stack = [], [i]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(self.children(u))
        return sorted(out)


def choose_root(graph: StrategyGraph, max_degree: int = MAX_TREE_DEGREE) -> RootedTree:
    """Root at the lowest-id degree-1 node; the lower-id child is R, the other L."""
    if graph.node_count == 0 or not graph.is_tree():
        raise GateError("strategy graph is not a tree")
    adj = graph.undirected_adjacency
    if graph.max_degree() > max_degree:
        raise GateError(f"strategy graph degree {graph.max_degree()} exceeds {max_degree}")
    S = graph.node_count
    root = 0 if S == 1 else min(s for s in range(S) if len(adj[s]) == 1)
    parent: list[int | None] = [None] * S
    right: list[int | None] = [None] * S
    left: list[int | None] = [None] * S
    order = [root]
    for u in order:
        kids = [w for w in adj[u] if w != parent[u]]
        if len(kids) > 2:
            raise GateError(f"node {u} has {len(kids)} children")
        for w in kids:
            parent[w] = u
        if kids:
            right[u] = kids[0]
        if len(kids) > 1:
            left[u] = kids[1]
        order.extend(kids)
    return RootedTree(root, tuple(parent), tuple(right), tuple(left), tuple(reversed(order)))


def closure(graph: StrategyGraph, members: set[int] | list[int] | tuple[int, ...]) -> frozenset[int]:
    """Smallest connected subtree containing ``members`` (graph must be a tree)."""
    keep = set(range(graph.node_count))
    members = set(members)
    adj = graph.undirected_adjacency
    changed = True
    while changed:
        changed = False
        for u in sorted(keep):
            if u in members:
                continue
            if sum(1 for w in adj[u] if w in keep) <= 1:
                keep.discard(u)
                changed = True
    return frozenset(keep)


def is_connected_region(graph: StrategyGraph, region: set[int] | frozenset[int]) -> bool:
    if not region:
        return False
    start = min(region)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in graph.undirected_adjacency[u]:
            if w in region and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == set(region)

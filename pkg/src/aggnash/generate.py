"""Seeded random game generators (test corpus and ``aggnash gen``)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import ActionGraphGame, GameError


def random_tree_edges(rng: np.random.Generator, num_strategies: int, max_degree: int = 3,
                      orient: str = "random") -> list[tuple[int, int]]:
    """Random labelled tree with bounded degree; each tree edge becomes one or two arcs.

    ``orient`` is ``"random"`` (forward, backward or both), ``"both"``, or ``"down"``.
    """
    if max_degree < 2 and num_strategies > 2:
        raise GameError("max_degree < 2 only admits trees with at most 2 nodes")
    degree = [0] * num_strategies
    pairs = []
    for k in range(1, num_strategies):
        candidates = [u for u in range(k) if degree[u] < max_degree]
        u = int(candidates[rng.integers(len(candidates))])
        degree[u] += 1
        degree[k] += 1
        pairs.append((u, k))
    return orient_pairs(rng, pairs, orient)


def orient_pairs(rng: np.random.Generator | None, pairs, orient: str) -> list[tuple[int, int]]:
    edges = set()
    for u, v in pairs:
        mode = orient if orient != "random" else ("down", "up", "both")[int(rng.integers(3))]
        if mode in ("down", "both"):
            edges.add((u, v))
        if mode in ("up", "both"):
            edges.add((v, u))
    return sorted(edges)


def random_bounded_graph_edges(rng: np.random.Generator, num_strategies: int, max_degree: int = 3,
                               tries: int = 4, self_loops: bool = True) -> list[tuple[int, int]]:
    """Arbitrary (possibly cyclic) directed graph whose underlying degree is at most ``max_degree``."""
    edges = set()
    degree = [0] * num_strategies
    adjacent: set[frozenset[int]] = set()
    for _ in range(tries * num_strategies):
        a, b = (int(x) for x in rng.integers(num_strategies, size=2))
        if a == b:
            if self_loops:
                edges.add((a, a))
            continue
        key = frozenset((a, b))
        if key not in adjacent:
            if degree[a] >= max_degree or degree[b] >= max_degree:
                continue
            adjacent.add(key)
            degree[a] += 1
            degree[b] += 1
        edges.add((a, b))
    return sorted(edges)


def random_types(rng: np.random.Generator, n: int, num_strategies: int, k: int) -> list[tuple[int, list[int]]]:
    if k < 1 or n < k:
        raise GameError("need 1 <= types <= agents")
    if k == 1:
        return [(n, list(range(num_strategies)))]
    cuts = sorted(int(x) for x in rng.choice(np.arange(1, n), size=k - 1, replace=False))
    counts = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    sets: list[set[int]] = [set() for _ in range(k)]
    for s in range(num_strategies):
        sets[int(rng.integers(k))].add(s)
    for j in range(k):
        extra = rng.random(num_strategies) < 0.3
        sets[j].update(int(s) for s in np.nonzero(extra)[0])
        if not sets[j]:
            sets[j].add(int(rng.integers(num_strategies)))
    return [(c, sorted(s)) for c, s in zip(counts, sets)]


def random_game(
    rng: np.random.Generator,
    n: int,
    num_strategies: int,
    types: int = 1,
    tree: bool = True,
    max_degree: int = 3,
    resolution: int = 100,
    orient: str = "random",
) -> ActionGraphGame:
    """Random AGG with payoffs ``k / resolution`` for uniform ``k`` in [0, resolution]."""
    if tree:
        edges = random_tree_edges(rng, num_strategies, max_degree, orient)
    else:
        edges = random_bounded_graph_edges(rng, num_strategies, max_degree)
    tdefs = random_types(rng, n, num_strategies, types)
    labels = [f"s{i}" for i in range(num_strategies)]
    draws: dict[tuple[int, tuple[int, ...]], Fraction] = {}

    def utility(s: int, config: dict[int, int]) -> Fraction:
        key = (s, tuple(sorted(config.items())))
        if key not in draws:
            draws[key] = Fraction(int(rng.integers(resolution + 1)), resolution)
        return draws[key]

    return ActionGraphGame.from_function(tdefs, edges, labels, utility,
                                         meta={"generator": "random_game", "tree": tree})

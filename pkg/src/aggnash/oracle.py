"""Brute-force ground truth used to check the fast paths.

Nothing here shares code with the recursion in :mod:`aggnash.expected_utility`
except :func:`grid_search_type_symmetric`, which is a search *over* profiles
and uses the vectorised verifier to score each one.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb, prod

import numpy as np

from .core import ActionGraphGame, GameError, MixedProfile, TypeSymmetricProfile, check_mixed, config_tuples
from .expected_utility import batch_type_regret

DEFAULT_GUARD = 10**7


class GuardExceeded(GameError):
    """Enumeration would exceed the configured size limit."""


def _guard(size: int, guard: int, what: str) -> None:
    if size > guard:
        raise GuardExceeded(f"{what}: {size} cases exceed guard {guard}")


def brute_force_expected_utility(
    game: ActionGraphGame, profile: MixedProfile, agent: int, strategy: int, guard: int = DEFAULT_GUARD
) -> float:
    """Sum over every pure profile of the other agents, weighted by its probability."""
    check_mixed(game, profile)
    if strategy not in game.allowed(agent):
        raise GameError(f"strategy {strategy} not allowed for agent {agent}")
    others = [i for i in range(game.num_agents) if i != agent]
    supports = []
    for i in others:
        supports.append([(s, p) for s, p in zip(game.allowed(i), profile.probs[i])])
    _guard(prod(len(x) for x in supports), guard, "brute-force expected utility")
    table = game.utilities[strategy]
    total = 0.0
    for combo in itertools.product(*supports):
        weight = 1.0
        counts = {strategy: 1}
        for s, p in combo:
            weight *= p
            counts[s] = counts.get(s, 0) + 1
        if weight == 0.0:
            continue
        key = tuple(counts.get(x, 0) for x in table.scope)
        total += weight * float(table.entries[key])
    return total


def _dependencies(game: ActionGraphGame) -> list[int]:
    """For each agent, the last agent id whose choice can change its deviation payoffs."""
    players_of: dict[int, list[int]] = {}
    for i in range(game.num_agents):
        for s in game.allowed(i):
            players_of.setdefault(s, []).append(i)
    last = []
    for i in range(game.num_agents):
        m = i
        for s in game.allowed(i):
            for x in game.graph.neighbors(s):
                m = max([m] + players_of.get(x, []))
        last.append(m)
    return last


def is_pure_nash(game: ActionGraphGame, choice: tuple[int, ...]) -> bool:
    counts: dict[int, int] = {}
    for s in choice:
        counts[s] = counts.get(s, 0) + 1
    return all(_stable(game, i, choice[i], counts) for i in range(game.num_agents))


def _stable(game: ActionGraphGame, i: int, s: int, counts: dict[int, int]) -> bool:
    current = game.utility(s, counts)
    for alt in game.allowed(i):
        if alt == s:
            continue
        counts[s] -= 1
        counts[alt] = counts.get(alt, 0) + 1
        better = game.utility(alt, counts) > current
        counts[alt] -= 1
        counts[s] += 1
        if better:
            return False
    return True


def enumerate_pure_nash(game: ActionGraphGame, guard: int = DEFAULT_GUARD) -> list[tuple[int, ...]]:
    """Every pure profile with zero regret, compared in exact rationals.

    Depth-first over agents in id order; an agent's best-response condition is
    checked as soon as every agent that can touch its neighbourhoods is fixed,
    so the search is exhaustive but rarely visits the full product.
    """
    size = prod(len(game.allowed(i)) for i in range(game.num_agents))
    _guard(size, guard, "pure profile enumeration")
    A = game.num_agents
    last = _dependencies(game)
    check_after: list[list[int]] = [[] for _ in range(A)]
    for i, d in enumerate(last):
        check_after[d].append(i)
    choice = [0] * A
    counts: dict[int, int] = {}
    found: list[tuple[int, ...]] = []

    def rec(d: int) -> None:
        if d == A:
            found.append(tuple(choice))
            return
        for s in game.allowed(d):
            choice[d] = s
            counts[s] = counts.get(s, 0) + 1
            if all(_stable(game, i, choice[i], counts) for i in check_after[d]):
                rec(d + 1)
            counts[s] -= 1

    if A == 0:
        return [()]
    rec(0)
    return sorted(found)


def grid_profiles(game: ActionGraphGame, steps: int) -> list[np.ndarray]:
    """All type-symmetric profiles on the 1/steps grid, as per-type arrays of shape (B, |S_j|)."""
    per_type = []
    for t in game.types:
        m = len(t.allowed_strategies)
        rows = [c + (steps - sum(c),) for c in config_tuples(m - 1, steps)]
        per_type.append(np.array(rows, dtype=float) / steps)
    grids = np.meshgrid(*[np.arange(len(r)) for r in per_type], indexing="ij")
    idx = [g.ravel() for g in grids]
    return [per_type[j][idx[j]] for j in range(len(per_type))]


def grid_size(game: ActionGraphGame, steps: int) -> int:
    return prod(comb(steps + len(t.allowed_strategies) - 1, len(t.allowed_strategies) - 1) for t in game.types)


def steps_for(delta: float) -> int:
    steps = round(1.0 / delta)
    if steps < 1 or abs(steps * delta - 1.0) > 1e-9:
        raise GameError(f"1/delta must be an integer (delta={delta})")
    return steps


def grid_search_type_symmetric(
    game: ActionGraphGame,
    delta: float,
    eps: float,
    guard: int = DEFAULT_GUARD,
    threads: int = 1,
    chunk: int = 20000,
) -> list[TypeSymmetricProfile]:
    """Every type-symmetric profile on the delta-grid whose max regret is at most eps (+1e-9)."""
    steps = steps_for(delta)
    _guard(grid_size(game, steps), guard, "grid search")
    grid = grid_profiles(game, steps)
    B = grid[0].shape[0]
    bounds = [(a, min(a + chunk, B)) for a in range(0, B, chunk)]

    def score(bound: tuple[int, int]) -> np.ndarray:
        a, b = bound
        return batch_type_regret(game, [g[a:b] for g in grid])

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(score, bounds))
    else:
        parts = [score(b) for b in bounds]
    regrets = np.concatenate(parts) if parts else np.zeros(0)
    keep = np.nonzero(regrets <= eps + 1e-9)[0]
    return [TypeSymmetricProfile(tuple(tuple(float(x) for x in g[k]) for g in grid)) for k in keep]


def binomial_tv_distance(n: int, p: float, delta: float) -> float:
    """max_k |Pr(B(n,p)=k) - Pr(B(n,p+delta)=k)|."""
    q = p + delta
    if not (0.0 <= p <= 1.0) or not (-1e-12 <= q <= 1.0 + 1e-12):
        raise GameError("need 0 <= p and p + delta <= 1")
    q = min(max(q, 0.0), 1.0)
    return max(abs(comb(n, k) * (p**k * (1 - p) ** (n - k) - q**k * (1 - q) ** (n - k))) for k in range(n + 1))


def exact_pure_utility(game: ActionGraphGame, choice: tuple[int, ...], agent: int) -> Fraction:
    counts: dict[int, int] = {}
    for s in choice:
        counts[s] = counts.get(s, 0) + 1
    return game.utility(choice[agent], counts)

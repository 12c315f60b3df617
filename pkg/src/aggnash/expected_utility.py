"""Exact configuration distributions, expected utilities and regret.

Configuration distributions are built agent by agent: an agent either plays
outside the scope (mass stays on the same count vector) or bumps exactly one
scope coordinate.  Agents of one type with a shared mixed strategy can
instead be folded in at once as a multinomial block; both routes agree to
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    ActionGraphGame,
    GameError,
    MixedProfile,
    TypeSymmetricProfile,
    check_mixed,
    check_type_symmetric,
    config_tuples,
)

NASH_SLACK = 1e-9


@dataclass(frozen=True)
class ConfigurationDistribution:
    scope: tuple[int, ...]
    mass: Mapping[tuple[int, ...], float]

    def total(self) -> float:
        return sum(self.mass.values())


def _bump(key: tuple[int, ...], pos: int) -> tuple[int, ...]:
    return key[:pos] + (key[pos] + 1,) + key[pos + 1:]


def add_agent(dist: dict[tuple[int, ...], float], scope_probs: Sequence[float], out_prob: float,
              prune: float = 0.0) -> dict[tuple[int, ...], float]:
    """One step of the agent-by-agent recursion.

    ``scope_probs[k]`` is the chance the agent plays the k-th scope strategy,
    ``out_prob`` the chance it plays anything outside the scope.
    """
    new: dict[tuple[int, ...], float] = {}
    for key, m in dist.items():
        if out_prob:
            new[key] = new.get(key, 0.0) + out_prob * m
        for pos, p in enumerate(scope_probs):
            if p:
                k2 = _bump(key, pos)
                new[k2] = new.get(k2, 0.0) + p * m
    if prune > 0.0:
        new = {k: v for k, v in new.items() if v >= prune}
    return new


def _agent_split(game: ActionGraphGame, vec: Mapping[int, float], scope: Sequence[int]) -> tuple[list[float], float]:
    inside = set(scope)
    return [vec.get(s, 0.0) for s in scope], sum(p for s, p in vec.items() if s not in inside)


def _check_scope(game: ActionGraphGame, scope: Sequence[int]) -> tuple[int, ...]:
    scope = tuple(scope)
    if len(set(scope)) != len(scope) or any(not (0 <= s < game.num_strategies) for s in scope):
        raise GameError(f"invalid scope {scope}")
    return scope


def neighborhood_distribution(
    game: ActionGraphGame,
    profile: MixedProfile,
    scope: Sequence[int],
    excluded_agent: int | None = None,
    order: Iterable[int] | None = None,
    prune: float = 0.0,
) -> ConfigurationDistribution:
    """Distribution of counts on ``scope`` produced by every agent except ``excluded_agent``.

    Agents are folded in ascending id order unless ``order`` is given.
    """
    scope = _check_scope(game, scope)
    if excluded_agent is not None and not (0 <= excluded_agent < game.num_agents):
        raise GameError(f"invalid agent id {excluded_agent}")
    dense = profile.dense(game)
    agents = list(range(game.num_agents)) if order is None else list(order)
    dist: dict[tuple[int, ...], float] = {(0,) * len(scope): 1.0}
    for i in agents:
        if i == excluded_agent:
            continue
        inside, out = _agent_split(game, dense[i], scope)
        dist = add_agent(dist, inside, out, prune)
    return ConfigurationDistribution(scope, dist)


def multinomial_block(count: int, scope_probs: Sequence[float], out_prob: float) -> dict[tuple[int, ...], float]:
    """Counts on the scope when ``count`` i.i.d. agents share one mixed strategy."""
    width = len(scope_probs)
    out: dict[tuple[int, ...], float] = {}
    for key in config_tuples(width, count):
        rest = count - sum(key)
        coef, left = comb(count, rest), count - rest
        val = out_prob ** rest
        for d, p in zip(key, scope_probs):
            coef *= comb(left, d)
            left -= d
            val *= p ** d
        if val:
            out[key] = coef * val
    return out


def convolve(a: Mapping[tuple[int, ...], float], b: Mapping[tuple[int, ...], float]) -> dict[tuple[int, ...], float]:
    out: dict[tuple[int, ...], float] = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0.0) + va * vb
    return out


def type_block_distribution(
    width: int, blocks: Iterable[tuple[int, Sequence[float], float]]
) -> dict[tuple[int, ...], float]:
    """Convolution of multinomial blocks ``(count, scope_probs, out_prob)``."""
    dist: dict[tuple[int, ...], float] = {(0,) * width: 1.0}
    for count, inside, out in blocks:
        if count:
            dist = convolve(dist, multinomial_block(count, inside, out))
    return dist


def type_neighborhood_distribution(
    game: ActionGraphGame,
    tsp: TypeSymmetricProfile,
    scope: Sequence[int],
    excluded_type: int | None = None,
) -> ConfigurationDistribution:
    """Type-batched fast path: same result as :func:`neighborhood_distribution`
    on the expanded profile with one agent of ``excluded_type`` removed."""
    scope = _check_scope(game, scope)
    blocks = []
    for t in game.types:
        count = t.agent_count - (1 if t.id == excluded_type else 0)
        inside, out = _agent_split(game, tsp.by_strategy(game, t.id), scope)
        blocks.append((count, inside, out))
    return ConfigurationDistribution(scope, type_block_distribution(len(scope), blocks))


def utility_against(game: ActionGraphGame, strategy: int, mass: Mapping[tuple[int, ...], float]) -> float:
    """sum_D u_s(D + 1_s) Pr[D] for a distribution over nu(s) produced by the other agents."""
    table = game.utilities[strategy]
    vals = table.as_float
    scope = table.scope
    own = scope.index(strategy) if strategy in scope else -1
    total = 0.0
    for key, p in mass.items():
        if own >= 0:
            key = _bump(key, own)
        total += vals[key] * p
    return total


def expected_utility(game: ActionGraphGame, profile: MixedProfile, agent: int, strategy: int) -> float:
    if not (0 <= agent < game.num_agents):
        raise GameError(f"invalid agent id {agent}")
    if strategy not in game.allowed(agent):
        raise GameError(f"strategy {strategy} not allowed for agent {agent}")
    scope = game.graph.neighbors(strategy)
    dist = neighborhood_distribution(game, profile, scope, excluded_agent=agent)
    return utility_against(game, strategy, dist.mass)


def type_expected_utility(game: ActionGraphGame, tsp: TypeSymmetricProfile, type_id: int, strategy: int) -> float:
    if strategy not in game.types[type_id].allowed_strategies:
        raise GameError(f"strategy {strategy} not allowed for type {type_id}")
    scope = game.graph.neighbors(strategy)
    dist = type_neighborhood_distribution(game, tsp, scope, excluded_type=type_id)
    return utility_against(game, strategy, dist.mass)


@dataclass(frozen=True)
class RegretReport:
    """``regrets[i]``: best-response gain of agent (or type) i.  ``support_regrets[i]``:
    worst gap between the best strategy and any strategy in i's support."""

    regrets: tuple[float, ...]
    support_regrets: tuple[float, ...]

    @property
    def max_regret(self) -> float:
        return max(self.regrets, default=0.0)

    @property
    def max_support_regret(self) -> float:
        return max(self.support_regrets, default=0.0)


def _regret_row(utils: Sequence[float], probs: Sequence[float]) -> tuple[float, float]:
    best = max(utils)
    current = sum(p * u for p, u in zip(probs, utils))
    support = [u for p, u in zip(probs, utils) if p > 0]
    return max(0.0, best - current), max(0.0, best - min(support)) if support else 0.0


def regret(game: ActionGraphGame, profile: MixedProfile) -> RegretReport:
    check_mixed(game, profile)
    rows = []
    for i in range(game.num_agents):
        utils = [expected_utility(game, profile, i, s) for s in game.allowed(i)]
        rows.append(_regret_row(utils, profile.probs[i]))
    return RegretReport(tuple(r for r, _ in rows), tuple(s for _, s in rows))


def type_regret(game: ActionGraphGame, tsp: TypeSymmetricProfile) -> RegretReport:
    """Regret per type; every agent of a type has the same regret."""
    check_type_symmetric(game, tsp)
    rows = []
    for t in game.types:
        utils = [type_expected_utility(game, tsp, t.id, s) for s in t.allowed_strategies]
        rows.append(_regret_row(utils, tsp.probs[t.id]))
    return RegretReport(tuple(r for r, _ in rows), tuple(s for _, s in rows))


def is_eps_nash(game: ActionGraphGame, profile: MixedProfile | TypeSymmetricProfile, eps: float) -> bool:
    if eps < 0:
        raise GameError("eps must be nonnegative")
    rep = type_regret(game, profile) if isinstance(profile, TypeSymmetricProfile) else regret(game, profile)
    return rep.max_regret <= eps + NASH_SLACK


def batch_type_regret(game: ActionGraphGame, type_probs: Sequence[np.ndarray]) -> np.ndarray:
    """Max regret for a batch of type-symmetric profiles.

    ``type_probs[j]`` has shape (B, |S_j|).  Same recursion as
    :func:`neighborhood_distribution`, vectorised over the batch.
    """
    B = type_probs[0].shape[0]
    worst = np.zeros(B)
    cols = [{s: type_probs[t.id][:, k] for k, s in enumerate(t.allowed_strategies)} for t in game.types]
    zeros = np.zeros(B)
    for t in game.types:
        utils = []
        for s in t.allowed_strategies:
            scope = game.graph.neighbors(s)
            inside_set = set(scope)
            dist: dict[tuple[int, ...], np.ndarray] = {(0,) * len(scope): np.ones(B)}
            for other in game.types:
                count = other.agent_count - (1 if other.id == t.id else 0)
                col = cols[other.id]
                inside = [col.get(x, zeros) for x in scope]
                out = sum((v for x, v in col.items() if x not in inside_set), zeros)
                for _ in range(count):
                    new: dict[tuple[int, ...], np.ndarray] = {}
                    for key, m in dist.items():
                        new[key] = new.get(key, 0.0) + out * m
                        for pos, p in enumerate(inside):
                            if p is zeros:
                                continue
                            k2 = _bump(key, pos)
                            new[k2] = new.get(k2, 0.0) + p * m
                    dist = new
            vals = game.utilities[s].as_float
            own = scope.index(s) if s in scope else -1
            u = np.zeros(B)
            for key, m in dist.items():
                u = u + vals[_bump(key, own) if own >= 0 else key] * m
            utils.append(u)
        U = np.stack(utils, axis=1)
        current = np.sum(U * type_probs[t.id], axis=1)
        worst = np.maximum(worst, U.max(axis=1) - current)
    return np.maximum(worst, 0.0)

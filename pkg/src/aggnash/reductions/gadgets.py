"""Copy gadget and copy-based sparsification of binary-agent games."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..core import ActionGraphGame, GameError

VARIANTS = ("proof", "definition")


def binary_pair(game: ActionGraphGame, agent: int) -> tuple[int, int]:
    """(f, t) strategy ids of a two-strategy agent; f is the lower id."""
    if not (0 <= agent < game.num_agents):
        raise GameError(f"invalid agent id {agent}")
    allowed = game.allowed(agent)
    if len(allowed) != 2:
        raise GameError(f"agent {agent} does not have exactly two strategies")
    return allowed[0], allowed[1]


@dataclass(frozen=True)
class CopyGadget:
    source: int
    agent_a: int
    agent_c: int
    f_a: int
    t_a: int
    f_c: int
    t_c: int


class _Builder:
    """Accumulates agents, strategies, edges and utility rules for a rebuilt game."""

    def __init__(self, base: ActionGraphGame):
        self.base = base
        self.labels = list(base.labels)
        self.types = [(t.agent_count, list(t.allowed_strategies)) for t in base.types]
        self.edges = set(base.graph.edges)
        self.rename: dict[tuple[int, int], int] = {}  # (new src, dst) -> original src it stands for
        self.rules: dict[int, Callable[[dict[int, int]], Fraction]] = {}
        self.gadgets: list[CopyGadget] = []

    def add_copy(self, i: int, variant: str) -> CopyGadget:
        if variant not in VARIANTS:
            raise GameError(f"unknown copy gadget variant {variant!r}")
        f_i, _t_i = binary_pair(self.base, i)
        s = len(self.labels)
        A = sum(c for c, _ in self.types)
        g = CopyGadget(i, A, A + 1, s, s + 1, s + 2, s + 3)
        tag = self.base.labels[f_i]
        k = sum(1 for x in self.gadgets if x.source == i) + 1
        self.labels += [f"{tag}.a{k}.f", f"{tag}.a{k}.t", f"{tag}.c{k}.f", f"{tag}.c{k}.t"]
        self.types += [(1, [g.f_a, g.t_a]), (1, [g.f_c, g.t_c])]
        self.edges |= {(f_i, g.f_a), (g.t_a, g.f_c), (g.f_c, g.t_a)}
        self.rules[g.f_a] = lambda D: Fraction(D.get(f_i, 0))
        if variant == "proof":
            self.rules[g.t_a] = lambda D: Fraction(D.get(g.f_c, 0))
        else:
            self.rules[g.t_a] = lambda D: 1 - Fraction(D.get(g.f_c, 0))
        self.rules[g.f_c] = lambda D: 1 - 2 * Fraction(D.get(g.t_a, 0))
        self.rules[g.t_c] = lambda D: Fraction(0)
        self.gadgets.append(g)
        return g

    def reroute(self, src: int, dst: int, new_src: int) -> None:
        self.edges.discard((src, dst))
        self.edges.add((new_src, dst))
        self.rename[(new_src, dst)] = src

    def build(self, meta: dict) -> ActionGraphGame:
        base = self.base
        n_old = base.n

        def utility(s: int, config: dict[int, int]) -> Fraction:
            if s in self.rules:
                return self.rules[s](config)
            old = {self.rename.get((x, s), x): d for x, d in config.items()}
            if sum(old.values()) > n_old:
                return Fraction(0)  # unreachable: more agents than the source game has
            return base.utility(s, old)

        meta = dict(meta)
        rows = [[g.source, g.agent_a, g.agent_c, g.f_a, g.t_a, g.f_c, g.t_c] for g in self.gadgets]
        meta["gadgets"] = list(meta.get("gadgets", [])) + rows
        return ActionGraphGame.from_function(self.types, sorted(self.edges), self.labels, utility, meta)


def apply_copy_gadget(game: ActionGraphGame, agent: int, variant: str = "proof") -> ActionGraphGame:
    """Attach agents a, c whose pair (f_c, t_c) mirrors ``agent``'s mixing in equilibrium.

    New strategies get ids |S|..|S|+3 in the order f_a, t_a, f_c, t_c and new
    agents ids n, n+1.  ``variant="definition"`` pays ``1 - D(f_c)`` on t_a,
    which rewards anti-copying; the default pays ``D(f_c)``, the payoff the
    closeness argument actually uses.
    """
    b = _Builder(game)
    b.add_copy(agent, variant)
    return b.build({**game.meta, "construction": "copy_gadget", "variant": variant})


def sparsify(game: ActionGraphGame, min_copies: int = 0, variant: str = "proof",
             construction: str = "sparsify") -> ActionGraphGame:
    """Route every outgoing edge of every agent's f/t strategies through its own copy.

    Copy k of agent i carries the k-th outgoing edge of f_i (from f_c^k) and
    the k-th outgoing edge of t_i (from t_c^k), edges taken in ascending
    destination id.  ``min_copies`` pads agents with fewer edges.
    """
    b = _Builder(game)
    for i in range(game.num_agents):
        f, t = binary_pair(game, i)
        f_out = sorted(d for s, d in game.graph.edges if s == f and d != f)
        t_out = sorted(d for s, d in game.graph.edges if s == t and d != t)
        for k in range(max(len(f_out), len(t_out), min_copies)):
            g = b.add_copy(i, variant)
            if k < len(f_out):
                b.reroute(f, f_out[k], g.f_c)
            if k < len(t_out):
                b.reroute(t, t_out[k], g.t_c)
    meta = {key: v for key, v in game.meta.items() if key != "gadgets"}
    meta.update({"construction": construction, "variant": variant, "source_agents": game.num_agents})
    return b.build(meta)


def copies_of(game: ActionGraphGame, agent: int) -> list[tuple[int, int]]:
    """(f_c, t_c) strategy pairs of every copy gadget attached to ``agent``."""
    return [(g[5], g[6]) for g in game.meta.get("gadgets", []) if g[0] == agent]

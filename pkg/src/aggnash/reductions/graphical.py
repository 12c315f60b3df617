"""Two-action graphical games and their encodings as action-graph games.

``gg/v1`` file layout (header line, then JSON)::

    gg/v1
    {"players": 2, "edges": [[0, 1]], "payoffs": [[2, 0, 0, 1], [1, 0, 0, 2]]}

``payoffs[i]`` is a flat list of length ``2 ** (1 + deg(i))``.  The index
bits, most significant first, are player i's own action followed by its
neighbours' actions in ascending id order; bit 0 means ``f``, 1 means ``t``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, comb

from ..core import ActionGraphGame, GameError, MixedProfile, TypeSymmetricProfile, check_mixed
from ..expected_utility import neighborhood_distribution, type_neighborhood_distribution
from ..serialize import FormatError, _parse_json, _split_header
from .gadgets import sparsify

GG_HEADER = "gg/v1"
MAX_DEGREE = 3
BONUS = 100


@dataclass(frozen=True)
class GraphicalGame:
    players: int
    edges: tuple[tuple[int, int], ...]
    payoffs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < self.players and 0 <= b < self.players):
                raise GameError(f"invalid edge ({a}, {b})")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise GameError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        if len(self.payoffs) != self.players:
            raise GameError("one payoff table per player required")
        for i in range(self.players):
            deg = len(self.neighbors(i))
            if deg > MAX_DEGREE:
                raise GameError(f"player {i} has degree {deg} > {MAX_DEGREE}")
            if len(self.payoffs[i]) != 2 ** (1 + deg):
                raise GameError(f"payoff table of player {i} must have {2 ** (1 + deg)} entries")
            if any(v not in (0, 1, 2) for v in self.payoffs[i]):
                raise GameError(f"payoffs of player {i} must lie in {{0, 1, 2}}")

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(sorted([b for a, b in self.edges if a == i] + [a for a, b in self.edges if b == i]))

    def payoff(self, i: int, own: int, others: dict[int, int]) -> int:
        """Actions are 0 (f) / 1 (t); ``others`` maps every neighbour to its action."""
        idx = own
        for j in self.neighbors(i):
            idx = 2 * idx + others[j]
        return self.payoffs[i][idx]


def dumps_gg(H: GraphicalGame) -> str:
    rows = ",\n    ".join("[" + ", ".join(str(v) for v in row) + "]" for row in H.payoffs)
    edges = ", ".join(f"[{a}, {b}]" for a, b in H.edges)
    return f'{GG_HEADER}\n{{\n  "players": {H.players},\n  "edges": [{edges}],\n  "payoffs": [\n    {rows}\n  ]\n}}\n'


def loads_gg(text: str) -> GraphicalGame:
    doc = _parse_json(_split_header(text, GG_HEADER))
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    unknown = set(doc) - {"players", "edges", "payoffs"}
    if unknown:
        raise FormatError(f"unknown key {sorted(unknown)[0]!r}")
    try:
        return GraphicalGame(int(doc["players"]), tuple(tuple(e) for e in doc["edges"]),
                             tuple(tuple(int(v) for v in row) for row in doc["payoffs"]))
    except KeyError as exc:
        raise FormatError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from None


# -- native solution concepts --------------------------------------------------------


def graphical_expected_payoff(H: GraphicalGame, p_f: list[float], i: int, own: int) -> float:
    nb = H.neighbors(i)
    total = 0.0
    for acts in itertools.product((0, 1), repeat=len(nb)):
        w = 1.0
        for j, a in zip(nb, acts):
            w *= p_f[j] if a == 0 else 1.0 - p_f[j]
        if w:
            total += w * H.payoff(i, own, dict(zip(nb, acts)))
    return total


def graphical_regret(H: GraphicalGame, p_f: list[float]) -> list[float]:
    out = []
    for i in range(H.players):
        uf = graphical_expected_payoff(H, p_f, i, 0)
        ut = graphical_expected_payoff(H, p_f, i, 1)
        cur = p_f[i] * uf + (1 - p_f[i]) * ut
        out.append(max(0.0, max(uf, ut) - cur))
    return out


def graphical_pure_nash(H: GraphicalGame) -> list[tuple[int, ...]]:
    found = []
    for acts in itertools.product((0, 1), repeat=H.players):
        ok = True
        for i in range(H.players):
            others = {j: acts[j] for j in H.neighbors(i)}
            if H.payoff(i, 1 - acts[i], others) > H.payoff(i, acts[i], others):
                ok = False
                break
        if ok:
            found.append(acts)
    return found


# -- A_H: one agent per player ----------------------------------------------------------


def gg_strategy(i: int, action: int) -> int:
    return 2 * i + action


def _labels(n: int) -> list[str]:
    return [f"{x}{i}" for i in range(n) for x in ("f", "t")]


def graphical_to_agg(H: GraphicalGame) -> ActionGraphGame:
    """Agent i chooses between f_i (id 2i) and t_i (id 2i+1).

    f_i watches the neighbours' f strategies and t_i their t strategies;
    a neighbour counts as playing the watched action iff that strategy is
    occupied.
    """
    edges = []
    for a, b in H.edges:
        for x in (0, 1):
            edges += [(gg_strategy(a, x), gg_strategy(b, x)), (gg_strategy(b, x), gg_strategy(a, x))]

    def utility(s: int, config: dict[int, int]) -> Fraction:
        i, own = divmod(s, 2)
        acts = {j: own if config.get(gg_strategy(j, own), 0) >= 1 else 1 - own for j in H.neighbors(i)}
        return Fraction(H.payoff(i, own, acts))

    types = [(1, [gg_strategy(i, 0), gg_strategy(i, 1)]) for i in range(H.players)]
    return ActionGraphGame.from_function(types, edges, _labels(H.players), utility,
                                         {"construction": "graphical_to_agg", "players": H.players})


def sparsify_to_tw1(A_H: ActionGraphGame, variant: str = "proof") -> ActionGraphGame:
    """Three copy gadgets per agent; all cross-player edges leave from copies."""
    return sparsify(A_H, min_copies=3, variant=variant, construction="sparsify_to_tw1")


def extract_subgame_profile(profile: MixedProfile, A_H: ActionGraphGame) -> MixedProfile:
    if len(profile.probs) < A_H.num_agents:
        raise GameError("profile has fewer agents than the source game")
    out = MixedProfile(tuple(profile.probs[: A_H.num_agents]))
    check_mixed(A_H, out)
    return out


def agg_profile_from_graphical(p_f: list[float]) -> MixedProfile:
    return MixedProfile(tuple((p, 1.0 - p) for p in p_f))


# -- symmetric encoding ---------------------------------------------------------------


def symmetric_scale(eps: float) -> int:
    """Smallest integer c with c > 64 / eps**2, padded by one."""
    if not (0.0 < eps < 1.0):
        raise GameError("eps must lie in (0, 1)")
    return ceil(64.0 / eps**2) + 1


def indicator(config: dict[int, int], i: int) -> int:
    """0 (f) when D(f_i) >= D(t_i), else 1 (t)."""
    return 0 if config.get(gg_strategy(i, 0), 0) >= config.get(gg_strategy(i, 1), 0) else 1


def symmetric_edges(H: GraphicalGame) -> list[tuple[int, int]]:
    edges = set()
    for a, b in H.edges:
        for x in (0, 1):
            for y in (0, 1):
                edges.add((gg_strategy(a, x), gg_strategy(b, y)))
                edges.add((gg_strategy(b, y), gg_strategy(a, x)))
    for i in range(H.players):
        f, t = gg_strategy(i, 0), gg_strategy(i, 1)
        edges |= {(f, t), (t, f), (f, f), (t, t)}
    return sorted(edges)


def symmetric_table_entries(H: GraphicalGame, c: int) -> int:
    """Closed-form utility-table size of :func:`graphical_to_symmetric_agg`."""
    agents = 3 * c * H.players
    return sum(2 * comb(agents + 2 + 2 * len(H.neighbors(i)), 2 + 2 * len(H.neighbors(i))) for i in range(H.players))


def graphical_to_symmetric_agg(H: GraphicalGame, eps: float, c: int | None = None) -> ActionGraphGame:
    """3cn identical agents over {f_1, t_1, ..., f_n, t_n}.

    ``c`` defaults to :func:`symmetric_scale`; a smaller override keeps the
    utility tables small enough for exhaustive tests.
    """
    if c is None:
        c = symmetric_scale(eps)
    if c < 1:
        raise GameError("c must be positive")
    agents = 3 * c * H.players

    def utility(s: int, config: dict[int, int]) -> Fraction:
        i, own = divmod(s, 2)
        acts = {j: indicator(config, j) for j in H.neighbors(i)}
        base = H.payoff(i, own, acts)
        pair = config.get(gg_strategy(i, 0), 0) + config.get(gg_strategy(i, 1), 0)
        return Fraction(base + (BONUS if pair <= c else 0))

    return ActionGraphGame.from_function([(agents, list(range(2 * H.players)))], symmetric_edges(H),
                                         _labels(H.players), utility,
                                         {"construction": "graphical_to_symmetric_agg", "c": c, "eps": eps,
                                          "players": H.players})


def phi_map_profile(profile: MixedProfile | TypeSymmetricProfile, A_sym: ActionGraphGame,
                    H: GraphicalGame) -> list[float]:
    """p_{i,f} = Pr(D(f_i) >= D(t_i)) under the product distribution of all agents."""
    out = []
    for i in range(H.players):
        scope = (gg_strategy(i, 0), gg_strategy(i, 1))
        if isinstance(profile, TypeSymmetricProfile):
            dist = type_neighborhood_distribution(A_sym, profile, scope)
        else:
            dist = neighborhood_distribution(A_sym, profile, scope)
        out.append(min(1.0, sum(m for (df, dt), m in dist.mass.items() if df >= dt)))
    return out

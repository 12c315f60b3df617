"""Tree DP for several player types whose strategy regions may overlap.

Type j only lives on the closure ``C_j`` of its strategy set (a connected
subtree).  At node c the *active* types are those whose closure contains c.
A node's table is keyed by

* ``a``: the parent's grid probabilities for the types allowed at the parent,
* ``b``: c's probabilities for the types allowed at c,
* ``v``: utility levels of the types active at both c and its parent,

and maps to the set of reachable subtree masses for those same continuing
types.  Types whose closure tops out at c must have full mass there and their
level is projected out.  Table size is therefore exponential only in the
overlap, not in k.

Plain Python; intended for small grids and as a cross-check of the dense
single-type engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..core import ActionGraphGame, GameError, TypeSymmetricProfile
from ..expected_utility import type_block_distribution, utility_against
from .dense import NoFeasibleRoot
from .grid import GridSpec
from .tree import GateError, RootedTree, closure, is_connected_region

Key = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def type_regions(game: ActionGraphGame, regions: list[set[int]] | None = None) -> list[frozenset[int]]:
    """Closures of each type's strategy set, or validated user-supplied regions."""
    out = []
    for t in game.types:
        if regions is None:
            out.append(closure(game.graph, t.allowed_strategies))
            continue
        reg = frozenset(regions[t.id])
        if not set(t.allowed_strategies) <= reg:
            raise GateError(f"region of type {t.id} misses some of its strategies")
        if not is_connected_region(game.graph, reg):
            raise GateError(f"type region closure of type {t.id} is disconnected")
        out.append(reg)
    return out


def overlap(regions: list[frozenset[int]], num_strategies: int) -> int:
    return max((sum(1 for r in regions if s in r) for s in range(num_strategies)), default=0)


@dataclass
class TypedTables:
    game: ActionGraphGame
    tree: RootedTree
    grid: GridSpec
    regions: list[frozenset[int]]
    H: dict[int, dict[Key, set[tuple[int, ...]]]] = field(default_factory=dict)
    _eu: dict = field(default_factory=dict)

    def __post_init__(self):
        g = self.game
        S = g.num_strategies
        self.allowed = [tuple(t.id for t in g.types if s in t.allowed_strategies) for s in range(S)]
        self.active = [tuple(j for j, r in enumerate(self.regions) if s in r) for s in range(S)]
        self.cont = []
        for s in range(S):
            par = self.tree.parent[s]
            up = set(self.active[par]) if par is not None else set()
            self.cont.append(tuple(j for j in self.active[s] if j in up))
        self.index: dict[int, dict[tuple[int, ...], list]] = {}

    # -- expected utility -----------------------------------------------------
    def utility(self, c: int, j: int, probs: dict[int, dict[int, int]]) -> float:
        """Type-j deviator's payoff on c; ``probs[s][l]`` is type l's grid mass on s."""
        scope = self.game.graph.neighbors(c)
        inside = tuple(tuple(probs.get(s, {}).get(t.id, 0) for s in scope) for t in self.game.types)
        key = (c, j, inside)
        hit = self._eu.get(key)
        if hit is None:
            N = self.grid.steps
            blocks = []
            for t, vec in zip(self.game.types, inside):
                q = [x / N for x in vec]
                blocks.append((t.agent_count - (t.id == j), q, max(0.0, 1.0 - sum(q))))
            hit = utility_against(self.game, c, type_block_distribution(len(scope), blocks))
            self._eu[key] = hit
        return hit

    def levels_for(self, E: float, played: bool) -> list[int]:
        g = self.grid
        out = []
        for m in range(g.levels + 1):
            lo, hi = g.bounds(m)
            if not played:
                ok = E <= hi
            elif g.window == "open":
                ok = lo < E < hi
            else:
                ok = lo <= E < hi
            if ok:
                out.append(m)
        return out

    # -- local transitions -----------------------------------------------------
    def _options(self, child: int | None, b: tuple[int, ...]):
        if child is None:
            return [((), (), {()})]
        return self.index[child].get(b, [])

    def local(self, c: int, a: tuple[int, ...], b: tuple[int, ...]):
        """Yield (v over active(c), x, y, wR, wL, w over active(c)) for every consistent choice."""
        N = self.grid.steps
        tree = self.tree
        par, R, L = tree.parent[c], tree.right[c], tree.left[c]
        Tp = self.allowed[par] if par is not None else ()
        Tc, Ac = self.allowed[c], self.active[c]
        KR = self.cont[R] if R is not None else ()
        KL = self.cont[L] if L is not None else ()
        TR = self.allowed[R] if R is not None else ()
        TL = self.allowed[L] if L is not None else ()
        finishing = {j for j in Ac if j not in self.cont[c]}
        for x, vR, wRs in self._options(R, b):
            for y, vL, wLs in self._options(L, b):
                total: dict[int, int] = {}
                for types, vec in ((Tp, a), (Tc, b), (TR, x), (TL, y)):
                    for j, p in zip(types, vec):
                        total[j] = total.get(j, 0) + p
                if any(t > N for t in total.values()):
                    continue
                fixed = dict(zip(KR, vR))
                if any(fixed.get(j, m) != m for j, m in zip(KL, vL)):
                    continue
                fixed.update(zip(KL, vL))
                probs: dict[int, dict[int, int]] = {}
                for node, types, vec in ((par, Tp, a), (c, Tc, b), (R, TR, x), (L, TL, y)):
                    if node is not None:
                        probs[node] = dict(zip(types, vec))
                choices: dict[int, list[int]] = {}
                dead = False
                for j, p in zip(Tc, b):
                    lv = self.levels_for(self.utility(c, j, probs), p > 0)
                    if j in fixed:
                        lv = [m for m in lv if m == fixed[j]]
                    if not lv:
                        dead = True
                        break
                    choices[j] = lv
                if dead:
                    continue
                for j in Ac:
                    if j not in choices:
                        if j not in fixed:
                            raise GameError(f"type {j} has no level source at strategy {c}")
                        choices[j] = [fixed[j]]
                for wR in sorted(wRs):
                    wr = dict(zip(KR, wR))
                    for wL in sorted(wLs):
                        wl = dict(zip(KL, wL))
                        bb = dict(zip(Tc, b))
                        w = tuple(bb.get(j, 0) + wr.get(j, 0) + wl.get(j, 0) for j in Ac)
                        if any(v > N for v in w):
                            continue
                        if any(wj != N for j, wj in zip(Ac, w) if j in finishing):
                            continue
                        for v in itertools.product(*(choices[j] for j in Ac)):
                            yield v, x, y, wR, wL, w

    # -- construction ----------------------------------------------------------
    def _vectors(self, types: tuple[int, ...]):
        return itertools.product(range(self.grid.steps + 1), repeat=len(types))

    def build(self) -> "TypedTables":
        tree = self.tree
        for c in tree.postorder:
            par = tree.parent[c]
            Tp = self.allowed[par] if par is not None else ()
            Ac, Kc = self.active[c], self.cont[c]
            pos = [Ac.index(j) for j in Kc]
            table: dict[Key, set[tuple[int, ...]]] = {}
            for a in self._vectors(Tp):
                for b in self._vectors(self.allowed[c]):
                    for v, *_rest, w in self.local(c, a, b):
                        key = (a, b, tuple(v[i] for i in pos))
                        table.setdefault(key, set()).add(tuple(w[i] for i in pos))
            self.H[c] = table
            idx: dict[tuple[int, ...], list] = {}
            for (a, b, v), ws in sorted(table.items()):
                idx.setdefault(a, []).append((b, v, ws))
            self.index[c] = idx
        return self

    def has_root_entry(self) -> bool:
        return any(True for _ in self.H[self.tree.root])

    # -- reconstruction ----------------------------------------------------------
    def reconstruct(self) -> TypeSymmetricProfile:
        tree = self.tree
        root = tree.root
        N = self.grid.steps
        best = None
        for (a, b, v), _ws in self.H[root].items():
            for cand in self.local(root, a, b):
                key = (cand[0], b, cand[1], cand[2], cand[3], cand[4])
                if best is None or key < best[0]:
                    best = (key, cand)
        if best is None:
            raise NoFeasibleRoot("no feasible root entry")
        assign: dict[int, tuple[int, ...]] = {root: best[0][1]}
        stack = [(root, (), best[0][1], best[1])]
        while stack:
            c, a, b, (v, x, y, wR, wL, w) = stack.pop()
            vmap = dict(zip(self.active[c], v))
            for child, p, wc in ((tree.right[c], x, wR), (tree.left[c], y, wL)):
                if child is None:
                    continue
                assign[child] = p
                K = self.cont[child]
                want_v = tuple(vmap[j] for j in K)
                pos = [self.active[child].index(j) for j in K]
                pick = None
                for cand in self.local(child, b, p):
                    if tuple(cand[0][i] for i in pos) != want_v or tuple(cand[5][i] for i in pos) != wc:
                        continue
                    key = (cand[0], cand[1], cand[2], cand[3], cand[4])
                    if pick is None or key < pick[0]:
                        pick = (key, cand)
                if pick is None:
                    raise GameError(f"reconstruction dead end at strategy {child}")
                stack.append((child, b, p, pick[1]))
        probs = []
        for t in self.game.types:
            row = []
            for s in t.allowed_strategies:
                row.append(dict(zip(self.allowed[s], assign.get(s, ()))).get(t.id, 0))
            if sum(row) != N:
                raise GameError(f"type {t.id} mass {sum(row)} != {N}")
            probs.append(tuple(q / N for q in row))
        return TypeSymmetricProfile(tuple(probs))

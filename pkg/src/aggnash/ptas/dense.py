"""Feasibility tables for the single-type tree DP, vectorised with numpy.

Each node c stores a boolean array ``H[m, a, b, w]``: with the parent on grid
probability ``a``, c on ``b``, and utility level ``m``, there is an
assignment to c's subtree putting total mass ``w`` on it in which every
subtree node's expected utility respects its window.  The classic
``f_i(p, p_R, p_L, w, v)`` and witness ``g_i`` tables are exactly the
one-level expansion of these arrays and are answered on demand by
:class:`DenseTables`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..core import ActionGraphGame, GameError, TypeSymmetricProfile, config_tuples
from .grid import GridSpec
from .tree import RootedTree


class NoFeasibleRoot(GameError):
    """No root entry is feasible; the probability grid is too coarse."""


def _multinomial(total: int, parts: tuple[int, ...]) -> int:
    out, left = 1, total
    for d in parts:
        out *= comb(left, d)
        left -= d
    return out


class NodeUtility:
    """Expected utility of strategy ``c`` as a function of the grid probabilities on
    its tree neighbours, when the other ``n - 1`` agents all mix identically."""

    def __init__(self, game: ActionGraphGame, tree: RootedTree, grid: GridSpec, c: int):
        N = grid.steps
        self.N = N
        par, R, L = tree.parent[c], tree.right[c], tree.left[c]
        self.shape = (N + 1 if par is not None else 1, N + 1 if R is not None else 1, N + 1 if L is not None else 1)
        table = game.utilities[c]
        scope = table.scope
        role = {}
        for s in scope:
            if s == par:
                role[s] = 0
            elif s == c:
                role[s] = -1
            elif s == R:
                role[s] = 1
            elif s == L:
                role[s] = 2
            else:
                raise GameError(f"strategy {s} is in the neighbourhood of {c} but not adjacent in the tree")
        self.roles = [role[s] for s in scope]
        self.self_pos = scope.index(c) if c in scope else -1
        others = game.n - 1
        self.terms = []
        for D in config_tuples(len(scope), others):
            key = D if self.self_pos < 0 else D[: self.self_pos] + (D[self.self_pos] + 1,) + D[self.self_pos + 1:]
            val = float(table(key))
            if val:
                self.terms.append((D, others - sum(D), _multinomial(others, D + (others - sum(D),)) * val))
        self._cache: np.ndarray | None = None

    def _axis(self, r: int) -> np.ndarray:
        shape = [1, 1, 1]
        shape[r] = self.shape[r]
        return (np.arange(self.shape[r], dtype=float) / self.N).reshape(shape)

    def at(self, b: int) -> np.ndarray:
        """Expected utility over (a, x, y) with c itself on probability b / N."""
        if self.self_pos < 0 and self._cache is not None:
            return self._cache
        axes = {r: self._axis(r) for r in self.roles if r >= 0}
        pb = b / self.N
        slack = 1.0 - sum(axes.values(), np.zeros((1, 1, 1))) - (pb if self.self_pos >= 0 else 0.0)
        out = np.zeros([self.shape[r] if r in axes else 1 for r in range(3)])
        for D, rest, weight in self.terms:
            term = weight * slack**rest
            for d, r in zip(D, self.roles):
                if d:
                    term = term * (pb**d if r < 0 else axes[r] ** d)
            out = out + term
        if self.self_pos < 0:
            self._cache = out
        return out


@dataclass
class DenseTables:
    """Built tables plus the window data needed to answer ``f``/``g`` queries."""

    game: ActionGraphGame
    tree: RootedTree
    grid: GridSpec
    H: dict[int, np.ndarray] = field(default_factory=dict)
    utils: dict[int, NodeUtility] = field(default_factory=dict)

    # -- windows -----------------------------------------------------------------
    def window(self, c: int, b: int, m: int, a: int | None = None) -> np.ndarray:
        """Boolean array over (a, x, y) (or (x, y) when ``a`` is fixed)."""
        N = self.grid.steps
        u = self.utils[c]
        E = np.broadcast_to(u.at(b), u.shape)
        if a is not None:
            E = E[a]
        return _window(E, b, m, self.grid, self.playable(c)) & _mask(u.shape, N - b, a)

    def playable(self, c: int) -> bool:
        return c in self.game.types[0].allowed_strategies

    # -- child slices ------------------------------------------------------------
    def child_matrix(self, child: int | None, m: int, p: int) -> np.ndarray:
        """(child prob, child subtree mass) feasibility for parent prob p."""
        if child is None:
            out = np.zeros((1, self.grid.steps + 1), dtype=bool)
            out[0, 0] = True
            return out
        return self.H[child][m, p]

    # -- f / g ---------------------------------------------------------------------
    def f(self, i: int, p: int, pR: int, pL: int, w: int, m: int) -> bool:
        """Grid indices (units of delta) in, feasibility out."""
        N = self.grid.steps
        t = self.tree
        if t.is_leaf(i) and i != t.root:
            return pR == 0 and pL == 0 and p == w
        R = self.child_matrix(t.right[i], m, p)
        Lm = self.child_matrix(t.left[i], m, p)
        if pR >= R.shape[0] or pL >= Lm.shape[0] or w - p < 0:
            return False
        if i == t.root:
            if w != N or not self.window(i, p, m, a=0)[pR, pL]:
                return False
        return self.g(i, p, pR, pL, w, m) is not None

    def g(self, i: int, p: int, pR: int, pL: int, w: int, m: int) -> tuple[int, int] | None:
        """Smallest (w_R, w_L) splitting the children's mass, or None."""
        rest = w - p
        if rest < 0:
            return None
        R = self.child_matrix(self.tree.right[i], m, p)
        Lm = self.child_matrix(self.tree.left[i], m, p)
        if pR >= R.shape[0] or pL >= Lm.shape[0]:
            return None
        for wR in range(rest + 1):
            if R[pR, wR] and Lm[pL, rest - wR]:
                return wR, rest - wR
        return None

    def root_levels(self) -> list[int]:
        root = self.tree.root
        N = self.grid.steps
        return [m for m in range(self.grid.levels + 1) if self.H[root][m, 0, :, N].any()]

    # -- reconstruction ---------------------------------------------------------
    def reconstruct(self) -> tuple[TypeSymmetricProfile, int]:
        levels = self.root_levels()
        if not levels:
            raise NoFeasibleRoot("no feasible root entry")
        m = levels[0]
        N = self.grid.steps
        root = self.tree.root
        b = int(np.nonzero(self.H[root][m, 0, :, N])[0][0])
        q = [0] * self.game.num_strategies
        q[root] = b
        stack = [(root, 0, b, N)]
        while stack:
            c, a, b, w = stack.pop()
            kids = (self.tree.right[c], self.tree.left[c])
            if kids == (None, None):
                if w != b:
                    raise GameError("inconsistent table at a leaf")
                continue
            R = self.child_matrix(kids[0], m, b)
            Lm = self.child_matrix(kids[1], m, b)
            t = w - b
            Lrev = Lm[:, t::-1].astype(float)
            feas = (R[:, : t + 1].astype(float) @ Lrev.T > 0.5) & self.window(c, b, m, a=a)
            hits = np.argwhere(feas)
            if not len(hits):
                raise GameError(f"reconstruction dead end at strategy {c}")
            x, y = (int(v) for v in hits[0])
            wR, wL = self.g(c, b, x, y, w, m)
            for child, prob, mass in ((kids[0], x, wR), (kids[1], y, wL)):
                if child is not None:
                    q[child] = prob
                    stack.append((child, b, prob, mass))
        allowed = self.game.types[0].allowed_strategies
        if any(q[s] for s in range(len(q)) if s not in allowed) or sum(q) != N:
            raise GameError("reconstructed profile is inconsistent")
        return TypeSymmetricProfile((tuple(q[s] / N for s in allowed),)), m


def _mask(shape: tuple[int, int, int], budget: int, a: int | None) -> np.ndarray:
    ia = np.arange(shape[0]).reshape(-1, 1, 1)
    ix = np.arange(shape[1]).reshape(1, -1, 1)
    iy = np.arange(shape[2]).reshape(1, 1, -1)
    if a is not None:
        return (a + ix[0] + iy[0]) <= budget
    return (ia + ix + iy) <= budget


def _window(E: np.ndarray, b: int, m: int, grid: GridSpec, playable: bool) -> np.ndarray:
    lo, hi = grid.bounds(m)
    if not playable:
        return np.full(E.shape, b == 0)
    if b == 0:
        return E <= hi
    if grid.window == "open":
        return (E > lo) & (E < hi)
    return (E >= lo) & (E < hi)


def _combine(win: np.ndarray, R: np.ndarray | None, L: np.ndarray | None, hR, hL, width: int) -> np.ndarray:
    """out[a, s]: some (x, y) allowed by ``win`` with child masses summing to s.

    ``R``/``L`` are full (prob, mass) matrices; ``hR``/``hL`` are diagonal
    children (mass == prob) given as vectors.  Exactly one of each pair is set.
    """
    if L is None:
        M = win & hL[None, None, :]
    else:
        M = (win.astype(np.float32).reshape(-1, win.shape[2]) @ L.astype(np.float32)).reshape(
            win.shape[0], win.shape[1], -1) > 0.5
    out = np.zeros((win.shape[0], width), dtype=bool)
    if R is None:
        W = M.shape[2]
        for x in np.nonzero(hR)[0]:
            if x >= width:
                break
            span = min(W, width - x)
            out[:, x: x + span] |= M[:, x, :span]
        return out
    size = 1 << int(M.shape[2] + R.shape[1]).bit_length()
    FM = np.fft.rfft(M.astype(float), size, axis=2)
    FR = np.fft.rfft(R.astype(float), size, axis=1)
    conv = np.fft.irfft(np.einsum("axf,xf->af", FM, FR), size, axis=1)
    return conv[:, :width] > 0.5


def build_dense_tables(game: ActionGraphGame, tree: RootedTree, grid: GridSpec, threads: int = 1) -> DenseTables:
    """Bottom-up construction for a single player type."""
    if len(game.types) != 1:
        raise GameError("the dense engine handles exactly one player type")
    N = grid.steps
    V = grid.levels + 1
    tables = DenseTables(game, tree, grid)
    for c in tree.postorder:
        tables.utils[c] = NodeUtility(game, tree, grid, c)
    for c in tree.postorder:
        u = tables.utils[c]
        H = np.zeros((V, u.shape[0], N + 1, N + 1), dtype=bool)
        R, L = tree.right[c], tree.left[c]
        swap = R is not None and L is not None and tree.is_leaf(R) and not tree.is_leaf(L)
        playable = tables.playable(c)

        def do_b(b: int) -> None:
            E = np.broadcast_to(u.at(b), u.shape)
            mask = _mask(u.shape, N - b, None)
            for m in range(V):
                win = _window(E, b, m, grid, playable) & mask
                if not win.any():
                    continue
                if R is None:
                    H[m, :, b, b] = win[:, 0, 0]
                    continue
                # a leaf child is cheapest in the second slot, a deep one in the first
                w = win.transpose(0, 2, 1) if swap else win
                first, second = (L, R) if swap else (R, L)
                mats = []
                for child in (first, second):
                    if child is None:
                        mats.append((None, np.array([True])))
                    elif tree.is_leaf(child):
                        Hc = tree_diag(tables.H[child], m, b)
                        mats.append((None, Hc))
                    else:
                        mats.append((tables.H[child][m, b], None))
                out = _combine(w, mats[0][0], mats[1][0], mats[0][1], mats[1][1], N + 1 - b)
                H[m, :, b, b:] = out

        bs = [b for b in range(N + 1) if playable or b == 0]
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                list(pool.map(do_b, bs))
        else:
            for b in bs:
                do_b(b)
        tables.H[c] = H
    return tables


def tree_diag(Hc: np.ndarray, m: int, b: int) -> np.ndarray:
    """Leaf child's feasibility as a vector over its probability (mass equals probability)."""
    return np.diagonal(Hc[m, b]).copy()

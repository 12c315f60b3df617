"""Probability / utility-level discretisation, payoff normalisation and grid rounding."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from ..core import ActionGraphGame, GameError, TypeSymmetricProfile


@dataclass(frozen=True)
class GridSpec:
    """Probabilities are multiples of ``1/steps``; utility levels are ``m * eps / 2``
    for ``m = 0..levels``.

    ``window`` selects the interval a played strategy's utility must fall in
    around its level: ``"half-open"`` is [v - eps/2, v + eps/2), ``"open"`` is
    (v - eps/2, v + eps/2).
    """

    eps: float
    steps: int
    window: str = "half-open"

    @property
    def delta(self) -> float:
        return 1.0 / self.steps

    @property
    def levels(self) -> int:
        return ceil(2.0 / self.eps - 1e-12)

    @property
    def prob_grid(self) -> list[float]:
        return [i / self.steps for i in range(self.steps + 1)]

    @property
    def value_grid(self) -> list[float]:
        return [self.value(m) for m in range(self.levels + 1)]

    def value(self, m: int) -> float:
        return m * self.eps / 2.0

    def bounds(self, m: int) -> tuple[float, float]:
        v = self.value(m)
        return v - self.eps / 2.0, v + self.eps / 2.0


def make_grid(eps: float, delta: float, window: str = "half-open") -> GridSpec:
    """Grid with step ``1/ceil(1/delta)``, i.e. delta rounded down to a unit fraction."""
    if not (0.0 < eps <= 1.0):
        raise GameError("eps must lie in (0, 1]")
    if delta <= 0:
        raise GameError("delta must be positive")
    if window not in ("half-open", "open"):
        raise GameError(f"unknown window mode {window!r}")
    return GridSpec(eps, ceil(1.0 / delta - 1e-9), window)


def theoretical_delta(eps: float, degree: int, n: int) -> float:
    return eps / (2.0 * max(degree, 1) * max(n, 1))


@dataclass(frozen=True)
class AffineMap:
    """normalised = (original - offset) / scale; ``scale == 0`` marks a constant game."""

    offset: Fraction
    scale: Fraction

    def to_original_eps(self, eps: float) -> float:
        return eps * float(self.scale)

    @property
    def is_identity(self) -> bool:
        return self.offset == 0 and self.scale == 1


def normalize_payoffs(game: ActionGraphGame) -> tuple[ActionGraphGame, AffineMap]:
    lo, hi = game.payoff_bounds
    if lo == hi:
        amap = AffineMap(lo, Fraction(0))
        return game.replace_utilities(lambda s, k, v: Fraction(0)), amap
    if lo >= 0 and hi <= 1:
        return game, AffineMap(Fraction(0), Fraction(1))
    amap = AffineMap(lo, hi - lo)
    return game.replace_utilities(lambda s, k, v: (v - lo) / (hi - lo)), amap


def round_vector(vec: list[float] | tuple[float, ...], steps: int, strict: bool = True) -> tuple[int, ...]:
    """Integer apportionment q (units of 1/steps) with sum(q) = steps, q_i = 0 iff p_i = 0
    and |q_i - p_i * steps| <= 1.  Largest remainders are rounded up first.

    Many tiny entries can make the last two requirements incompatible, e.g.
    (0.1, 0.1, 2.8) units.  ``strict`` then raises; otherwise the largest
    entries give up the excess even though they move by more than one unit.
    """
    support = [i for i, p in enumerate(vec) if p > 0]
    if len(support) > steps:
        raise GameError(f"support size {len(support)} exceeds 1/delta = {steps}")
    r = [p * steps for p in vec]
    q = [0] * len(vec)
    for i in support:
        q[i] = max(floor(r[i] + 1e-9), 1)
    diff = steps - sum(q)
    if diff > 0:
        room = sorted((i for i in support if r[i] - q[i] > 1e-9), key=lambda i: (-(r[i] - q[i]), i))
        if len(room) < diff:
            raise GameError("rounding failed: not enough mass to apportion")
        for i in room[:diff]:
            q[i] += 1
    elif diff < 0:
        # only entries sitting exactly on the grid can step down while staying within one unit
        room = sorted((i for i in support if q[i] >= 2 and abs(r[i] - q[i]) <= 1e-9), key=lambda i: (-q[i], i))
        if len(room) < -diff:
            if strict:
                raise GameError("no grid profile within delta keeps every supported strategy nonzero")
            while diff < 0:
                i = max(support, key=lambda k: (q[k], -k))
                q[i] -= 1
                diff += 1
        else:
            for i in room[:-diff]:
                q[i] -= 1
    return tuple(q)


def round_profile_to_grid(tsp: TypeSymmetricProfile, delta: float, strict: bool = True) -> TypeSymmetricProfile:
    steps = round(1.0 / delta)
    if steps < 1 or abs(steps * delta - 1.0) > 1e-9:
        raise GameError("1/delta must be an integer")
    return TypeSymmetricProfile(tuple(tuple(x / steps for x in round_vector(v, steps, strict)) for v in tsp.probs))

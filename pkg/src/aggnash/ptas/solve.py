"""End-to-end solver: normalise, root, build tables, reconstruct, verify."""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..core import ActionGraphGame, GameError, TypeSymmetricProfile
from ..expected_utility import NASH_SLACK, type_regret
from .dense import DenseTables, build_dense_tables
from .grid import AffineMap, GridSpec, make_grid, normalize_payoffs, theoretical_delta
from .tree import GateError, choose_root
from .typed import TypedTables, overlap, type_regions

DEFAULT_TYPE_CAP = 4
DEFAULT_OVERLAP_CAP = 2


@dataclass(frozen=True)
class PtasResult:
    profile: TypeSymmetricProfile
    regret: float
    regret_original: float
    grid: GridSpec
    level: int | None
    affine: AffineMap
    degree: int
    seconds: float


def degree_parameter(game: ActionGraphGame) -> int:
    """Largest of the undirected degree and the neighbourhood size (never below 1)."""
    g = game.graph
    return max(1, g.max_degree(), g.max_in_degree())


def pick_grid(game: ActionGraphGame, eps: float, delta: float | None, window: str) -> GridSpec:
    if delta is None:
        delta = theoretical_delta(eps, degree_parameter(game), game.n)
    return make_grid(eps, delta, window)


def _gate(game: ActionGraphGame, type_cap: int) -> None:
    if len(game.types) > type_cap:
        raise GateError(f"{len(game.types)} player types exceed the cap of {type_cap}")


def build_tables(game: ActionGraphGame, grid: GridSpec, threads: int = 1, regions=None):
    """Single-type games use the dense engine, everything else the typed one."""
    tree = choose_root(game.graph)
    if len(game.types) == 1 and regions is None:
        return build_dense_tables(game, tree, grid, threads)
    return TypedTables(game, tree, grid, type_regions(game, regions)).build()


def _finish(game, norm, amap, grid, tables, started) -> PtasResult:
    if isinstance(tables, DenseTables):
        profile, level = tables.reconstruct()
    else:
        profile, level = tables.reconstruct(), None
    rep = type_regret(norm, profile)
    return PtasResult(profile, rep.max_regret, amap.to_original_eps(rep.max_regret), grid, level, amap,
                      degree_parameter(game), time.perf_counter() - started)


def ptas_solve(
    game: ActionGraphGame,
    eps: float,
    delta: float | None = None,
    type_cap: int = DEFAULT_TYPE_CAP,
    window: str = "half-open",
    threads: int = 1,
) -> PtasResult:
    """Approximate type-symmetric equilibrium of a tree-structured game.

    With ``delta=None`` the grid step is eps / (2 d n) and the verified
    regret (in normalised units) is guaranteed to be at most eps.  An
    explicit ``delta`` may be too coarse, in which case
    :class:`~aggnash.ptas.dense.NoFeasibleRoot` is raised.
    """
    started = time.perf_counter()
    _gate(game, type_cap)
    norm, amap = normalize_payoffs(game)
    grid = pick_grid(game, eps, delta, window)
    tables = build_tables(norm, grid, threads)
    res = _finish(game, norm, amap, grid, tables, started)
    if delta is None and res.regret > eps + NASH_SLACK:
        raise GameError(f"soundness violated: regret {res.regret} > eps {eps}")
    return res


def ptas_solve_overlap(
    game: ActionGraphGame,
    eps: float,
    regions: list[set[int]] | None = None,
    cap: int = DEFAULT_OVERLAP_CAP,
    delta: float | None = None,
    window: str = "half-open",
) -> PtasResult:
    """Like :func:`ptas_solve`, with tables restricted to each type's region.

    ``regions`` defaults to the closures of the types' strategy sets; given
    regions must be connected and contain the type's strategies.
    """
    started = time.perf_counter()
    choose_root(game.graph)
    regs = type_regions(game, regions)
    ov = overlap(regs, game.num_strategies)
    if ov > cap:
        raise GateError(f"region overlap {ov} exceeds cap {cap}")
    norm, amap = normalize_payoffs(game)
    grid = pick_grid(game, eps, delta, window)
    tables = TypedTables(norm, choose_root(norm.graph), grid, regs).build()
    res = _finish(game, norm, amap, grid, tables, started)
    if delta is None and res.regret > eps + NASH_SLACK:
        raise GameError(f"soundness violated: regret {res.regret} > eps {eps}")
    return res

"""``aggnash`` command line.

Every command prints ``key=value`` lines on stdout; ``--report FILE`` also
writes them as a JSON object.  Timing goes to stderr so stdout stays
byte-identical between runs.  Exit codes: 0 success, 1 domain gate or guard
failure, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

import numpy as np

from .core import GameError, TypeSymmetricProfile, validate
from .expected_utility import NASH_SLACK, regret, type_regret
from .generate import random_game
from .oracle import DEFAULT_GUARD, enumerate_pure_nash, grid_search_type_symmetric
from .ptas import ptas_solve, ptas_solve_overlap
from .reductions import (
    apply_copy_gadget,
    circuit_to_agg,
    circuit_to_symmetric_agg,
    circuit_to_tw1_agg,
    graphical_to_agg,
    graphical_to_symmetric_agg,
    loads_circ,
    loads_gg,
    sparsify_to_tw1,
    symmetric_scale,
)
from .reductions.graphical import symmetric_table_entries
from .serialize import FormatError, dumps_game, dumps_profile, loads_game, loads_profile, read_game, write_text

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
RNG_NAME = "numpy.random.PCG64"
REPEATED = ("violation", "profile", "regret")


class Output:
    def __init__(self) -> None:
        self.items: list[tuple[str, Any]] = []

    def __call__(self, key: str, value: Any) -> None:
        self.items.append((key, value))
        print(f"{key}={_fmt(value)}")

    def report(self, path: str | None) -> None:
        if path:
            doc: dict[str, Any] = {}
            for k, v in self.items:
                if k in REPEATED:
                    doc.setdefault(k, []).append(v)
                else:
                    doc[k] = v
            write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return str(v)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        write_text(path, text)


# -- commands ----------------------------------------------------------------------


def cmd_validate(args, out: Output) -> int:
    rep = validate(read_game(args.game))
    out("valid", rep.ok)
    out("violations", len(rep.violations))
    for v in rep.violations:
        out("violation", v)
    out("max_degree", rep.max_degree)
    out("max_in_degree", rep.max_in_degree)
    out("is_forest", rep.is_forest)
    out("is_tree", rep.is_tree)
    out("types", rep.type_count)
    out("orphans", list(rep.orphans))
    return EXIT_OK if rep.ok else EXIT_DOMAIN


def cmd_solve(args, out: Output) -> int:
    game = read_game(args.game)
    _require_valid(game)
    if args.overlap is not None:
        res = ptas_solve_overlap(game, args.eps, cap=args.overlap, delta=args.delta, window=args.window)
    else:
        res = ptas_solve(game, args.eps, delta=args.delta, type_cap=args.type_cap, window=args.window,
                         threads=args.threads)
    print(f"seconds={res.seconds:.3f}", file=sys.stderr)
    out("mode", "theoretical" if args.delta is None else "override")
    out("eps", args.eps)
    out("steps", res.grid.steps)
    out("delta", res.grid.delta)
    out("level", res.level if res.level is not None else "per-type")
    out("regret", res.regret)
    out("regret_original", res.regret_original)
    out("eps_original", res.affine.to_original_eps(args.eps))
    out("profile", [list(row) for row in res.profile.probs])
    if args.out:
        write_text(args.out, dumps_profile(res.profile))
    return EXIT_OK


def cmd_check(args, out: Output) -> int:
    game = read_game(args.game)
    prof = loads_profile(_read(args.profile))
    rep = type_regret(game, prof) if isinstance(prof, TypeSymmetricProfile) else regret(game, prof)
    for r in rep.regrets:
        out("regret", r)
    out("max_regret", rep.max_regret)
    out("max_support_regret", rep.max_support_regret)
    ok = rep.max_regret <= args.eps + NASH_SLACK
    out("eps", args.eps)
    out("eps_nash", ok)
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_pure_enum(args, out: Output) -> int:
    game = read_game(args.game)
    found = enumerate_pure_nash(game, guard=args.guard)
    out("count", len(found))
    for p in found:
        out("profile", list(p))
    if args.out:
        write_text(args.out, "".join(" ".join(map(str, p)) + "\n" for p in found))
    return EXIT_OK


def cmd_grid_search(args, out: Output) -> int:
    game = read_game(args.game)
    found = grid_search_type_symmetric(game, args.delta, args.eps, guard=args.guard, threads=args.threads)
    out("count", len(found))
    for p in found:
        out("profile", [list(r) for r in p.probs])
    if args.out:
        write_text(args.out, "".join(json.dumps([list(r) for r in p.probs]) + "\n" for p in found))
    return EXIT_OK


def cmd_reduce(args, out: Output) -> int:
    kind = args.kind
    text = _read(args.input)
    if kind == "copy":
        game = apply_copy_gadget(loads_game(text), args.agent, variant=args.variant)
    elif kind in ("gg2agg", "gg2tw1", "gg2sym"):
        H = loads_gg(text)
        if kind == "gg2sym":
            if args.eps is None:
                raise GameError("gg2sym needs --eps")
            c = args.c if args.c is not None else symmetric_scale(args.eps)
            out("c", c)
            out("agents", 3 * c * H.players)
            entries = symmetric_table_entries(H, c)
            out("table_entries", entries)
            if entries > args.guard:
                raise _Guard(f"{entries} utility entries exceed guard {args.guard}")
            game = graphical_to_symmetric_agg(H, args.eps, c)
        else:
            game = graphical_to_agg(H)
            if kind == "gg2tw1":
                game = sparsify_to_tw1(game, variant=args.variant)
    else:
        C = loads_circ(text)
        if kind == "circ2agg":
            game = circuit_to_agg(C)
        elif kind == "circ2tw1":
            game = circuit_to_tw1_agg(C, variant=args.variant)
        else:
            game = circuit_to_symmetric_agg(C)
    rep = validate(game)
    out("kind", kind)
    out("agents", game.num_agents)
    out("strategies", game.num_strategies)
    out("types", len(game.types))
    out("max_degree", rep.max_degree)
    out("is_forest", rep.is_forest)
    _emit(dumps_game(game), args.out)
    return EXIT_OK


def cmd_gen(args, out: Output) -> int:
    rng = np.random.default_rng(args.seed)
    game = random_game(rng, args.agents, args.strategies, types=args.types, tree=not args.cyclic,
                       max_degree=args.max_degree, orient=args.orient)
    out("rng", RNG_NAME)
    out("seed", args.seed)
    out("agents", game.num_agents)
    out("strategies", game.num_strategies)
    out("max_degree", game.graph.max_degree())
    _emit(dumps_game(game), args.out)
    return EXIT_OK


class _Guard(GameError):
    pass


def _require_valid(game) -> None:
    rep = validate(game)
    if not rep.ok:
        raise GameError("invalid game: " + "; ".join(rep.violations))


# -- parser ------------------------------------------------------------------------


def _eps(text: str) -> float:
    v = float(text)
    if not (0.0 < v <= 1.0):
        raise argparse.ArgumentTypeError("eps must lie in (0, 1]")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aggnash", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="also write the summary as JSON to this file")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a game file")
    s.add_argument("game")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", parents=[common], help="approximate equilibrium of a tree game")
    s.add_argument("game")
    s.add_argument("--eps", type=_eps, required=True)
    s.add_argument("--delta", type=_positive)
    s.add_argument("--overlap", type=int, help="use region tables with this overlap cap")
    s.add_argument("--type-cap", type=int, default=4)
    s.add_argument("--window", choices=["half-open", "open"], default="half-open")
    s.add_argument("-o", "--out", help="write the profile here")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("check", parents=[common], help="verify a profile")
    s.add_argument("game")
    s.add_argument("profile")
    s.add_argument("--eps", type=float, required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("pure-enum", parents=[common], help="list all pure equilibria")
    s.add_argument("game")
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_pure_enum)

    s = sub.add_parser("grid-search", parents=[common], help="list grid type-symmetric eps-equilibria")
    s.add_argument("game")
    s.add_argument("--delta", type=_positive, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_grid_search)

    s = sub.add_parser("reduce", parents=[common], help="apply a hardness construction")
    s.add_argument("kind", choices=["copy", "gg2agg", "gg2tw1", "gg2sym", "circ2agg", "circ2tw1", "circ2sym"])
    s.add_argument("input")
    s.add_argument("-o", "--out", required=True, help="output game file (- for stdout)")
    s.add_argument("--agent", type=int, default=0, help="agent receiving the copy gadget")
    s.add_argument("--eps", type=float)
    s.add_argument("--c", type=int, help="override the symmetric scale constant")
    s.add_argument("--variant", choices=["proof", "definition"], default="proof")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("gen", parents=[common], help="random tree game")
    s.add_argument("--agents", type=int, default=3)
    s.add_argument("--strategies", type=int, default=5)
    s.add_argument("--types", type=int, default=1)
    s.add_argument("--max-degree", type=int, default=3)
    s.add_argument("--orient", choices=["random", "both", "down"], default="random")
    s.add_argument("--cyclic", action="store_true", help="bounded-degree graph instead of a tree")
    s.add_argument("-o", "--out", required=True, help="output game file (- for stdout)")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Output()
    started = time.perf_counter()
    try:
        code = args.func(args, out)
    except (FormatError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        out("error", str(exc))
        code = EXIT_DOMAIN
    out.report(args.report)
    print(f"elapsed={time.perf_counter() - started:.3f}", file=sys.stderr)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

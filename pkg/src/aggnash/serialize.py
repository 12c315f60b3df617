"""Canonical text formats ``agg/v1`` and ``profile/v1``.

Both files are a one-line header followed by a JSON document.  The writer
emits a fixed layout (sorted utility keys, one configuration per line) so
that ``dumps_game(loads_game(text)) == text`` for canonical input.

``agg/v1`` body::

    {
      "n": 2,
      "strategies": ["f", "t"],
      "types": [{"count": 2, "strategies": [0, 1]}],
      "edges": [[0, 1]],
      "utilities": {
        "0": [],
        "1": [[[0], 1, 2], [[1], 0, 1], [[2], 3, 1]]
      },
      "meta": {}
    }

Each utility entry is ``[[counts over nu(s) in ascending id order], num, den]``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .core import (
    ActionGraphGame,
    MixedProfile,
    PlayerType,
    StrategyGraph,
    TypeSymmetricProfile,
    UtilityTable,
)

GAME_HEADER = "agg/v1"
PROFILE_HEADER = "profile/v1"

_GAME_KEYS = {"n", "strategies", "types", "edges", "utilities", "meta"}
_GAME_REQUIRED = {"n", "strategies", "types", "edges", "utilities"}
_TYPE_KEYS = {"count", "strategies"}
_PROFILE_KEYS = {"kind", "probabilities"}


class FormatError(ValueError):
    """Parse failure; ``line``/``column`` are 1-based positions in the file."""

    def __init__(self, msg: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(msg + where)


def _split_header(text: str, header: str) -> str:
    first, _, rest = text.partition("\n")
    if first.strip() != header:
        raise FormatError(f"expected header {header!r}, found {first.strip()!r}", 1, 1)
    return rest


def _parse_json(body: str) -> Any:
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        # +1 for the header line
        raise FormatError(f"malformed JSON: {exc.msg}", exc.lineno + 1, exc.colno) from None


def _dump(obj: Any) -> str:
    return json.dumps(obj, separators=(", ", ": "), ensure_ascii=False)


def dumps_game(game: ActionGraphGame) -> str:
    lines = [GAME_HEADER, "{"]
    lines.append(f'  "n": {game.n},')
    lines.append(f'  "strategies": {_dump(list(game.labels))},')
    lines.append(
        '  "types": '
        + _dump([{"count": t.agent_count, "strategies": list(t.allowed_strategies)} for t in game.types])
        + ","
    )
    lines.append(f'  "edges": {_dump([list(e) for e in game.graph.sorted_edges()])},')
    lines.append('  "utilities": {')
    for s, table in enumerate(game.utilities):
        sep = "," if s < len(game.utilities) - 1 else ""
        keys = sorted(table.entries)
        if not keys:
            lines.append(f'    "{s}": []{sep}')
            continue
        lines.append(f'    "{s}": [')
        for i, k in enumerate(keys):
            v = table.entries[k]
            comma = "," if i < len(keys) - 1 else ""
            lines.append(f"      [{_dump(list(k))}, {v.numerator}, {v.denominator}]{comma}")
        lines.append(f"    ]{sep}")
    lines.append("  },")
    lines.append(f'  "meta": {json.dumps(dict(game.meta), sort_keys=True)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{what} must be an integer")
    return x


def loads_game(text: str) -> ActionGraphGame:
    """Parse ``agg/v1``.  Structural problems raise :class:`FormatError`;
    semantic problems (incomplete tables, count mismatch) are left to
    :func:`aggnash.core.validate`."""
    doc = _parse_json(_split_header(text, GAME_HEADER))
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    unknown = set(doc) - _GAME_KEYS
    if unknown:
        raise FormatError(f"unknown key {sorted(unknown)[0]!r}")
    missing = _GAME_REQUIRED - set(doc)
    if missing:
        raise FormatError(f"missing key {sorted(missing)[0]!r}")
    n = _int(doc["n"], "n")
    labels = doc["strategies"]
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise FormatError("strategies must be a list of strings")
    types = []
    for j, t in enumerate(doc["types"]):
        if not isinstance(t, dict):
            raise FormatError(f"type {j} must be an object")
        bad = set(t) - _TYPE_KEYS
        if bad:
            raise FormatError(f"unknown key {sorted(bad)[0]!r} in type {j}")
        types.append(PlayerType(j, _int(t.get("count"), "count"),
                                tuple(_int(s, "strategy id") for s in t.get("strategies", []))))
    edges = []
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError("edge must be a pair")
        edges.append((_int(e[0], "edge"), _int(e[1], "edge")))
    try:
        graph = StrategyGraph.from_edges(len(labels), edges)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    raw = doc["utilities"]
    if not isinstance(raw, dict):
        raise FormatError("utilities must be an object")
    tables = []
    for s in range(len(labels)):
        rows = raw.get(str(s))
        if rows is None:
            raise FormatError(f"missing utility table for strategy {s}")
        entries: dict[tuple[int, ...], Fraction] = {}
        for row in rows:
            if not (isinstance(row, list) and len(row) == 3 and isinstance(row[0], list)):
                raise FormatError(f"malformed utility entry for strategy {s}")
            den = _int(row[2], "denominator")
            if den <= 0:
                raise FormatError("denominator must be positive")
            key = tuple(_int(c, "count") for c in row[0])
            if key in entries:
                raise FormatError(f"duplicate configuration {list(key)} for strategy {s}")
            entries[key] = Fraction(_int(row[1], "numerator"), den)
        scope = graph.neighbors(s) if all(0 <= a < len(labels) and 0 <= b < len(labels) for a, b in edges) else ()
        tables.append(UtilityTable(s, scope, entries))
    extra = set(raw) - {str(s) for s in range(len(labels))}
    if extra:
        raise FormatError(f"unknown key {sorted(extra)[0]!r} in utilities")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise FormatError("meta must be an object")
    return ActionGraphGame(n, tuple(types), graph, tuple(tables), tuple(labels), meta)


def _fmt_prob(p: float) -> str:
    return format(float(p), ".17g")


def dumps_profile(profile: TypeSymmetricProfile | MixedProfile) -> str:
    kind = "type" if isinstance(profile, TypeSymmetricProfile) else "agent"
    rows = ["[" + ", ".join(_fmt_prob(p) for p in row) + "]" for row in profile.probs]
    body = ",\n    ".join(rows)
    return f'{PROFILE_HEADER}\n{{\n  "kind": "{kind}",\n  "probabilities": [\n    {body}\n  ]\n}}\n'


def loads_profile(text: str) -> TypeSymmetricProfile | MixedProfile:
    doc = _parse_json(_split_header(text, PROFILE_HEADER))
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    unknown = set(doc) - _PROFILE_KEYS
    if unknown:
        raise FormatError(f"unknown key {sorted(unknown)[0]!r}")
    kind = doc.get("kind")
    rows = doc.get("probabilities")
    if kind not in ("type", "agent") or not isinstance(rows, list):
        raise FormatError("profile needs kind in {type, agent} and a probabilities list")
    probs = tuple(tuple(float(p) for p in row) for row in rows)
    return TypeSymmetricProfile(probs) if kind == "type" else MixedProfile(probs)


def read_game(path: str) -> ActionGraphGame:
    with open(path, encoding="utf-8") as fh:
        return loads_game(fh.read())


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


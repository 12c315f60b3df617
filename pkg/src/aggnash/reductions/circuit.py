"""Boolean circuits and the satisfiability-to-pure-equilibrium encodings.

``circ/v1`` file layout (header line, then JSON)::

    circ/v1
    {"gates": [{"op": "INPUT", "inputs": []}, {"op": "NOT", "inputs": [0]}], "output": 1}

Gates are listed in topological order; inputs refer to earlier gates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from ..core import ActionGraphGame, GameError
from ..serialize import FormatError, _parse_json, _split_header
from .gadgets import sparsify

CIRC_HEADER = "circ/v1"
ARITY = {"INPUT": 0, "NOT": 1, "AND": 2, "OR": 2}
MAX_DEGREE = 3


@dataclass(frozen=True)
class Gate:
    op: str
    inputs: tuple[int, ...] = ()


@dataclass(frozen=True)
class BooleanCircuit:
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        if not self.gates:
            raise GameError("circuit has no gates")
        fanout = [0] * len(self.gates)
        for k, g in enumerate(self.gates):
            if g.op not in ARITY:
                raise GameError(f"unknown gate op {g.op!r}")
            if len(g.inputs) != ARITY[g.op]:
                raise GameError(f"gate {k} ({g.op}) needs {ARITY[g.op]} inputs")
            if len(set(g.inputs)) != len(g.inputs):
                raise GameError(f"gate {k} repeats an input")
            for i in g.inputs:
                if not (0 <= i < k):
                    raise GameError(f"gate {k} input {i} is not an earlier gate")
                fanout[i] += 1
        for k, g in enumerate(self.gates):
            if len(g.inputs) + fanout[k] > MAX_DEGREE:
                raise GameError(f"gate {k} has degree {len(g.inputs) + fanout[k]} > {MAX_DEGREE}")
        if not (0 <= self.output < len(self.gates)):
            raise GameError("output is not a gate")

    @property
    def inputs(self) -> list[int]:
        return [k for k, g in enumerate(self.gates) if g.op == "INPUT"]

    def evaluate(self, assignment: dict[int, bool] | tuple[bool, ...]) -> list[bool]:
        """Values of every gate; ``assignment`` covers the INPUT gates (dict or tuple in id order)."""
        if not isinstance(assignment, dict):
            assignment = dict(zip(self.inputs, assignment))
        vals: list[bool] = []
        for k, g in enumerate(self.gates):
            vals.append(gate_value(g.op, [vals[i] for i in g.inputs], assignment.get(k, False)))
        return vals

    def satisfiable(self) -> bool:
        return any(self.evaluate(a)[self.output] for a in itertools.product((False, True), repeat=len(self.inputs)))


def gate_value(op: str, args: list[bool], given: bool = False) -> bool:
    if op == "INPUT":
        return given
    if op == "NOT":
        return not args[0]
    if op == "AND":
        return args[0] and args[1]
    return args[0] or args[1]


def dumps_circ(C: BooleanCircuit) -> str:
    rows = ",\n    ".join(f'{{"op": "{g.op}", "inputs": [{", ".join(map(str, g.inputs))}]}}' for g in C.gates)
    return f'{CIRC_HEADER}\n{{\n  "gates": [\n    {rows}\n  ],\n  "output": {C.output}\n}}\n'


def loads_circ(text: str) -> BooleanCircuit:
    doc = _parse_json(_split_header(text, CIRC_HEADER))
    if not isinstance(doc, dict):
        raise FormatError("top level must be an object")
    unknown = set(doc) - {"gates", "output"}
    if unknown:
        raise FormatError(f"unknown key {sorted(unknown)[0]!r}")
    try:
        gates = []
        for g in doc["gates"]:
            extra = set(g) - {"op", "inputs"}
            if extra:
                raise FormatError(f"unknown key {sorted(extra)[0]!r}")
            gates.append(Gate(str(g["op"]), tuple(int(i) for i in g.get("inputs", []))))
        return BooleanCircuit(tuple(gates), int(doc["output"]))
    except KeyError as exc:
        raise FormatError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, AttributeError) as exc:
        raise FormatError(str(exc)) from None


def enumerate_circuits(max_gates: int) -> Iterator[BooleanCircuit]:
    """Every valid circuit with 1..max_gates gates, each gate tried as the output."""
    def rec(prefix: list[Gate]) -> Iterator[list[Gate]]:
        if prefix:
            yield list(prefix)
        if len(prefix) == max_gates:
            return
        k = len(prefix)
        options = [Gate("INPUT")]
        options += [Gate("NOT", (i,)) for i in range(k)]
        options += [Gate(op, (i, j)) for op in ("AND", "OR") for i in range(k) for j in range(i + 1, k)]
        for g in options:
            yield from rec(prefix + [g])

    for gates in rec([]):
        for out in range(len(gates)):
            try:
                yield BooleanCircuit(tuple(gates), out)
            except GameError:
                continue


# -- A_C -----------------------------------------------------------------------------


@dataclass(frozen=True)
class CircuitLayout:
    """Strategy ids: gate k owns (2k, 2k+1); the pennies pair follows."""

    gates: int

    def f(self, k: int) -> int:
        return 2 * k

    def t(self, k: int) -> int:
        return 2 * k + 1

    @property
    def p1(self) -> int:
        return self.gates

    @property
    def p2(self) -> int:
        return self.gates + 1

    @property
    def agents(self) -> int:
        return self.gates + 2


def _edges(C: BooleanCircuit, L: CircuitLayout) -> list[tuple[int, int]]:
    edges = set()
    for j, g in enumerate(C.gates):
        for i in g.inputs:
            edges |= {(L.f(i), L.f(j)), (L.f(i), L.t(j))}
    n, p1, p2 = C.output, L.p1, L.p2
    edges |= {(L.f(n), L.f(p1)), (L.f(n), L.t(p1)), (L.f(n), L.f(p2)), (L.f(n), L.t(p2))}
    edges |= {(L.f(p1), L.f(p2)), (L.f(p1), L.t(p2)), (L.f(p2), L.f(p1)), (L.f(p2), L.t(p1))}
    return sorted(edges)


def _base_utility(C: BooleanCircuit, L: CircuitLayout):
    def count(config: dict[int, int], s: int, x: int) -> int:
        # a strategy absent from its own neighbourhood still sees its own player
        return config[x] if x in config else int(x == s)

    def utility(s: int, config: dict[int, int]) -> Fraction:
        k, own = divmod(s, 2)
        if k < len(C.gates):
            g = C.gates[k]
            if g.op == "INPUT":
                return Fraction(0)
            args = [count(config, s, L.f(i)) == 0 for i in g.inputs]
            return Fraction(int(gate_value(g.op, args) == bool(own)))
        fp1, fp2 = L.f(L.p1), L.f(L.p2)
        if k == L.p1:
            if count(config, s, L.f(C.output)) == 0:
                return Fraction(0)
            return Fraction(int(count(config, s, fp1) == count(config, s, fp2)))
        return Fraction(int(count(config, s, fp1) != count(config, s, fp2)))

    return utility


def _labels(C: BooleanCircuit) -> list[str]:
    out = [f"{x}{k}" for k in range(len(C.gates)) for x in ("f", "t")]
    return out + ["f_p1", "t_p1", "f_p2", "t_p2"]


def circuit_to_agg(C: BooleanCircuit) -> ActionGraphGame:
    """One agent per gate plus the pennies pair p1, p2 (agents n, n+1).

    Gate k plays f_k (false) or t_k (true); a gate input reads as false
    exactly when its f strategy is occupied.
    """
    L = CircuitLayout(len(C.gates))
    types = [(1, [L.f(k), L.t(k)]) for k in range(L.agents)]
    return ActionGraphGame.from_function(types, _edges(C, L), _labels(C), _base_utility(C, L),
                                         {"construction": "circuit_to_agg", "output": C.output})


def circuit_to_tw1_agg(C: BooleanCircuit, variant: str = "proof") -> ActionGraphGame:
    """Each outgoing edge of a gate or pennies strategy leaves from its own copy gadget."""
    return sparsify(circuit_to_agg(C), min_copies=0, variant=variant, construction="circuit_to_tw1_agg")


PENALTY = Fraction(-1)


def circuit_to_symmetric_agg(C: BooleanCircuit) -> ActionGraphGame:
    """Same agents, one type over every strategy; a crowded pair pays -1."""
    L = CircuitLayout(len(C.gates))
    edges = set(_edges(C, L))
    for k in range(L.agents):
        f, t = L.f(k), L.t(k)
        edges |= {(f, t), (t, f), (f, f), (t, t)}
    base = _base_utility(C, L)

    def utility(s: int, config: dict[int, int]) -> Fraction:
        k = s // 2
        if config.get(L.f(k), 0) + config.get(L.t(k), 0) > 1:
            return PENALTY
        return base(s, config)

    return ActionGraphGame.from_function([(L.agents, list(range(2 * L.agents)))], sorted(edges), _labels(C),
                                         utility, {"construction": "circuit_to_symmetric_agg", "output": C.output})

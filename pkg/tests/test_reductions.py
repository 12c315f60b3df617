import itertools
from fractions import Fraction

import numpy as np
import pytest

from aggnash.core import ActionGraphGame, GameError, MixedProfile, TypeSymmetricProfile, pure_to_mixed, validate
from aggnash.expected_utility import regret
from aggnash.oracle import enumerate_pure_nash, grid_search_type_symmetric
from aggnash.reductions import (
    BooleanCircuit,
    Gate,
    GraphicalGame,
    apply_copy_gadget,
    circuit_to_agg,
    circuit_to_symmetric_agg,
    circuit_to_tw1_agg,
    copies_of,
    dumps_circ,
    dumps_gg,
    enumerate_circuits,
    extract_subgame_profile,
    graphical_pure_nash,
    graphical_regret,
    graphical_to_agg,
    graphical_to_symmetric_agg,
    gg_strategy,
    loads_circ,
    loads_gg,
    phi_map_profile,
    sparsify_to_tw1,
    symmetric_scale,
)
from aggnash.reductions.graphical import indicator, symmetric_table_entries
from aggnash.serialize import FormatError

from conftest import pennies_game


def reachable(game, start):
    adj = game.graph.undirected_adjacency
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def random_gg(rng, players, edges):
    deg = [sum(1 for e in edges if i in e) for i in range(players)]
    pay = tuple(tuple(int(x) for x in rng.integers(0, 3, 2 ** (1 + deg[i]))) for i in range(players))
    return GraphicalGame(players, tuple(edges), pay)


def two_agent_games():
    yield pennies_game()
    for seed in range(4):
        rng = np.random.default_rng(seed)
        yield graphical_to_agg(random_gg(rng, 2, [(0, 1)]))


def f_prob(tsp, game, agent):
    return tsp.probs[game.agent_types[agent]][0]


class TestCopyGadget:
    def test_shape_and_tables(self):
        base = pennies_game()
        for variant in ("proof", "definition"):
            g = apply_copy_gadget(base, 0, variant)
            assert g.num_agents == base.num_agents + 2
            assert g.num_strategies == base.num_strategies + 4
            f_a, t_a, f_c, t_c = 4, 5, 6, 7
            assert g.allowed(2) == (f_a, t_a) and g.allowed(3) == (f_c, t_c)
            for d in range(2):
                assert g.utility(f_a, {0: d}) == d
                assert g.utility(f_c, {t_a: d}) == 1 - 2 * d
                expect = d if variant == "proof" else 1 - d
                assert g.utility(t_a, {f_c: d}) == expect
            assert set(g.utilities[t_c].entries.values()) == {0}
            assert g.meta["gadgets"] == [[0, 2, 3, f_a, t_a, f_c, t_c]]

    def test_original_tables_untouched(self):
        base = pennies_game()
        g = apply_copy_gadget(base, 1)
        for s in range(4):
            for counts in itertools.product(range(2), repeat=len(base.utilities[s].scope)):
                cfg = dict(zip(base.utilities[s].scope, counts))
                assert g.utility(s, cfg) == base.utility(s, cfg)

    def test_copy_disconnected_from_original(self):
        g = apply_copy_gadget(pennies_game(), 0)
        comp = reachable(g, 6)
        assert comp == {5, 6}
        assert not comp & {0, 1}

    def test_needs_two_strategies(self):
        g = ActionGraphGame.from_function([(1, [0, 1, 2])], [], list("abc"), lambda s, c: Fraction(0))
        with pytest.raises(GameError):
            apply_copy_gadget(g, 0)
        with pytest.raises(GameError):
            apply_copy_gadget(pennies_game(), 0, variant="other")

    def test_copy_tracks_source(self):
        for base in list(two_agent_games())[:2]:
            g = apply_copy_gadget(base, 0)
            found = grid_search_type_symmetric(g, 0.05, 0.04, guard=10**6)
            assert found
            for p in found:
                assert abs(f_prob(p, g, 3) - f_prob(p, g, 0)) <= 0.2 + 1e-9

    def test_definition_variant_anticopies(self):
        g = apply_copy_gadget(pennies_game(), 0, variant="definition")
        found = grid_search_type_symmetric(g, 0.05, 0.04, guard=10**6)
        assert max(abs(f_prob(p, g, 3) - f_prob(p, g, 0)) for p in found) > 0.2


class TestGraphical:
    def test_format_round_trip(self, golden):
        text = (golden / "pennies.gg").read_text()
        H = loads_gg(text)
        assert dumps_gg(H) == text
        with pytest.raises(FormatError):
            loads_gg(text.replace('"players"', '"people"'))
        with pytest.raises(GameError):
            GraphicalGame(2, ((0, 1),), ((0, 1, 0, 3), (0, 1, 1, 0)))

    def test_single_player(self, golden):
        A = graphical_to_agg(loads_gg((golden / "solo.gg").read_text()))
        assert A.num_agents == 1 and A.utility(0, {}) == 2 and A.utility(1, {}) == 1
        assert enumerate_pure_nash(A) == [(0,)]

    def test_pure_nash_bijection(self, rng):
        shapes = [(1, []), (2, []), (2, [(0, 1)]), (3, [(0, 1)]), (3, [(0, 1), (1, 2)]),
                  (3, [(0, 1), (1, 2), (0, 2)])]
        for players, edges in shapes:
            for _ in range(5):
                H = random_gg(rng, players, edges)
                A = graphical_to_agg(H)
                native = graphical_pure_nash(H)
                mapped = [tuple(gg_strategy(i, a) for i, a in enumerate(acts)) for acts in native]
                assert enumerate_pure_nash(A) == sorted(mapped)

    def test_regret_equality(self, rng):
        H = random_gg(rng, 3, [(0, 1), (1, 2)])
        A = graphical_to_agg(H)
        for _ in range(20):
            p = [float(x) for x in rng.random(3)]
            prof = MixedProfile(tuple((x, 1 - x) for x in p))
            assert np.allclose(regret(A, prof).regrets, graphical_regret(H, p), atol=1e-9)


class TestSparsify:
    @pytest.mark.parametrize("players,edges", [(2, [(0, 1)]), (3, [(0, 1), (1, 2)]), (4, [(0, 1), (0, 2), (0, 3)]),
                                               (3, [(0, 1), (1, 2), (0, 2)])])
    def test_structure(self, rng, players, edges):
        A = graphical_to_agg(random_gg(rng, players, edges))
        T = sparsify_to_tw1(A)
        rep = validate(T)
        assert rep.ok and rep.is_forest
        assert rep.max_degree <= 6
        assert T.graph.longest_path() <= 4
        assert T.num_agents == 7 * players
        assert T.num_strategies + len(T.graph.edges) <= 16 * (A.num_strategies + len(A.graph.edges) + 1)
        for i in range(players):
            assert len(copies_of(T, i)) == 3
            f, t = gg_strategy(i, 0), gg_strategy(i, 1)
            # originals only feed their own copies; cross-player edges leave from copies
            assert all(d >= A.num_strategies for s, d in T.graph.edges if s in (f, t) and d not in (f, t))

    def test_pure_nash_existence_preserved(self, rng):
        for _ in range(6):
            H = random_gg(rng, 2, [(0, 1)])
            A = graphical_to_agg(H)
            T = sparsify_to_tw1(A)
            found = enumerate_pure_nash(T, guard=10**6)
            assert bool(found) == bool(enumerate_pure_nash(A))
            for choice in found:
                sub = extract_subgame_profile(pure_to_mixed(T, choice), A)
                assert regret(A, sub).max_regret == 0.0

    def test_extract(self, rng):
        A = graphical_to_agg(random_gg(rng, 2, [(0, 1)]))
        T = sparsify_to_tw1(A)
        prof = MixedProfile(tuple((0.5, 0.5) for _ in range(T.num_agents)))
        assert extract_subgame_profile(prof, A).probs == ((0.5, 0.5), (0.5, 0.5))
        with pytest.raises(GameError):
            extract_subgame_profile(MixedProfile(((1.0, 0.0),)), A)


class TestSymmetric:
    def test_scale(self):
        assert symmetric_scale(0.5) == 257
        with pytest.raises(GameError):
            symmetric_scale(1.0)

    def test_bonus_and_indicator(self, golden):
        H = loads_gg((golden / "solo.gg").read_text())
        A = graphical_to_symmetric_agg(H, 0.5, c=2)
        assert A.num_agents == 6 and len(A.types) == 1 and A.meta["c"] == 2
        assert A.utility(0, {0: 1, 1: 1}) == 102 and A.utility(1, {0: 1, 1: 1}) == 101
        assert A.utility(0, {0: 2, 1: 1}) == 2
        assert indicator({0: 2, 1: 2}, 0) == 0 and indicator({0: 1, 1: 2}, 0) == 1

    def test_neighbour_reads_indicator(self, golden):
        H = loads_gg((golden / "pennies.gg").read_text())
        A = graphical_to_symmetric_agg(H, 0.5, c=1)
        # player 0 wants to match; player 1 leans t (D(t_1) > D(f_1))
        assert A.utility(1, {0: 0, 1: 1, 2: 0, 3: 1}) == 1 + 100
        assert A.utility(0, {0: 1, 1: 0, 2: 0, 3: 1}) == 0 + 100

    def test_entry_count(self, golden):
        for name, c in (("solo.gg", 2), ("pennies.gg", 1)):
            H = loads_gg((golden / name).read_text())
            A = graphical_to_symmetric_agg(H, 0.5, c=c)
            assert sum(len(t.entries) for t in A.utilities) == symmetric_table_entries(H, c)

    def test_self_loops(self, golden):
        A = graphical_to_symmetric_agg(loads_gg((golden / "pennies.gg").read_text()), 0.5, c=1)
        assert all((s, s) in A.graph.edges for s in range(4))


class TestPhi:
    def two_player_game(self):
        return graphical_to_symmetric_agg(GraphicalGame(2, (), ((0, 1), (1, 0))), 0.5, c=1)

    def test_deterministic_on_f(self):
        A = self.two_player_game()
        prof = MixedProfile(tuple((1.0, 0.0, 0.0, 0.0) for _ in range(A.num_agents)))
        assert phi_map_profile(prof, A, GraphicalGame(2, (), ((0, 1), (1, 0)))) == [1.0, 1.0]

    def test_two_uniform_agents(self):
        H = GraphicalGame(2, (), ((0, 1), (1, 0)))
        A = self.two_player_game()
        rows = [(0.5, 0.5, 0.0, 0.0)] * 2 + [(0.0, 0.0, 0.0, 1.0)] * 4
        p = phi_map_profile(MixedProfile(tuple(rows)), A, H)
        assert p[0] == pytest.approx(0.75) and p[1] == 0.0

    def test_type_symmetric_matches_expanded(self, rng):
        H = GraphicalGame(2, (), ((0, 1), (1, 0)))
        A = self.two_player_game()
        w = rng.random(4)
        tsp = TypeSymmetricProfile((tuple(float(x) for x in w / w.sum()),))
        from aggnash.core import expand_profile

        assert np.allclose(phi_map_profile(tsp, A, H), phi_map_profile(expand_profile(tsp, A), A, H), atol=1e-12)

    def test_monte_carlo(self, rng):
        H = GraphicalGame(2, (), ((0, 1), (1, 0)))
        A = self.two_player_game()
        W = rng.random((A.num_agents, 4))
        rows = [tuple(float(x) for x in w / w.sum()) for w in W]
        exact = phi_map_profile(MixedProfile(tuple(rows)), A, H)
        samples = 100_000
        draws = np.stack([rng.choice(4, size=samples, p=r) for r in rows], axis=1)
        for i in range(2):
            hit = (draws == 2 * i).sum(axis=1) >= (draws == 2 * i + 1).sum(axis=1)
            se = max(np.sqrt(exact[i] * (1 - exact[i]) / samples), 1e-6)
            assert abs(hit.mean() - exact[i]) <= 3 * se + 1e-9


class TestCircuits:
    def test_format(self, golden):
        text = (golden / "unsat.circ").read_text()
        C = loads_circ(text)
        assert dumps_circ(C) == text
        with pytest.raises(FormatError):
            loads_circ(text.replace('"output"', '"out"'))
        with pytest.raises(GameError):
            BooleanCircuit((Gate("INPUT"), Gate("AND", (0, 0))), 1)
        with pytest.raises(GameError):
            BooleanCircuit((Gate("NOT", (0,)),), 0)

    def test_not_gate(self, golden):
        C = loads_circ((golden / "not_gate.circ").read_text())
        A = circuit_to_agg(C)
        found = enumerate_pure_nash(A)
        assert found
        for choice in found:
            assert choice[0] == 0 and choice[1] == 3  # input f, NOT gate t

    def test_unsat(self, golden):
        C = loads_circ((golden / "unsat.circ").read_text())
        assert not C.satisfiable()
        assert enumerate_pure_nash(circuit_to_agg(C)) == []

    def test_sat_iff_pure_nash_two_gates(self):
        circuits = list(enumerate_circuits(2))
        assert circuits
        for C in circuits:
            assert bool(enumerate_pure_nash(circuit_to_agg(C))) == C.satisfiable()

    def test_tw1(self):
        for C in enumerate_circuits(2):
            T = circuit_to_tw1_agg(C)
            assert validate(T).is_forest
            assert bool(enumerate_pure_nash(T, guard=10**12)) == C.satisfiable()

    def test_symmetric_penalty_and_loops(self, golden):
        C = loads_circ((golden / "not_gate.circ").read_text())
        S = circuit_to_symmetric_agg(C)
        assert len(S.types) == 1 and S.num_agents == 4
        assert all((s, s) in S.graph.edges for s in range(8))
        assert S.utility(0, {0: 1, 1: 1}) == -1 and S.utility(1, {0: 2, 1: 0}) == -1

    def test_symmetric_matches_up_to_permutation(self):
        for C in enumerate_circuits(1):
            a = {tuple(sorted(p)) for p in enumerate_pure_nash(circuit_to_agg(C))}
            b = {tuple(sorted(p)) for p in enumerate_pure_nash(circuit_to_symmetric_agg(C))}
            assert a == b

    def test_deterministic(self, golden):
        C = loads_circ((golden / "unsat.circ").read_text())
        from aggnash.serialize import dumps_game

        assert dumps_game(circuit_to_tw1_agg(C)) == dumps_game(circuit_to_tw1_agg(C))

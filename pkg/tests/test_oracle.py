import itertools
from fractions import Fraction

import numpy as np
import pytest

from aggnash.core import ActionGraphGame, pure_to_mixed
from aggnash.expected_utility import regret
from aggnash.generate import random_game
from aggnash.oracle import (
    GuardExceeded,
    binomial_tv_distance,
    enumerate_pure_nash,
    grid_search_type_symmetric,
    grid_size,
    is_pure_nash,
    steps_for,
)

from conftest import anticoordination_game, coordination_game, pennies_game


def naive_pure_nash(game):
    out = []
    for choice in itertools.product(*[game.allowed(i) for i in range(game.num_agents)]):
        if regret(game, pure_to_mixed(game, choice)).max_regret <= 1e-12:
            out.append(choice)
    return sorted(out)


class TestPureEnumeration:
    def test_pennies_has_none(self):
        assert enumerate_pure_nash(pennies_game()) == []

    def test_coordination_has_two(self):
        assert enumerate_pure_nash(coordination_game()) == [(0, 0), (1, 1)]

    def test_single_agent_single_strategy(self):
        g = ActionGraphGame.from_function([(1, [0])], [], ["a"], lambda s, c: Fraction(0))
        assert enumerate_pure_nash(g) == [(0,)]

    def test_matches_naive_search(self, rng):
        for _ in range(15):
            n = int(rng.integers(1, 5))
            g = random_game(rng, n, int(rng.integers(2, 5)), types=int(rng.integers(1, min(n, 2) + 1)), tree=False)
            found = enumerate_pure_nash(g)
            assert found == naive_pure_nash(g)
            assert all(is_pure_nash(g, c) for c in found)

    def test_guard(self):
        with pytest.raises(GuardExceeded):
            enumerate_pure_nash(anticoordination_game(12), guard=100)


class TestGridSearch:
    def test_one_strategy_game(self):
        g = ActionGraphGame.from_function([(3, [0])], [(0, 0)], ["a"], lambda s, c: Fraction(c[0], 3))
        found = grid_search_type_symmetric(g, 0.25, 0.0)
        assert [p.probs for p in found] == [((1.0,),)]

    def test_anticoordination_contains_half(self):
        found = grid_search_type_symmetric(anticoordination_game(2), 0.1, 0.3)
        assert any(abs(p.probs[0][0] - 0.5) < 1e-12 for p in found)

    def test_closed_under_strategy_swap(self):
        # swapping f and t is an automorphism of the anticoordination game
        found = {tuple(round(x, 9) for x in p.probs[0]) for p in grid_search_type_symmetric(anticoordination_game(3), 0.05, 0.2)}
        assert found
        assert found == {(b, a) for a, b in found}

    def test_results_verified(self, rng):
        g = random_game(rng, 3, 3, types=2, tree=False)
        from aggnash.expected_utility import type_regret

        for p in grid_search_type_symmetric(g, 0.1, 0.2):
            assert type_regret(g, p).max_regret <= 0.2 + 1e-9

    def test_threads_identical(self, rng):
        g = random_game(rng, 3, 4, tree=False)
        a = grid_search_type_symmetric(g, 0.05, 0.3, threads=1, chunk=100)
        b = grid_search_type_symmetric(g, 0.05, 0.3, threads=4, chunk=100)
        assert a == b

    def test_guard_and_bad_delta(self):
        g = anticoordination_game(2)
        with pytest.raises(GuardExceeded):
            grid_search_type_symmetric(g, 0.001, 0.1, guard=10)
        with pytest.raises(Exception):
            steps_for(0.3)
        assert grid_size(g, 10) == 11


class TestBinomial:
    def test_zero_shift(self):
        assert binomial_tv_distance(10, 0.4, 0.0) == 0.0

    def test_single_trial(self):
        assert binomial_tv_distance(1, 0.0, 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_bound_small(self):
        for n in range(1, 10):
            for p in np.linspace(0, 0.9, 10):
                assert binomial_tv_distance(n, float(p), 0.1) <= n * 0.1 + 1e-12

"""Action-graph games: representation, exact expected utility, a tree PTAS and reductions."""

from .core import (
    ActionGraphGame,
    Configuration,
    GameError,
    MixedProfile,
    PlayerType,
    StrategyGraph,
    TypeSymmetricProfile,
    UtilityTable,
    collapse_profile,
    enumerate_configurations,
    expand_profile,
    validate,
)
from .expected_utility import expected_utility, is_eps_nash, neighborhood_distribution, regret, type_regret
from .serialize import dumps_game, dumps_profile, loads_game, loads_profile

__version__ = "0.1.0"

__all__ = [
    "ActionGraphGame", "Configuration", "GameError", "MixedProfile", "PlayerType", "StrategyGraph",
    "TypeSymmetricProfile", "UtilityTable", "collapse_profile", "dumps_game", "dumps_profile",
    "enumerate_configurations", "expand_profile", "expected_utility", "is_eps_nash", "loads_game",
    "loads_profile", "neighborhood_distribution", "regret", "type_regret", "validate",
]

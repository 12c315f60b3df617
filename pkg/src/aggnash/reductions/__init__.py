"""Executable hardness constructions: copy gadget, graphical-game and circuit encodings."""

from .circuit import (
    BooleanCircuit,
    Gate,
    circuit_to_agg,
    circuit_to_symmetric_agg,
    circuit_to_tw1_agg,
    dumps_circ,
    enumerate_circuits,
    loads_circ,
)
from .gadgets import apply_copy_gadget, binary_pair, copies_of, sparsify
from .graphical import (
    GraphicalGame,
    dumps_gg,
    extract_subgame_profile,
    gg_strategy,
    graphical_pure_nash,
    graphical_regret,
    graphical_to_agg,
    graphical_to_symmetric_agg,
    loads_gg,
    phi_map_profile,
    sparsify_to_tw1,
    symmetric_scale,
)

__all__ = [
    "BooleanCircuit", "Gate", "GraphicalGame", "apply_copy_gadget", "binary_pair", "circuit_to_agg",
    "circuit_to_symmetric_agg", "circuit_to_tw1_agg", "copies_of", "dumps_circ", "dumps_gg",
    "enumerate_circuits", "extract_subgame_profile", "gg_strategy", "graphical_pure_nash", "graphical_regret",
    "graphical_to_agg", "graphical_to_symmetric_agg", "loads_circ", "loads_gg", "phi_map_profile",
    "sparsify", "sparsify_to_tw1", "symmetric_scale",
]

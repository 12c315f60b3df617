"""Approximation scheme for tree-structured action-graph games."""

from .dense import DenseTables, NoFeasibleRoot, build_dense_tables
from .grid import (AffineMap, GridSpec, make_grid, normalize_payoffs, round_profile_to_grid, round_vector,
                   theoretical_delta)
from .solve import PtasResult, build_tables, degree_parameter, ptas_solve, ptas_solve_overlap
from .tree import GateError, RootedTree, choose_root, closure
from .typed import TypedTables, overlap, type_regions

__all__ = [
    "AffineMap", "DenseTables", "GateError", "GridSpec", "NoFeasibleRoot", "PtasResult", "RootedTree",
    "TypedTables", "build_dense_tables", "build_tables", "choose_root", "closure", "degree_parameter",
    "make_grid", "normalize_payoffs", "overlap", "ptas_solve", "ptas_solve_overlap", "round_profile_to_grid",
    "round_vector", "theoretical_delta", "type_regions",
]

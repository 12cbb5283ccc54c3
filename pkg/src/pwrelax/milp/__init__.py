"""Exact-rational model container, file writers, simplex and branch-and-bound."""

from .branch_bound import LIMIT, MipSolution, mip_solve
from .io import (parse_lp, parse_lp_file, parse_mps, parse_mps_file,
                 write_lp, write_lp_file, write_mps, write_mps_file)
from .model import (BINARY, CONTINUOUS, INTEGER, MAX, MIN, MilpModel,
                    to_frac)
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpSolution, lp_solve

__all__ = [
    "BINARY", "CONTINUOUS", "INTEGER", "MAX", "MIN", "MilpModel", "to_frac",
    "LpSolution", "lp_solve", "OPTIMAL", "INFEASIBLE", "UNBOUNDED",
    "MipSolution", "mip_solve", "LIMIT",
    "write_lp", "write_mps", "parse_lp", "parse_mps",
    "write_lp_file", "write_mps_file", "parse_lp_file", "parse_mps_file",
]

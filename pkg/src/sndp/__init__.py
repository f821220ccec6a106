"""Approximation pipeline for minimum-cost survivable network design.

Buys integer edge multiplicities meeting pairwise connectivity
requirements at certified cost: iterative rounding on top of a
multiplicative-weights LP solver whose row oracle is a Gomory-Hu cut
tree.  Every approximate step hands back a certificate that is checked,
exactly where feasible, before results are reported.
"""

from .covering import CoveringSolution, ExplicitCoveringInstance, solve_covering
from .errors import DefectError, InputError
from .gomory_hu import BuildCounter, GomoryHuTree, gomory_hu, min_cut, min_ratio_cut
from .graph import Cut, Graph, contract_edge, cut_edges, cut_value
from .instances import (
    format_instance,
    generate_instance,
    instance_document,
    parse_instance,
)
from .requirements import PairwiseRequirements, check_proper, find_violated_set
from .residual import ResidualInstance
from .rounding import SolveReport, solve, solve_lp, verify_integral

__version__ = "0.1.0"

__all__ = [
    "BuildCounter",
    "CoveringSolution",
    "Cut",
    "DefectError",
    "ExplicitCoveringInstance",
    "GomoryHuTree",
    "Graph",
    "InputError",
    "PairwiseRequirements",
    "ResidualInstance",
    "SolveReport",
    "check_proper",
    "contract_edge",
    "cut_edges",
    "cut_value",
    "find_violated_set",
    "format_instance",
    "generate_instance",
    "gomory_hu",
    "instance_document",
    "min_cut",
    "min_ratio_cut",
    "parse_instance",
    "solve",
    "solve_covering",
    "solve_lp",
    "verify_integral",
    "__version__",
]

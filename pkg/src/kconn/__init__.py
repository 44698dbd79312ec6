"""Solvers for the min-cost k-edge-connected spanning subgraph problem.

The package implements iterative LP-relaxation algorithms that return a
(k-2)-edge-connected subgraph of cost at most the cut-LP optimum when k is
even, the corresponding odd-k wrapper, a (3/2, k-1) rounding variant, and a
multi-subgraph reduction, all in exact rational arithmetic.  The `verify`
module holds independent brute-force oracles used to certify every guarantee
at small scale.
"""

from .multigraph import (
    CutSet,
    Edge,
    GraphError,
    MultiGraph,
    all_proper_cuts,
    cut_edges,
    cut_value,
    edge_connectivity,
    format_instance,
    parse_instance,
)
from .cutlp import LpRow, RelaxMode, WorkingLp, is_relaxed, refresh_rows, residual_demand
from .simplex import ExtremePoint, LpInfeasible, solve_extreme, verify_optimal, verify_vertex
from .separation import (
    CapacitatedInstance,
    ViolatedCut,
    enumerate_cuts_below,
    find_violated_cut,
    find_violated_cuts,
    global_min_cut,
)
from .solver import (
    InstanceInfeasible,
    NoProgress,
    RunReport,
    SolverInternalError,
    SolverState,
    iterate_once,
    solve,
    solve_ecsm,
    solve_even,
    solve_three_halves,
)
from .verify import (
    OracleDomainError,
    OracleResult,
    certify_connectivity,
    exact_optimum,
    full_cut_lp,
)

__all__ = [
    "CutSet",
    "Edge",
    "GraphError",
    "MultiGraph",
    "all_proper_cuts",
    "cut_edges",
    "cut_value",
    "edge_connectivity",
    "format_instance",
    "parse_instance",
    "LpRow",
    "RelaxMode",
    "WorkingLp",
    "is_relaxed",
    "refresh_rows",
    "residual_demand",
    "ExtremePoint",
    "LpInfeasible",
    "solve_extreme",
    "verify_optimal",
    "verify_vertex",
    "CapacitatedInstance",
    "ViolatedCut",
    "enumerate_cuts_below",
    "find_violated_cut",
    "find_violated_cuts",
    "global_min_cut",
    "InstanceInfeasible",
    "NoProgress",
    "RunReport",
    "SolverInternalError",
    "SolverState",
    "iterate_once",
    "solve",
    "solve_ecsm",
    "solve_even",
    "solve_three_halves",
    "OracleDomainError",
    "OracleResult",
    "certify_connectivity",
    "exact_optimum",
    "full_cut_lp",
]

__version__ = "0.1.0"

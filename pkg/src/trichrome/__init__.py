"""Exact exponential-time solvers for (3,2)-CSP, 3-coloring, 3-edge-coloring and 3-SAT."""

from .cspcore import CspInstance, brute_force_solve, build_instance, from_graph_coloring, is_solution
from .cspsolver import solve, is_satisfiable
from .edgecolor import solve_3edge
from .graphkit import Graph
from .randsolver import TrialPolicy, solve_random_pairs, solve_random_restrict4
from .satfront import CnfFormula, solve_3sat
from .vertexcolor import solve_3coloring, solve_list_coloring
from .workfactor import EPSILON, LAMBDA, optimize_epsilon, work_factor

__version__ = "0.1.0"

__all__ = [
    "CnfFormula", "CspInstance", "EPSILON", "Graph", "LAMBDA", "TrialPolicy",
    "brute_force_solve", "build_instance", "from_graph_coloring", "is_satisfiable", "is_solution",
    "optimize_epsilon", "solve", "solve_3coloring", "solve_3edge", "solve_3sat",
    "solve_list_coloring", "solve_random_pairs", "solve_random_restrict4", "work_factor",
]

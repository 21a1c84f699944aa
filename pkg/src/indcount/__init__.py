"""Approximate counting of independent sets by potential-guided branching."""

from .basecase import ApproxValue, approx_z, approx_z_uni, base_count, fptas_unweighted, verify_psi_kappa
from .count import BranchTrace, approximate_independent_sets, count, pick_branch_vertex
from .decompose import ExtendedDecomposition, StandardDecomposition, extended_decomposition, standard_decomposition
from .errors import IndCountError, InputError, PreconditionError, SizeError, StructureError
from .exact import brute_force_z, exact_count, forest_z
from .graph import Graph, WeightedGraph, format_graph, parse_graph
from .potential import PrePotential, d2, evaluate_f_plus, load_builtin, parse_potential, validate
from .transform import prune, reduce, tree_removal

__all__ = [
    "ApproxValue",
    "BranchTrace",
    "ExtendedDecomposition",
    "Graph",
    "IndCountError",
    "InputError",
    "PrePotential",
    "PreconditionError",
    "SizeError",
    "StandardDecomposition",
    "StructureError",
    "WeightedGraph",
    "approx_z",
    "approx_z_uni",
    "approximate_independent_sets",
    "base_count",
    "brute_force_z",
    "count",
    "d2",
    "evaluate_f_plus",
    "exact_count",
    "extended_decomposition",
    "forest_z",
    "format_graph",
    "fptas_unweighted",
    "load_builtin",
    "parse_graph",
    "parse_potential",
    "pick_branch_vertex",
    "prune",
    "reduce",
    "standard_decomposition",
    "tree_removal",
    "validate",
    "verify_psi_kappa",
]

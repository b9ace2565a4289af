"""Many-objective evolutionary influence maximization on social graphs."""
from .analysis import (
    ParetoFront,
    correlation_matrix,
    holm_bonferroni,
    hypervolume,
    pearson,
    subset_hypervolume,
)
from .baselines import GreedyTrace, celf, gdd, greedy, prefix_sweep
from .community import CommunityAssignment, detect_communities, load_assignment, modularity
from .graph import Graph, degree_summary, largest_weakly_connected_component, load_edge_list
from .moea import MoeaConfig, RunHistory, run_nsga2
from .objectives import NormalizationContext, ObjectiveVector, evaluate, to_maximize_space
from .propagation import PropagationModel, monte_carlo, simulate_once

__version__ = "0.1.0"

__all__ = [
    "CommunityAssignment", "Graph", "GreedyTrace", "MoeaConfig", "NormalizationContext",
    "ObjectiveVector", "ParetoFront", "PropagationModel", "RunHistory", "celf",
    "correlation_matrix", "degree_summary", "detect_communities", "evaluate", "gdd",
    "greedy", "holm_bonferroni", "hypervolume", "largest_weakly_connected_component",
    "load_assignment", "load_edge_list", "modularity", "monte_carlo", "pearson",
    "prefix_sweep", "run_nsga2", "simulate_once", "subset_hypervolume", "to_maximize_space",
]

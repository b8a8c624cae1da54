"""Evolving hypernetwork with Poisson batch arrivals, attractiveness and node aging."""

__version__ = "0.1.0"

from .hypergraph import Hypergraph, HyperEdge, NodeRecord
from .engine import ModelParams, Simulation, TargetNodeCount, MaxTime, run
from .analytics import solve_theta, theoretical_pk, theoretical_ccdf, empirical_distribution, fit_tail

__all__ = [
    "Hypergraph", "HyperEdge", "NodeRecord", "ModelParams", "Simulation", "TargetNodeCount",
    "MaxTime", "run", "solve_theta", "theoretical_pk", "theoretical_ccdf",
    "empirical_distribution", "fit_tail",
]

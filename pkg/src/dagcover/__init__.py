"""DAG covers of weighted directed graphs."""
from __future__ import annotations

from .graph import (
    INF,
    CycleDetected,
    Dag,
    DagCover,
    DistanceMatrix,
    InternalInvariantViolation,
    WeightedDigraph,
    shortest_distances,
    strongly_connected_components,
    topological_order,
    transitive_closure,
    weak_diameter,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CycleDetected",
    "Dag",
    "DagCover",
    "DistanceMatrix",
    "InternalInvariantViolation",
    "WeightedDigraph",
    "shortest_distances",
    "strongly_connected_components",
    "topological_order",
    "transitive_closure",
    "weak_diameter",
]

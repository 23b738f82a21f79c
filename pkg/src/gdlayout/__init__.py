"""Multicriteria 2D graph layout by stochastic gradient descent.

Optimizes straight-line drawings against a weighted, scheduled combination
of nine readability losses (stress, ideal edge lengths, neighborhood
preservation, crossings via a neural surrogate, crossing angles, aspect
ratio, angular resolution, vertex resolution, Gabriel property), measures
the same criteria exactly, and can guard any quality measure against
decline during updates.
"""

from .criteria import KINDS, CriterionConfig, LossValue
from .geometry import (
    CrossingList,
    all_crossings,
    brute_force_crossings,
    crossing_angle,
    incident_angle,
    rotated_bbox,
    segments_properly_cross,
    singular_values_2col,
)
from .graphs import (
    DistanceMatrix,
    Graph,
    all_pairs_shortest_paths,
    generate_balanced_tree,
    generate_dodecahedron,
    generate_grid,
    load_edge_list,
    load_matrix_market,
    save_edge_list,
)
from .kernels import BACKEND
from .lovasz import lovasz_hinge
from .neural import CrossingPredictor, crossing_count_quality, crossing_loss
from .optimizer import (
    EmaAverager,
    OptimizerConfig,
    PatienceController,
    RunTrace,
    init_layout,
    run_layout,
    safe_update,
)
from .quality import QualityReport, evaluate_all, report_table
from .sampling import SamplePool, crossing_pool, np_subgraph_sample, pool_from_items
from .schedules import Schedule, Segment, smooth_step_weight
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "KINDS",
    "CriterionConfig",
    "CrossingList",
    "CrossingPredictor",
    "DistanceMatrix",
    "EmaAverager",
    "Graph",
    "LossValue",
    "OptimizerConfig",
    "PatienceController",
    "QualityReport",
    "RunTrace",
    "SamplePool",
    "Schedule",
    "Segment",
    "all_crossings",
    "all_pairs_shortest_paths",
    "brute_force_crossings",
    "crossing_angle",
    "crossing_count_quality",
    "crossing_loss",
    "crossing_pool",
    "evaluate_all",
    "generate_balanced_tree",
    "generate_dodecahedron",
    "generate_grid",
    "incident_angle",
    "init_layout",
    "load_edge_list",
    "load_matrix_market",
    "lovasz_hinge",
    "np_subgraph_sample",
    "pool_from_items",
    "render_svg",
    "report_table",
    "rotated_bbox",
    "run_layout",
    "safe_update",
    "save_edge_list",
    "segments_properly_cross",
    "singular_values_2col",
    "smooth_step_weight",
]

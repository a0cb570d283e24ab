"""Exact-law tools for planar directed last-passage percolation with
rate-one exponential weights.

The package simulates passage times and their limiting increment fields
(exact stationary boundary laws and coupled finite-horizon versions),
builds the geodesic, dual, and instability graphs attached to a pair of
direction parameters, scans edge increments for their jump directions,
and checks the closed-form queueing laws behind all of it.  Everything
is driven by counter-based site RNG, so any window resamples
consistently from one seed.
"""

from .field import (
    FieldFormatError,
    InvalidWindowError,
    LatticeWindow,
    WeightField,
    derive_seed,
    load_field,
    sample_weight_field,
    save_field,
    write_field_tsv,
)
from .lpp import (
    Direction,
    FROM_ANCHOR,
    PassageTimes,
    TO_ANCHOR,
    alpha_of_direction,
    bellman_residual,
    direction_of_alpha,
    finite_geodesic,
    passage_times,
    path_weight,
    shape_function,
)
from .queueing import (
    LadderEpochs,
    LastExitTimes,
    QueueLine,
    WalkPath,
    catalan_pmf,
    coupled_line_busemann,
    ladder_epochs,
    last_exit_times,
    palm_pmf,
    queue_operator,
    reflect_walk,
    ssrw_zero_set,
    walk_W,
)
from .busemann import (
    BusemannField,
    BusemannMode,
    CompetitionInterface,
    JumpRecord,
    ScanResult,
    Sign,
    busemann_value,
    check_stabilized,
    cif_direction,
    competition_interface,
    coupled,
    find_jump_directions,
    horizon_busemann_field,
    jump_count_estimate,
    level_target,
    stabilized_busemann_field,
    stationary_busemann_field,
)
from .graphs import (
    CoalescenceResult,
    DualGraph,
    FlowReport,
    GeodesicGraph,
    InstabilityGraph,
    IslandComponent,
    PointClasses,
    classify_points,
    coalescence_point,
    dual_graph,
    flow_check,
    follow_geodesic,
    geodesic_graph,
    instability_graph,
    interval_mass,
    island_components,
    read_edges_tsv,
    write_edges_tsv,
)
from .stats import (
    ExpLaw,
    PmfLaw,
    StatsError,
    StatsReport,
    distribution_tests,
    estimate_densities,
)
from .acceptance import acceptance_suite
from .render import RenderOptions, render_svg

__version__ = "0.1.0"

__all__ = [
    "BusemannField",
    "BusemannMode",
    "CoalescenceResult",
    "CompetitionInterface",
    "Direction",
    "DualGraph",
    "ExpLaw",
    "FROM_ANCHOR",
    "FieldFormatError",
    "FlowReport",
    "GeodesicGraph",
    "InstabilityGraph",
    "InvalidWindowError",
    "IslandComponent",
    "JumpRecord",
    "LadderEpochs",
    "LastExitTimes",
    "LatticeWindow",
    "PassageTimes",
    "PmfLaw",
    "PointClasses",
    "QueueLine",
    "RenderOptions",
    "ScanResult",
    "Sign",
    "StatsError",
    "StatsReport",
    "TO_ANCHOR",
    "WalkPath",
    "WeightField",
    "acceptance_suite",
    "alpha_of_direction",
    "bellman_residual",
    "busemann_value",
    "catalan_pmf",
    "check_stabilized",
    "cif_direction",
    "classify_points",
    "coalescence_point",
    "competition_interface",
    "coupled",
    "coupled_line_busemann",
    "derive_seed",
    "direction_of_alpha",
    "distribution_tests",
    "dual_graph",
    "estimate_densities",
    "find_jump_directions",
    "finite_geodesic",
    "flow_check",
    "follow_geodesic",
    "geodesic_graph",
    "horizon_busemann_field",
    "instability_graph",
    "interval_mass",
    "island_components",
    "jump_count_estimate",
    "ladder_epochs",
    "last_exit_times",
    "level_target",
    "load_field",
    "palm_pmf",
    "passage_times",
    "path_weight",
    "queue_operator",
    "read_edges_tsv",
    "reflect_walk",
    "ssrw_zero_set",
    "render_svg",
    "sample_weight_field",
    "save_field",
    "shape_function",
    "stabilized_busemann_field",
    "stationary_busemann_field",
    "walk_W",
    "write_edges_tsv",
    "write_field_tsv",
]

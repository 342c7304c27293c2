"""Clustering of affine k-flats via pairwise closest-point midpoints.

Flats that meet a common ball have nearby midpoints; flats from balls far
apart produce far-apart closest points. The package computes pair
projections with a min-norm least-squares kernel (numba-accelerated with
a pure numpy fallback, selected by FLATCLUSTER_BACKEND), links accepted
midpoints into clusters, generates ball-conditioned synthetic datasets,
and ships Monte Carlo estimators for the distance statistics that make
the method work in high dimension.
"""

from .errors import (
    ConfigurationError,
    DataFormatError,
    DegenerateFlatError,
    FlatClusterError,
    InvalidInputError,
)
from .numerics import (
    RANK_TOL,
    LstsqResult,
    least_squares,
    nullspace_basis,
    orthonormalize,
    span_and_complement,
)
from .geometry import (
    Ball,
    Flat,
    ImplicitFlat,
    Isometry,
    apply_isometry,
    drop_trivial_coordinates,
    flat_point_distance,
    general_position,
    implicitize,
    parametrize,
    project_point,
)
from .pairwise import (
    PairProjection,
    all_pairs,
    lexicographic_pairs,
    pair_projection,
    project_pairs,
)
from .clustering import (
    Cluster,
    ClusterParams,
    Clustering,
    cluster,
    cluster_recursive,
    cluster_sampled,
    filter_pairs,
    union_find_cluster,
)
from .generator import (
    GenConfig,
    LabeledDataset,
    generate_dataset,
    sample_cluster_flat,
    sample_disk_chord_line,
    sample_flat_through_point,
    sample_tangent_line_pair,
    tangent_pair_intersection,
)
from .dataio import (
    FORMAT_VERSION,
    read_dataset,
    read_result,
    write_dataset,
    write_midpoints_csv,
    write_result,
    write_verification_records,
)
from .mc_lab import (
    ConcentrationReport,
    McEstimate,
    Z99,
    disk_intersection_probability,
    estimate_S0,
    estimate_S1,
    estimate_S_delta,
    estimate_rejection_fraction,
    midpoint_concentration,
    midpoint_reach_bound,
    paired_delta_distances,
    separation_ratio,
    tangent_pair_reach,
)
from ._backend import backend_name

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DataFormatError", "DegenerateFlatError",
    "FlatClusterError", "InvalidInputError",
    "RANK_TOL", "LstsqResult", "least_squares", "nullspace_basis",
    "orthonormalize", "span_and_complement",
    "Ball", "Flat", "ImplicitFlat", "Isometry", "apply_isometry",
    "drop_trivial_coordinates", "flat_point_distance", "general_position",
    "implicitize", "parametrize", "project_point",
    "PairProjection", "all_pairs", "lexicographic_pairs", "pair_projection",
    "project_pairs",
    "Cluster", "ClusterParams", "Clustering", "cluster", "cluster_recursive",
    "cluster_sampled", "filter_pairs", "union_find_cluster",
    "GenConfig", "LabeledDataset", "generate_dataset", "sample_cluster_flat",
    "sample_disk_chord_line", "sample_flat_through_point",
    "sample_tangent_line_pair", "tangent_pair_intersection",
    "FORMAT_VERSION", "read_dataset", "read_result", "write_dataset",
    "write_midpoints_csv", "write_result", "write_verification_records",
    "ConcentrationReport", "McEstimate", "Z99",
    "disk_intersection_probability", "estimate_S0", "estimate_S1",
    "estimate_S_delta", "estimate_rejection_fraction",
    "midpoint_concentration", "midpoint_reach_bound",
    "paired_delta_distances", "separation_ratio", "tangent_pair_reach",
    "backend_name",
    "__version__",
]

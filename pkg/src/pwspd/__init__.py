"""Power-weighted shortest-path distances on point clouds.

Library and CLI for path metrics that trade off geometric length against
sample density: exact kNN-graph spanner verification, density-aware affinity
kernels, spectral clustering pipelines, and Monte-Carlo estimation of the
variance-scaling exponent of the normalized path distance.
"""

__version__ = "0.1.0"

from .core import (
    DistanceMatrix,
    NeighborGraph,
    PointCloud,
    RngHandle,
    complete_graph,
    load_point_cloud,
    make_rng,
    pairwise_euclidean,
    power_weights,
    save_point_cloud,
)
from .experiments import (
    Box,
    ChiEstimate,
    DatasetSpec,
    chi_spanner_k,
    estimate_chi,
    gen_dataset,
    sample_ppp,
)
from .kernels import (
    EquivalenceReport,
    KernelMatrix,
    density_stretched_distance,
    diffusion_kernel,
    epsilon_percentile,
    gaussian_kernel,
    local_equivalence_report,
    self_tuning_kernel,
)
from .neighbors import (
    DensityEstimate,
    ScaleVector,
    knn_density,
    knn_graph,
    knn_scales,
    unit_ball_volume,
)
from .paths import (
    PathResult,
    PwspdQueryConfig,
    longest_leg_all_pairs,
    pwspd_all_pairs,
    pwspd_knn_query,
    pwspd_single_source,
)
from .spanner import (
    HeatmapResult,
    SpannerParams,
    elongated_ball_radius,
    is_critical_edge,
    spanner_heatmap,
    theoretical_k_euclidean,
    theoretical_k_intrinsic,
    verify_one_spanner,
)
from .spectral import (
    ClusteringResult,
    SpectralEmbedding,
    accuracy,
    accuracy_vs_p_sweep,
    baseline_accuracy,
    embed,
    kmeans,
    laplacian,
    spectral_embedding,
)

__all__ = [name for name in dir() if not name.startswith("_")]

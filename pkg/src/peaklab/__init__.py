"""peaklab: random graph labelings conditioned on peaks.

Exact tree formulas, brute-force enumeration oracles, conditioned
samplers (rejection and MCMC), Eden growth, and the level-set /
gradient-path / twin-peak statistics built on them.
"""

__version__ = "0.1.0"

from .graphs import (
    EdgeSplit,
    Graph,
    TreeIndex,
    centroids,
    distance,
    grid_vertex,
    make_barbell_tree,
    make_grid,
    make_path,
    make_regular_tree,
    make_torus,
    rooted_index,
    split_by_edge,
    splits_between,
    torus_vertex,
    tree_from_edges,
)
from .labelings import (
    ClusterTrace,
    Labeling,
    cluster_trace,
    gradient_path,
    is_connected_subset,
    peak_count,
    peaks,
)
from .exact import (
    adjacent_ratio,
    argmax_single_peak,
    regular_tree_size,
    sharpened_ratio_bound_check,
    single_peak_count_at,
    single_peak_prob_at,
    twin_factor_products,
)
from .oracle import (
    ConditionalDistribution,
    EnumerationCapError,
    PeakCountTable,
    conditional_statistic,
    conditional_top_locations,
    enumerate_peak_counts,
    growth_vs_uniform_discrepancy,
)
from .sampling import (
    McmcConfig,
    RejectionExhausted,
    RngStream,
    canonical_single_peak,
    canonical_two_peaks,
    eden_growth,
    mcmc_conditioned,
    rejection_conditioned,
    sequential_growth_labeling,
    uniform_labeling,
)
from .experiments import (
    ExperimentReport,
    boundary_roughness,
    gradient_line,
    growth_comparison,
    twin_peaks_tree,
)

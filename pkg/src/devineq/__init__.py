"""devineq: development and inequality analytics on bipartite wage panels.

Regional fitness-complexity rankings from wage panels, Theil-based
inequality with exact between/within decomposition, a comparative
development index, and Nadaraya-Watson kernel smoothing with bootstrap
confidence bands, all exposed as a library and a CLI (``devineq``).
"""

from . import errors
from .bipartite import (
    BinaryMatrix,
    LabeledMatrix,
    WeightedBipartitePanel,
    binarize,
    check_rca_lq_identity,
    degree_preserving_shuffles,
    location_quotient,
    nestedness,
    rca,
    sort_by_rank,
    triangularity,
)
from .development import CDIParams, cdi, join_development_inputs, relative_monetary
from .fitness import FitnessResult, FitnessState, SolverConfig, initialize, rank, solve, step
from .inequality import (
    GroupedDistribution,
    SectorWageTable,
    between_sector_theil,
    capital_share_series,
    decompose,
    gini,
    theil,
    theil_share_form,
)
from .ingest import (
    load_country_panel,
    load_inequality_series,
    load_region_sector_panel,
    pool_panel,
)
from .pipeline import AnalysisSpec, run_all, run_country_pooled, run_region_year, run_time_windows
from .smoothing import (
    DEFAULT_SEED,
    KernelConfig,
    KernelEstimate,
    bootstrap_bands,
    colormap_grid,
    kernel_regress,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisSpec",
    "BinaryMatrix",
    "CDIParams",
    "DEFAULT_SEED",
    "FitnessResult",
    "FitnessState",
    "GroupedDistribution",
    "KernelConfig",
    "KernelEstimate",
    "LabeledMatrix",
    "SectorWageTable",
    "SolverConfig",
    "WeightedBipartitePanel",
    "between_sector_theil",
    "binarize",
    "bootstrap_bands",
    "capital_share_series",
    "cdi",
    "check_rca_lq_identity",
    "colormap_grid",
    "decompose",
    "degree_preserving_shuffles",
    "errors",
    "gini",
    "initialize",
    "join_development_inputs",
    "kernel_regress",
    "load_country_panel",
    "load_inequality_series",
    "load_region_sector_panel",
    "location_quotient",
    "nestedness",
    "pool_panel",
    "rank",
    "rca",
    "relative_monetary",
    "run_all",
    "run_country_pooled",
    "run_region_year",
    "run_time_windows",
    "solve",
    "sort_by_rank",
    "triangularity",
    "step",
    "theil",
    "theil_share_form",
]

"""Eigen-entropy phase-space analysis of rolling return-correlation matrices."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .ingest import (
    PricePanel,
    PriceSeries,
    ReturnPanel,
    align_panel,
    log_returns,
    parse_price_table,
    read_panel,
    write_panel,
)
from .corrlab import Epoch, epoch_correlation, mean_correlation, rolling_epochs
from .spectral import (
    CentralityVector,
    ModeSplit,
    SpectralDecomposition,
    abs_power,
    marchenko_pastur_upper,
    market_mode,
    mode_split,
    perron_centrality,
    symmetric_eigen,
)
from .phase import (
    ClassifierConfig,
    EntropyTriple,
    PhasePoint,
    StandardizedTriple,
    classify,
    classify_series,
    eigen_entropy,
    entropy_triple,
    event_window,
    matrix_entropies,
    phase_coordinates,
    rolling_standardize,
)
from .ensemble import BaselineReport, EnsembleSpec, baseline, one_factor_sample, woe_sample
from .analysis import IndicatorSeries, ScalingFit, cross_correlogram, fear_gauge, fit_scaling
from .pipeline import RunConfig, analyze_returns, compute_triples

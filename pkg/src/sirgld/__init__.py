"""Fit epidemic case counts with the SIR model and the generalized logistic
distribution, and use the latter's final-size estimate to pin down the SIR
population size."""

from .bbs import BbsConfig, BbsFit, bbs_objective, fit_bbs
from .combo import CombinedForecast, LPlotSeries, combined_forecast, estimate_N, lplot_gld, lplot_sir
from .epi_data import (
    DailyRecord,
    EpidemicSeries,
    GroupedCounts,
    ValidationError,
    grouped_counts,
    load_series,
    serialize_series,
    susceptible_series,
)
from .gld import (
    GldParams,
    GrowthParams,
    cdf,
    final_size_estimate,
    fit_mle,
    gld_growth,
    gld_inflection,
    growth_to_params,
    log_likelihood,
    logistic_growth,
    params_to_growth,
    pdf,
)
from .optimizer import OptResult, SimplexConfig, minimize
from .sir import (
    SirParams,
    SirState,
    SirTrajectory,
    basic_reproduction_number,
    current_reproduction_number,
    difference_estimates,
    integrate,
    rolling_mean,
    sir_rhs,
)

__version__ = "0.1.0"

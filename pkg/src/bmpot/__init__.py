"""Block maxima and peak-over-threshold extreme value estimation."""

from .blocking import BlockMaximaSample, ExcessSample, block_maxima, disjoint_block_maxima, sliding_block_maxima, threshold_excesses
from .distributions import (
    DistributionSpec,
    Family,
    SecondOrder,
    TruthRecord,
    gev_cdf,
    gev_quantile,
    gp_cdf,
    gp_quantile,
    h_gamma,
    sample,
    tail_quantile_U,
    tail_quantile_V,
    truth,
)
from .errors import EVTError
from .extremal_index import (
    ThetaEstimate,
    TimeSeriesModel,
    estimate_theta,
    inverse_tilde_transform,
    parse_model,
    simulate_block_maxima,
    simulate_timeseries,
    theta_blocks,
    theta_intervals,
    tilde_transform,
)
from .fitters import TailFit, fit_gev_ml, fit_gev_pwm, fit_gp_ml, fit_gp_pwm, hill
from .harness import ExperimentConfig, HorseRaceReport, ksweep, rate_fit, run_horserace
from .multivariate import DependenceModel, MultivariateSample, empirical_stdf, sample_dependence, true_stdf
from .series import Series
from .tail_targets import (
    FitFailedError,
    TargetEstimate,
    quantile_bm,
    quantile_pot,
    return_level_bm,
    return_level_pot,
    tail_prob_pot,
)

__version__ = "0.1.0"

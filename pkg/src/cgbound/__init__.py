"""Tight CDF overbounds for heavy-tailed ranging errors.

Single-CDF Cauchy-Gaussian bounds for symmetric-unimodal errors, paired
combined-model bounds for biased errors, Gaussian/two-step/NavDEN baselines,
and convolution of range-domain bounds into vertical protection levels.
"""

from .distributions import (
    Cauchy,
    CgcmHalf,
    Gaussian,
    GaussianMixture,
    MirroredCdf,
    ScaledCdf,
    from_config,
    paired_cgcm,
    to_config,
)
from .empirical import EmpiricalCdf, FitTarget, build_ecdf, load_samples
from .errors import BiasedTargetError, InfeasibleFitError, InputDataError, NumericFailure
from .su_overbound import (
    SuOverbound,
    fit_single_cauchy,
    fit_single_gaussian,
    fit_su_overbound,
    solve_tangential_transition,
    synthesize_su,
)
from .nsu_overbound import (
    PairedOverbound,
    analog_single_cdf,
    fit_nsu_overbound,
    fit_paired_cauchy,
    fit_paired_cgcm,
    fit_paired_gaussian,
    synthesize_paired,
)
from .baselines import (
    NavdenParams,
    TwoStepParams,
    fit_navden_scale,
    fit_two_step,
    navden_as_paired,
    navden_left_bound,
    navden_quantile,
    navden_table,
    two_step_as_paired,
)
from .mads import SearchConfig, minimize
from .position_domain import DiscretePdf, convolve_vertical, discretize, select_worst_case, vpl
from .simulate import EpochResult, GeometryEpoch, SkyModel, build_geometry, run_epoch, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]

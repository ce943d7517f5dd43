"""Exact maximum likelihood for MA(q) models on the closed invertible region."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AllStartsFailedError,
    ClosedMAError,
    DegenerateVarianceError,
    NonFiniteInputError,
    NotInClosedRegionError,
    NotPositiveDefiniteError,
    OutsideClosedCubeError,
    TooShortSeriesError,
    ZeroSeriesError,
)
from .estimator import FitOptions, FitResult, fit_ma, grid_fit_ma1, profile_curve  # noqa: E402
from .likelihood import (  # noqa: E402
    LikelihoodValue,
    dense_loglikelihood,
    innovations_loglikelihood,
    ma_autocovariance,
)
from .montecarlo import ExperimentConfig, ExperimentReport, SimSpec, run_experiment, simulate_ma  # noqa: E402
from .reparam import (  # noqa: E402
    BoundaryReport,
    b_pseudo_inverse,
    b_transform,
    boundary_flags,
    min_root_modulus,
)

__all__ = [
    "AllStartsFailedError",
    "BoundaryReport",
    "ClosedMAError",
    "DegenerateVarianceError",
    "ExperimentConfig",
    "ExperimentReport",
    "FitOptions",
    "FitResult",
    "LikelihoodValue",
    "NonFiniteInputError",
    "NotInClosedRegionError",
    "NotPositiveDefiniteError",
    "OutsideClosedCubeError",
    "SimSpec",
    "TooShortSeriesError",
    "ZeroSeriesError",
    "b_pseudo_inverse",
    "b_transform",
    "boundary_flags",
    "dense_loglikelihood",
    "fit_ma",
    "grid_fit_ma1",
    "innovations_loglikelihood",
    "ma_autocovariance",
    "min_root_modulus",
    "profile_curve",
    "run_experiment",
    "simulate_ma",
]

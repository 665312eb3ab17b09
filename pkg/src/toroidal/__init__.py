"""Dependent bivariate distributions on the torus built from Cardioid margins.

Modules
-------
circular    angle arithmetic, circular mean and correlation
cardioid    Cardioid density, CDF, quantile and samplers
torus       curved-torus geometry and the area-uniform law
dependent   five-parameter dependent model and its marginals/conditionals
inference   maximum-likelihood fitting and recovery studies
regression  circular regression and QQ diagnostics
data        CSV ingestion with a replayable preprocessing log
cli         ``toroidal`` command-line entry point
"""

from .cardioid import CardioidParams
from .circular import circular_correlation, circular_mean, wrap_angle
from .dependent import ToroidalParams, joint_pdf, sample_joint
from .exceptions import DataError, DomainError, NumericError, UndefinedDirectionError
from .inference import FitConfig, FitResult, fit_mle
from .regression import RegressionModel, predict, qq_report
from .torus import TorusGeometry

__all__ = [
    "CardioidParams", "ToroidalParams", "TorusGeometry", "FitConfig", "FitResult",
    "RegressionModel", "DataError", "DomainError", "NumericError", "UndefinedDirectionError",
    "circular_correlation", "circular_mean", "wrap_angle", "joint_pdf", "sample_joint",
    "fit_mle", "predict", "qq_report",
]
__version__ = "0.1.0"

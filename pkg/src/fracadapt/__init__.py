"""Adaptive and parametric one-step estimation for fractional time series with trends."""

from .adapt import (EstimationResult, FAMILIES, ParametricFamily, WaldResult, dn_matrix, estimate,
                    omega1, omega2, one_step_adaptive, one_step_parametric, reclassify,
                    trend_info_limit, wald_test)
from .errors import (CellFailedError, DegenerateDataError, DesignDegenerateError, EstimationFailed,
                     InvalidFamilyError, InvalidRestrictionError, NonInvertibleSeriesError,
                     SingularBasisError)
from .fracfilter import apply_filter, convolve, delta_coeffs, filter_matrix, log_coeffs, series_inverse
from .initial import InitialFit, css_fit, initial_fit, tapered_whittle_fit
from .innovations import InnovationDist, sample, stream, true_info, true_score
from .mc import McCell, McConfig, TableSet, delta_diagnostic, run_cell, run_tables
from .model import ModelSpec, ThetaFull, acf_farima0d0, ar_coeffs, ar_deriv_coeffs, simulate
from .residuals import RegressionDesign, classify, full_design, regressors, residual_derivs, residuals
from .score import BasisConfig, ScoreFit, eval_score, fit_score, j_path

__version__ = "0.1.0"

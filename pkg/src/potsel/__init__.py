"""Peaks-over-threshold modelling: GPD fitting, Anderson-Darling checks,
automated threshold selection and Value-at-Risk reporting."""

from ._kernels import BACKEND
from .dataio import ClaimsDataset, Ecdf, ecdf, empirical_quantile, filter_year, load_claims, summary_stats
from .gof import AdResult, ad_pvalue, ad_statistic, gof_test, probability_integral_transform
from .gpd import (
    ExceedanceSet,
    GpdFit,
    GpdParams,
    fit_gpd,
    gpd_cdf,
    gpd_pdf,
    gpd_quantile,
    gpd_sample,
    profile_loglik,
)
from .risk import VarEstimate, empirical_var, mle_covariance, var_gradient, var_with_ci
from .selection import (
    AccumulationSpec,
    CandidateGrid,
    Kind,
    SelectionResult,
    Status,
    accumulation_cutoff,
    accumulation_value,
    build_candidate_grid,
    select_threshold,
)
from .simlab import ScenarioSpec, load_scenarios, run_scenario, sample_composite, scenario_table

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

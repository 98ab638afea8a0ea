"""Generalized Pareto distribution: distribution functions, sampling, and
maximum-likelihood fitting of (sigma, gamma) for a fixed threshold.

The fit maximizes the profile log-likelihood over ``theta = gamma / sigma``:

    l(theta) = -n - n log(gamma(theta) / theta) - sum log(1 + theta y_i),
    gamma(theta) = mean log(1 + theta y_i)

which equals the full log-likelihood at ``sigma = gamma(theta) / theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, InsufficientData, NonConvergence

__all__ = [
    "ExceedanceSet",
    "GpdFit",
    "GpdParams",
    "MIN_EXCEEDANCES",
    "fit_gpd",
    "gpd_cdf",
    "gpd_loglik",
    "gpd_pdf",
    "gpd_quantile",
    "gpd_sample",
    "profile_loglik",
]

MIN_EXCEEDANCES = 10
EXP_TOL = 1e-12  # |gamma| below this uses the exponential branch


@dataclass(frozen=True)
class GpdParams:
    mu: float
    sigma: float
    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not (np.isfinite(self.mu) and np.isfinite(self.gamma)):
            raise DomainError("mu and gamma must be finite")

    @property
    def upper(self) -> float:
        """Right end of the support (inf when gamma >= 0)."""
        if self.gamma >= 0:
            return np.inf
        return self.mu - self.sigma / self.gamma

    def shifted(self, mu: float) -> GpdParams:
        return GpdParams(mu, self.sigma, self.gamma)


@dataclass(frozen=True)
class ExceedanceSet:
    """Sorted nonnegative excesses ``y = x - threshold``."""

    values: np.ndarray
    threshold: float = 0.0

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size and (v[0] < 0 or not np.all(np.isfinite(v))):
            raise DomainError("exceedances must be finite and nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return int(self.values.size)

    @classmethod
    def from_data(cls, data, threshold: float) -> ExceedanceSet:
        x = np.asarray(data, dtype=float)
        return cls(x[x >= threshold] - threshold, float(threshold))


@dataclass(frozen=True)
class GpdFit:
    params: GpdParams
    theta_hat: float
    log_likelihood: float
    n_exceedances: int
    converged: bool = True
    mle_regularity_ok: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "mle_regularity_ok", bool(self.params.gamma > -0.5))


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _check_support(x, params: GpdParams):
    if np.any(x < params.mu):
        raise DomainError("x below the GPD location")


def gpd_cdf(x, params: GpdParams):
    """CDF of the GPD; values beyond a finite upper endpoint map to 1."""
    x = _as_float_array(x)
    _check_support(x, params)
    t = (x - params.mu) / params.sigma
    g = params.gamma
    if abs(g) < EXP_TOL:
        out = -np.expm1(-t)
    else:
        u = g * t
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(u <= -1.0, 1.0, -np.expm1(-np.log1p(np.maximum(u, -1.0)) / g))
    return out[()] if out.ndim == 0 else out


def gpd_quantile(p, params: GpdParams):
    p = _as_float_array(p)
    if np.any((p < 0) | (p >= 1)) or np.any(np.isnan(p)):
        raise DomainError("quantile level must lie in [0, 1)")
    g = params.gamma
    lq = -np.log1p(-p)  # -log(1 - p)
    if abs(g) < EXP_TOL:
        out = params.mu + params.sigma * lq
    else:
        out = params.mu + params.sigma * np.expm1(g * lq) / g
    return out[()] if out.ndim == 0 else out


def gpd_pdf(x, params: GpdParams):
    x = _as_float_array(x)
    _check_support(x, params)
    if np.any(x > params.upper):
        raise DomainError("x above the GPD upper endpoint")
    t = (x - params.mu) / params.sigma
    g = params.gamma
    if abs(g) < EXP_TOL:
        out = np.exp(-t) / params.sigma
    else:
        with np.errstate(divide="ignore"):
            out = np.exp(-(1.0 / g + 1.0) * np.log1p(g * t)) / params.sigma
    return out[()] if out.ndim == 0 else out


def gpd_sample(params: GpdParams, count: int, seed=None) -> np.ndarray:
    """Inverse-transform sample; ``seed`` may be an int or a Generator."""
    if count < 0:
        raise DomainError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    return np.atleast_1d(gpd_quantile(rng.random(count), params))


def gpd_loglik(y, sigma: float, gamma: float) -> float:
    """Full log-likelihood of excesses ``y`` (threshold already removed)."""
    y = _as_float_array(y)
    if sigma <= 0:
        return -np.inf
    t = y / sigma
    if abs(gamma) < EXP_TOL:
        return float(-y.size * np.log(sigma) - t.sum())
    u = gamma * t
    if np.any(u <= -1.0):
        return -np.inf
    return float(-y.size * np.log(sigma) - (1.0 + 1.0 / gamma) * np.log1p(u).sum())


def _values(exceedances) -> np.ndarray:
    if isinstance(exceedances, ExceedanceSet):
        return exceedances.values
    return ExceedanceSet(exceedances).values


def profile_loglik(theta: float, exceedances) -> float:
    y = _values(exceedances)
    if y.size == 0:
        raise DomainError("empty exceedance set")
    if theta != 0.0 and np.any(theta * y <= -1.0):
        raise DomainError("1 + theta * y must be positive for every exceedance")
    return float(_kernels.profile_loglik(y, float(theta)))


def fit_gpd(exceedances, min_exceedances: int = MIN_EXCEEDANCES) -> GpdFit:
    """Maximum-likelihood GPD fit at a fixed threshold.

    Parameters
    ----------
    exceedances : ExceedanceSet or array_like
        Nonnegative excesses over the threshold.
    min_exceedances : int
        Fitting is refused below this count.

    Raises
    ------
    InsufficientData
        Fewer than ``min_exceedances`` values.
    NonConvergence
        The profile search found no interior maximum (including the case
        of an all-zero sample).
    """
    es = exceedances if isinstance(exceedances, ExceedanceSet) else ExceedanceSet(exceedances)
    y = es.values
    if y.size < min_exceedances:
        raise InsufficientData(f"{y.size} exceedances, need at least {min_exceedances}")
    status, theta, gamma, sigma, ll = _kernels.fit_profile(y)
    if status != 0:
        raise NonConvergence(
            "no interior maximum of the profile likelihood"
            if status == 1
            else "degenerate exceedances (all zero)"
        )
    return GpdFit(GpdParams(es.threshold, sigma, gamma), theta, ll, y.size)

"""Value-at-Risk from a fitted GPD with delta-method confidence intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .dataio import empirical_quantile
from .errors import DomainError, NonPositiveVariance, RegularityViolation
from .gpd import GpdFit, GpdParams, gpd_quantile

__all__ = [
    "MleCovariance",
    "VarEstimate",
    "empirical_var",
    "mle_covariance",
    "normal_quantile",
    "var_gradient",
    "var_with_ci",
]


@dataclass(frozen=True)
class MleCovariance:
    matrix: np.ndarray  # covariance of (sigma_hat, gamma_hat)
    n: int


@dataclass(frozen=True)
class VarEstimate:
    level: float
    var: float
    omega: float
    ci_lower: float
    ci_upper: float
    ci_level: float
    n: int

    def covers(self, value: float) -> bool:
        return self.ci_lower <= value <= self.ci_upper


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError("normal quantile needs 0 < p < 1")
    return float(ndtri(p))


def mle_covariance(fit: GpdFit, n: int | None = None) -> MleCovariance:
    """Asymptotic covariance of (sigma_hat, gamma_hat):

        (1 + gamma) / n * [[2 sigma^2, -sigma], [-sigma, 1 + gamma]]

    The two estimates are negatively correlated. ``n`` defaults to the
    number of exceedances behind the fit.
    """
    s, g = fit.params.sigma, fit.params.gamma
    if not g > -0.5:
        raise RegularityViolation(f"shape {g:.4g} <= -0.5: MLE is not asymptotically normal")
    n = fit.n_exceedances if n is None else int(n)
    if n < 1:
        raise DomainError("n must be positive")
    m = (1.0 + g) * np.array([[2.0 * s * s, -s], [-s, 1.0 + g]]) / n
    return MleCovariance(m, n)


# e^x (x - 1) + 1 = sum_{k>=2} (k-1)/k! x^k; series avoids cancellation near 0
_SERIES = (1 / 2, 1 / 3, 1 / 8, 1 / 30, 1 / 144, 1 / 840, 1 / 5760)


def _dgamma_core(x: float) -> float:
    """(e^x (x - 1) + 1) / x^2."""
    if abs(x) < 1e-2:
        return sum(c * x**k for k, c in enumerate(_SERIES))
    return (math.exp(x) * (x - 1.0) + 1.0) / (x * x)


def var_gradient(params: GpdParams, level: float) -> np.ndarray:
    """Gradient of ``mu + sigma/gamma ((1-p)^-gamma - 1)`` in (sigma, gamma)."""
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    s, g = params.sigma, params.gamma
    lq = -math.log1p(-level)  # -log(1 - p) > 0
    x = g * lq
    d_sigma = lq * (math.expm1(x) / x if x != 0.0 else 1.0)
    d_gamma = s * lq * lq * _dgamma_core(x)
    return np.array([d_sigma, d_gamma])


def _tail_level(level: float, tail_fraction: float | None) -> float:
    if tail_fraction is None:
        return level
    if not 0.0 < tail_fraction <= 1.0:
        raise DomainError("tail_fraction must lie in (0, 1]")
    q = 1.0 - (1.0 - level) / tail_fraction
    if q < 0.0:
        raise DomainError("level falls below the threshold's exceedance probability")
    return q


def var_with_ci(
    fit: GpdFit,
    level: float,
    ci_level: float = 0.95,
    *,
    tail_fraction: float | None = None,
    n: int | None = None,
) -> VarEstimate:
    """VaR at ``level`` with a symmetric delta-method interval.

    By default ``level`` is read as a quantile level of the fitted excess
    GPD itself. Passing ``tail_fraction`` (share of all data above the
    threshold) converts an unconditional level to the tail level first.
    """
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    if not 0.0 < ci_level < 1.0:
        raise DomainError("ci_level must lie in (0, 1)")
    cov = mle_covariance(fit, n)
    p = _tail_level(level, tail_fraction)
    var = float(gpd_quantile(p, fit.params))
    if p == 0.0:
        return VarEstimate(level, var, 0.0, var, var, ci_level, cov.n)
    grad = var_gradient(fit.params, p)
    w2 = float(grad @ cov.matrix @ grad)
    if w2 < -1e-9:
        raise NonPositiveVariance(f"delta-method variance {w2:.3g} < 0")
    omega = math.sqrt(max(w2, 0.0))
    half = normal_quantile(0.5 + ci_level / 2.0) * omega
    return VarEstimate(level, var, omega, var - half, var + half, ci_level, cov.n)


def empirical_var(data, level: float) -> float:
    if not 0.0 < level < 1.0:
        raise DomainError("level must lie in (0, 1)")
    return float(empirical_quantile(data, level))

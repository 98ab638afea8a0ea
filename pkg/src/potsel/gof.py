"""Anderson-Darling goodness of fit for a fitted GPD.

P-values come either from an embedded table of null critical values
(both parameters estimated; the null law of A^2 depends on the shape only)
or from a parametric bootstrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from . import _kernels
from .errors import DomainError, NonConvergence, UnsupportedShape
from .gpd import (
    MIN_EXCEEDANCES,
    ExceedanceSet,
    GpdFit,
    GpdParams,
    fit_gpd,
    gpd_cdf,
    gpd_quantile,
)

__all__ = [
    "AdResult",
    "AdTable",
    "BOOTSTRAP",
    "TABLE",
    "ad_pvalue",
    "ad_statistic",
    "gof_test",
    "load_table",
    "probability_integral_transform",
]

TABLE = "table-interpolation"
BOOTSTRAP = "parametric-bootstrap"
DEFAULT_BOOT = 499
Z_CLAMP = 1e-12


@dataclass(frozen=True)
class AdResult:
    statistic: float
    p_value: float
    n: int
    method: str
    fit: GpdFit | None = None


@dataclass(frozen=True)
class AdTable:
    """Critical values ``crit[i, j]``: P(A^2 > crit[i, j] | shape_i) = probs[j].

    ``probs`` is descending, so every row of ``crit`` is ascending.
    """

    shapes: np.ndarray
    probs: np.ndarray
    crit: np.ndarray
    version: str

    @property
    def p_min(self) -> float:
        return float(self.probs[-1])

    @property
    def p_max(self) -> float:
        return float(self.probs[0])

    def row(self, shape: float) -> np.ndarray:
        if not self.shapes[0] <= shape <= self.shapes[-1]:
            raise UnsupportedShape(
                f"shape {shape:.4g} outside table range "
                f"[{self.shapes[0]}, {self.shapes[-1]}]"
            )
        i = int(np.clip(np.searchsorted(self.shapes, shape) - 1, 0, self.shapes.size - 2))
        w = (shape - self.shapes[i]) / (self.shapes[i + 1] - self.shapes[i])
        return (1.0 - w) * self.crit[i] + w * self.crit[i + 1]

    def pvalue(self, statistic: float, shape: float) -> float:
        crit = self.row(shape)
        if statistic <= crit[0]:
            return self.p_max
        if statistic >= crit[-1]:
            return self.p_min
        # log p is piecewise linear in log A^2 between tabulated points
        lp = np.interp(math.log(statistic), np.log(crit), np.log(self.probs))
        return float(np.exp(lp))


def _parse_table(text: str) -> AdTable:
    version = "unknown"
    rows = []
    probs = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            if key.strip() == "version":
                version = val.strip()
            continue
        fields = line.split()
        if fields[0] == "shape":
            probs = np.array([float(f) for f in fields[1:]])
        else:
            rows.append([float(f) for f in fields])
    if probs is None or not rows:
        raise ValueError("malformed critical-value table")
    arr = np.array(rows)
    return AdTable(arr[:, 0], probs, arr[:, 1:], version)


@lru_cache(maxsize=None)
def load_table() -> AdTable:
    text = resources.files("potsel.data").joinpath("ad_gpd_critical.txt").read_text()
    return _parse_table(text)


def probability_integral_transform(sample, params: GpdParams) -> np.ndarray:
    """Sorted ``F(x_i)`` under ``params``; raises outside the support."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size and x[-1] > params.upper:
        raise DomainError("sample value above the GPD upper endpoint")
    return np.atleast_1d(gpd_cdf(x, params))


def ad_statistic(z) -> float:
    """A^2 against the uniform law for sorted probabilities ``z``."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size == 0:
        raise DomainError("Anderson-Darling statistic of an empty sample")
    return float(_kernels.ad_statistic(np.sort(z)))


def _bootstrap_pvalue(statistic, shape, n, n_boot, seed):
    rng = np.random.default_rng(seed)
    params = GpdParams(0.0, 1.0, shape)
    # A^2 with both parameters estimated is scale-free, so sigma = 1 suffices
    u = rng.random((n_boot, n))
    exceed = 0
    valid = 0
    for b in range(n_boot):
        y = np.sort(np.atleast_1d(gpd_quantile(u[b], params)))
        st, _, g, s, _ = _kernels.fit_profile(y)
        if st != 0:
            continue
        valid += 1
        if _kernels.ad_statistic(_kernels.gpd_pit(y, s, g)) >= statistic:
            exceed += 1
    if valid == 0:
        raise NonConvergence("every bootstrap refit failed")
    return (exceed + 1.0) / (valid + 1.0)


def ad_pvalue(
    statistic: float,
    shape: float,
    n: int,
    method: str = TABLE,
    n_boot: int = DEFAULT_BOOT,
    seed: int = 0,
) -> float:
    """P-value of an observed A^2.

    Table mode interpolates the embedded critical values and is clamped to
    the table's probability range. Bootstrap mode refits ``n_boot`` samples
    of size ``n`` drawn from the fitted shape and returns
    ``(1 + #{A*^2 >= A^2}) / (B + 1)``.
    """
    if not np.isfinite(statistic):
        raise DomainError("statistic must be finite")
    if method == TABLE:
        return load_table().pvalue(float(statistic), float(shape))
    if method == BOOTSTRAP:
        if n < MIN_EXCEEDANCES:
            raise DomainError("bootstrap needs at least the minimum exceedance count")
        return _bootstrap_pvalue(float(statistic), float(shape), int(n), int(n_boot), seed)
    raise ValueError(f"unknown p-value method {method!r}")


def gof_test(
    sample,
    threshold: float,
    method: str = TABLE,
    *,
    n_boot: int = DEFAULT_BOOT,
    seed: int = 0,
    fallback: bool = True,
    min_exceedances: int = MIN_EXCEEDANCES,
) -> AdResult:
    """Fit a GPD to the excesses over ``threshold`` and test the fit.

    With ``fallback`` set, a shape outside the table range switches to the
    bootstrap instead of raising ``UnsupportedShape``.
    """
    es = ExceedanceSet.from_data(sample, threshold)
    fit = fit_gpd(es, min_exceedances)
    z = probability_integral_transform(es.values, fit.params.shifted(0.0))
    a2 = ad_statistic(z)
    try:
        p = ad_pvalue(a2, fit.params.gamma, es.count, method, n_boot, seed)
        used = method
    except UnsupportedShape:
        if not (fallback and method == TABLE):
            raise
        p = ad_pvalue(a2, fit.params.gamma, es.count, BOOTSTRAP, n_boot, seed)
        used = BOOTSTRAP
    return AdResult(a2, p, es.count, used, fit)

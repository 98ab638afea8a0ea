"""Accumulation tests and automated threshold selection.

Candidate thresholds mu_1 < ... < mu_l are each tested for a GPD fit with
the Anderson-Darling test. An accumulation function h turns the ordered
p-values into running averages (1/k) sum_{i<=k} h(p_i); the cutoff k_hat is
the largest k whose average stays <= alpha, hypotheses 1..k_hat are
rejected and mu_{k_hat + 1} becomes the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .dataio import empirical_quantile
from .errors import DegenerateGrid, DomainError, UnsupportedShape
from .gof import BOOTSTRAP, DEFAULT_BOOT, TABLE, ad_pvalue
from .gpd import MIN_EXCEEDANCES, GpdFit, GpdParams

__all__ = [
    "AccumulationSpec",
    "CandidateGrid",
    "CandidateTests",
    "Kind",
    "SelectionResult",
    "Status",
    "accumulation_cutoff",
    "accumulation_value",
    "build_candidate_grid",
    "decide",
    "select_threshold",
    "evaluate_candidates",
]


class Kind(str, Enum):
    FORWARD_STOP = "ForwardStop"
    SEQ_STEP = "SeqStep"
    HINGE_EXP = "HingeExp"


class Status(str, Enum):
    SELECTED = "selected"
    DEFAULT_FIRST = "none-rejected-default-first"
    NO_THRESHOLD = "all-rejected-no-threshold"


@dataclass(frozen=True)
class AccumulationSpec:
    kind: Kind = Kind.FORWARD_STOP
    alpha: float = 0.01
    c_param: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if self.kind is not Kind.FORWARD_STOP and not self.c_param > 1.0:
            raise DomainError("C must exceed 1")

    @property
    def label(self) -> str:
        if self.kind is Kind.FORWARD_STOP:
            return self.kind.value
        return f"{self.kind.value}(C={self.c_param:g})"


def accumulation_value(p, spec: AccumulationSpec):
    """h(p) for the accumulation function named by ``spec``.

    ForwardStop: -log(1 - p); SeqStep: C 1{p > 1 - 1/C};
    HingeExp: C log(1 / (C (1 - p))) 1{p > 1 - 1/C}.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise DomainError("p-values must lie in [0, 1]")
    c = spec.c_param
    with np.errstate(divide="ignore"):
        if spec.kind is Kind.FORWARD_STOP:
            out = -np.log1p(-p)
        elif spec.kind is Kind.SEQ_STEP:
            out = np.where(p > 1.0 - 1.0 / c, c, 0.0)
        else:
            on = p > 1.0 - 1.0 / c
            out = np.where(on, c * -np.log(c * np.where(on, 1.0 - p, 1.0)), 0.0)
    out = out + 0.0  # -0.0 -> 0.0
    return out[()] if out.ndim == 0 else out


def accumulation_cutoff(p_values, spec: AccumulationSpec) -> tuple[int, np.ndarray]:
    """Return ``(k_hat, running_averages)``; ``k_hat = 0`` when no prefix qualifies."""
    h = np.atleast_1d(accumulation_value(p_values, spec))
    if h.size == 0:
        raise DomainError("need at least one p-value")
    avg = np.cumsum(h) / np.arange(1, h.size + 1)
    ok = np.flatnonzero(avg <= spec.alpha)
    return (int(ok[-1]) + 1 if ok.size else 0), avg


@dataclass(frozen=True)
class CandidateGrid:
    thresholds: np.ndarray
    source: str = "explicit"

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float).ravel()
        if t.size < 1 or np.any(np.diff(t) <= 0):
            raise DegenerateGrid("candidate thresholds must be strictly ascending")
        object.__setattr__(self, "thresholds", t)

    def __len__(self):
        return self.thresholds.size

    def scaled(self, c: float) -> CandidateGrid:
        return CandidateGrid(self.thresholds * c, self.source)


def build_candidate_grid(
    data,
    lower_pct: float = 0.5,
    upper_pct: float = 0.98,
    count: int = 30,
    min_exceedances: int | None = None,
) -> CandidateGrid:
    """Equally spaced percentile levels mapped through the empirical quantile.

    Duplicate thresholds are merged. When ``min_exceedances`` is given,
    candidates leaving fewer points than that at or above them are dropped
    from the top (they could not be fitted anyway).
    """
    if count < 2 or not 0.0 <= lower_pct < upper_pct <= 1.0:
        raise DomainError("need count >= 2 and 0 <= lower_pct < upper_pct <= 1")
    x = np.sort(np.asarray(data, dtype=float).ravel())
    levels = np.linspace(lower_pct, upper_pct, count)
    t = np.unique(empirical_quantile(x, levels))
    if min_exceedances is not None:
        n_above = x.size - np.searchsorted(x, t)
        t = t[n_above >= min_exceedances]
    if t.size < 2:
        raise DegenerateGrid(f"only {t.size} distinct admissible candidate(s)")
    return CandidateGrid(t, "percentile-grid")


@dataclass(frozen=True)
class CandidateTests:
    """Per-candidate fits and Anderson-Darling p-values (steps 2-3)."""

    grid: CandidateGrid
    p_values: np.ndarray
    statistics: np.ndarray
    fits: tuple
    failed: np.ndarray
    methods: tuple


def evaluate_candidates(
    data,
    grid: CandidateGrid,
    gof_method: str = TABLE,
    *,
    n_boot: int = DEFAULT_BOOT,
    seed: int = 0,
    min_exceedances: int = MIN_EXCEEDANCES,
) -> CandidateTests:
    """Fit and test every candidate; a failed fit gets p = 0 and a flag."""
    x = np.sort(np.asarray(data, dtype=float).ravel())
    mu = grid.thresholds
    status, nexc, theta, gamma, sigma, loglik, a2 = _kernels.fit_ad_candidates(
        x, mu, min_exceedances
    )
    m = mu.size
    p = np.zeros(m)
    fits = []
    methods = []
    for j in range(m):
        if status[j] != 0:
            fits.append(None)
            methods.append(None)
            continue
        fits.append(GpdFit(GpdParams(mu[j], sigma[j], gamma[j]), theta[j], loglik[j], int(nexc[j])))
        method = gof_method
        try:
            p[j] = ad_pvalue(a2[j], gamma[j], int(nexc[j]), method, n_boot, seed + j)
        except UnsupportedShape:
            method = BOOTSTRAP
            p[j] = ad_pvalue(a2[j], gamma[j], int(nexc[j]), method, n_boot, seed + j)
        methods.append(method)
    return CandidateTests(grid, p, a2, tuple(fits), status != 0, tuple(methods))


@dataclass(frozen=True)
class SelectionResult:
    grid: CandidateGrid
    spec: AccumulationSpec
    p_values: np.ndarray
    running_averages: np.ndarray
    k_hat: int
    status: Status
    per_candidate_fits: tuple
    failed: np.ndarray = field(repr=False)
    statistics: np.ndarray = field(repr=False)

    @property
    def chosen_index(self) -> int | None:
        return None if self.status is Status.NO_THRESHOLD else self.k_hat

    @property
    def chosen_threshold(self) -> float | None:
        i = self.chosen_index
        return None if i is None else float(self.grid.thresholds[i])

    @property
    def chosen_fit(self) -> GpdFit | None:
        i = self.chosen_index
        return None if i is None else self.per_candidate_fits[i]


def decide(tests: CandidateTests, spec: AccumulationSpec) -> SelectionResult:
    """Apply the accumulation cutoff to precomputed candidate p-values."""
    k_hat, avg = accumulation_cutoff(tests.p_values, spec)
    l = len(tests.grid)
    if k_hat == l:
        status = Status.NO_THRESHOLD
    elif k_hat == 0:
        status = Status.DEFAULT_FIRST
    else:
        status = Status.SELECTED
    return SelectionResult(
        tests.grid, spec, tests.p_values, avg, k_hat, status,
        tests.fits, tests.failed, tests.statistics,
    )


def select_threshold(
    data,
    grid: CandidateGrid | None = None,
    spec: AccumulationSpec | None = None,
    gof_method: str = TABLE,
    *,
    n_boot: int = DEFAULT_BOOT,
    seed: int = 0,
    min_exceedances: int = MIN_EXCEEDANCES,
) -> SelectionResult:
    """End-to-end threshold selection.

    ``grid`` defaults to 30 percentile levels between the 50th and 98th
    percentiles; ``spec`` defaults to ForwardStop at alpha = 0.01.
    """
    if grid is None:
        grid = build_candidate_grid(data, min_exceedances=min_exceedances)
    tests = evaluate_candidates(
        data, grid, gof_method, n_boot=n_boot, seed=seed, min_exceedances=min_exceedances
    )
    return decide(tests, spec or AccumulationSpec())

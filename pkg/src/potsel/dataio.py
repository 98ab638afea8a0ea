"""Claims ingestion, per-year filtering, summary statistics and empirical
distribution helpers.

One quantile rule is used everywhere in the package: linear interpolation
between order statistics at position ``h = (n - 1) p + 1`` (1-based).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, EmptyAfterParse, FileUnreadable, SchemaMismatch, YearAbsent

__all__ = [
    "ClaimsDataset",
    "Ecdf",
    "SummaryStats",
    "ecdf",
    "empirical_quantile",
    "filter_year",
    "load_claims",
    "summary_stats",
    "write_claims",
]

log = logging.getLogger(__name__)

DEFAULT_SCALE = 1e6


def empirical_quantile(values, level):
    """Order-statistic quantile with linear interpolation (numpy's "linear")."""
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("quantile of an empty sample")
    p = np.asarray(level, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("quantile level must lie in [0, 1]")
    h = (x.size - 1) * p  # zero-based position
    lo = np.floor(h).astype(int)
    hi = np.minimum(lo + 1, x.size - 1)
    out = x[lo] + (h - lo) * (x[hi] - x[lo])
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class ClaimsDataset:
    years: np.ndarray
    sizes: np.ndarray  # in units of scale_factor
    scale_factor: float = DEFAULT_SCALE
    source_path: str = ""
    truncation_floor: float | None = None
    n_malformed: int = 0

    def __post_init__(self):
        if self.years.shape != self.sizes.shape:
            raise ValueError("years and sizes must align")
        if np.any(self.sizes <= 0):
            raise DomainError("claim sizes must be positive")
        if self.truncation_floor is not None and np.any(self.sizes < self.truncation_floor - 1e-9):
            raise DomainError("claim below the truncation floor")

    def __len__(self):
        return self.sizes.size

    @property
    def claims(self) -> list[tuple[int, float]]:
        return list(zip(self.years.tolist(), self.sizes.tolist()))

    @property
    def available_years(self) -> list[int]:
        return sorted(set(self.years.tolist()))


def load_claims(
    path,
    year_column: str = "year",
    size_column: str = "claim",
    scale_factor: float = DEFAULT_SCALE,
    truncation_floor: float | None = None,
) -> ClaimsDataset:
    """Read a comma-separated claims file with a header row.

    Sizes are divided by ``scale_factor``. Rows whose year is not an integer
    or whose size is not a positive finite number are skipped and counted.
    """
    path = Path(path)
    if not scale_factor > 0:
        raise DomainError("scale_factor must be positive")
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc.strerror or exc}") from exc
    years, sizes, bad = [], [], 0
    with fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in (year_column, size_column) if c not in fields]
        if missing:
            raise SchemaMismatch(f"{path}: missing column(s) {missing}; found {fields}")
        for row in reader:
            try:
                year = int(str(row[year_column]).strip())
                size = float(str(row[size_column]).strip()) / scale_factor
            except (TypeError, ValueError):
                bad += 1
                continue
            if not (math.isfinite(size) and size > 0):
                bad += 1
                continue
            if truncation_floor is not None and size < truncation_floor - 1e-9:
                bad += 1
                continue
            years.append(year)
            sizes.append(size)
    if bad:
        log.warning("%s: skipped %d malformed row(s)", path, bad)
    if not sizes:
        raise EmptyAfterParse(f"{path}: no valid claims")
    return ClaimsDataset(
        np.array(years, dtype=int), np.array(sizes), scale_factor, str(path), truncation_floor, bad
    )


def write_claims(data: ClaimsDataset, path) -> None:
    """Write claims back in raw currency units (inverse of ``load_claims``)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["year", "claim"])
        for y, s in zip(data.years.tolist(), data.sizes.tolist()):
            w.writerow([y, repr(s * data.scale_factor)])


def filter_year(data: ClaimsDataset, year: int) -> np.ndarray:
    sel = data.sizes[data.years == year]
    if sel.size == 0:
        raise YearAbsent(year)
    return np.sort(sel)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    q1: float
    q2: float
    q3: float
    max: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def summary_stats(values) -> SummaryStats:
    x = np.sort(np.asarray(values, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("summary of an empty sample")
    q1, q2, q3 = empirical_quantile(x, [0.25, 0.5, 0.75])
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return SummaryStats(int(x.size), float(x.mean()), sd, float(q1), float(q2), float(q3), float(x[-1]))


class Ecdf:
    """Right-continuous empirical CDF: F(t) = #{x_i <= t} / n."""

    def __init__(self, values):
        x = np.sort(np.asarray(values, dtype=float).ravel())
        if x.size == 0:
            raise DomainError("ECDF of an empty sample")
        self.points = x
        self.n = x.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.searchsorted(self.points, t, side="right") / self.n
        return out[()] if out.ndim == 0 else out

    def steps(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct support points and the cumulative fraction at each."""
        u = np.unique(self.points)
        return u, self(u)


def ecdf(values) -> Ecdf:
    return Ecdf(values)

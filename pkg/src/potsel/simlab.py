"""Monte Carlo harness for threshold selection on composite lognormal-GPD
samples: scenario specs, samplers, replicate loops and Mean/RMSE tables.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
import yaml
from scipy.special import ndtr, ndtri

from .errors import DegenerateGrid, InvalidSpec
from .gof import TABLE
from .gpd import MIN_EXCEEDANCES, GpdParams, gpd_quantile
from .selection import (
    AccumulationSpec,
    CandidateTests,
    build_candidate_grid,
    decide,
    evaluate_candidates,
)

__all__ = [
    "ScenarioResult",
    "ScenarioSpec",
    "ScenarioTable",
    "load_scenarios",
    "run_scenario",
    "sample_composite",
    "scenario_table",
]

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class ScenarioSpec:
    """One (scenario, test, sample size) cell of a simulation study.

    ``head`` is ``(meanlog, sdlog)`` of a lognormal body right-truncated at
    the tail location, or ``None`` for a pure GPD.
    """

    name: str
    tail: GpdParams
    head: tuple[float, float] | None = None
    head_weight: float = 0.0
    sample_size: int = 500
    replicates: int = 1000
    accumulation: AccumulationSpec = field(default_factory=AccumulationSpec)
    grid_lower: float = 0.01
    grid_upper: float = 0.98
    grid_count: int = 20
    base_seed: int = 0
    gof_method: str = TABLE

    def __post_init__(self):
        if self.head is None:
            if self.head_weight != 0.0:
                raise InvalidSpec("head_weight must be 0 without a head distribution")
        else:
            object.__setattr__(self, "head", tuple(float(v) for v in self.head))
            if not 0.0 <= self.head_weight < 1.0:
                raise InvalidSpec("head_weight must lie in [0, 1)")
            if not self.head[1] > 0:
                raise InvalidSpec("lognormal sdlog must be positive")
            if self.head_weight > 0 and _head_mass(self) < 1e-6:
                raise InvalidSpec("lognormal head has < 1e-6 mass below the threshold")
        if self.sample_size < 1 or self.replicates < 1:
            raise InvalidSpec("sample_size and replicates must be positive")

    @property
    def tail_weight(self) -> float:
        return 1.0 - self.head_weight

    @property
    def true_threshold(self) -> float:
        return self.tail.mu

    def sampling_key(self) -> ScenarioSpec:
        """The spec with test-specific fields blanked (p-values do not depend on them)."""
        return replace(self, name="", accumulation=AccumulationSpec())


def _head_mass(spec: ScenarioSpec) -> float:
    m, s = spec.head
    if spec.tail.mu <= 0:
        return 0.0
    return float(ndtr((math.log(spec.tail.mu) - m) / s))


def sample_composite(spec: ScenarioSpec, count: int, seed) -> np.ndarray:
    """Draw from the head/tail mixture; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    if spec.head is None or spec.head_weight == 0.0:
        return np.atleast_1d(gpd_quantile(rng.random(count), spec.tail))
    pick_head = rng.random(count) < spec.head_weight
    u = rng.random(count)
    out = np.empty(count)
    m, s = spec.head
    mass = _head_mass(spec)
    # inverse CDF of the lognormal renormalized to (0, mu)
    uh = np.clip(u[pick_head] * mass, 1e-300, None)
    out[pick_head] = np.exp(m + s * ndtri(uh))
    out[~pick_head] = np.atleast_1d(gpd_quantile(u[~pick_head], spec.tail))
    return out


@dataclass(frozen=True)
class ScenarioResult:
    spec: ScenarioSpec
    mean_threshold: float
    rmse: float
    per_replicate_thresholds: np.ndarray  # nan marks a failed replicate
    failure_count: int

    def as_dict(self) -> dict:
        s = self.spec
        return {
            "scenario": s.name,
            "true_threshold": s.true_threshold,
            "head_weight": s.head_weight if s.head is not None else None,
            "tail_weight": s.tail_weight if s.head is not None else None,
            "sample_size": s.sample_size,
            "test": s.accumulation.label,
            "alpha": s.accumulation.alpha,
            "mean": self.mean_threshold,
            "rmse": self.rmse,
            "failures": self.failure_count,
            "replicates": s.replicates,
        }


@lru_cache(maxsize=16)
def _replicate_tests(key: ScenarioSpec) -> tuple[CandidateTests | None, ...]:
    out = []
    for i in range(key.replicates):
        seed = key.base_seed + i
        x = sample_composite(key, key.sample_size, seed)
        try:
            grid = build_candidate_grid(
                x, key.grid_lower, key.grid_upper, key.grid_count, MIN_EXCEEDANCES
            )
        except DegenerateGrid:
            out.append(None)
            continue
        out.append(evaluate_candidates(x, grid, key.gof_method, seed=seed))
    return tuple(out)


def aggregate(thresholds: np.ndarray, truth: float) -> tuple[float, float, int]:
    """Mean and RMSE over finite entries, plus the count of failures."""
    ok = np.isfinite(thresholds)
    if not ok.any():
        return math.nan, math.nan, int(thresholds.size)
    err = thresholds[ok] - truth
    return float(thresholds[ok].mean()), float(np.sqrt(np.mean(err * err))), int((~ok).sum())


def run_scenario(spec: ScenarioSpec) -> ScenarioResult:
    """Run every replicate (seed = base_seed + i) and aggregate.

    Replicates with no admissible grid or no selected threshold count as
    failures and are left out of the mean and RMSE.
    """
    tests = _replicate_tests(spec.sampling_key())
    chosen = np.full(len(tests), np.nan)
    for i, t in enumerate(tests):
        if t is None:
            continue
        mu = decide(t, spec.accumulation).chosen_threshold
        if mu is not None:
            chosen[i] = mu
    mean, rmse, fails = aggregate(chosen, spec.true_threshold)
    return ScenarioResult(spec, mean, rmse, chosen, fails)


@dataclass
class ScenarioTable:
    results: list[ScenarioResult]

    def rows(self) -> list[dict]:
        return [r.as_dict() for r in self.results]

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt_csv(v) for k, v in r.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"schema_version": SCHEMA_VERSION, "rows": self.rows()}, indent=2)

    def to_text(self) -> str:
        """Scenario x sample size rows, one (Mean, RMSE) column pair per test."""
        tests = []
        cells = {}
        order = []
        for r in self.results:
            s = r.spec
            label = f"{s.accumulation.label} a={s.accumulation.alpha:g}"
            if label not in tests:
                tests.append(label)
            key = (s.name, s.sample_size)
            if key not in cells:
                order.append((key, s))
                cells[key] = {}
            cells[key][label] = r
        head = ["Scenario", "True", "HeadW", "TailW", "n"]
        for t in tests:
            head += [f"{t} Mean", "RMSE"]
        lines = [head]
        for (name, n), s in order:
            hw = f"{s.head_weight:g}" if s.head is not None else "-"
            tw = f"{s.tail_weight:g}" if s.head is not None else "-"
            row = [name, f"{s.true_threshold:g}", hw, tw, str(n)]
            for t in tests:
                r = cells[(name, n)].get(t)
                row += [f"{r.mean_threshold:.3f}", f"{r.rmse:.3f}"] if r else ["", ""]
            lines.append(row)
        widths = [max(len(line[i]) for line in lines) for i in range(len(head))]
        return "\n".join(
            "  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in lines
        ) + "\n"


def _fmt_csv(v):
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return "" if v is None else v


def scenario_table(specs) -> ScenarioTable:
    specs = list(specs)
    if not specs:
        raise InvalidSpec("no scenarios given")
    return ScenarioTable([run_scenario(s) for s in specs])


def _accumulation_from(cfg: dict) -> AccumulationSpec:
    return AccumulationSpec(
        cfg.get("kind", "ForwardStop"), float(cfg.get("alpha", 0.01)), float(cfg.get("c", 2.0))
    )


def load_scenarios(path) -> list[ScenarioSpec]:
    """Expand a YAML/JSON scenario file into one spec per (scenario, test, size).

    Top-level keys act as defaults for every scenario: ``replicates``,
    ``base_seed``, ``sample_sizes``, ``tests``, ``grid`` (``lower``,
    ``upper``, ``count``) and ``gof_method``. Each entry of ``scenarios``
    has ``name``, ``tail`` (``mu``, ``sigma``, ``gamma``) and optionally
    ``head`` (``meanlog``, ``sdlog``) with ``head_weight`` and any of the
    default keys.
    """
    cfg = yaml.safe_load(Path(path).read_text())
    if not isinstance(cfg, dict) or not cfg.get("scenarios"):
        raise InvalidSpec(f"{path}: empty scenario list")
    specs = []
    for sc in cfg["scenarios"]:
        merged = {**cfg, **sc}
        grid = {"lower": 0.01, "upper": 0.98, "count": 20, **(merged.get("grid") or {})}
        tail = GpdParams(**{k: float(v) for k, v in sc["tail"].items()})
        head = sc.get("head")
        if head is not None:
            head = (float(head["meanlog"]), float(head["sdlog"]))
        hw = float(sc.get("head_weight", 0.0))
        if "tail_weight" in sc and abs(hw + float(sc["tail_weight"]) - 1.0) > 1e-12:
            raise InvalidSpec(f"{sc.get('name')}: head and tail weights must sum to 1")
        if "true_threshold" in sc and float(sc["true_threshold"]) != tail.mu:
            raise InvalidSpec(f"{sc.get('name')}: true_threshold must equal tail mu")
        tests = merged.get("tests") or [{"kind": "ForwardStop", "alpha": 0.01}]
        for n in merged.get("sample_sizes", [500]):
            for t in tests:
                specs.append(
                    ScenarioSpec(
                        name=str(sc.get("name", f"scenario{len(specs)}")),
                        tail=tail,
                        head=head,
                        head_weight=hw,
                        sample_size=int(n),
                        replicates=int(merged.get("replicates", 1000)),
                        accumulation=_accumulation_from(t),
                        grid_lower=float(grid["lower"]),
                        grid_upper=float(grid["upper"]),
                        grid_count=int(grid["count"]),
                        base_seed=int(merged.get("base_seed", 0)),
                        gof_method=str(merged.get("gof_method", TABLE)),
                    )
                )
    return specs

"""Acceptance gate. Each test prints one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
directly with ``python tests/test_acceptance.py``.

The dataset-gated criterion reads the Norwegian fire claims CSV (columns
year, claim in 1000 NOK) from ``$POTSEL_NORWEGIAN_CSV`` or
``$POTSEL_DATA_DIR/norwegianfire.csv`` and is skipped when neither exists.
"""

import math
import os
import time
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from oracles import brute_cutoff, grid_mle
from potsel.dataio import Ecdf, empirical_quantile, filter_year, load_claims, summary_stats
from potsel.gof import gof_test
from potsel.gpd import GpdFit, GpdParams, fit_gpd, gpd_cdf, gpd_quantile, gpd_sample
from potsel.risk import empirical_var, var_gradient, var_with_ci
from potsel.selection import AccumulationSpec, Kind, accumulation_cutoff, accumulation_value, build_candidate_grid, select_threshold
from potsel.simlab import load_scenarios, run_scenario

RESULTS = []


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------- VaR arithmetic
def test_var_arithmetic():
    t0 = time.perf_counter()
    fit = GpdFit(GpdParams(0.541, 0.558, 0.769), 0.769 / 0.558, 0.0, 100)
    v90 = var_with_ci(fit, 0.90).var
    v95 = var_with_ci(fit, 0.95).var
    dt = time.perf_counter() - t0
    ok = abs(v90 - 4.07) <= 0.01 and abs(v95 - 7.08) <= 0.01 and dt < 1.0
    report("var-arithmetic", ok, f"VaR90={v90:.4f} (4.07+-0.01) VaR95={v95:.4f} (7.08+-0.01) in {dt:.3f}s")


# ------------------------------------------------------------------- simulation
@lru_cache(maxsize=1)
def simulation_study():
    specs = load_scenarios(resources.files("potsel.data") / "scenarios.yaml")
    t0 = time.perf_counter()
    res = {(s.name, s.accumulation.kind.value, s.sample_size): run_scenario(s) for s in specs}
    return res, time.perf_counter() - t0


@pytest.mark.slow
def test_simulation_scenario1():
    t0 = time.perf_counter()
    res, _ = simulation_study()
    r = res[("gpd-0.5", "ForwardStop", 500)]
    ok = abs(r.mean_threshold - 0.508) <= 0.05 and 0.0035 <= r.rmse <= 0.021
    report(
        "simulation-scenario1",
        ok,
        f"mean={r.mean_threshold:.4f} (0.508+-0.05) rmse={r.rmse:.4f} ([0.0035, 0.021]) "
        f"failures={r.failure_count}/{r.spec.replicates}",
    )


@pytest.mark.slow
def test_simulation_runtime():
    # scenario 1 alone at n = 500, r = 1000 (its p-values are cached with the study)
    from potsel.simlab import _replicate_tests

    spec = next(s for s in load_scenarios(resources.files("potsel.data") / "scenarios.yaml")
                if s.name == "gpd-0.5" and s.sample_size == 500)
    _replicate_tests.cache_clear()
    t0 = time.perf_counter()
    run_scenario(spec)
    dt = time.perf_counter() - t0
    report("simulation-scenario1-runtime", dt < 300, f"{dt:.1f}s (< 300s)")


@pytest.mark.slow
def test_simulation_rmse_decreases_in_n():
    res, _ = simulation_study()
    bad = []
    for name in ("gpd-0.5", "gpd-2", "lnorm-gpd-2", "lnorm-gpd-1"):
        for kind in ("ForwardStop", "SeqStep", "HingeExp"):
            r = [res[(name, kind, n)].rmse for n in (100, 200, 500)]
            if not (r[0] > r[1] > r[2]):
                bad.append(f"{name}/{kind}: " + " > ".join(f"{v:.4f}" for v in r))
    report("simulation-rmse-decreasing-in-n", not bad, "all 12 cells ok" if not bad else "; ".join(bad))


@pytest.mark.slow
def test_simulation_test_ordering():
    res, _ = simulation_study()
    bad, seen = [], []
    for name in ("gpd-0.5", "lnorm-gpd-1"):
        f, s, h = (res[(name, k, 500)].rmse for k in ("ForwardStop", "SeqStep", "HingeExp"))
        seen.append(f"{name}: {f:.4f} < {s:.4f} < {h:.4f}")
        if not f < s < h:
            bad.append(seen[-1])
    report("simulation-forwardstop<seqstep<hingeexp", not bad, "; ".join(seen))


# ------------------------------------------------------------------- MLE oracle
def test_mle_oracle():
    t0 = time.perf_counter()
    worst_g = worst_s = 0.0
    ll_ok = True
    rng = np.random.default_rng(2024)
    for i in range(20):
        g = float(rng.uniform(-0.3, 1.5))
        y = gpd_sample(GpdParams(0.0, float(rng.uniform(0.5, 3.0)), g), 100, seed=100 + i)
        fit = fit_gpd(y)
        s_grid, g_grid, ll_grid = grid_mle(y, 1e-3, 1e-3)
        worst_g = max(worst_g, abs(fit.params.gamma - g_grid))
        worst_s = max(worst_s, abs(fit.params.sigma / s_grid - 1))
        ll_ok &= fit.log_likelihood >= ll_grid - 1e-9
    dt = time.perf_counter() - t0
    # "within grid resolution": one cell of 1e-3 either side of the grid argmax
    ok = worst_g <= 1e-3 and worst_s <= 1e-3 and ll_ok and dt < 30
    report("mle-grid-oracle", ok, f"max|dgamma|={worst_g:.2e} max|dsigma/sigma|={worst_s:.2e} "
           f"loglik>=grid:{ll_ok} in {dt:.1f}s")


# -------------------------------------------------------------------- gradient
def test_gradient_suite():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        s, g, p = rng.uniform(0.2, 5.0), rng.uniform(-0.45, 1.5), rng.uniform(0.5, 0.99)
        grad = var_gradient(GpdParams(0.0, s, g), p)
        q = lambda s_, g_: float(gpd_quantile(p, GpdParams(0.0, s_, g_)))
        hs, hg = 1e-5 * s, 1e-5
        fd = np.array([(q(s + hs, g) - q(s - hs, g)) / (2 * hs), (q(s, g + hg) - q(s, g - hg)) / (2 * hg)])
        worst = max(worst, float(np.max(np.abs(grad - fd) / np.abs(fd))))
    report("gradient-vs-finite-differences", worst < 1e-6, f"max relative error {worst:.2e} (< 1e-6)")


# -------------------------------------------------------------------- coverage
@pytest.mark.slow
def test_coverage():
    t0 = time.perf_counter()
    truth = GpdParams(0.0, 1.0, 0.5)
    v = float(gpd_quantile(0.95, truth))
    hits = sum(var_with_ci(fit_gpd(gpd_sample(truth, 2000, seed=s)), 0.95).covers(v) for s in range(1000))
    dt = time.perf_counter() - t0
    rate = hits / 1000
    report("delta-method-coverage", 0.92 <= rate <= 0.97 and dt < 120, f"{rate:.3f} in [0.92, 0.97], {dt:.1f}s")


# ------------------------------------------------------------- cutoff vs brute
def test_cutoff_brute_force():
    rng = np.random.default_rng(99)
    mismatches = 0
    for i in range(1000):
        m = int(rng.integers(1, 51))
        p = rng.random(m) ** rng.uniform(0.1, 10.0)
        spec = AccumulationSpec(list(Kind)[i % 3], alpha=float(rng.choice([0.01, 0.05, 0.2])))
        k, _ = accumulation_cutoff(p, spec)
        mismatches += k != brute_cutoff(np.atleast_1d(accumulation_value(p, spec)), spec.alpha)
    report("cutoff-brute-force", mismatches == 0, f"{mismatches} mismatches in 1000 vectors")


# ---------------------------------------------------------------- properties
def test_property_suites():
    rng = np.random.default_rng(5)
    u = np.linspace(0.01, 0.99, 99)
    rt = 0.0
    for _ in range(200):
        p = GpdParams(rng.uniform(-5, 5), rng.uniform(0.05, 20), rng.uniform(-0.45, 2.5))
        rt = max(rt, float(np.max(np.abs(gpd_cdf(gpd_quantile(u, p), p) - u))))
    cont = 0.0
    for s in (0.1, 1.0, 7.0):
        x = gpd_quantile(u, GpdParams(0, s, 0.0))
        for g in (1e-8, -1e-8):
            cont = max(cont, float(np.max(np.abs(gpd_cdf(x, GpdParams(0, s, g)) - u))))
    scale = 0.0
    aff = 0.0
    for i in range(20):
        y = gpd_sample(GpdParams(0, 1, rng.uniform(-0.3, 1.5)), 200, seed=i)
        c = 10 ** rng.uniform(-3, 3)
        a, b = fit_gpd(y), fit_gpd(c * y)
        scale = max(scale, abs(b.params.gamma - a.params.gamma), abs(b.params.sigma / (c * a.params.sigma) - 1))
        mult = 10 ** rng.uniform(-2, 2)
        shift = rng.uniform(-100, 100) * mult  # |shift| <= 100 x scale keeps the excess digits
        aff = max(aff, abs(gof_test(shift + mult * y, shift).statistic - gof_test(y, 0.0).statistic))
    qe = True
    for _ in range(200):
        x = rng.normal(size=int(rng.integers(2, 60)))
        p = rng.random()
        q = empirical_quantile(x, p)
        qe &= bool(np.isclose(q, np.quantile(x, p), rtol=1e-12, atol=1e-12))
        qe &= Ecdf(x)(q) >= (math.floor((x.size - 1) * p) + 1) / x.size - 1e-15
    ok = rt <= 1e-10 and cont <= 1e-6 and scale <= 1e-6 and aff <= 1e-9 and qe
    report("property-suites", ok, f"roundtrip {rt:.1e}, continuity {cont:.1e}, scale-equivariance {scale:.1e}, "
           f"AD affine {aff:.1e}, ecdf/quantile {'ok' if qe else 'broken'}")


# ------------------------------------------------------------ dataset-gated
TABLE3 = {
    1985: (607, 2.553, 8.013, 0.680, 1.000, 1.712, 135.080),
    1986: (647, 2.477, 9.695, 0.700, 0.985, 1.549, 188.270),
    1987: (767, 2.057, 3.644, 0.755, 1.138, 1.853, 44.926),
    1988: (827, 3.176, 17.677, 0.762, 1.176, 2.049, 465.365),
    1989: (718, 2.400, 7.094, 0.751, 1.183, 1.996, 145.156),
}
FORWARDSTOP_001 = {1985: 0.541, 1986: 0.677, 1987: 0.660, 1988: 0.745, 1989: 0.531}
EMPIRICAL_VAR = {1985: (3.50, 7.15), 1986: (3.34, 6.97), 1987: (3.52, 6.04), 1988: (4.55, 7.72), 1989: (3.86, 6.19)}


def _norwegian_csv():
    direct = os.environ.get("POTSEL_NORWEGIAN_CSV")
    if direct and Path(direct).exists():
        return Path(direct)
    d = os.environ.get("POTSEL_DATA_DIR")
    if d and (Path(d) / "norwegianfire.csv").exists():
        return Path(d) / "norwegianfire.csv"
    return None


@pytest.mark.dataset
def test_norwegian_dataset():
    path = _norwegian_csv()
    if path is None:
        line = "SKIP  norwegian-dataset: no CSV found (set POTSEL_NORWEGIAN_CSV or POTSEL_DATA_DIR)"
        RESULTS.append(line)
        print(line)
        pytest.skip("Norwegian fire CSV not supplied")
    # claims are recorded in 1000 NOK; the tables use millions
    data = load_claims(path, scale_factor=1e3)
    problems = []
    for year, ref in TABLE3.items():
        s = summary_stats(filter_year(data, year))
        got = (s.n, s.mean, s.sd, s.q1, s.q2, s.q3, s.max)
        if got[0] != ref[0] or any(abs(a - b) > 0.001 for a, b in zip(got[1:], ref[1:])):
            problems.append(f"T3 {year}: " + ", ".join(f"{v:.3f}" for v in got[1:]))
    for year, mu in FORWARDSTOP_001.items():
        x = filter_year(data, year)
        grid = build_candidate_grid(x, 0.0, 0.98, 30, min_exceedances=10)
        r = select_threshold(x, grid, AccumulationSpec("ForwardStop", 0.01))
        if r.chosen_threshold is None or abs(r.chosen_threshold - mu) > 0.05:
            problems.append(f"T4 {year}: mu={r.chosen_threshold}")
    for year, (v90, v95) in EMPIRICAL_VAR.items():
        x = filter_year(data, year)
        e90, e95 = empirical_var(x, 0.90), empirical_var(x, 0.95)
        if abs(e90 - v90) > 0.01 or abs(e95 - v95) > 0.01:
            problems.append(f"T7 {year}: {e90:.3f}/{e95:.3f}")
    report("norwegian-dataset", not problems, "all rows match" if not problems else "; ".join(problems))


if __name__ == "__main__":
    import sys

    fns = [v for k, v in sorted(globals().items()) if k.startswith("test_") and callable(v)]
    failed = 0
    for fn in fns:
        try:
            fn()
        except AssertionError:
            failed += 1
        except pytest.skip.Exception:
            pass
    print(f"\n{len(fns) - failed}/{len(fns)} criteria passed or skipped")
    sys.exit(1 if failed else 0)

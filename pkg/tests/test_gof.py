import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from potsel.errors import DomainError, UnsupportedShape
from potsel.gof import (
    BOOTSTRAP,
    TABLE,
    ad_pvalue,
    ad_statistic,
    gof_test,
    load_table,
    probability_integral_transform,
)
from potsel.gpd import GpdParams, gpd_quantile, gpd_sample


def ad_mp(z):
    """A^2 re-summed with 40-digit arithmetic."""
    mpmath.mp.dps = 40
    z = sorted(mpmath.mpf(float(v)) for v in z)
    n = len(z)
    s = mpmath.mpf(0)
    for i, zi in enumerate(z, start=1):
        s += (2 * i - 1) * (mpmath.log(zi) + mpmath.log(1 - z[n - i]))
    return float(-n - s / n)


class TestPit:
    def test_location_maps_to_zero(self):
        np.testing.assert_array_equal(probability_integral_transform([2.0], GpdParams(2.0, 1.0, 0.3)), [0.0])

    def test_inverse_identity(self):
        p = GpdParams(1.0, 0.7, 0.9)
        z = probability_integral_transform(gpd_quantile(np.array([0.1, 0.5, 0.9]), p), p)
        np.testing.assert_allclose(z, [0.1, 0.5, 0.9], atol=1e-10)

    def test_uniformity(self):
        p = GpdParams(0.0, 2.0, 0.4)
        z = probability_integral_transform(gpd_sample(p, 10_000, seed=2), p)
        ks = np.max(np.abs(z - (np.arange(1, z.size + 1) - 0.5) / z.size)) + 0.5 / z.size
        assert ks < 0.02

    def test_above_endpoint_raises(self):
        with pytest.raises(DomainError):
            probability_integral_transform([3.0], GpdParams(0, 1, -0.5))


class TestStatistic:
    def test_single_point(self):
        assert ad_statistic([0.5]) == pytest.approx(2 * math.log(2) - 1, abs=1e-15)

    def test_plotting_positions_vs_extended_precision(self):
        n = 100
        z = (np.arange(1, n + 1) - 0.5) / n
        assert abs(ad_statistic(z) - ad_mp(z)) < 1e-12

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-6, 1 - 1e-6), min_size=1, max_size=200))
    def test_symmetry(self, z):
        z = np.array(z)
        assert ad_statistic(z) == pytest.approx(ad_statistic(np.sort(1 - z)), rel=1e-9, abs=1e-12)

    def test_matches_extended_precision_random(self):
        z = np.random.default_rng(8).random(300)
        assert ad_statistic(z) == pytest.approx(ad_mp(z), rel=1e-11)

    def test_empty(self):
        with pytest.raises(DomainError):
            ad_statistic([])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-100, 100), st.floats(0.01, 100), st.floats(-0.3, 1.5))
    def test_affine_invariance(self, seed, a, b, gamma):
        # shifts much larger than the scale cost the excesses digits when
        # a + b x is formed, which perturbs the data itself; keep |a| <= 100 b
        a = a * b
        x = gpd_sample(GpdParams(1.0, 1.0, gamma), 150, seed=seed)
        r0 = gof_test(x, 1.0)
        r1 = gof_test(a + b * x, a + b * 1.0)
        assert abs(r1.statistic - r0.statistic) < 1e-9


class TestTable:
    def test_rows_monotone(self):
        t = load_table()
        assert np.all(np.diff(t.crit, axis=1) > 0)
        assert np.all(np.diff(t.probs) < 0)
        assert t.version != "unknown"

    def test_zero_statistic_maps_to_upper_clamp(self):
        t = load_table()
        assert ad_pvalue(0.0, 0.3, 100) == t.p_max

    @pytest.mark.parametrize("shape", [-0.5, -0.17, 0.0, 0.55, 1.0, 2.5])
    def test_nonincreasing(self, shape):
        stats_grid = np.linspace(0.0, 10.0, 400)
        p = [ad_pvalue(s, shape, 100) for s in stats_grid]
        assert np.all(np.diff(p) <= 0)
        assert min(p) == load_table().p_min

    def test_interpolates_between_shapes(self):
        t = load_table()
        i = 5
        mid = 0.5 * (t.shapes[i] + t.shapes[i + 1])
        np.testing.assert_allclose(t.row(mid), 0.5 * (t.crit[i] + t.crit[i + 1]))

    def test_unsupported_shape(self):
        with pytest.raises(UnsupportedShape):
            ad_pvalue(1.0, 5.0, 100, TABLE)

    def test_fallback_to_bootstrap(self):
        x = gpd_sample(GpdParams(0, 1, 4.0), 200, seed=1)
        r = gof_test(x, 0.0, n_boot=49)
        assert r.fit.params.gamma > load_table().shapes[-1]
        assert r.method == BOOTSTRAP
        with pytest.raises(UnsupportedShape):
            gof_test(x, 0.0, fallback=False)


class TestCalibration:
    @pytest.mark.slow
    def test_bootstrap_null_mean(self):
        ps = []
        for r in range(200):
            x = gpd_sample(GpdParams(0, 1, 0.5), 60, seed=1000 + r)
            ps.append(gof_test(x, 0.0, BOOTSTRAP, n_boot=49, seed=r).p_value)
        assert abs(np.mean(ps) - 0.5) < 0.05

    def test_bootstrap_formula_bounds(self):
        p = ad_pvalue(1e6, 0.5, 50, BOOTSTRAP, n_boot=19, seed=0)
        assert p == pytest.approx(1 / 20)
        assert ad_pvalue(0.0, 0.5, 50, BOOTSTRAP, n_boot=19, seed=0) == 1.0

    def test_table_size(self):
        rej = 0
        for r in range(500):
            x = gpd_sample(GpdParams(0, 1, 0.5), 500, seed=5000 + r)
            rej += gof_test(x, 0.0).p_value < 0.05
        assert 0.02 <= rej / 500 <= 0.09

    def test_power_against_lognormal(self):
        rng = np.random.default_rng(77)
        rej = 0
        for _ in range(100):
            x = rng.lognormal(0.0, 1.0, 500)
            rej += gof_test(x, x.min()).p_value < 0.05
        assert rej / 100 > 0.5

    def test_higher_threshold_does_not_inflate_statistic(self):
        lo, hi = [], []
        for r in range(200):
            x = gpd_sample(GpdParams(0, 1, 0.5), 400, seed=9000 + r)
            lo.append(gof_test(x, 0.0).statistic)
            hi.append(gof_test(x, float(np.quantile(x, 0.5))).statistic)
        diff = np.array(hi) - np.array(lo)
        assert diff.mean() < 3 * diff.std(ddof=1) / math.sqrt(diff.size)

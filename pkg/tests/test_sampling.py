import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctsa.core import TimeSeries
from ctsa.sampling import (
    coverage,
    plan,
    product_bounds,
    required_sample_size,
    sampled_sum,
    sampled_sum_product,
)


class TestSampleSize:
    def test_value(self):
        # 1000^2 * ln(40) / (2 * 50^2) = 737.78
        assert required_sample_size(1000, 50.0, 0.05, (0.0, 1.0)) == 738

    def test_capped(self):
        m = required_sample_size(100, 0.01, 0.05, (0, 1))
        assert m == 100 and m.exhausted

    def test_at_least_one(self):
        assert required_sample_size(100, 1e9, 0.5, (0, 1)) == 1

    @pytest.mark.parametrize("args", [(0, 1, 0.1, (0, 1)), (10, 0, 0.1, (0, 1)), (10, 1, 0, (0, 1)), (10, 1, 1.5, (0, 1)), (10, 1, 0.1, (2, 1))])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            required_sample_size(*args)

    @given(
        st.integers(1, 10**6),
        st.floats(1e-3, 1e6),
        st.floats(1e-3, 1e6),
        st.floats(1e-4, 1.0),
        st.floats(1e-4, 1.0),
    )
    def test_monotone(self, n, e1, e2, b1, b2):
        lo_e, hi_e = sorted((e1, e2))
        lo_b, hi_b = sorted((b1, b2))
        assert required_sample_size(n, lo_e, 0.1, (0, 1)) >= required_sample_size(n, hi_e, 0.1, (0, 1))
        assert required_sample_size(n, 1.0, lo_b, (0, 1)) >= required_sample_size(n, 1.0, hi_b, (0, 1))

    def test_plan(self):
        p = plan(1000, 50.0, 0.05, (0.0, 1.0))
        assert p.m == 738 and not p.exhausted


class TestEstimators:
    def test_full_sample_exact(self, rng):
        x = rng.normal(size=200)
        assert sampled_sum(x, 200, seed=3) == pytest.approx(math.fsum(x), rel=1e-12)

    def test_seed_repeatable(self, rng):
        x = rng.normal(size=500)
        assert sampled_sum(x, 50, seed=9) == sampled_sum(x, 50, seed=9)
        assert sampled_sum(x, 50, seed=9) != sampled_sum(x, 50, seed=10)

    def test_unbiased(self):
        x = np.arange(100, dtype=float)
        est = np.mean([sampled_sum(x, 10, seed=s) for s in range(3000)])
        assert est == pytest.approx(x.sum(), rel=0.02)

    def test_product(self, rng):
        t1 = TimeSeries.of(1, 30, rng.normal(size=30))
        t2 = TimeSeries.of(5, 40, rng.normal(size=36))
        exact = float(t1.values[4:] @ t2.values[:26])
        assert sampled_sum_product(t1, t2, 26, 0) == pytest.approx(exact)

    def test_product_bounds_signs(self):
        t1 = TimeSeries.of(1, 3, [-2.0, 1.0, 3.0])
        t2 = TimeSeries.of(1, 3, [-1.0, 0.5, 4.0])
        lo, hi = product_bounds(t1, t2)
        assert (lo, hi) == (-8.0, 12.0)
        assert all(lo <= p <= hi for p in t1.values * t2.values)


class TestCoverage:
    def test_meets_confidence(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, 2000)
        beta, eps = 0.1, 60.0
        m = required_sample_size(len(x), eps, beta, (0.0, 1.0))
        assert m < len(x)
        assert coverage(x, int(m), eps, trials=2000, seed=1) >= 1 - beta - 0.01

    def test_full_population(self, rng):
        x = rng.normal(size=50)
        assert coverage(x, 50, 1e-9, trials=10) == 1.0

    def test_batches_do_not_matter(self, rng):
        x = rng.normal(size=100)
        assert 0.0 <= coverage(x, 10, 2.0, 700, seed=3, batch=64) <= 1.0

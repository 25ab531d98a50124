import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctsa.core import (
    ApproxScalar,
    Domain,
    ErrorMeasures,
    TimeSeries,
    constant,
    exact_sum,
    intersect_all,
    pointwise,
    restrict,
    shift,
)
from ctsa.errors import DomainError

finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def series(draw, min_len=1, max_len=40):
    a = draw(st.integers(-50, 50))
    vals = draw(st.lists(finite, min_size=min_len, max_size=max_len))
    return TimeSeries.of(a, a + len(vals) - 1, vals)


class TestDomain:
    def test_length_and_contains(self):
        d = Domain(3, 7)
        assert d.length == 5 and len(d) == 5
        assert 3 in d and 7 in d and 8 not in d
        assert d.contains(Domain(4, 6))
        assert Domain(4, 6) in d

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            Domain(5, 4)

    def test_intersect(self):
        assert Domain(1, 10).intersect(Domain(5, 20)) == Domain(5, 10)
        assert Domain(1, 4).intersect(Domain(5, 9)) is None
        assert intersect_all([Domain(1, 10), Domain(3, 12), Domain(0, 8)]) == Domain(3, 8)
        with pytest.raises(DomainError):
            intersect_all([Domain(1, 2), Domain(4, 5)])


class TestTimeSeries:
    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            TimeSeries.of(1, 3, [1.0, 2.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            TimeSeries.of(1, 2, [1.0, math.nan])
        with pytest.raises(DomainError):
            TimeSeries.of(1, 2, [math.inf, 1.0])

    def test_values_readonly(self):
        t = TimeSeries.of(1, 2, [1.0, 2.0])
        with pytest.raises(ValueError):
            t.values[0] = 5.0

    def test_indexing_is_global(self):
        t = TimeSeries.of(10, 12, [1.0, 2.0, 3.0])
        assert t[11] == 2.0
        with pytest.raises(DomainError):
            t[9]


class TestRestrict:
    def test_worked_example(self):
        t = TimeSeries.of(1, 4, [1.2, 1.3, 1.3, 1.2])
        assert restrict(t, Domain(2, 3)) == TimeSeries.of(2, 3, [1.3, 1.3])

    def test_identity(self, example_series):
        assert restrict(example_series, example_series.domain) == example_series

    def test_single_point(self, example_series):
        assert restrict(example_series, Domain(5, 5)) == TimeSeries.of(5, 5, [0.6])

    def test_outside(self, example_series):
        with pytest.raises(DomainError):
            restrict(example_series, Domain(0, 2))

    @given(series(min_len=3), st.data())
    def test_composes(self, t, data):
        a1 = data.draw(st.integers(t.a, t.b))
        b1 = data.draw(st.integers(a1, t.b))
        a2 = data.draw(st.integers(a1, b1))
        b2 = data.draw(st.integers(a2, b1))
        d1, d2 = Domain(a1, b1), Domain(a2, b2)
        assert restrict(restrict(t, d1), d2) == restrict(t, d2)


class TestShift:
    def test_worked_example(self):
        t = TimeSeries.of(1, 3, [1.8, 1.6, 1.6])
        assert shift(t, 6) == TimeSeries.of(7, 9, [1.8, 1.6, 1.6])

    @given(series(), st.integers(-1000, 1000))
    def test_inverse(self, t, k):
        assert shift(t, 0) == t
        s = shift(t, k)
        assert shift(s, -k) == t
        assert s[t.a + k] == t[t.a]


class TestExactSum:
    def test_worked_example(self, example_series):
        assert exact_sum(example_series, Domain(1, 5)) == pytest.approx(2.1, abs=1e-15)

    def test_cancellation(self):
        assert exact_sum(TimeSeries.of(1, 3, [1.0, -1.0, 0.0])) == 0.0

    def test_single_point(self, example_series):
        assert exact_sum(example_series, Domain(3, 3)) == 0.4

    @given(series(min_len=2), st.data())
    def test_additive_over_partition(self, t, data):
        cut = data.draw(st.integers(t.a, t.b - 1))
        whole = exact_sum(t)
        parts = exact_sum(t, Domain(t.a, cut)) + exact_sum(t, Domain(cut + 1, t.b))
        assert parts == pytest.approx(whole, rel=1e-12, abs=1e-6)


class TestPointwise:
    def test_worked_product(self):
        t1 = TimeSeries.of(1, 2, [3.3, 3.5])
        t2 = TimeSeries.of(1, 2, [1.0, 1.2])
        r = pointwise("*", t1, t2)
        assert r.domain == Domain(1, 2)
        np.testing.assert_allclose(r.values, [3.3, 4.2], atol=1e-12)

    def test_identity_constant(self, example_series):
        r = pointwise("*", example_series, constant(1.0, 3, 9))
        assert r == restrict(example_series, Domain(3, 5))

    def test_self_difference(self):
        t = TimeSeries.of(1, 3, [1.0, 2.0, 3.0])
        assert pointwise("-", t, t) == TimeSeries.of(1, 3, [0.0, 0.0, 0.0])

    def test_disjoint(self):
        with pytest.raises(DomainError):
            pointwise("+", TimeSeries.of(1, 2, [1, 2]), TimeSeries.of(5, 6, [1, 2]))

    @given(series(), series())
    def test_product_values(self, t1, t2):
        d = t1.domain.intersect(t2.domain)
        if d is None:
            return
        r = pointwise("*", t1, t2)
        for i in range(d.a, d.b + 1):
            assert r[i] == t1[i] * t2[i]


class TestScalarsAndMeasures:
    def test_negative_measure_rejected(self):
        with pytest.raises(ValueError):
            ErrorMeasures(-1.0, 0.0, 0.0)

    def test_approx_scalar(self):
        x = ApproxScalar(2.0, 0.5)
        assert x.low == 1.5 and x.high == 2.5
        assert x.covers(2.4) and not x.covers(2.6)
        with pytest.raises(ValueError):
            ApproxScalar(1.0, -0.1)

    @settings(max_examples=50)
    @given(series(min_len=1))
    def test_tes_bounded_by_fes(self, t):
        # Cauchy-Schwarz on any residual vector
        from ctsa.compress import error_measures
        from ctsa.families import FittedFunction, get_family

        f = FittedFunction(get_family("p0"), t.domain, coeffs=[0.0])
        em = error_measures(t, f)
        assert em.tes <= math.sqrt(t.domain.length) * em.fes * (1 + 1e-12) + 1e-9

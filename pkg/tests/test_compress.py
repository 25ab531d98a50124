import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctsa.compress import (
    CompressedSeries,
    SegmentRep,
    compress,
    error_measures,
    parse_seg_spec,
    segment_fixed,
    segment_sliding,
    synthetic_series,
)
from ctsa.core import Domain, ErrorMeasures, TimeSeries, restrict
from ctsa.errors import DomainError
from ctsa.families import FittedFunction, fit, get_family
from ctsa.engine import check_aligned

from .conftest import random_series


def _fes(t, fam):
    f = fit(fam, t)
    return float(np.linalg.norm(t.values - f.values()))


class TestFixed:
    def test_even(self):
        assert segment_fixed(TimeSeries.of(1, 10, np.zeros(10)), 5) == [Domain(1, 5), Domain(6, 10)]

    def test_remainder(self):
        got = segment_fixed(TimeSeries.of(1, 7, np.zeros(7)), 3)
        assert got == [Domain(1, 3), Domain(4, 6), Domain(7, 7)]

    def test_long_window(self):
        assert segment_fixed(TimeSeries.of(3, 9, np.zeros(7)), 50) == [Domain(3, 9)]

    def test_bad_length(self):
        with pytest.raises(ValueError):
            segment_fixed(TimeSeries.of(1, 3, np.zeros(3)), 0)


class TestSliding:
    def test_breakpoint(self):
        k = 40
        i = np.arange(1, 101)
        v = np.where(i <= k, 0.5 * i, 20 - 0.8 * (i - k))
        doms = segment_sliding(TimeSeries.of(1, 100, v), get_family("p1"), 1e-6)
        assert abs(doms[0].b - k) <= 1

    def test_constant_one_segment(self):
        t = TimeSeries.of(1, 50, [4.0] * 50)
        for fid in ("p0", "p1", "g"):
            assert segment_sliding(t, get_family(fid), 0.01) == [Domain(1, 50)]

    def test_infinite_tau(self, rng):
        t = random_series(rng, 80)
        assert segment_sliding(t, get_family("p1"), math.inf) == [t.domain]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["p0", "p1", "p2"]), st.floats(0.2, 5.0))
    def test_threshold_and_maximality(self, seed, fid, tau):
        rng = np.random.default_rng(seed)
        t = random_series(rng, int(rng.integers(5, 120)))
        fam = get_family(fid)
        doms = segment_sliding(t, fam, tau)
        assert doms[0].a == t.a and doms[-1].b == t.b
        for d, nxt in zip(doms, doms[1:] + [None]):
            assert _fes(restrict(t, d), fam) <= tau
            if nxt is not None:
                assert nxt.a == d.b + 1
                assert _fes(restrict(t, Domain(d.a, d.b + 1)), fam) > tau

    def test_gaussian_threshold(self, rng):
        t = random_series(rng, 150, kind=1)
        fam = get_family("g")
        c = compress(t, fam, "sliding:1.5")
        assert all(s.em.fes <= 1.5 for s in c)

    def test_max_len(self, rng):
        t = TimeSeries.of(1, 30, np.zeros(30))
        assert all(d.length <= 7 for d in segment_sliding(t, get_family("p1"), 1.0, max_len=7))


class TestSpec:
    def test_forms(self):
        assert parse_seg_spec("fixed:10") == ("fixed", 10)
        assert parse_seg_spec("sliding:0.5") == ("sliding", 0.5)

    @pytest.mark.parametrize("bad", ["fixed:0", "fixed:x", "sliding:-1", "window:3", "fixed"])
    def test_bad(self, bad):
        with pytest.raises(ValueError):
            parse_seg_spec(bad)


class TestMeasures:
    def test_worked_example(self, example_series):
        em = error_measures(example_series, fit(get_family("p1"), example_series))
        assert em.fes == pytest.approx(0.0837, abs=1e-4)
        assert em.ses == pytest.approx(0.9813, abs=1e-4)
        assert em.tes == pytest.approx(0.0, abs=1e-12)

    def test_perfect_fit(self):
        t = TimeSeries.of(1, 4, [1.0, 2.0, 3.0, 4.0])
        em = error_measures(t, fit(get_family("p1"), t))
        assert em.fes == pytest.approx(0, abs=1e-12)
        assert em.ses == pytest.approx(np.linalg.norm(t.values))
        assert em.tes == pytest.approx(0, abs=1e-12)

    def test_zero_function(self):
        t = TimeSeries.of(1, 2, [3.0, 4.0])
        f = FittedFunction(get_family("p0"), t.domain, coeffs=[0.0])
        assert error_measures(t, f) == ErrorMeasures(5.0, 0.0, 7.0)


class TestCompress:
    def test_one_segment(self, rng):
        t = random_series(rng, 40)
        c = compress(t, get_family("p2"), "fixed:40")
        assert len(c) == 1
        assert c[0].em == error_measures(t, c[0].fn)

    def test_ratio(self, rng):
        t = random_series(rng, 1000)
        c = compress(t, get_family("p1"), "fixed:10")
        assert len(c) == 100
        assert c.stored_numbers() == 300
        assert c.compression_ratio() == pytest.approx(1000 / 300)

    def test_idempotent_on_reconstruction(self, rng):
        t = random_series(rng, 90)
        c = compress(t, get_family("p1"), "fixed:9")
        c2 = compress(c.reconstruct(), get_family("p1"), "fixed:9")
        assert max(s.em.fes for s in c2) < 1e-10

    def test_contiguity_enforced(self):
        fam = get_family("p0")
        s1 = SegmentRep(Domain(1, 3), FittedFunction(fam, Domain(1, 3), coeffs=[0]), ErrorMeasures(0, 0, 0))
        s2 = SegmentRep(Domain(5, 6), FittedFunction(fam, Domain(5, 6), coeffs=[0]), ErrorMeasures(0, 0, 0))
        with pytest.raises(DomainError):
            CompressedSeries("x", fam, (s1, s2))

    def test_fixed_aligned(self, rng):
        t1, t2 = random_series(rng, 75), random_series(rng, 75)
        c1 = compress(t1, get_family("p1"), "fixed:10")
        c2 = compress(t2, get_family("g"), "fixed:10")
        assert check_aligned(c1, c2)

    def test_index_of(self):
        c = synthetic_series("s", 1, [3, 4, 2], [(0, 0, 0)] * 3)
        assert [c.index_of(i) for i in (1, 3, 4, 7, 8, 9)] == [0, 0, 1, 1, 2, 2]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from(["p0", "p1", "p2", "g"]))
    def test_measures_sound(self, seed, fid):
        rng = np.random.default_rng(seed)
        t = random_series(rng, int(rng.integers(5, 80)), a=int(rng.integers(-20, 20)))
        spec = f"fixed:{int(rng.integers(1, 15))}" if rng.random() < 0.5 else "sliding:1.0"
        c = compress(t, get_family(fid), spec)
        assert c.domain == t.domain
        for s in c:
            raw = restrict(t, s.domain)
            again = error_measures(raw, s.fn)
            for name in ("fes", "ses", "tes"):
                assert getattr(again, name) == pytest.approx(getattr(s.em, name), rel=1e-9, abs=1e-12)
            if c.family.is_linear:
                assert s.em.tes <= 1e-8 * np.linalg.norm(raw.values) + 1e-12
                assert np.linalg.norm(s.fn.coeffs) == pytest.approx(s.em.ses, rel=1e-9, abs=1e-12)

import numpy as np
import pytest

from ctsa.compress import compress, synthetic_series
from ctsa.core import TimeSeries
from ctsa.families import get_family

FAMILY_IDS = ["p0", "p1", "p2", "g"]


def random_series(rng, n, a=1, kind=None):
    """Smooth-ish random data: random walk, noisy sinusoid or piecewise trend."""
    kind = rng.integers(3) if kind is None else kind
    x = np.arange(n)
    if kind == 0:
        v = np.cumsum(rng.normal(size=n)) + rng.normal(scale=3)
    elif kind == 1:
        v = rng.uniform(1, 5) * np.sin(x / rng.uniform(2, 10)) + rng.normal(scale=0.2, size=n)
    else:
        knots = np.sort(rng.choice(np.arange(1, n - 1), size=min(4, n - 2), replace=False))
        xs = np.r_[0, knots, n - 1]
        v = np.interp(x, xs, rng.normal(scale=4, size=len(xs))) + rng.normal(scale=0.1, size=n)
    return TimeSeries.of(a, a + n - 1, v)


def random_seg_spec(rng):
    if rng.random() < 0.5:
        return f"fixed:{int(rng.integers(3, 20))}"
    return f"sliding:{float(rng.uniform(0.3, 3.0))!r}"


def random_compressed(rng, n=None, a=1, family=None, spec=None, name="T"):
    n = int(rng.integers(20, 100)) if n is None else n
    t = random_series(rng, n, a)
    fam = get_family(family or FAMILY_IDS[rng.integers(4)])
    return t, compress(t, fam, spec or random_seg_spec(rng), name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example_series():
    return TimeSeries.of(1, 5, [0.2, 0.4, 0.4, 0.5, 0.6])


STAT_EXPRS = [
    "Sum(T1)",
    "Sum(T1 + T2)",
    "Sum(T1 - T2)",
    "Sum(T1 * T2)",
    "Mu(T1)",
    "Sigma(T1)",
    "Corr(T1, T2)",
    "CCorr(T1, T2, {m})",
    "ACorr(T1, {m})",
]


def random_pair_catalog(rng, families=None, n=None):
    """Two related series over overlapping domains, with raw and compressed
    forms, keyed ``T1`` and ``T2``."""
    fams = families or FAMILY_IDS
    n = int(rng.integers(30, 120)) if n is None else n
    a = int(rng.integers(-5, 10))
    t1 = random_series(rng, n, a)
    off = int(rng.integers(-3, 4))
    y = 0.5 * t1.values + rng.normal(scale=0.5, size=n) + 1.0
    t2 = TimeSeries.of(a + off, a + off + n - 1, y)
    f1 = get_family(fams[rng.integers(len(fams))])
    f2 = get_family(fams[rng.integers(len(fams))])
    c1 = compress(t1, f1, random_seg_spec(rng), "T1")
    c2 = compress(t2, f2, random_seg_spec(rng), "T2")
    return {"T1": (t1, c1), "T2": (t2, c2)}


def tightness_witness(a=1.0, b=-2.0, n=100):
    """Two near-constant series whose final points jump by one, compressed
    with the constant ``a`` (resp. ``b``) so each segment's total error is
    exactly 2 and ``Sum(T1 + T2)`` misses by the full ``tes1 + tes2``."""
    from ctsa.compress import CompressedSeries, SegmentRep, error_measures
    from ctsa.core import Domain
    from ctsa.families import FittedFunction

    p0 = get_family("p0")
    out = {}
    for name, level in (("T1", a), ("T2", b)):
        t = TimeSeries.of(1, n + 2, [level] * n + [level + 1, level + 1], name=name)
        dom = Domain(1, n + 2)
        fn = FittedFunction(p0, dom, coeffs=np.array([level * np.sqrt(n + 2)]))
        seg = SegmentRep(dom, fn, error_measures(t, fn))
        out[name] = (t, CompressedSeries(name, p0, (seg,)))
    return out


def figure9():
    p = synthetic_series("P", 1, [1] * 96 + [204], [(1, 0, 0)] * 96 + [(2, 0, 0)])
    q = synthetic_series("Q", 1, [100] + [2] * 100, [(3, 0, 0)] + [(1, 0, 0)] * 100)
    return p, q


def random_pair(rng, n=None, max_segs=6):
    n = int(rng.integers(4, 60)) if n is None else n

    def one(name):
        k = int(rng.integers(1, max_segs + 1))
        cuts = np.sort(rng.choice(np.arange(1, n), size=min(k - 1, n - 1), replace=False))
        lens = np.diff(np.r_[0, cuts, n])
        fes = [float(rng.integers(0, 5)) if rng.random() < 0.5 else float(rng.uniform(0, 3)) for _ in lens]
        return synthetic_series(name, 1, lens, [(f, 1.0, 0.0) for f in fes])

    return one("A"), one("B")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

"""Raw time-series model and the exact primitives used as ground truth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, order=True)
class Domain:
    """Closed integer interval ``[a, b]``."""

    a: int
    b: int

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise DomainError(f"domain bounds must be integers, got [{self.a}, {self.b}]")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if self.a > self.b:
            raise DomainError(f"empty domain [{self.a}, {self.b}]")

    def __len__(self):
        return self.b - self.a + 1

    @property
    def length(self) -> int:
        return self.b - self.a + 1

    def contains(self, other: "Domain") -> bool:
        return self.a <= other.a and other.b <= self.b

    def __contains__(self, i) -> bool:
        if isinstance(i, Domain):
            return self.contains(i)
        return self.a <= i <= self.b

    def intersect(self, other: "Domain") -> "Domain | None":
        a, b = max(self.a, other.a), min(self.b, other.b)
        return Domain(a, b) if a <= b else None

    def shift(self, k: int) -> "Domain":
        return Domain(self.a + k, self.b + k)

    def __repr__(self):
        return f"[{self.a},{self.b}]"


def intersect_all(domains) -> Domain:
    """Intersection of several domains; raises when it is empty."""
    domains = list(domains)
    a = max(d.a for d in domains)
    b = min(d.b for d in domains)
    if a > b:
        raise DomainError(f"domains {domains} do not overlap")
    return Domain(a, b)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    domain: Domain
    values: np.ndarray = field(repr=False)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise DomainError("time series values must be one-dimensional")
        if len(vals) != self.domain.length:
            raise DomainError(
                f"{len(vals)} values do not fill domain {self.domain} of length {self.domain.length}"
            )
        if not np.all(np.isfinite(vals)):
            raise DomainError("time series values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, a: int, b: int, values, name: str | None = None) -> "TimeSeries":
        return cls(Domain(a, b), values, name)

    @property
    def a(self) -> int:
        return self.domain.a

    @property
    def b(self) -> int:
        return self.domain.b

    def __len__(self):
        return self.domain.length

    def __getitem__(self, i: int) -> float:
        if i not in self.domain:
            raise DomainError(f"position {i} outside {self.domain}")
        return float(self.values[i - self.domain.a])

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"TimeSeries({self.a}, {self.b}, {self.values.tolist()})"

    def positions(self) -> np.ndarray:
        return np.arange(self.a, self.b + 1, dtype=np.int64)


@dataclass(frozen=True)
class ErrorMeasures:
    """Per-segment error measures.

    ``fes`` is the L2 norm of the residuals, ``ses`` the L2 norm of the
    estimated values and ``tes`` the absolute difference between the sum of
    the raw values and the sum of the estimates.
    """

    fes: float
    ses: float
    tes: float

    def __post_init__(self):
        for name in ("fes", "ses", "tes"):
            v = getattr(self, name)
            if not (v >= 0.0) or not math.isfinite(v):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class ApproxScalar:
    """Approximate answer with a deterministic error guarantee.

    The true answer lies in ``[value - guarantee, value + guarantee]``.
    """

    value: float
    guarantee: float

    def __post_init__(self):
        if not (self.guarantee >= 0.0):
            raise ValueError(f"guarantee must be non-negative, got {self.guarantee}")

    @property
    def low(self) -> float:
        return self.value - self.guarantee

    @property
    def high(self) -> float:
        return self.value + self.guarantee

    def covers(self, exact: float) -> bool:
        return abs(exact - self.value) <= self.guarantee


def restrict(t: TimeSeries, sub: Domain) -> TimeSeries:
    if not t.domain.contains(sub):
        raise DomainError(f"{sub} is not contained in {t.domain}")
    lo = sub.a - t.a
    return TimeSeries(sub, t.values[lo : lo + sub.length], t.name)


def shift(t: TimeSeries, k: int) -> TimeSeries:
    return TimeSeries(t.domain.shift(int(k)), t.values, t.name)


def constant(v: float, a: int, b: int) -> TimeSeries:
    d = Domain(a, b)
    return TimeSeries(d, np.full(d.length, float(v)))


def exact_sum(t: TimeSeries, sub: Domain | None = None) -> float:
    """Correctly rounded sum of ``t`` over ``sub`` (whole domain by default)."""
    sub = t.domain if sub is None else sub
    return math.fsum(restrict(t, sub).values)


_OPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
}


def pointwise(op: str, t1: TimeSeries, t2: TimeSeries) -> TimeSeries:
    """Pointwise ``+``, ``-`` or ``*`` over the intersection of both domains."""
    if op == "x" or op == "×":
        op = "*"
    if op == "−":
        op = "-"
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown pointwise operator {op!r}") from None
    d = t1.domain.intersect(t2.domain)
    if d is None:
        raise DomainError(f"domains {t1.domain} and {t2.domain} do not intersect")
    return TimeSeries(d, fn(restrict(t1, d).values, restrict(t2, d).values))

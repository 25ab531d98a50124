"""Uniform sampling baseline for sums, with a Hoeffding sample size.

Estimating ``S = sum X_i`` over ``n`` positions by ``(n/m) * sum`` of ``m``
sampled values, with every ``X_i`` in ``[d_min, d_max]``, satisfies
``P(|estimate - S| >= eps) <= 2 exp(-2 m eps^2 / (n^2 (d_max - d_min)^2))``.
Sampling without replacement only tightens this.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TimeSeries, restrict
from .errors import DomainError


class SampleSize(int):
    """Sample size; ``exhausted`` is set when the bound asked for more
    samples than the population holds and the size was capped at ``n``."""

    exhausted: bool

    def __new__(cls, value, exhausted=False):
        obj = super().__new__(cls, value)
        obj.exhausted = bool(exhausted)
        return obj


@dataclass(frozen=True)
class SamplingPlan:
    n: int
    m: int
    epsilon: float
    beta: float
    bounds: tuple
    exhausted: bool = False

    def __post_init__(self):
        _check(self.n, self.epsilon, self.beta, self.bounds)
        if not 1 <= self.m <= self.n:
            raise ValueError(f"sample size {self.m} outside [1, {self.n}]")


def _check(n, epsilon, beta, bounds):
    if int(n) != n or n < 1:
        raise ValueError(f"population size must be a positive integer, got {n}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < beta <= 1:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    lo, hi = bounds
    if not lo <= hi:
        raise ValueError(f"bounds must satisfy d_min <= d_max, got {bounds}")


def required_sample_size(n: int, epsilon: float, beta: float, bounds) -> SampleSize:
    """Smallest ``m`` whose Hoeffding bound gives error ``<= epsilon`` with
    probability ``>= 1 - beta``; capped at ``n``."""
    _check(n, epsilon, beta, bounds)
    width = float(bounds[1]) - float(bounds[0])
    raw = (n * width) ** 2 * math.log(2.0 / beta) / (2.0 * epsilon**2)
    # guard against an integral value being pushed up by rounding
    m = math.ceil(raw * (1 - 1e-12))
    m = max(m, 1)
    if m > n:
        return SampleSize(n, exhausted=True)
    return SampleSize(m)


def plan(n, epsilon, beta, bounds) -> SamplingPlan:
    m = required_sample_size(n, epsilon, beta, bounds)
    return SamplingPlan(int(n), int(m), float(epsilon), float(beta), tuple(bounds), m.exhausted)


def product_bounds(t1: TimeSeries, t2: TimeSeries) -> tuple[float, float]:
    """Range of ``t1[i]*t2[i]`` implied by the value ranges of both series.

    Uses all four corner products, which is valid for any signs.
    """
    d = _overlap(t1, t2)
    x, y = restrict(t1, d).values, restrict(t2, d).values
    corners = [a * b for a in (x.min(), x.max()) for b in (y.min(), y.max())]
    return float(min(corners)), float(max(corners))


def _overlap(t1, t2):
    d = t1.domain.intersect(t2.domain)
    if d is None:
        raise DomainError(f"domains {t1.domain} and {t2.domain} do not overlap")
    return d


def _products(t1, t2):
    d = _overlap(t1, t2)
    return restrict(t1, d).values * restrict(t2, d).values


def sampled_sum(values, m: int, seed) -> float:
    """``(n/m)`` times the sum of ``m`` values drawn without replacement."""
    x = np.asarray(values, dtype=np.float64)
    n = len(x)
    if not 1 <= m <= n:
        raise ValueError(f"sample size {m} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=int(m), replace=False)
    return n / m * math.fsum(x[idx])


def sampled_sum_product(t1: TimeSeries, t2: TimeSeries, m: int, seed) -> float:
    """Sampling estimate of ``Sum(T1 x T2)`` over the common domain."""
    return sampled_sum(_products(t1, t2), m, seed)


def coverage(values, m: int, epsilon: float, trials: int, seed=0, batch: int = 256) -> float:
    """Fraction of ``trials`` sampling estimates within ``epsilon`` of the
    exact sum (Monte Carlo)."""
    x = np.asarray(values, dtype=np.float64)
    n = len(x)
    if not 1 <= m <= n:
        raise ValueError(f"sample size {m} outside [1, {n}]")
    exact = math.fsum(x)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        if m == n:
            est = np.full(k, n / m * float(np.sum(x)))
        else:
            # m smallest of n uniform keys per row: a uniform m-subset
            keys = rng.random((k, n))
            idx = np.argpartition(keys, m - 1, axis=1)[:, :m]
            est = n / m * x[idx].sum(axis=1)
        hits += int(np.count_nonzero(np.abs(est - exact) <= epsilon))
        done += k
    return hits / trials

"""Segment covers, alignment and the residual cross-term partition.

The cross term bounds ``|<eps1, eps2>|`` over a common domain by splitting
it into windows whose boundaries are segment ends of either series; a
window costs ``sqrt(sum fes1^2 over its cover) * sqrt(sum fes2^2 over its
cover)``.  ``os_combination`` returns the minimum-cost partition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..core import Domain
from ..errors import DomainError
from .views import SegView, as_view


@dataclass(frozen=True)
class SegmentCombination:
    windows: tuple
    cost: float

    def __iter__(self):
        return iter(self.windows)

    def __len__(self):
        return len(self.windows)


def common_domain(v1, v2) -> Domain:
    d = v1.domain.intersect(v2.domain)
    if d is None:
        raise DomainError(f"domains {v1.domain} and {v2.domain} do not overlap")
    return d


def cover(L, d: Domain) -> list[int]:
    """Indices of the segments of ``L`` whose union is the smallest one
    containing ``d``."""
    return list(as_view(L).span(d))


def check_aligned(L1, L2) -> bool:
    v1, v2 = as_view(L1), as_view(L2)
    d = v1.domain.intersect(v2.domain)
    if d is None:
        return False
    return v1.boundaries(d) == v2.boundaries(d)


def window_cost(v1: SegView, v2: SegView, w: Domain) -> float:
    s1 = sum(float(v1.fes[i]) ** 2 for i in v1.span(w))
    s2 = sum(float(v2.fes[i]) ** 2 for i in v2.span(w))
    return math.sqrt(s1) * math.sqrt(s2)


def os_partition(v1: SegView, v2: SegView, d: Domain) -> SegmentCombination:
    e1, f1 = v1.clipped_ends(d)
    e2, f2 = v2.clipped_ends(d)
    ends, cost = kernels.os_partition(e1, f1, e2, f2)
    starts = [d.a] + [e + 1 for e in ends[:-1]]
    return SegmentCombination(tuple(Domain(a, b) for a, b in zip(starts, ends)), cost)


def os_combination(L1, L2) -> SegmentCombination:
    """Optimal window partition of the common domain of two series."""
    v1, v2 = as_view(L1), as_view(L2)
    return os_partition(v1, v2, common_domain(v1, v2))


def _one_sided(va: SegView, vb: SegView, d: Domain) -> float:
    total = 0.0
    for i in va.span(d):
        w = va.seg_domain(i).intersect(d)
        total += float(va.fes[i]) * math.sqrt(sum(float(vb.fes[j]) ** 2 for j in vb.span(w)))
    return total


def is_combination_value(L1, L2) -> float:
    """Cross term when windows are the segments of one series only."""
    v1, v2 = as_view(L1), as_view(L2)
    d = common_domain(v1, v2)
    return min(_one_sided(v1, v2, d), _one_sided(v2, v1, d))


def greedy_combination(L1, L2) -> SegmentCombination:
    """Single-pass checkpoint scan over both end lists.

    Accumulates per-segment cover costs for each series and closes a window
    whenever the cheaper side has caught up with the other one's boundary;
    both accumulators are synchronised at each checkpoint.  Kept as a
    reference for the exact partition in ``os_combination``.
    """
    v1, v2 = as_view(L1), as_view(L2)
    d = common_domain(v1, v2)
    e1, _ = v1.clipped_ends(d)
    e2, _ = v2.clipped_ends(d)
    r1, r2 = v1.span(d), v2.span(d)
    cost1 = [
        float(v1.fes[i]) * math.sqrt(sum(float(v2.fes[j]) ** 2 for j in v2.span(v1.seg_domain(i).intersect(d))))
        for i in r1
    ]
    cost2 = [
        float(v2.fes[i]) * math.sqrt(sum(float(v1.fes[j]) ** 2 for j in v1.span(v2.seg_domain(i).intersect(d))))
        for i in r2
    ]
    k1, k2 = len(e1), len(e2)
    i1 = i2 = 0
    last1 = last2 = d.a - 1
    eps1 = eps2 = 0.0
    start = d.a
    windows = []
    while i1 < k1 or i2 < k2:
        if i2 >= k2 or (i1 < k1 and e1[i1] <= e2[i2]):
            eps1 += cost1[i1]
            last1 = int(e1[i1])
            i1 += 1
        else:
            eps2 += cost2[i2]
            last2 = int(e2[i2])
            i2 += 1
        if eps1 <= eps2 and last1 >= last2 and last1 >= start:
            windows.append(Domain(start, last1))
            start = last1 + 1
            eps2 = eps1
        if eps2 <= eps1 and last2 >= last1 and last2 >= start:
            windows.append(Domain(start, last2))
            start = last2 + 1
            eps1 = eps2
    if start <= d.b:
        windows.append(Domain(start, d.b))
    cost = sum(window_cost(v1, v2, w) for w in windows)
    return SegmentCombination(tuple(windows), cost)


def brute_force_partition(L1, L2) -> float:
    """Minimum cross term over every subset of candidate cuts (test oracle)."""
    v1, v2 = as_view(L1), as_view(L2)
    d = common_domain(v1, v2)
    e1, _ = v1.clipped_ends(d)
    e2, _ = v2.clipped_ends(d)
    cuts = sorted(set(e1.tolist()) | set(e2.tolist()))
    inner = cuts[:-1]
    if len(inner) > 20:
        raise ValueError("too many candidate cuts for exhaustive search")
    best = math.inf
    for mask in range(1 << len(inner)):
        ends = [c for b, c in enumerate(inner) if mask >> b & 1] + [d.b]
        a = d.a
        total = 0.0
        for e in ends:
            total += window_cost(v1, v2, Domain(a, e))
            a = e + 1
        best = min(best, total)
    return best


def partition_is_valid(comb: SegmentCombination, L1, L2) -> bool:
    v1, v2 = as_view(L1), as_view(L2)
    d = common_domain(v1, v2)
    e1, _ = v1.clipped_ends(d)
    e2, _ = v2.clipped_ends(d)
    allowed = set(e1.tolist()) | set(e2.tolist())
    pos = d.a
    for w in comb.windows:
        if w.a != pos or w.b not in allowed:
            return False
        pos = w.b + 1
    return pos == d.b + 1

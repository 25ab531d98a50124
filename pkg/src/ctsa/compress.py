"""Segmentation and construction of compressed series."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Domain, ErrorMeasures, TimeSeries, restrict
from .errors import DomainError
from .families import FamilyDescriptor, FittedFunction, fit, fit_gaussian_local


@dataclass(frozen=True, eq=False)
class SegmentRep:
    domain: Domain
    fn: FittedFunction
    em: ErrorMeasures

    def __post_init__(self):
        if self.fn.domain != self.domain:
            raise DomainError(f"function domain {self.fn.domain} differs from segment {self.domain}")


@dataclass(frozen=True, eq=False)
class CompressedSeries:
    series_id: str
    family: FamilyDescriptor
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise DomainError(f"series {self.series_id!r} has no segments")
        for prev, nxt in zip(segs, segs[1:]):
            if nxt.domain.a != prev.domain.b + 1:
                raise DomainError(
                    f"segments {prev.domain} and {nxt.domain} of {self.series_id!r} are not contiguous"
                )
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_ends", np.array([s.domain.b for s in segs], dtype=np.int64))

    @property
    def domain(self) -> Domain:
        return Domain(self.segments[0].domain.a, self.segments[-1].domain.b)

    @property
    def ends(self) -> np.ndarray:
        return self._ends

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, i):
        return self.segments[i]

    def index_of(self, pos: int) -> int:
        """Index of the segment containing position ``pos``."""
        if pos not in self.domain:
            raise DomainError(f"position {pos} outside {self.domain}")
        return int(np.searchsorted(self._ends, pos, side="left"))

    def stored_numbers(self) -> int:
        return len(self.segments) * self.family.stored_numbers()

    def compression_ratio(self) -> float:
        return self.domain.length / self.stored_numbers()

    def reconstruct(self) -> TimeSeries:
        return TimeSeries(self.domain, np.concatenate([s.fn.values() for s in self.segments]))


# ---------------------------------------------------------------------------
# Segmentation


def segment_fixed(t: TimeSeries, length: int) -> list[Domain]:
    if length < 1:
        raise ValueError("segment length must be at least 1")
    return [Domain(a, min(a + length - 1, t.b)) for a in range(t.a, t.b + 1, length)]


def segment_sliding(t: TimeSeries, family: FamilyDescriptor, tau: float, max_len: int | None = None):
    """Greedy sliding-window segmentation with an L2 residual threshold."""
    return [d for d, _ in _sliding(t, family, tau, max_len)]


def _sliding(t, family, tau, max_len):
    if not tau > 0:
        raise ValueError("tau must be positive")
    cap = 0 if max_len is None else int(max_len)
    if family.is_linear:
        ends = kernels.sw_poly(t.values, family.dim, float(tau), cap)
        starts = [0] + list(ends[:-1])
        return [(Domain(t.a + s, t.a + e - 1), None) for s, e in zip(starts, ends)]
    return _sliding_gaussian(t.values, t.a, tau, cap)


def _sliding_gaussian(y, a0, tau, cap):
    # The optimal residual never decreases when a window grows, so the
    # longest admissible window is found by galloping plus bisection instead
    # of refitting at every step.
    n = len(y)
    out = []
    s = 0
    warm = None
    while s < n:
        limit = n - s if cap <= 0 else min(cap, n - s)
        fits = {}

        def ok(length):
            params, sse = fit_gaussian_local(y[s : s + length], warm)
            fits[length] = params
            return math.sqrt(max(sse, 0.0)) <= tau

        lo, hi, step = 1, None, 1
        fits[1] = fit_gaussian_local(y[s : s + 1])[0]
        while lo < limit:
            cand = min(lo + step, limit)
            if ok(cand):
                lo = cand
                step *= 2
            else:
                hi = cand
                break
        if hi is not None:
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if ok(mid):
                    lo = mid
                else:
                    hi = mid
        out.append((Domain(a0 + s, a0 + s + lo - 1), fits[lo]))
        warm = fits[lo] if lo > 3 else None
        s += lo
    return out


_SPEC = re.compile(r"^(fixed|sliding):(.+)$")


def parse_seg_spec(spec) -> tuple[str, float]:
    """Parse ``fixed:<len>`` or ``sliding:<tau>``."""
    if isinstance(spec, tuple):
        return spec
    m = _SPEC.match(str(spec).strip())
    if not m:
        raise ValueError(f"bad segmentation spec {spec!r}; expected fixed:<len> or sliding:<tau>")
    kind, arg = m.groups()
    if kind == "fixed":
        try:
            length = int(arg)
        except ValueError:
            raise ValueError(f"fixed segment length must be an integer, got {arg!r}") from None
        if length < 1:
            raise ValueError("fixed segment length must be at least 1")
        return kind, length
    tau = float(arg)
    if not tau > 0:
        raise ValueError("sliding threshold must be positive")
    return kind, tau


# ---------------------------------------------------------------------------
# Measures and compression


def error_measures(seg: TimeSeries, fn: FittedFunction) -> ErrorMeasures:
    if fn.domain != seg.domain:
        raise DomainError(f"function domain {fn.domain} differs from segment {seg.domain}")
    est = fn.values()
    resid = seg.values - est
    return ErrorMeasures(
        fes=float(np.linalg.norm(resid)),
        ses=float(np.linalg.norm(est)),
        tes=abs(math.fsum(seg.values) - math.fsum(est)),
    )


def _gaussian_from_local(family, dom, local):
    a, b, c, d = local
    return FittedFunction(family, dom, params=np.array([a, b + dom.a, abs(c), d]))


def compress(t: TimeSeries, family: FamilyDescriptor, seg_spec, series_id: str = "T") -> CompressedSeries:
    kind, arg = parse_seg_spec(seg_spec)
    if kind == "fixed":
        pieces = [(d, None) for d in segment_fixed(t, arg)]
    else:
        pieces = _sliding(t, family, arg, None)
    segs = []
    for dom, local in pieces:
        raw = restrict(t, dom)
        fn = fit(family, raw) if local is None else _gaussian_from_local(family, dom, local)
        segs.append(SegmentRep(dom, fn, error_measures(raw, fn)))
    return CompressedSeries(series_id, family, tuple(segs))


def synthetic_series(series_id: str, start: int, lengths, measures, family=None) -> CompressedSeries:
    """Build a compressed series directly from segment lengths and measures.

    Each segment gets a constant estimation function whose norm equals the
    given ``ses``.  Useful for exercising the guarantee formulas on
    hand-picked measure values.
    """
    from .families import get_family

    family = family or get_family("p0")
    segs = []
    a = int(start)
    for n, em in zip(lengths, measures):
        if not isinstance(em, ErrorMeasures):
            em = ErrorMeasures(*em)
        dom = Domain(a, a + int(n) - 1)
        fn = FittedFunction(family, dom, coeffs=np.array([em.ses]))
        segs.append(SegmentRep(dom, fn, em))
        a = dom.b + 1
    return CompressedSeries(series_id, family, tuple(segs))

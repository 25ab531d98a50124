"""Shifted, read-only views of compressed series used by the guarantee code."""
from __future__ import annotations

import numpy as np

from ..compress import CompressedSeries
from ..core import Domain
from ..errors import DomainError


class SegView:
    """A compressed series translated by ``k`` positions.

    Segment functions are shifted lazily; polynomial coefficients are
    unchanged by translation since the basis depends only on length.
    """

    def __init__(self, series: CompressedSeries, k: int = 0):
        self.series = series
        self.k = int(k)
        self.family = series.family
        self.ends = series.ends + self.k
        self.starts = np.array([s.domain.a for s in series.segments], dtype=np.int64) + self.k
        self.fes = np.array([s.em.fes for s in series.segments])
        self.ses = np.array([s.em.ses for s in series.segments])
        self.tes = np.array([s.em.tes for s in series.segments])
        self._fns = {}

    @property
    def domain(self) -> Domain:
        return Domain(int(self.starts[0]), int(self.ends[-1]))

    def __len__(self):
        return len(self.ends)

    def seg_domain(self, i) -> Domain:
        return Domain(int(self.starts[i]), int(self.ends[i]))

    def fn(self, i):
        f = self._fns.get(i)
        if f is None:
            f = self.series.segments[i].fn
            if self.k:
                f = f.shifted(self.k)
            self._fns[i] = f
        return f

    def span(self, d: Domain) -> range:
        """Indices of the segments overlapping ``d``."""
        if not self.domain.contains(d):
            raise DomainError(f"{d} is not inside {self.domain}")
        i0 = int(np.searchsorted(self.ends, d.a, side="left"))
        i1 = int(np.searchsorted(self.ends, d.b, side="left"))
        return range(i0, i1 + 1)

    def clipped_ends(self, d: Domain) -> tuple[np.ndarray, np.ndarray]:
        """Segment ends clipped to ``d`` and the matching residual norms."""
        r = self.span(d)
        ends = self.ends[r.start : r.stop].copy()
        ends[-1] = d.b
        return ends, self.fes[r.start : r.stop]

    def boundaries(self, d: Domain) -> list[tuple[int, int]]:
        return [
            (max(int(self.starts[i]), d.a), min(int(self.ends[i]), d.b)) for i in self.span(d)
        ]

    def __repr__(self):
        return f"SegView({self.series.series_id!r}, k={self.k}, {len(self)} segments)"


def as_view(x) -> SegView:
    return x if isinstance(x, SegView) else SegView(x)

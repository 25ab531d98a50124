"""Deterministic guarantees for sums of series and of their products.

For ``Sum(T1 x T2)`` over a domain ``D`` write ``Ti = fi + epsi``.  Then

    sum T1*T2 = sum f1*f2 + <eps1, f2> + <f1, eps2> + <eps1, eps2>

and each residual term is bounded separately.  ``<eps1, f2>`` is split per
segment of ``T1``: when the segment lies inside ``D`` and its residual is
orthogonal to a space containing ``f2`` there (same vector-space family,
same boundaries), it vanishes; for polynomial families it is bounded by
``fes1 * dist(f2, family)`` on the segment; otherwise by ``fes1`` times the
norm of the covering estimates of ``T2``.  ``<eps1, eps2>`` is bounded by
the optimal window partition.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from ..core import ApproxScalar, Domain, ErrorMeasures
from ..errors import DomainError
from ..families import Group, _basis_matrix, _pad, _psi_cached, family_contains, restricted_coeffs
from .calculus import propagate_measures
from .combination import check_aligned, common_domain, os_partition
from .views import SegView, as_view

PATHS = ("auto", "lsf", "any")


@functools.lru_cache(maxsize=1024)
def _basis_sums(length: int, dim: int) -> np.ndarray:
    out = _basis_matrix(length, dim).sum(axis=1)
    out.setflags(write=False)
    return out


def _fn_sum(f, sub: Domain) -> float:
    if f.is_lsf:
        c = restricted_coeffs(f, sub)
        return float(c @ _basis_sums(sub.length, len(c)))
    return float(np.sum(f.values_on(sub)))


# ---------------------------------------------------------------------------
# Sums


def sum_terms(v: SegView, d: Domain):
    """``(value, guarantee, magnitude)`` of the sum of one series over ``d``.

    ``magnitude`` bounds the sum of absolute estimated values and sizes the
    floating-point allowance added by the evaluator.
    """
    value = 0.0
    g = 0.0
    mag = 0.0
    for i in v.span(d):
        seg = v.seg_domain(i)
        part = seg.intersect(d)
        value += _fn_sum(v.fn(i), part)
        root = math.sqrt(part.length)
        if part == seg:
            g += min(float(v.tes[i]), root * float(v.fes[i]))
        else:
            g += root * float(v.fes[i])
        mag += root * float(v.ses[i])
    return value, g, mag


def guarantee_sum_range(L, sub: Domain | None = None) -> ApproxScalar:
    """Sum of the estimated values over ``sub`` with its guarantee."""
    v = as_view(L)
    sub = v.domain if sub is None else sub
    if not v.domain.contains(sub):
        raise DomainError(f"{sub} is not inside {v.domain}")
    value, g, _ = sum_terms(v, sub)
    return ApproxScalar(value, g)


# ---------------------------------------------------------------------------
# Products of two series


def _single_match(vb: SegView, seg: Domain) -> int | None:
    r = vb.span(seg)
    if len(r) == 1 and vb.seg_domain(r.start) == seg:
        return r.start
    return None


def _lsf_distance(va: SegView, i: int, vb: SegView) -> float:
    """Distance on segment ``i`` of ``va`` between the estimates of ``vb``
    and the span of ``va``'s family there, computed from coefficients."""
    seg = va.seg_domain(i)
    n = seg.length
    d1 = va.fn(i).dim
    js = vb.span(seg)
    dstar = min(max([d1] + [vb.fn(j).dim for j in js]), n)
    parts = []
    proj = np.zeros(d1)
    for j in js:
        sub = vb.seg_domain(j).intersect(seg)
        psi = _psi_cached(n, sub.a - seg.a, sub.length, dstar)[:d1]
        cj = _pad(np.asarray(restricted_coeffs(vb.fn(j), sub)), psi.shape[1])
        proj += psi @ cj
        parts.append((psi, cj))
    dist2 = 0.0
    for psi, cj in parts:
        r = cj - proj @ psi
        dist2 += float(r @ r)
    return math.sqrt(dist2)


def _cover_ses(vb: SegView, w: Domain) -> float:
    r = vb.span(w)
    s = vb.ses[r.start : r.stop]
    return math.sqrt(float(s @ s))


def half_term(va: SegView, vb: SegView, d: Domain, path: str = "auto") -> float:
    """Bound on ``|<eps_a, f_b>|`` over ``d``."""
    if path not in PATHS:
        raise ValueError(f"unknown guarantee path {path!r}")
    total = 0.0
    both_lsf = va.family.group == Group.LSF and vb.family.group == Group.LSF
    for i in va.span(d):
        fes = float(va.fes[i])
        if fes == 0.0:
            continue
        seg = va.seg_domain(i)
        if d.contains(seg) and path != "any":
            if (
                path == "auto"
                and va.family.group <= Group.VS
                and family_contains(va.family, vb.family)
                and _single_match(vb, seg) is not None
            ):
                continue
            if both_lsf:
                total += fes * _lsf_distance(va, i, vb)
                continue
        total += fes * _cover_ses(vb, seg.intersect(d))
    return total


def _piece_ends(views, d: Domain) -> list[int]:
    cuts = set()
    for v in views:
        cuts.update(v.clipped_ends(d)[0].tolist())
    return sorted(cuts)


def product_value(v1: SegView, v2: SegView, d: Domain):
    """``(sum f1*f2 over d, magnitude)`` using coefficients where possible."""
    value = 0.0
    mag = 0.0
    a = d.a
    i = int(np.searchsorted(v1.ends, a, side="left"))
    j = int(np.searchsorted(v2.ends, a, side="left"))
    for e in _piece_ends((v1, v2), d):
        while v1.ends[i] < a:
            i += 1
        while v2.ends[j] < a:
            j += 1
        piece = Domain(a, e)
        f1, f2 = v1.fn(i), v2.fn(j)
        if f1.is_lsf and f2.is_lsf:
            c1 = np.asarray(restricted_coeffs(f1, piece))
            c2 = np.asarray(restricted_coeffs(f2, piece))
            n = max(len(c1), len(c2))
            c1, c2 = _pad(c1, n), _pad(c2, n)
        else:
            c1, c2 = f1.values_on(piece), f2.values_on(piece)
        value += float(c1 @ c2)
        mag += float(np.linalg.norm(c1) * np.linalg.norm(c2))
        a = e + 1
    return value, mag


def product_terms(v1: SegView, v2: SegView, d: Domain, path: str = "auto"):
    """``(value, guarantee, magnitude)`` for the sum of ``T1*T2`` over ``d``."""
    value, mag = product_value(v1, v2, d)
    g = half_term(v1, v2, d, path) + half_term(v2, v1, d, path) + os_partition(v1, v2, d).cost
    return value, g, mag


def _both(L1, L2):
    v1, v2 = as_view(L1), as_view(L2)
    return v1, v2, common_domain(v1, v2)


def guarantee_product_aligned(L1, L2, path: str = "auto") -> float:
    """Guarantee for ``Sum(T1 x T2)`` on aligned series.

    With ``path='auto'`` the orthogonality of residuals is used whenever the
    families allow it; ``path='any'`` ignores it.
    """
    v1, v2, d = _both(L1, L2)
    if not check_aligned(v1, v2):
        raise DomainError(
            f"series {v1.series.series_id!r} and {v2.series.series_id!r} are not aligned"
        )
    return product_terms(v1, v2, d, path)[1]


def guarantee_product_misaligned(L1, L2, path: str | None = None) -> float:
    """Guarantee for ``Sum(T1 x T2)`` that never relies on alignment.

    The default path measures, per segment, the distance of the other
    series' estimates from the polynomial family when both families are
    linear scalable, and falls back to estimate norms otherwise.
    """
    v1, v2, d = _both(L1, L2)
    if path is None:
        lsf = v1.family.group == Group.LSF and v2.family.group == Group.LSF
        path = "lsf" if lsf else "any"
    return product_terms(v1, v2, d, path)[1]


def aligned_product_bound(ms1, ms2, vs: bool) -> float:
    """Aligned product guarantee straight from paired segment measures."""
    total = 0.0
    for m1, m2 in zip(ms1, ms2, strict=True):
        total += m1.fes * m2.fes
        if not vs:
            total += m1.fes * m2.ses + m1.ses * m2.fes
    return total


# ---------------------------------------------------------------------------
# Products of three or more series


def multi_product_terms(views, d: Domain):
    """``(value, guarantee, magnitude)`` for the sum of a product of several
    series, refining to pieces where every factor has one segment."""
    value = 0.0
    g = 0.0
    mag = 0.0
    a = d.a
    for e in _piece_ends(views, d):
        piece = Domain(a, e)
        root = math.sqrt(piece.length)
        prod = None
        m = None
        norms = 1.0
        for v in views:
            i = int(np.searchsorted(v.ends, a, side="left"))
            vals = v.fn(i).values_on(piece)
            nrm = float(np.linalg.norm(vals))
            fes = float(v.fes[i])
            tes = float(v.tes[i]) if v.seg_domain(i) == piece else root * fes
            em = ErrorMeasures(fes, nrm, min(tes, root * fes))
            if prod is None:
                prod, m = vals, em
            else:
                prod = prod * vals
                m = propagate_measures("*", m, em, False)
                m = ErrorMeasures(m.fes, float(np.linalg.norm(prod)), m.tes)
            norms *= nrm
        value += float(np.sum(prod))
        g += min(m.tes, root * m.fes)
        mag += norms
        a = e + 1
    return value, g, mag


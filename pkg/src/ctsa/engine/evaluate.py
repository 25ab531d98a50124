"""Exact and approximate evaluation of analytics expressions."""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from ..compress import CompressedSeries
from ..core import ApproxScalar, Domain, TimeSeries
from ..errors import DomainError, EvaluationError, MissingRawError, UnknownSeriesError
from . import ast as A
from .calculus import propagate_scalar
from .guarantees import multi_product_terms, product_terms, sum_terms
from .parser import expand_stat, parse
from .views import SegView

EXACT_DPS = 60
_U = float(np.finfo(np.float64).eps)


# ---------------------------------------------------------------------------
# Catalog access


class _Source:
    """Uniform lookup over a ``Catalog`` or a plain ``{name: series}`` dict."""

    def __init__(self, catalog):
        self.catalog = catalog

    def _find(self, name, kind):
        cat = self.catalog
        if isinstance(cat, dict):
            obj = cat.get(name)
            if obj is None:
                raise UnknownSeriesError(f"unknown series {name!r}")
            if kind == "raw":
                if isinstance(obj, TimeSeries):
                    return obj
                if isinstance(obj, tuple):
                    for o in obj:
                        if isinstance(o, TimeSeries):
                            return o
                raise MissingRawError(f"no raw data for series {name!r}")
            if isinstance(obj, CompressedSeries):
                return obj
            if isinstance(obj, tuple):
                for o in obj:
                    if isinstance(o, CompressedSeries):
                        return o
            raise EvaluationError(f"series {name!r} has not been compressed")
        return cat.get_raw(name) if kind == "raw" else cat.get_compressed(name)

    def raw(self, name) -> TimeSeries:
        return self._find(name, "raw")

    def compressed(self, name) -> CompressedSeries:
        return self._find(name, "compressed")


def _as_ast(expr):
    return parse(expr) if isinstance(expr, str) else expr


def tse_domain(node, domain_of) -> Domain:
    """Domain of a series expression; ``domain_of`` maps names to domains."""
    if isinstance(node, A.Ref):
        return domain_of(node.name)
    if isinstance(node, A.Const):
        return Domain(node.a, node.b)
    if isinstance(node, A.Shift):
        return tse_domain(node.arg, domain_of).shift(node.k)
    if isinstance(node, A.TBin):
        d1 = tse_domain(node.left, domain_of)
        d2 = tse_domain(node.right, domain_of)
        d = d1.intersect(d2)
        if d is None:
            raise DomainError(f"operands of {node} have disjoint domains {d1} and {d2}")
        return d
    raise EvaluationError(f"{type(node).__name__} is not a series expression")


def _sum_domain(node: A.Sum, domain_of) -> Domain:
    d = tse_domain(node.arg, domain_of)
    if node.a is not None:
        d = d.intersect(Domain(node.a, node.b))
        if d is None:
            raise DomainError(f"range [{node.a}, {node.b}] misses the domain of {node.arg}")
    if node.over is not None:
        d = d.intersect(tse_domain(node.over, domain_of))
        if d is None:
            raise DomainError(f"domains of {node.arg} and {node.over} do not overlap")
    return d


# ---------------------------------------------------------------------------
# Exact evaluation


def eval_exact(expr, catalog) -> float:
    """Ground truth: evaluate directly on the raw values in high precision."""
    node = _as_ast(expr)
    src = _Source(catalog)
    cache = {}

    def raw(name):
        t = cache.get(name)
        if t is None:
            ts = src.raw(name)
            t = cache[name] = (ts.domain, [mpmath.mpf(float(x)) for x in ts.values])
        return t

    def domain_of(name):
        return raw(name)[0]

    def series(n, d: Domain):
        # values of the series expression on d (d inside its domain)
        if isinstance(n, A.Ref):
            dom, vals = raw(n.name)
            return vals[d.a - dom.a : d.b - dom.a + 1]
        if isinstance(n, A.Const):
            return [mpmath.mpf(n.value)] * d.length
        if isinstance(n, A.Shift):
            return series(n.arg, d.shift(-n.k))
        if isinstance(n, A.TBin):
            left, right = series(n.left, d), series(n.right, d)
            if n.op == "+":
                return [x + y for x, y in zip(left, right)]
            if n.op == "-":
                return [x - y for x, y in zip(left, right)]
            return [x * y for x, y in zip(left, right)]
        raise EvaluationError(f"{type(n).__name__} is not a series expression")

    def scalar(n):
        if isinstance(n, A.Num):
            return mpmath.mpf(n.value)
        if isinstance(n, A.Neg):
            return -scalar(n.arg)
        if isinstance(n, A.Stat):
            return scalar(n.body)
        if isinstance(n, A.Count):
            return mpmath.mpf(tse_domain(n.arg, domain_of).length)
        if isinstance(n, A.Sum):
            d = _sum_domain(n, domain_of)
            return mpmath.fsum(series(n.arg, d))
        if isinstance(n, A.Sqrt):
            x = scalar(n.arg)
            if x < 0:
                raise EvaluationError(f"square root of negative value {float(x)}")
            return mpmath.sqrt(x)
        if isinstance(n, A.Bin):
            x, y = scalar(n.left), scalar(n.right)
            if n.op == "+":
                return x + y
            if n.op == "-":
                return x - y
            if n.op == "*":
                return x * y
            if y == 0:
                raise EvaluationError("division by zero")
            return x / y
        if isinstance(n, (A.Ref, A.Const, A.Shift, A.TBin)):
            raise EvaluationError(f"series expression {n} used as a scalar")
        raise EvaluationError(f"cannot evaluate {n!r}")

    with mpmath.workdps(EXACT_DPS):
        return float(scalar(node))


# ---------------------------------------------------------------------------
# Approximate evaluation


def expand_monomials(node) -> dict:
    """Expand a series expression into ``{atoms: coefficient}``.

    An atom is ``(name, shift)``; ``atoms`` is a sorted tuple (a product of
    atoms) and coefficients are exact fractions.  Constants become
    coefficients since the sum is taken inside every leaf's domain.
    """
    if isinstance(node, A.Ref):
        return {((node.name, 0),): Fraction(1)}
    if isinstance(node, A.Const):
        return {(): Fraction(node.value)}
    if isinstance(node, A.Shift):
        return {
            tuple(sorted((name, k + node.k) for name, k in key)): c
            for key, c in expand_monomials(node.arg).items()
        }
    if isinstance(node, A.TBin):
        left, right = expand_monomials(node.left), expand_monomials(node.right)
        out: dict = {}
        if node.op in "+-":
            sign = 1 if node.op == "+" else -1
            out.update(left)
            for key, c in right.items():
                out[key] = out.get(key, Fraction(0)) + sign * c
        else:
            for k1, c1 in left.items():
                for k2, c2 in right.items():
                    key = tuple(sorted(k1 + k2))
                    out[key] = out.get(key, Fraction(0)) + c1 * c2
        return {k: c for k, c in out.items() if c != 0}
    raise EvaluationError(f"{type(node).__name__} is not a series expression")


def fp_allowance(n_points: int, magnitude: float) -> float:
    """Rounding allowance for a sum over ``n_points`` positions whose terms
    are bounded in total by ``magnitude``."""
    return 16.0 * _U * (n_points + 16) * magnitude


class _Approx:
    def __init__(self, catalog, path="auto"):
        self.src = _Source(catalog)
        self.path = path
        self.views = {}

    def view(self, name, k) -> SegView:
        v = self.views.get((name, k))
        if v is None:
            base = self.views.get((name, 0))
            series = base.series if base is not None else self.src.compressed(name)
            v = self.views[(name, k)] = SegView(series, k)
        return v

    def domain_of(self, name):
        return self.view(name, 0).domain

    def sum(self, node: A.Sum) -> ApproxScalar:
        d = _sum_domain(node, self.domain_of)
        monos = expand_monomials(node.arg)
        exact = Fraction(0)
        value = g = mag = 0.0
        approx = False
        for key, coef in monos.items():
            if not key:
                exact += coef * d.length
                continue
            approx = True
            views = [self.view(name, k) for name, k in key]
            if len(views) == 1:
                v, e, m = sum_terms(views[0], d)
            elif len(views) == 2:
                v, e, m = product_terms(views[0], views[1], d, self.path)
            else:
                v, e, m = multi_product_terms(views, d)
            c = float(coef)
            value += c * v
            g += abs(c) * e
            mag += abs(c) * (m + e)
        if not approx:
            return ApproxScalar(float(exact), 0.0)
        base = float(exact)
        g += fp_allowance(d.length * max(len(k) for k in monos), mag + abs(base))
        return ApproxScalar(base + value, g)

    def scalar(self, n) -> ApproxScalar:
        if isinstance(n, A.Num):
            return ApproxScalar(n.value, 0.0)
        if isinstance(n, A.Neg):
            x = self.scalar(n.arg)
            return ApproxScalar(-x.value, x.guarantee)
        if isinstance(n, A.Stat):
            return self.scalar(n.body)
        if isinstance(n, A.Count):
            return ApproxScalar(float(tse_domain(n.arg, self.domain_of).length), 0.0)
        if isinstance(n, A.Sum):
            return self.sum(n)
        if isinstance(n, A.Sqrt):
            return _rounded(propagate_scalar("√", self.scalar(n.arg)))
        if isinstance(n, A.Bin):
            return _rounded(propagate_scalar(n.op, self.scalar(n.left), self.scalar(n.right)))
        if isinstance(n, (A.Ref, A.Const, A.Shift, A.TBin)):
            raise EvaluationError(f"series expression {n} used as a scalar")
        raise EvaluationError(f"cannot evaluate {n!r}")


def _rounded(x: ApproxScalar) -> ApproxScalar:
    # one rounding in the operation itself plus rounding in the guarantee
    if x.guarantee == 0.0 and x.value == 0.0:
        return x
    return ApproxScalar(x.value, x.guarantee + 4.0 * _U * (abs(x.value) + x.guarantee))


def eval_approx(expr, catalog, path: str = "auto") -> ApproxScalar:
    """Evaluate on the compressed series; the exact answer lies within
    ``guarantee`` of ``value``.

    ``path='any'`` disables the orthogonality-based refinements, which is
    useful for comparing guarantee quality.
    """
    res = _Approx(catalog, path).scalar(_as_ast(expr))
    if not math.isfinite(res.value) or not math.isfinite(res.guarantee):
        raise EvaluationError(f"non-finite result {res}")
    return res


def stat(kind: str, refs, m: int | None = None, catalog=None) -> ApproxScalar:
    """Approximate statistic ``kind`` over the named series."""
    args = [A.Ref(r) if isinstance(r, str) else r for r in refs]
    if kind in ("CCorr", "ACorr") and m is None:
        raise ValueError(f"{kind} needs a lag")
    node = A.Stat(kind, tuple(args), m, expand_stat(kind, args, m))
    return eval_approx(node, catalog)

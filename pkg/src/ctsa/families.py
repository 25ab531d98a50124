"""Function families, discrete orthonormal bases and basis transforms.

Polynomial families are linear scalable: a polynomial restricted to a
sub-domain is again a polynomial of the same degree.  Their estimation
functions are stored as coefficients in the orthonormal basis of the
segment's own domain, so norms and inner products reduce to operations on
``dim`` numbers.  The Gaussian family is the non-linear representative; it
keeps raw parameters ``(a, b, c, d)`` of ``a*exp(-(x-b)^2/(2c^2)) + d``.
"""
from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Domain, TimeSeries
from .errors import DegenerateBasisError, DomainError, FitError, UnsupportedOperationError


class Group(enum.IntEnum):
    """Family groups ordered by generality: LSF < VS < ANY."""

    LSF = 0
    VS = 1
    ANY = 2


@dataclass(frozen=True)
class FamilyDescriptor:
    id: str
    group: Group
    dim: int | None  # None for non-linear families
    n_params: int
    degree: int | None = None

    @property
    def is_linear(self) -> bool:
        return self.group <= Group.VS

    def usable_as(self, group: Group) -> bool:
        """True if formulas written for ``group`` apply to this family."""
        return self.group <= group

    def stored_numbers(self) -> int:
        """Numbers stored per segment: coefficients plus the error measures
        the guarantee formulas need for this group."""
        measures = {Group.LSF: 1, Group.VS: 2, Group.ANY: 3}[self.group]
        return self.n_params + measures

    def __str__(self):
        return self.id


def polynomial(degree: int) -> FamilyDescriptor:
    if degree < 0:
        raise ValueError("polynomial degree must be non-negative")
    return FamilyDescriptor(f"p{degree}", Group.LSF, degree + 1, degree + 1, degree)


GAUSSIAN = FamilyDescriptor("g", Group.ANY, None, 4)

FAMILIES = {f.id: f for f in (polynomial(0), polynomial(1), polynomial(2), GAUSSIAN)}


def get_family(token: str) -> FamilyDescriptor:
    fam = FAMILIES.get(token)
    if fam is not None:
        return fam
    m = re.fullmatch(r"p(\d+)", token)
    if m:
        return polynomial(int(m.group(1)))
    raise KeyError(f"unknown function family {token!r}")


def family_contains(outer: FamilyDescriptor, inner: FamilyDescriptor) -> bool:
    """Whether every function of ``inner`` also belongs to ``outer``."""
    if outer.id == inner.id:
        return True
    if outer.degree is not None and inner.degree is not None:
        return inner.degree <= outer.degree
    return False


# ---------------------------------------------------------------------------
# Orthonormal bases


def basis_matrix(length: int, dim: int) -> np.ndarray:
    """Rows are the orthonormal basis vectors on ``0..length-1``."""
    # Modified Gram-Schmidt, with one re-orthogonalisation pass, on centred
    # and scaled monomials.
    if dim < 1 or dim > length:
        raise DegenerateBasisError(f"cannot build a {dim}-dimensional basis on {length} points")
    x = np.arange(length, dtype=np.float64)
    half = max((length - 1) / 2.0, 1.0)
    u = (x - (length - 1) / 2.0) / half
    out = np.empty((dim, length))
    for k in range(dim):
        v = u**k if k else np.ones(length)
        for _ in range(2):
            for j in range(k):
                v = v - np.dot(out[j], v) * out[j]
        nrm = np.linalg.norm(v)
        if nrm <= 1e-12 * math.sqrt(length):
            raise DegenerateBasisError(f"monomial {k} is dependent on {length} points")
        out[k] = v / nrm
    return out


@functools.lru_cache(maxsize=256)
def _basis_matrix(length: int, dim: int) -> np.ndarray:
    out = basis_matrix(length, dim)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    domain: Domain
    dim: int
    vectors: np.ndarray  # (dim, length)

    def at(self, i: int) -> np.ndarray:
        return self.vectors[:, i - self.domain.a]


def build_basis(domain: Domain, dim: int) -> OrthonormalBasis:
    """Orthonormal basis of polynomials of degree < ``dim`` on ``domain``.

    The basis depends only on the domain length, so a translated domain gets
    the translated basis.
    """
    return OrthonormalBasis(domain, dim, _basis_matrix(domain.length, dim))


# ---------------------------------------------------------------------------
# Fitted functions


@dataclass(frozen=True, eq=False)
class FittedFunction:
    family: FamilyDescriptor
    domain: Domain
    coeffs: np.ndarray | None = None
    params: np.ndarray | None = None

    def __post_init__(self):
        if (self.coeffs is None) == (self.params is None):
            raise ValueError("exactly one of coeffs or params must be given")
        arr = self.coeffs if self.coeffs is not None else self.params
        arr = np.array(arr, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs" if self.coeffs is not None else "params", arr)
        if self.coeffs is not None and len(arr) > self.domain.length:
            raise DegenerateBasisError("more coefficients than domain points")

    @property
    def dim(self) -> int:
        return len(self.coeffs) if self.coeffs is not None else len(self.params)

    @property
    def is_lsf(self) -> bool:
        return self.family.group == Group.LSF and self.coeffs is not None

    @property
    def stored(self) -> np.ndarray:
        return self.coeffs if self.coeffs is not None else self.params

    def values(self) -> np.ndarray:
        """Estimated values over the whole domain."""
        if self.coeffs is not None:
            return self.coeffs @ _basis_matrix(self.domain.length, self.dim)
        x = np.arange(self.domain.a, self.domain.b + 1, dtype=np.float64)
        return gaussian(x, self.params)

    def values_on(self, sub: Domain) -> np.ndarray:
        if not self.domain.contains(sub):
            raise DomainError(f"{sub} is not inside {self.domain}")
        if self.coeffs is not None:
            off = sub.a - self.domain.a
            basis = _basis_matrix(self.domain.length, self.dim)
            return self.coeffs @ basis[:, off : off + sub.length]
        x = np.arange(sub.a, sub.b + 1, dtype=np.float64)
        return gaussian(x, self.params)

    def __call__(self, i: int) -> float:
        return evaluate(self, i)

    def norm(self) -> float:
        if self.coeffs is not None:
            return float(np.linalg.norm(self.coeffs))
        return float(np.linalg.norm(self.values()))

    def shifted(self, k: int) -> "FittedFunction":
        """The same function translated by ``k`` positions."""
        dom = self.domain.shift(k)
        if self.coeffs is not None:
            return FittedFunction(self.family, dom, coeffs=self.coeffs)
        a, b, c, d = self.params
        return FittedFunction(self.family, dom, params=np.array([a, b + k, c, d]))

    def power_coefficients(self) -> np.ndarray:
        """Coefficients in the monomial basis of the global position, highest
        degree first (``numpy.polyval`` order)."""
        if self.coeffs is None:
            raise UnsupportedOperationError("power coefficients exist only for polynomial families")
        x = np.arange(self.domain.a, self.domain.b + 1, dtype=np.float64)
        deg = self.dim - 1
        return np.polyfit(x, self.values(), deg) if deg > 0 else np.array([self.values()[0]])


def gaussian(x, params) -> np.ndarray:
    a, b, c, d = params
    return a * np.exp(-((np.asarray(x, dtype=np.float64) - b) ** 2) / (2.0 * c * c)) + d


def evaluate(f: FittedFunction, i: int) -> float:
    if i not in f.domain:
        raise DomainError(f"position {i} outside {f.domain}")
    if f.coeffs is not None:
        basis = _basis_matrix(f.domain.length, f.dim)
        return float(f.coeffs @ basis[:, i - f.domain.a])
    return float(gaussian(float(i), f.params))


def fit(family: FamilyDescriptor, seg: TimeSeries) -> FittedFunction:
    """Least-squares estimation function of ``seg`` within ``family``."""
    n = seg.domain.length
    if family.is_linear:
        dim = min(family.dim, n)
        coeffs = _basis_matrix(n, dim) @ seg.values
        return FittedFunction(family, seg.domain, coeffs=coeffs)
    if family.id == "g":
        local, sse = fit_gaussian_local(seg.values)
        a, b, c, d = local
        params = np.array([a, b + seg.domain.a, abs(c), d])
        return FittedFunction(family, seg.domain, params=params)
    raise UnsupportedOperationError(f"no fitting routine for family {family.id}")


GAUSS_MAX_ITER = 200
GAUSS_TOL = 1e-10


def gaussian_starts(y: np.ndarray) -> list[np.ndarray]:
    """Initial guesses: peak at the maximum, trough at the minimum, and a
    centred bump, each with width ``len/4``."""
    n = len(y)
    width = max(n / 4.0, 0.5)
    med = float(np.median(y))
    i_max, i_min = int(np.argmax(y)), int(np.argmin(y))
    starts = [
        np.array([y[i_max] - med, float(i_max), width, med]),
        np.array([y[i_min] - med, float(i_min), width, med]),
        np.array([y[i_max] - y[i_min], (n - 1) / 2.0, width, float(y[i_min])]),
    ]
    return starts


def fit_gaussian_local(y: np.ndarray, start: np.ndarray | None = None):
    """Fit a Gaussian to ``y`` sampled at ``0..n-1``; returns (params, sse).

    Runs damped Gauss-Newton from every start and keeps the best result.
    A caller-supplied ``start`` (a warm start) is tried first.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = len(y)
    mean = float(np.mean(y))
    if n == 1 or np.ptp(y) == 0.0:
        return np.array([0.0, (n - 1) / 2.0, max(n / 4.0, 0.5), mean]), 0.0
    x = np.arange(n, dtype=np.float64)
    best = np.array([0.0, (n - 1) / 2.0, max(n / 4.0, 0.5), mean])
    best_sse = float(np.sum((y - mean) ** 2))
    starts = gaussian_starts(y)
    if start is not None:
        starts.insert(0, np.asarray(start, dtype=np.float64))
    diagnostics = []
    for p0 in starts:
        p, sse, iters = kernels.gauss_lm(x, y, p0, GAUSS_MAX_ITER, GAUSS_TOL)
        diagnostics.append((p0.tolist(), float(sse), int(iters)))
        if np.all(np.isfinite(p)) and math.isfinite(sse) and sse < best_sse:
            best, best_sse = np.array(p), float(sse)
    if not math.isfinite(best_sse):
        raise FitError("Gaussian fit diverged from every start", {"starts": diagnostics})
    best[2] = abs(best[2])
    return best, best_sse


# ---------------------------------------------------------------------------
# Basis transforms


@dataclass(frozen=True, eq=False)
class BasisTransform:
    src: Domain
    sub: Domain
    psi: np.ndarray  # (dim_src, dim_sub)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        """Sub-domain coefficients of the function with ``coeffs`` on src."""
        return np.asarray(coeffs) @ self.psi[: len(coeffs)]


@functools.lru_cache(maxsize=4096)
def _psi_cached(src_len: int, offset: int, sub_len: int, dim: int) -> np.ndarray:
    src = _basis_matrix(src_len, dim)
    sub = _basis_matrix(sub_len, min(dim, sub_len))
    m = src[:, offset : offset + sub_len] @ sub.T
    m.setflags(write=False)
    return m


def psi_matrix(src: Domain, sub: Domain, dim: int) -> np.ndarray:
    if not src.contains(sub):
        raise DomainError(f"{sub} is not contained in {src}")
    return _psi_cached(src.length, sub.a - src.a, sub.length, dim)


def psi(basis_src: OrthonormalBasis, basis_sub: OrthonormalBasis) -> BasisTransform:
    """Transform taking coefficients on ``basis_src.domain`` to coefficients
    of the restricted function in the orthonormal basis of the sub-domain."""
    if not basis_src.domain.contains(basis_sub.domain):
        raise DomainError(f"{basis_sub.domain} is not contained in {basis_src.domain}")
    if basis_sub.dim != min(basis_src.dim, basis_sub.domain.length):
        raise DegenerateBasisError("source and sub-domain bases have different dimensions")
    m = psi_matrix(basis_src.domain, basis_sub.domain, basis_src.dim)
    return BasisTransform(basis_src.domain, basis_sub.domain, m)


def restricted_coeffs(f: FittedFunction, sub: Domain) -> np.ndarray:
    """Coefficients of ``f`` restricted to ``sub`` in sub's orthonormal basis."""
    if not f.is_lsf:
        raise UnsupportedOperationError(
            f"family {f.family.id} is not linear scalable; its restriction may leave the family"
        )
    if not f.domain.contains(sub):
        raise DomainError(f"{sub} is not contained in {f.domain}")
    if sub == f.domain:
        return f.coeffs
    return f.coeffs @ psi_matrix(f.domain, sub, f.dim)


def restrict_function(f: FittedFunction, sub: Domain) -> FittedFunction:
    return FittedFunction(f.family, sub, coeffs=restricted_coeffs(f, sub))


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    if len(v) == n:
        return v
    out = np.zeros(n)
    out[: len(v)] = v
    return out


def diff_norm_on_subdomain(f_outer: FittedFunction, f_inner: FittedFunction, sub: Domain) -> float:
    """L2 norm over ``sub`` of ``f_outer - f_inner``, in coefficient space."""
    c1 = restricted_coeffs(f_outer, sub)
    c2 = restricted_coeffs(f_inner, sub)
    n = max(len(c1), len(c2))
    return float(np.linalg.norm(_pad(c1, n) - _pad(c2, n)))

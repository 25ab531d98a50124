# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, fabs, isfinite, copysign
from libc.stdlib cimport malloc, free

cnp.import_array()

IMPLEMENTATION = "cython"


cdef inline double _clamp_width(double c) noexcept nogil:
    if fabs(c) < 1e-3:
        return copysign(1e-3, c) if c != 0.0 else 1e-3
    return c


cdef double _gauss_sse(const double[::1] x, const double[::1] y, double* p,
                       double* e, double* z, double* r) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double s = 0.0, zi, ei
    for i in range(n):
        zi = (x[i] - p[1]) / p[2]
        ei = exp(-0.5 * zi * zi)
        z[i] = zi
        e[i] = ei
        r[i] = y[i] - (p[0] * ei + p[3])
        s += r[i] * r[i]
    return s


cdef int _solve4(double* a, double* b, double* out) noexcept nogil:
    # a is 4x4 row-major, augmented in place; returns 0 if singular
    cdef double m[4][5]
    cdef int i, j, k, piv
    cdef double best, fac, tmp, s
    for i in range(4):
        for j in range(4):
            m[i][j] = a[i * 4 + j]
        m[i][4] = b[i]
    for j in range(4):
        piv = j
        best = fabs(m[j][j])
        for i in range(j + 1, 4):
            if fabs(m[i][j]) > best:
                best = fabs(m[i][j])
                piv = i
        if m[piv][j] == 0.0:
            return 0
        if piv != j:
            for k in range(5):
                tmp = m[j][k]
                m[j][k] = m[piv][k]
                m[piv][k] = tmp
        for i in range(j + 1, 4):
            fac = m[i][j] / m[j][j]
            for k in range(j, 5):
                m[i][k] -= fac * m[j][k]
    for i in range(3, -1, -1):
        s = m[i][4]
        for k in range(i + 1, 4):
            s -= m[i][k] * out[k]
        out[i] = s / m[i][i]
    return 1


def gauss_lm(x, y, p0, int max_iter=200, double tol=1e-10):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    cdef double p[4]
    cdef double cand[4]
    cdef double h[16]
    cdef double g[4]
    cdef double diag[4]
    cdef double amat[16]
    cdef double step[4]
    cdef double j0, j1, j2, lam = 1e-3, sse, sse_c, old, floor, dmax
    cdef int it = 0, tries, accepted, a_i, b_i
    cdef double* e = <double*>malloc(n * sizeof(double))
    cdef double* z = <double*>malloc(n * sizeof(double))
    cdef double* r = <double*>malloc(n * sizeof(double))
    cdef double* ec = <double*>malloc(n * sizeof(double))
    cdef double* zc = <double*>malloc(n * sizeof(double))
    cdef double* rc = <double*>malloc(n * sizeof(double))
    cdef double* tmp
    cdef double jrow[4]
    if e == NULL or z == NULL or r == NULL or ec == NULL or zc == NULL or rc == NULL:
        free(e); free(z); free(r); free(ec); free(zc); free(rc)
        raise MemoryError()
    for i in range(4):
        p[i] = float(p0[i])
    p[2] = _clamp_width(p[2])
    try:
        with nogil:
            sse = _gauss_sse(xv, yv, p, e, z, r)
            for it in range(1, max_iter + 1):
                for a_i in range(16):
                    h[a_i] = 0.0
                for a_i in range(4):
                    g[a_i] = 0.0
                for i in range(n):
                    jrow[0] = e[i]
                    jrow[1] = p[0] * e[i] * z[i] / p[2]
                    jrow[2] = p[0] * e[i] * z[i] * z[i] / p[2]
                    jrow[3] = 1.0
                    for a_i in range(4):
                        g[a_i] += jrow[a_i] * r[i]
                        for b_i in range(4):
                            h[a_i * 4 + b_i] += jrow[a_i] * jrow[b_i]
                dmax = 0.0
                for a_i in range(4):
                    diag[a_i] = h[a_i * 5]
                    if diag[a_i] > dmax:
                        dmax = diag[a_i]
                floor = 1e-12 * (dmax if dmax > 1e-300 else 1e-300)
                for a_i in range(4):
                    if diag[a_i] < floor:
                        diag[a_i] = floor
                accepted = 0
                for tries in range(12):
                    for a_i in range(16):
                        amat[a_i] = h[a_i]
                    for a_i in range(4):
                        amat[a_i * 5] += lam * diag[a_i]
                    if not _solve4(amat, g, step):
                        lam *= 4.0
                        continue
                    for a_i in range(4):
                        cand[a_i] = p[a_i] + step[a_i]
                    cand[2] = _clamp_width(cand[2])
                    sse_c = _gauss_sse(xv, yv, cand, ec, zc, rc)
                    if isfinite(sse_c) and sse_c < sse:
                        accepted = 1
                        break
                    lam *= 4.0
                if not accepted:
                    break
                old = sse
                for a_i in range(4):
                    p[a_i] = cand[a_i]
                tmp = e; e = ec; ec = tmp
                tmp = z; z = zc; zc = tmp
                tmp = r; r = rc; rc = tmp
                sse = sse_c
                lam = lam / 3.0
                if lam < 1e-12:
                    lam = 1e-12
                if old - sse <= tol * old or sse == 0.0:
                    break
    finally:
        free(e); free(z); free(r); free(ec); free(zc); free(rc)
    return np.array([p[0], p[1], p[2], p[3]]), sse, it


def os_partition(ends1, fes1, ends2, fes2):
    cdef cnp.int64_t[::1] e1 = np.ascontiguousarray(ends1, dtype=np.int64)
    cdef cnp.int64_t[::1] e2 = np.ascontiguousarray(ends2, dtype=np.int64)
    cdef double[::1] f1 = np.ascontiguousarray(fes1, dtype=np.float64)
    cdef double[::1] f2 = np.ascontiguousarray(fes2, dtype=np.float64)
    cdef Py_ssize_t k1 = e1.shape[0], k2 = e2.shape[0]
    cdef Py_ssize_t nc, i, j, k, a, b, block, bestj
    cdef double[::1] p1 = np.zeros(k1 + 1)
    cdef double[::1] p2 = np.zeros(k2 + 1)
    for i in range(k1):
        p1[i + 1] = p1[i] + f1[i] * f1[i]
    for i in range(k2):
        p2[i + 1] = p2[i] + f2[i] * f2[i]
    # merge the two sorted end lists
    cdef cnp.int64_t[::1] cuts = np.empty(k1 + k2, dtype=np.int64)
    cdef cnp.int64_t[::1] c1 = np.empty(k1 + k2, dtype=np.int64)
    cdef cnp.int64_t[::1] c2 = np.empty(k1 + k2, dtype=np.int64)
    cdef char[::1] common = np.zeros(k1 + k2, dtype=np.int8)
    a = 0
    b = 0
    nc = 0
    while a < k1 or b < k2:
        if b >= k2 or (a < k1 and e1[a] < e2[b]):
            cuts[nc] = e1[a]; c1[nc] = a; c2[nc] = b
            a += 1
        elif a >= k1 or e2[b] < e1[a]:
            cuts[nc] = e2[b]; c1[nc] = a; c2[nc] = b
            b += 1
        else:
            cuts[nc] = e1[a]; c1[nc] = a; c2[nc] = b; common[nc] = 1
            a += 1
            b += 1
        nc += 1
    # start indices of a window opening right after cut k-1
    cdef cnp.int64_t[::1] s1 = np.zeros(nc + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] s2 = np.zeros(nc + 1, dtype=np.int64)
    for k in range(1, nc + 1):
        s1[k] = c1[k - 1] + 1 if e1[c1[k - 1]] == cuts[k - 1] else c1[k - 1]
        s2[k] = c2[k - 1] + 1 if e2[c2[k - 1]] == cuts[k - 1] else c2[k - 1]
    cdef double[::1] dp = np.zeros(nc + 1)
    cdef cnp.int64_t[::1] back = np.zeros(nc + 1, dtype=np.int64)
    cdef double best, cost, sa, sb
    block = 0
    with nogil:
        for k in range(1, nc + 1):
            best = 1e308
            bestj = block
            for j in range(block, k):
                sa = p1[c1[k - 1] + 1] - p1[s1[j]]
                sb = p2[c2[k - 1] + 1] - p2[s2[j]]
                if sa < 0.0:
                    sa = 0.0
                if sb < 0.0:
                    sb = 0.0
                cost = dp[j] + sqrt(sa) * sqrt(sb)
                if cost <= best:
                    best = cost
                    bestj = j
            dp[k] = best
            back[k] = bestj
            if common[k - 1]:
                block = k
    out = []
    k = nc
    while k > 0:
        out.append(int(cuts[k - 1]))
        k = back[k]
    out.reverse()
    return out, float(dp[nc])


cdef double _poly_fes(const double[::1] y, Py_ssize_t s, Py_ssize_t m, int dim,
                      double* basis, double* r) noexcept nogil:
    # residual norm of the projection of y[s:s+m] onto polynomials of degree
    # < dim, via modified Gram-Schmidt on centred, scaled monomials
    cdef int d = dim if dim < m else <int>m
    cdef Py_ssize_t i
    cdef int k, j, rep
    cdef double half = (m - 1) / 2.0, mid = (m - 1) / 2.0, u, dot, nrm, c, acc
    if half < 1.0:
        half = 1.0
    for k in range(d):
        for i in range(m):
            u = (i - mid) / half
            acc = 1.0
            for j in range(k):
                acc *= u
            basis[k * m + i] = acc
        for rep in range(2):
            for j in range(k):
                dot = 0.0
                for i in range(m):
                    dot += basis[j * m + i] * basis[k * m + i]
                for i in range(m):
                    basis[k * m + i] -= dot * basis[j * m + i]
        nrm = 0.0
        for i in range(m):
            nrm += basis[k * m + i] * basis[k * m + i]
        nrm = sqrt(nrm)
        for i in range(m):
            basis[k * m + i] /= nrm
    for i in range(m):
        r[i] = y[s + i]
    for k in range(d):
        c = 0.0
        for i in range(m):
            c += basis[k * m + i] * y[s + i]
        for i in range(m):
            r[i] -= c * basis[k * m + i]
    acc = 0.0
    for i in range(m):
        acc += r[i] * r[i]
    return sqrt(acc)


def sw_poly(values, int dim, double tau, Py_ssize_t max_len=0):
    cdef const double[::1] y = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0], s = 0, e
    cdef double* basis = <double*>malloc((n * dim + 1) * sizeof(double))
    cdef double* r = <double*>malloc((n + 1) * sizeof(double))
    ends = []
    if basis == NULL or r == NULL:
        free(basis); free(r)
        raise MemoryError()
    try:
        while s < n:
            e = s + 1
            with nogil:
                while e < n and (max_len <= 0 or e - s < max_len):
                    if _poly_fes(y, s, e + 1 - s, dim, basis, r) <= tau:
                        e += 1
                    else:
                        break
            ends.append(e)
            s = e
    finally:
        free(basis)
        free(r)
    return ends

"""Pure-Python implementations of the hot kernels.

These are the fallback when the compiled ``_ckernels`` extension is not
available, and the reference the compiled versions are tested against.
Every function here has an identically named counterpart in
``_ckernels.pyx``.
"""
import math

import numpy as np

IMPLEMENTATION = "python"


# ---------------------------------------------------------------------------
# Damped Gauss-Newton for a*exp(-(x-b)^2/(2c^2)) + d


def _gauss_eval(x, p):
    a, b, c, d = p
    z = (x - b) / c
    e = np.exp(-0.5 * z * z)
    return a * e + d, e, z


def gauss_lm(x, y, p0, max_iter=200, tol=1e-10):
    """Levenberg-Marquardt fit of a Gaussian bump; returns (params, sse, iters)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p = np.array(p0, dtype=np.float64)
    if abs(p[2]) < 1e-3:
        p[2] = 1e-3
    f, e, z = _gauss_eval(x, p)
    r = y - f
    sse = float(r @ r)
    lam = 1e-3
    it = 0
    for it in range(1, max_iter + 1):
        a, c = p[0], p[2]
        jac = np.empty((len(x), 4))
        jac[:, 0] = e
        jac[:, 1] = a * e * z / c
        jac[:, 2] = a * e * z * z / c
        jac[:, 3] = 1.0
        h = jac.T @ jac
        g = jac.T @ r
        diag = np.diag(h).copy()
        floor = 1e-12 * max(float(diag.max()), 1e-300)
        diag = np.maximum(diag, floor)
        accepted = False
        for _ in range(12):
            a_mat = h + lam * np.diag(diag)
            try:
                step = _solve4(a_mat, g)
            except ZeroDivisionError:
                lam *= 4.0
                continue
            cand = p + step
            if abs(cand[2]) < 1e-3:
                cand[2] = math.copysign(1e-3, cand[2]) if cand[2] != 0 else 1e-3
            fc, ec, zc = _gauss_eval(x, cand)
            rc = y - fc
            sse_c = float(rc @ rc)
            if math.isfinite(sse_c) and sse_c < sse:
                accepted = True
                break
            lam *= 4.0
        if not accepted:
            break
        old = sse
        p, e, z, r, sse = cand, ec, zc, rc, sse_c
        lam = max(lam / 3.0, 1e-12)
        if old - sse <= tol * old or sse == 0.0:
            break
    return p, sse, it


def _solve4(a, b):
    # Gaussian elimination with partial pivoting; mirrors the compiled kernel.
    n = len(b)
    m = [list(map(float, a[i])) + [float(b[i])] for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if m[piv][col] == 0.0:
            raise ZeroDivisionError("singular system")
        m[col], m[piv] = m[piv], m[col]
        for r in range(col + 1, n):
            fac = m[r][col] / m[col][col]
            for k in range(col, n + 1):
                m[r][k] -= fac * m[col][k]
    out = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = m[r][n]
        for k in range(r + 1, n):
            s -= m[r][k] * out[k]
        out[r] = s / m[r][r]
    return np.array(out)


# ---------------------------------------------------------------------------
# Optimal window partition for the residual cross term


def os_partition(ends1, fes1, ends2, fes2):
    """Minimum-cost partition of the overlap of two segmentations.

    ``ends1``/``ends2`` are the (clipped) segment end positions of each
    series, sorted and sharing the same last value; ``fes1``/``fes2`` the
    matching residual norms.  The window ``[s, e]`` costs
    ``sqrt(sum fes1^2 over its cover) * sqrt(sum fes2^2 over its cover)``.
    Returns ``(window_ends, total_cost)``.
    """
    ends1 = np.asarray(ends1, dtype=np.int64)
    ends2 = np.asarray(ends2, dtype=np.int64)
    p1 = np.concatenate(([0.0], np.cumsum(np.asarray(fes1, dtype=np.float64) ** 2)))
    p2 = np.concatenate(([0.0], np.cumsum(np.asarray(fes2, dtype=np.float64) ** 2)))
    cuts = np.union1d(ends1, ends2)
    nc = len(cuts)
    # index of the segment containing each cut, and the one after it
    c1 = np.searchsorted(ends1, cuts, side="left")
    c2 = np.searchsorted(ends2, cuts, side="left")
    common = np.isin(cuts, ends1) & np.isin(cuts, ends2)
    dp = np.zeros(nc + 1)
    back = np.zeros(nc + 1, dtype=np.int64)
    # dp[k]: best cost for windows ending exactly at cuts[k-1]; dp[0] is the
    # empty prefix.  start1[k]/start2[k]: first segment index of a window
    # starting right after cuts[k-1].
    start1 = np.concatenate(([0], np.searchsorted(ends1, cuts + 1, side="left")))
    start2 = np.concatenate(([0], np.searchsorted(ends2, cuts + 1, side="left")))
    block = 0  # windows never need to straddle a boundary shared by both series
    for k in range(1, nc + 1):
        prev = np.arange(block, k)
        s1 = p1[c1[k - 1] + 1] - p1[start1[prev]]
        s2 = p2[c2[k - 1] + 1] - p2[start2[prev]]
        cost = dp[prev] + np.sqrt(np.maximum(s1, 0.0)) * np.sqrt(np.maximum(s2, 0.0))
        # ties go to the latest start, closing windows as early as possible
        j = len(cost) - 1 - int(np.argmin(cost[::-1]))
        dp[k] = cost[j]
        back[k] = prev[j]
        if common[k - 1]:
            block = k
    out = []
    k = nc
    while k > 0:
        out.append(int(cuts[k - 1]))
        k = back[k]
    out.reverse()
    return out, float(dp[nc])


# ---------------------------------------------------------------------------
# Sliding-window segmentation for polynomial families


def _poly_fes(y, dim):
    from .families import basis_matrix

    m = len(y)
    d = min(dim, m)
    basis = basis_matrix(m, d)
    r = y - (basis @ y) @ basis
    return math.sqrt(float(r @ r))


def sw_poly(values, dim, tau, max_len=0):
    """Greedy sliding-window segmentation; returns exclusive end indices.

    A window grows while the least-squares residual norm of the polynomial
    fit stays within ``tau``.
    """
    y = np.asarray(values, dtype=np.float64)
    n = len(y)
    ends = []
    s = 0
    while s < n:
        e = s + 1
        while e < n and (max_len <= 0 or e - s < max_len):
            if _poly_fes(y[s : e + 1], dim) <= tau:
                e += 1
            else:
                break
        ends.append(e)
        s = e
    return ends

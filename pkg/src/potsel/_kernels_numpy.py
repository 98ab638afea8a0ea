"""Vectorized numpy versions of the compiled kernels.

Same signatures and status codes as ``_kernels_numba``; results agree to
floating-point summation order.
"""

import math

import numpy as np

GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)
N_SIDE = 64
Z_CLAMP = 1e-12


def theta_grid(y):
    n = y.size
    ymax = y[-1]
    ybar = y.mean()
    ref = float(np.median(y))
    if ref <= 0.0:
        ref = ybar
    vmax = max(1e3, 10.0 * ref / ybar)
    half = N_SIDE // 2
    near_edge = -(1.0 - np.exp(np.linspace(math.log(1e-8), math.log(0.5), half))) / ymax
    near_zero = -np.exp(np.linspace(math.log(0.45), math.log(1e-6), half)) / ymax
    right = np.exp(np.linspace(math.log(1e-6), math.log(vmax), N_SIDE)) / ref
    return np.concatenate([near_edge, near_zero, [0.0], right])


def profile_loglik(y, theta):
    return float(profile_loglik_grid(y, np.array([theta]))[0])


def profile_loglik_grid(y, thetas):
    n = y.size
    thetas = np.asarray(thetas, dtype=float)
    u = np.multiply.outer(thetas, y)
    ok = np.all(u > -1.0, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.log1p(np.where(ok[:, None], u, 0.0)).sum(axis=1)
        ratio = s / (n * thetas)
        out = -n - n * np.log(ratio) - s
    ybar = y.mean()
    zero = thetas == 0.0
    out[zero] = -n - n * math.log(ybar) if ybar > 0 else -np.inf
    out[~ok | (~zero & ~(ratio > 0))] = -np.inf
    return out


def golden_max(y, a, b, rtol):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = profile_loglik(y, c)
    fd = profile_loglik(y, d)
    for _ in range(300):
        if b - a <= rtol * max(abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = profile_loglik(y, c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = profile_loglik(y, d)
    return (c, fc) if fc >= fd else (d, fd)


def profile_score(y, theta):
    u = theta * y
    s = np.log1p(u).sum()
    ds = (y / (1.0 + u)).sum()
    return y.size / theta - (y.size / s + 1.0) * ds


def polish(y, t):
    # bisect the score: its root is pinned far tighter than the flat maximum
    if t == 0.0 or abs(t) * y[-1] < 1e-6:
        return t
    d = 1e-6 * abs(t)
    found = False
    while d < 0.05 * abs(t):
        lo, hi = t - d, t + d
        if lo * y[-1] <= -1.0:
            return t
        if profile_score(y, lo) > 0.0 and profile_score(y, hi) < 0.0:
            found = True
            break
        d *= 4.0
    if not found:
        return t
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if profile_score(y, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def params_from_theta(y, theta):
    if theta == 0.0:
        return 0.0, float(y.mean())
    s = float(np.log1p(theta * y).sum())
    return s / y.size, s / (y.size * theta)


def fit_profile(y, rtol=1e-10):
    n = y.size
    if n == 0 or not y[-1] > 0.0:
        return 2, np.nan, np.nan, np.nan, np.nan
    grid = theta_grid(y)
    vals = profile_loglik_grid(y, grid)
    mid = vals[1:-1]
    peaks = np.flatnonzero(np.isfinite(mid) & (mid >= vals[:-2]) & (mid >= vals[2:])) + 1
    best_t, best_v = np.nan, -np.inf
    for k in peaks:
        t, v = golden_max(y, grid[k - 1], grid[k + 1], rtol)
        if v < vals[k]:
            t, v = grid[k], vals[k]
        if v > best_v:
            best_t, best_v = t, v
    if not np.isfinite(best_v):
        return 1, np.nan, np.nan, np.nan, np.nan
    t = polish(y, best_t)
    v = profile_loglik(y, t)
    if v >= best_v - 1e-12 * abs(best_v):
        best_t, best_v = t, v
    gamma, sigma = params_from_theta(y, best_t)
    return 0, float(best_t), gamma, sigma, float(best_v)


def ad_statistic(z):
    n = z.size
    zc = np.clip(z, Z_CLAMP, 1.0 - Z_CLAMP)
    w = 2.0 * np.arange(1, n + 1) - 1.0
    return float(-n - np.sum(w * (np.log(zc) + np.log1p(-zc[::-1]))) / n)


def gpd_pit(y, sigma, gamma):
    t = y / sigma
    if abs(gamma) < 1e-12:
        return -np.expm1(-t)
    u = gamma * t
    with np.errstate(invalid="ignore", divide="ignore"):
        z = -np.expm1(-np.log1p(u) / gamma)
    return np.where(u <= -1.0, 1.0, z)


def fit_ad_candidates(x_sorted, thresholds, min_exceed):
    m = thresholds.size
    status = np.zeros(m, dtype=np.int64)
    nexc = np.zeros(m, dtype=np.int64)
    theta, gamma, sigma, loglik, a2 = (np.full(m, np.nan) for _ in range(5))
    starts = np.searchsorted(x_sorted, thresholds)
    for j in range(m):
        y = x_sorted[starts[j]:] - thresholds[j]
        nexc[j] = y.size
        if y.size < min_exceed:
            status[j] = 3
            continue
        st, t, g, s, ll = fit_profile(y)
        status[j] = st
        if st != 0:
            continue
        theta[j], gamma[j], sigma[j], loglik[j] = t, g, s, ll
        a2[j] = ad_statistic(gpd_pit(y, s, g))
    return status, nexc, theta, gamma, sigma, loglik, a2

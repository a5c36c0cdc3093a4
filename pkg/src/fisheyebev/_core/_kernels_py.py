"""Pure-numpy twin of the compiled angle-distortion kernels.

Used when the extension module is unavailable, and directly by the
backend-comparison benchmark. Contracts are identical to ``_kernels``.
"""

import numpy as np


def distort_angles(theta, k1, k2, k3, k4):
    t = np.asarray(theta, dtype=np.float64)
    t2 = t * t
    return t * (1.0 + t2 * (k1 + t2 * (k2 + t2 * (k3 + t2 * k4))))


def invert_distortion_bisect(theta_d, k1, k2, k3, k4, theta_hi, tol):
    target = np.asarray(theta_d, dtype=np.float64)
    lo = np.zeros_like(target)
    hi = np.full_like(target, theta_hi)
    # fixed iteration count equivalent to the scalar while-loop exit condition
    n_iter = max(1, int(np.ceil(np.log2(theta_hi / tol))))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = distort_angles(mid, k1, k2, k3, k4) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def table_lookup(x, xs, ys):
    x = np.asarray(x, dtype=np.float64)
    idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
    x0 = xs[idx]
    x1 = xs[idx + 1]
    return ys[idx] + (ys[idx + 1] - ys[idx]) * (x - x0) / (x1 - x0)

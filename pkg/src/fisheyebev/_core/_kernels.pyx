# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the angle-distortion hot path.

Scalar loops over contiguous float64 buffers; the pure-Python twin in
``_kernels_py`` implements the same contracts with vectorized numpy.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _poly(double t, double k1, double k2, double k3, double k4) nogil:
    cdef double t2 = t * t
    return t * (1.0 + t2 * (k1 + t2 * (k2 + t2 * (k3 + t2 * k4))))


def distort_angles(double[::1] theta, double k1, double k2, double k3, double k4):
    """theta_d = theta * (1 + k1 t^2 + k2 t^4 + k3 t^6 + k4 t^8), elementwise."""
    cdef Py_ssize_t i, n = theta.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _poly(theta[i], k1, k2, k3, k4)
    return out


def invert_distortion_bisect(double[::1] theta_d, double k1, double k2,
                             double k3, double k4, double theta_hi, double tol):
    """Root of the distortion polynomial on [0, theta_hi] by bisection.

    The map must be strictly increasing on the bracket; callers check that
    once at table-build time.
    """
    cdef Py_ssize_t i, n = theta_d.shape[0]
    cdef double lo, hi, mid, target
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            target = theta_d[i]
            lo = 0.0
            hi = theta_hi
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _poly(mid, k1, k2, k3, k4) < target:
                    lo = mid
                else:
                    hi = mid
            o[i] = 0.5 * (lo + hi)
    return out


def table_lookup(double[::1] x, double[::1] xs, double[::1] ys):
    """Piecewise-linear interpolation on a strictly increasing grid.

    Inputs must already be range-checked; endpoints are handled exactly.
    """
    cdef Py_ssize_t i, lo, hi, mid, n = x.shape[0], m = xs.shape[0]
    cdef double xi, x0, x1
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            xi = x[i]
            lo = 0
            hi = m - 1
            while hi - lo > 1:
                mid = (lo + hi) >> 1
                if xs[mid] <= xi:
                    lo = mid
                else:
                    hi = mid
            x0 = xs[lo]
            x1 = xs[hi]
            o[i] = ys[lo] + (ys[hi] - ys[lo]) * (xi - x0) / (x1 - x0)
    return out

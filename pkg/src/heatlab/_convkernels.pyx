# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: direct Gaussian convolution sums.

Both routines accumulate in a fixed left-to-right order so results are
reproducible bit-for-bit across runs (and match the numpy fallback to
rounding, not bit-exactly).
"""

from libc.math cimport exp


def toeplitz_matvec(const double[::1] kern, const double[::1] u, double[::1] out):
    """out[i] = sum_j kern[i - j + n - 1] * u[j] for a length-(2n-1) kernel."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc
    if kern.shape[0] != 2 * n - 1 or out.shape[0] != n:
        raise ValueError("toeplitz_matvec: shape mismatch")
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += kern[i - j + n - 1] * u[j]
        out[i] = acc


def gauss_conv_points(const double[::1] pts, const double[::1] src, const double[::1] u0h,
                      double inv4at, double norm, double[::1] out):
    """out[p] = norm * sum_j u0h[j] * exp(-(pts[p] - src[j])**2 * inv4at)."""
    cdef Py_ssize_t npts = pts.shape[0]
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t p, j
    cdef double acc, d
    if u0h.shape[0] != n or out.shape[0] != npts:
        raise ValueError("gauss_conv_points: shape mismatch")
    for p in range(npts):
        acc = 0.0
        for j in range(n):
            d = pts[p] - src[j]
            acc += u0h[j] * exp(-d * d * inv4at)
        out[p] = acc * norm

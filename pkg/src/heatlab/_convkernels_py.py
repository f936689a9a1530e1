"""Numpy fallback for the compiled convolution core.

Same call signatures as the Cython module.  Work is blocked so peak memory
stays below ~32 MB regardless of problem size.
"""

import numpy as np

_BLOCK = 512


def toeplitz_matvec(kern, u, out):
    """out[i] = sum_j kern[i - j + n - 1] * u[j]."""
    n = u.shape[0]
    if kern.shape[0] != 2 * n - 1 or out.shape[0] != n:
        raise ValueError("toeplitz_matvec: shape mismatch")
    rev = kern[::-1]
    for i0 in range(0, n, _BLOCK):
        i1 = min(i0 + _BLOCK, n)
        # rows i: kern[i - j + n - 1] = rev[j - i + n - 1], j = 0..n-1
        block = np.stack([rev[n - 1 - i:2 * n - 1 - i] for i in range(i0, i1)])
        out[i0:i1] = block @ u
    return out


def gauss_conv_points(pts, src, u0h, inv4at, norm, out):
    """out[p] = norm * sum_j u0h[j] * exp(-(pts[p] - src[j])**2 * inv4at)."""
    npts = pts.shape[0]
    if u0h.shape[0] != src.shape[0] or out.shape[0] != npts:
        raise ValueError("gauss_conv_points: shape mismatch")
    for p0 in range(0, npts, _BLOCK):
        p1 = min(p0 + _BLOCK, npts)
        d = pts[p0:p1, None] - src[None, :]
        np.square(d, out=d)
        d *= -inv4at
        np.exp(d, out=d)
        out[p0:p1] = norm * (d @ u0h)
    return out

# cython: language_level=3
"""Compiled hot kernels; keep in lockstep with ``_kernels_py``.

Accumulation per output element runs over taps in ascending order, matching
the numpy fallback so the two backends agree to rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def dwt_rows(const double[:, ::1] x, const double[::1] h, const double[::1] g):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    if n % 2:
        raise ValueError("dwt_rows needs an even number of columns")
    cdef Py_ssize_t half = n // 2, taps = h.shape[0]
    lo_arr = np.zeros((m, half))
    hi_arr = np.zeros((m, half))
    cdef double[:, ::1] lo = lo_arr
    cdef double[:, ::1] hi = hi_arr
    cdef Py_ssize_t i, k, t, col
    cdef double xv
    for i in range(m):
        for k in range(half):
            for t in range(taps):
                col = (2 * k + t) % n
                xv = x[i, col]
                lo[i, k] += h[t] * xv
                hi[i, k] += g[t] * xv
    return lo_arr, hi_arr


def idwt_rows(const double[:, ::1] lo, const double[:, ::1] hi,
              const double[::1] h, const double[::1] g):
    cdef Py_ssize_t m = lo.shape[0], half = lo.shape[1]
    cdef Py_ssize_t n = 2 * half, taps = h.shape[0]
    y_arr = np.empty((m, n))
    cdef double[:, ::1] y = y_arr
    cdef Py_ssize_t i, col, t, src
    cdef double acc
    for i in range(m):
        for col in range(n):
            acc = 0.0
            for t in range(col % 2, taps, 2):
                # (col - t) is even; exact division then periodic wrap
                src = (col - t) // 2
                src %= half
                if src < 0:
                    src += half
                acc += h[t] * lo[i, src]
                acc += g[t] * hi[i, src]
            y[i, col] = acc
    return y_arr


def atrous_rows(const double[:, ::1] x, const double[::1] f, Py_ssize_t step):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1], taps = f.shape[0]
    y_arr = np.zeros((m, n))
    cdef double[:, ::1] y = y_arr
    cdef Py_ssize_t i, col, t, src
    for i in range(m):
        for col in range(n):
            for t in range(taps):
                src = (col + t * step) % n
                y[i, col] += f[t] * x[i, src]
    return y_arr


def window_moments(const double[:, ::1] grid, const long[::1] ys, const long[::1] xs,
                   Py_ssize_t win_h, Py_ssize_t win_w):
    cdef Py_ssize_t ny = ys.shape[0], nx = xs.shape[0]
    skew_arr = np.empty(ny * nx)
    kurt_arr = np.empty(ny * nx)
    cdef double[::1] skew = skew_arr
    cdef double[::1] kurt = kurt_arr
    cdef Py_ssize_t iy, ix, y0, x0, r, c, out = 0
    cdef double total, mean, d, s2, s3, s4, sigma, count
    count = <double> (win_h * win_w)
    for iy in range(ny):
        for ix in range(nx):
            y0 = ys[iy]
            x0 = xs[ix]
            total = 0.0
            for r in range(win_h):
                for c in range(win_w):
                    total += grid[y0 + r, x0 + c]
            mean = total / count
            s2 = 0.0
            s3 = 0.0
            s4 = 0.0
            for r in range(win_h):
                for c in range(win_w):
                    d = grid[y0 + r, x0 + c] - mean
                    s2 += d * d
                    s3 += d * d * d
                    s4 += d * d * d * d
            sigma = sqrt(s2 / (count - 1.0))
            if sigma == 0.0:
                skew[out] = 0.0
                kurt[out] = 0.0
            else:
                skew[out] = s3 / ((count - 1.0) * (sigma * sigma * sigma))
                kurt[out] = s4 / ((count - 1.0)
                                  * (sigma * sigma * sigma * sigma)) - 3.0
            out += 1
    return skew_arr, kurt_arr


def label_components(const cnp.uint8_t[:, ::1] mask):
    cdef Py_ssize_t height = mask.shape[0], width = mask.shape[1]
    labels_arr = np.zeros((height, width), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    stack_arr = np.empty(height * width, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t i, j, top, y, x, ny, nx, dy, dx
    cdef int current = 0
    for i in range(height):
        for j in range(width):
            if mask[i, j] == 0 or labels[i, j] != 0:
                continue
            current += 1
            labels[i, j] = current
            top = 0
            stack[top] = i * width + j
            top += 1
            while top:
                top -= 1
                y = stack[top] // width
                x = stack[top] % width
                for dy in range(-1, 2):
                    for dx in range(-1, 2):
                        if dy == 0 and dx == 0:
                            continue
                        ny = y + dy
                        nx = x + dx
                        if 0 <= ny < height and 0 <= nx < width \
                                and mask[ny, nx] != 0 and labels[ny, nx] == 0:
                            labels[ny, nx] = current
                            stack[top] = ny * width + nx
                            top += 1
    return labels_arr, current

"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` exactly; the compiled module is preferred when
present (see ``_backend``).  All functions take and return float64 arrays and
use one accumulation per filter tap in ascending tap order so both backends
agree to rounding error.
"""

import numpy as np


def dwt_rows(x, h, g):
    """One decimated analysis step along rows (periodic boundary).

    x must have an even number of columns.  Returns (lo, hi), each of width
    x.shape[1] // 2, where lo[i, k] = sum_t h[t] * x[i, (2k + t) mod n].
    """
    m, n = x.shape
    if n % 2:
        raise ValueError("dwt_rows needs an even number of columns")
    half = n // 2
    lo = np.zeros((m, half))
    hi = np.zeros((m, half))
    base = np.arange(0, n, 2)
    for t in range(len(h)):
        cols = (base + t) % n
        xv = x[:, cols]
        lo += h[t] * xv
        hi += g[t] * xv
    return lo, hi


def idwt_rows(lo, hi, h, g):
    """Adjoint of dwt_rows: reconstruct rows of width 2 * lo.shape[1]."""
    m, half = lo.shape
    n = 2 * half
    y = np.empty((m, n))
    taps = len(h)
    for parity in (0, 1):
        cols = np.arange(parity, n, 2)
        acc = np.zeros((m, cols.size))
        for t in range(parity, taps, 2):
            idx = ((cols - t) // 2) % half
            acc += h[t] * lo[:, idx]
            acc += g[t] * hi[:, idx]
        y[:, cols] = acc
    return y


def atrous_rows(x, f, step):
    """Undecimated correlation along rows with taps spaced ``step`` apart."""
    m, n = x.shape
    y = np.zeros((m, n))
    base = np.arange(n)
    for t in range(len(f)):
        cols = (base + t * step) % n
        y += f[t] * x[:, cols]
    return y


def _moments(values):
    """Skewness and excess kurtosis of a flat array, N-1 denominators."""
    n = values.size
    mean = values.sum() / n
    d = values - mean
    m2 = (d * d).sum()
    sigma = np.sqrt(m2 / (n - 1))
    if sigma == 0.0:
        return 0.0, 0.0
    skew = (d ** 3).sum() / ((n - 1) * (sigma * sigma * sigma))
    kurt = (d ** 4).sum() / ((n - 1) * (sigma * sigma * sigma * sigma)) - 3.0
    return skew, kurt


def window_moments(grid, ys, xs, win_h, win_w):
    """Skewness/kurtosis for every (y0, x0) window origin pair.

    Output arrays are ordered row-major over (ys, xs).
    """
    count = len(ys) * len(xs)
    skew = np.empty(count)
    kurt = np.empty(count)
    i = 0
    for y0 in ys:
        for x0 in xs:
            w = grid[y0:y0 + win_h, x0:x0 + win_w].ravel()
            skew[i], kurt[i] = _moments(w)
            i += 1
    return skew, kurt


_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, -1),
              (0, 1), (1, -1), (1, 0), (1, 1))


def label_components(mask):
    """8-connected labeling; ids follow raster-scan discovery order.

    Returns (labels, count) with 0 marking background.
    """
    height, width = mask.shape
    labels = np.zeros((height, width), dtype=np.int32)
    current = 0
    for i in range(height):
        row_hits = np.flatnonzero((mask[i] != 0) & (labels[i] == 0))
        for j in row_hits:
            if labels[i, j]:
                continue
            current += 1
            stack = [(i, int(j))]
            labels[i, j] = current
            while stack:
                y, x = stack.pop()
                for dy, dx in _NEIGHBORS:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < height and 0 <= nx < width \
                            and mask[ny, nx] != 0 and labels[ny, nx] == 0:
                        labels[ny, nx] = current
                        stack.append((ny, nx))
    return labels, current

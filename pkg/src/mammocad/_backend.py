"""Selects the kernel backend at import time.

The compiled extension (``mammocad._kernels``) is used when importable;
otherwise the numpy fallback takes over.  The environment variable
MAMMOCAD_KERNELS forces a choice:

    MAMMOCAD_KERNELS=python   always use the numpy kernels
    MAMMOCAD_KERNELS=cython   require the compiled kernels (ImportError if absent)
    MAMMOCAD_KERNELS=auto     default behaviour

Both backends implement the same contracts and agree to rounding error;
``tests/test_kernels.py`` checks the parity whenever both are importable.
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_choice = os.environ.get("MAMMOCAD_KERNELS", "auto").strip().lower()
if _choice in ("", "auto"):
    _impl = _compiled if _compiled is not None else _kernels_py
elif _choice in ("py", "python"):
    _impl = _kernels_py
elif _choice in ("c", "cy", "cython", "compiled"):
    if _compiled is None:
        raise ImportError(
            "MAMMOCAD_KERNELS=%s but the compiled extension is not built"
            % _choice)
    _impl = _compiled
else:
    raise ValueError("unrecognized MAMMOCAD_KERNELS value: %r" % _choice)

BACKEND = "cython" if _impl is _compiled else "python"


def _c2d(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _c1d(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def dwt_rows(x, h, g):
    return _impl.dwt_rows(_c2d(x), _c1d(h), _c1d(g))


def idwt_rows(lo, hi, h, g):
    return _impl.idwt_rows(_c2d(lo), _c2d(hi), _c1d(h), _c1d(g))


def atrous_rows(x, f, step):
    return _impl.atrous_rows(_c2d(x), _c1d(f), int(step))


def window_moments(grid, ys, xs, win_h, win_w):
    ys = np.ascontiguousarray(ys, dtype=np.int64)
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    return _impl.window_moments(_c2d(grid), ys, xs, int(win_h), int(win_w))


def label_components(mask):
    mask = np.ascontiguousarray(mask, dtype=np.uint8)
    return _impl.label_components(mask)

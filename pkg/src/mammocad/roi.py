"""Windowed higher-order statistics and the region-of-interest gate.

Skewness and excess kurtosis (both with N-1 denominators and the sample
standard deviation) are computed over overlapping square windows of the
stationary-transform detail grids; a window whose statistics exceed both
thresholds on either orientation marks all of its pixels as ROI.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend as kernels
from .errors import StructureError
from .image_io import GrayImage


@dataclass(frozen=True)
class RoiConfig:
    skew_threshold: float = 0.2
    kurt_threshold: float = 4.0
    window: int = 32
    stride: int = 16

    def __post_init__(self):
        if not (np.isfinite(self.skew_threshold)
                and np.isfinite(self.kurt_threshold)):
            raise ValueError("thresholds must be finite")
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if not (1 <= self.stride <= self.window):
            raise ValueError("stride must be in [1, window]")


@dataclass(eq=False)
class RoiMask:
    """Boolean per-pixel grid; ``fired`` counts window origins that passed."""

    flags: np.ndarray
    window: int
    stride: int
    fired: int = 0

    @property
    def width(self):
        return self.flags.shape[1]

    @property
    def height(self):
        return self.flags.shape[0]


def _samples_1d(samples):
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size < 2:
        raise ValueError("need at least 2 samples")
    return arr


def skewness(samples):
    """Third standardized moment, N-1 form; 0 when the deviation is 0."""
    x = _samples_1d(samples)
    n = x.size
    d = x - x.sum() / n
    sigma = np.sqrt((d * d).sum() / (n - 1))
    if sigma == 0.0:
        return 0.0
    return float((d ** 3).sum() / ((n - 1) * (sigma * sigma * sigma)))


def kurtosis(samples):
    """Fourth standardized moment minus 3, N-1 form; 0 when deviation is 0."""
    x = _samples_1d(samples)
    n = x.size
    d = x - x.sum() / n
    sigma = np.sqrt((d * d).sum() / (n - 1))
    if sigma == 0.0:
        return 0.0
    return float((d ** 4).sum() / ((n - 1) * (sigma * sigma * sigma * sigma))
                 - 3.0)


def window_origins(length, window, stride):
    """Origins covering [0, length) fully; the last one clamps to the border."""
    xs = list(range(0, length - window + 1, stride))
    if xs[-1] != length - window:
        xs.append(length - window)
    return xs


def roi_mask(detail_h, detail_v, config=None):
    """Union ROI over the two detail orientations.

    A window fires when skewness > skew_threshold AND kurtosis >
    kurt_threshold on either grid; every pixel of a firing window becomes
    ROI.  Windows larger than the grid are clamped to the grid.
    """
    config = config or RoiConfig()
    dh = np.asarray(detail_h, dtype=np.float64)
    dv = np.asarray(detail_v, dtype=np.float64)
    if dh.shape != dv.shape:
        raise StructureError(
            "detail grids differ: %s vs %s" % (dh.shape, dv.shape))
    height, width = dh.shape
    win_h = min(config.window, height)
    win_w = min(config.window, width)
    ys = np.array(window_origins(height, win_h, config.stride))
    xs = np.array(window_origins(width, win_w, config.stride))
    fired = np.zeros(ys.size * xs.size, dtype=bool)
    for grid in (dh, dv):
        skew, kurt = kernels.window_moments(grid, ys, xs, win_h, win_w)
        fired |= (skew > config.skew_threshold) & (kurt > config.kurt_threshold)
    flags = np.zeros((height, width), dtype=bool)
    fired2d = fired.reshape(ys.size, xs.size)
    for iy, y0 in enumerate(ys):
        for ix, x0 in enumerate(xs):
            if fired2d[iy, ix]:
                flags[y0:y0 + win_h, x0:x0 + win_w] = True
    return RoiMask(flags, config.window, config.stride, int(fired.sum()))


def mask_image(mask):
    """0/255 rendering of the mask for PGM dumps."""
    return GrayImage(np.where(mask.flags, 255.0, 0.0), 8)

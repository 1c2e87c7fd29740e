"""2D Daubechies-4 wavelet transforms and detail-coefficient enhancement.

Conventions (fixed, shared by the decimated and stationary transforms):

* Analysis is correlation followed by downsampling: at level input length N
  (even), ``lo[k] = sum_t h[t] * x[(2k + t) mod N]``, likewise ``hi`` with the
  high-pass taps.  Synthesis is the adjoint operator, so the same tap
  sequences serve both directions and the transform is orthonormal on the
  periodic grid.
* Boundaries are periodic.  Odd-length axes are edge-replicated by one sample
  before a decimated level; the per-level input shapes are stored in the
  pyramid and the inverse trims the duplicate row/column, which keeps
  reconstruction exact and subband sizes at ceil(previous/2).
* Each decimated level filters vertically (columns) first, then horizontally
  (rows).  Band naming: ``lh`` is low-pass vertical / high-pass horizontal
  (responds to horizontally varying structure, i.e. vertical edges), ``hl``
  the converse, ``hh`` high-pass in both axes.
* The stationary transform uses the a-trous scheme: level j applies the same
  taps spaced 2^(j-1) samples apart, no downsampling, periodic wrap; its
  level-1 subbands equal the decimated level-1 subbands sampled on the even
  grid.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend as kernels
from .errors import StructureError
from .image_io import DEFAULT_PIXEL_PITCH_MM, GrayImage, normalize, save_pgm

DEFAULT_GAIN = 1.2


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Analysis/synthesis tap sequences of a two-channel orthonormal bank.

    Synthesis applies the same taps through the adjoint (upsample-then-
    convolve) operator, hence synthesis_low == analysis_low here.
    """

    analysis_low: np.ndarray
    analysis_high: np.ndarray
    synthesis_low: np.ndarray
    synthesis_high: np.ndarray


def _make_daubechies4():
    s3 = math.sqrt(3.0)
    scale = 4.0 * math.sqrt(2.0)
    h = np.array([1.0 + s3, 3.0 + s3, 3.0 - s3, 1.0 - s3]) / scale
    # quadrature mirror: g[n] = (-1)^n h[L-1-n]; this sign choice gives the
    # high-pass a negative second moment so bright blobs produce
    # positive-centered detail responses
    g = np.array([h[3], -h[2], h[1], -h[0]])
    h.flags.writeable = False
    g.flags.writeable = False
    return FilterBank(h, g, h, g)


_DB4 = _make_daubechies4()


def daubechies4():
    """The Daubechies 4-tap filter bank (analysis low-pass sums to sqrt(2))."""
    return _DB4


@dataclass(eq=False)
class LevelBands:
    """Detail grids of one decomposition level (see module conventions)."""

    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def all(self):
        return (self.lh, self.hl, self.hh)


@dataclass(eq=False)
class SubbandPyramid:
    """Multi-level decomposition: detail bands per level plus final approx.

    ``original_size`` is (width, height) of the source image.  For decimated
    pyramids ``input_shapes[j]`` records the (height, width) fed to level
    j+1 before odd-axis padding, which the inverse consumes; stationary
    pyramids repeat the full shape.
    """

    levels: list
    approx: np.ndarray
    decimated: bool
    original_size: tuple
    input_shapes: list = field(default_factory=list)
    bit_depth: int = 8
    pixel_pitch_mm: float = DEFAULT_PIXEL_PITCH_MM


def _as_grid(image):
    """(array, bit_depth, pitch) from a GrayImage or bare 2D array."""
    if isinstance(image, GrayImage):
        return image.pixels, image.bit_depth, image.pixel_pitch_mm
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("image must be a non-empty 2D array")
    return arr, 8, DEFAULT_PIXEL_PITCH_MM


def _pad_even(a):
    if a.shape[0] % 2:
        a = np.concatenate([a, a[-1:, :]], axis=0)
    if a.shape[1] % 2:
        a = np.concatenate([a, a[:, -1:]], axis=1)
    return a


def _cols_analysis(a, h, g):
    lo_t, hi_t = kernels.dwt_rows(a.T, h, g)
    return lo_t.T, hi_t.T


def _cols_synthesis(lo, hi, h, g):
    return kernels.idwt_rows(lo.T, hi.T, h, g).T


def dwt2_forward(image, levels, bank=None):
    """Decimated 2D analysis; level sizes are ceil(previous/2) per axis."""
    bank = bank or _DB4
    a, bit_depth, pitch = _as_grid(image)
    height, width = a.shape
    max_levels = math.floor(math.log2(min(width, height)))
    if not (1 <= int(levels) <= max_levels):
        raise ValueError(
            "levels must be in [1, %d] for a %dx%d image, got %r"
            % (max_levels, width, height, levels))
    h = bank.analysis_low
    g = bank.analysis_high
    out_levels = []
    shapes = []
    for _ in range(int(levels)):
        shapes.append(a.shape)
        a = _pad_even(a)
        av, dv = _cols_analysis(a, h, g)          # vertical first
        a, lh = kernels.dwt_rows(av, h, g)        # then horizontal
        hl, hh = kernels.dwt_rows(dv, h, g)
        out_levels.append(LevelBands(lh=lh, hl=hl, hh=hh))
    return SubbandPyramid(out_levels, a, True, (width, height), shapes,
                          bit_depth, pitch)


def dwt2_inverse(pyramid, bank=None):
    """Inverse of dwt2_forward; exact up to rounding error."""
    bank = bank or _DB4
    if not pyramid.decimated:
        raise ValueError("dwt2_inverse needs a decimated pyramid")
    if len(pyramid.input_shapes) != len(pyramid.levels) or not pyramid.levels:
        raise StructureError("pyramid level/shape bookkeeping inconsistent")
    h = bank.synthesis_low
    g = bank.synthesis_high
    a = pyramid.approx
    for j in range(len(pyramid.levels) - 1, -1, -1):
        h0, w0 = pyramid.input_shapes[j]
        half = ((h0 + h0 % 2) // 2, (w0 + w0 % 2) // 2)
        bands = pyramid.levels[j]
        for grid in (a, bands.lh, bands.hl, bands.hh):
            if grid.shape != half:
                raise StructureError(
                    "level %d grid shape %s does not match expected %s"
                    % (j + 1, grid.shape, half))
        av = kernels.idwt_rows(a, bands.lh, h, g)      # horizontal synthesis
        dv = kernels.idwt_rows(bands.hl, bands.hh, h, g)
        a = _cols_synthesis(av, dv, h, g)              # then vertical
        a = a[:h0, :w0]
    expected = (pyramid.original_size[1], pyramid.original_size[0])
    if a.shape != expected:
        raise StructureError(
            "reconstructed shape %s != original %s" % (a.shape, expected))
    return GrayImage(a, pyramid.bit_depth, pyramid.pixel_pitch_mm)


def swt2_forward(image, levels, bank=None):
    """Stationary (undecimated, a-trous) 2D analysis; all grids keep size."""
    bank = bank or _DB4
    if int(levels) < 1:
        raise ValueError("levels must be >= 1")
    a, bit_depth, pitch = _as_grid(image)
    height, width = a.shape
    h = bank.analysis_low
    g = bank.analysis_high
    out_levels = []
    for j in range(1, int(levels) + 1):
        step = 2 ** (j - 1)
        av = kernels.atrous_rows(a.T, h, step).T       # vertical first
        dv = kernels.atrous_rows(a.T, g, step).T
        ll = kernels.atrous_rows(av, h, step)          # then horizontal
        lh = kernels.atrous_rows(av, g, step)
        hl = kernels.atrous_rows(dv, h, step)
        hh = kernels.atrous_rows(dv, g, step)
        out_levels.append(LevelBands(lh=lh, hl=hl, hh=hh))
        a = ll
    return SubbandPyramid(out_levels, a, False, (width, height),
                          [(height, width)] * int(levels), bit_depth, pitch)


def enhance(pyramid, gain=DEFAULT_GAIN, *, zero_approx=True):
    """Amplify strong detail coefficients; suppress the final approximation.

    Per detail subband, T is the population standard deviation of that
    subband's coefficients; coefficients with |c| >= T are multiplied by
    gain, the rest pass through.  The approximation grid is zeroed unless
    zero_approx is False (the enhancement-disabled path).  Returns a new
    pyramid; the input is not modified.
    """
    if not pyramid.decimated:
        raise ValueError("enhance needs a decimated pyramid")
    if not (gain > 0):
        raise ValueError("gain must be positive")
    new_levels = []
    for bands in pyramid.levels:
        out = []
        for grid in bands.all():
            t = grid.std()
            out.append(np.where(np.abs(grid) >= t, grid * gain, grid))
        new_levels.append(LevelBands(*out))
    approx = np.zeros_like(pyramid.approx) if zero_approx else pyramid.approx.copy()
    return SubbandPyramid(new_levels, approx, pyramid.decimated,
                          pyramid.original_size, list(pyramid.input_shapes),
                          pyramid.bit_depth, pyramid.pixel_pitch_mm)


def default_levels(width, height, cap=10):
    """min(cap, floor(log2(min dim))): full decomposition depth for 1024^2."""
    return min(cap, math.floor(math.log2(min(width, height))))


def enhance_image(image, levels=None, gain=DEFAULT_GAIN, bank=None, *,
                  zero_approx=True):
    """forward -> enhance -> inverse; output may contain negative values."""
    a, _, _ = _as_grid(image)
    if levels is None:
        levels = default_levels(a.shape[1], a.shape[0])
    pyramid = dwt2_forward(image, levels, bank)
    return dwt2_inverse(enhance(pyramid, gain, zero_approx=zero_approx), bank)


def dump_pyramid(pyramid, directory):
    """Debug dump: each subband normalized to 8-bit PGM files in a directory.

    Returns the list of written paths.
    """
    import os

    os.makedirs(directory, exist_ok=True)
    paths = []

    def _write(name, grid):
        img = normalize(GrayImage(grid, 8), 0, 255)
        path = os.path.join(directory, name + ".pgm")
        save_pgm(img, path)
        paths.append(path)

    for j, bands in enumerate(pyramid.levels, start=1):
        _write("level%02d_lh" % j, bands.lh)
        _write("level%02d_hl" % j, bands.hl)
        _write("level%02d_hh" % j, bands.hh)
    _write("approx", pyramid.approx)
    return paths

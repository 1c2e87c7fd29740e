"""Gradient edge extraction, thresholding, grouping, and ROI filtering.

Gradients use central differences inside the image and one-sided
differences on the border rows/columns.  Two magnitudes are provided: the
classic absolute sum |Gx| + |Gy| (fast, but up to 1.41x stronger on
diagonal edges than on axis-aligned ones) and the rotation-invariant
Euclidean form sqrt(Gx^2 + Gy^2), which the detection pipeline uses so
that circular rims cross one global threshold at every angle.  Edges are
binarized at mean + k*std of the magnitude, grouped by 8-connectivity, and
groups under 5 pixels are discarded.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend as kernels
from .errors import StructureError
from .image_io import GrayImage

MIN_GROUP_SIZE = 5


@dataclass(eq=False)
class EdgeGroup:
    """8-connected edge pixel set; points are (x, y) pairs in raster order."""

    id: int
    points: np.ndarray

    @property
    def size(self):
        return self.points.shape[0]

    def coords(self):
        """Points as a float (n, 2) array for shell fitting."""
        return self.points.astype(np.float64)


def gaussian_blur(image, sigma):
    """Separable Gaussian blur (reflect padding, kernel cut at 3 sigma).

    Used to pre-smooth the edge source so broadband noise does not flood
    the gradient threshold; sigma <= 0 returns the input unchanged.
    """
    a = image.pixels if isinstance(image, GrayImage) else \
        np.asarray(image, dtype=np.float64)
    if sigma <= 0:
        return a
    radius = int(math.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (t / sigma) ** 2)
    taps /= taps.sum()
    for axis in (0, 1):
        pad = [(0, 0), (0, 0)]
        pad[axis] = (radius, radius)
        padded = np.pad(a, pad, mode="reflect")
        out = np.zeros_like(a)
        for i, w in enumerate(taps):
            if axis == 0:
                out += w * padded[i:i + a.shape[0], :]
            else:
                out += w * padded[:, i:i + a.shape[1]]
        a = out
    return a


def _gradients(image):
    if isinstance(image, GrayImage):
        a = image.pixels
    else:
        a = np.asarray(image, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
        raise ValueError("gradient needs an image of at least 3x3")
    gx = np.empty_like(a)
    gx[:, 1:-1] = (a[:, 2:] - a[:, :-2]) * 0.5
    gx[:, 0] = a[:, 1] - a[:, 0]
    gx[:, -1] = a[:, -1] - a[:, -2]
    gy = np.empty_like(a)
    gy[1:-1, :] = (a[2:, :] - a[:-2, :]) * 0.5
    gy[0, :] = a[1, :] - a[0, :]
    gy[-1, :] = a[-1, :] - a[-2, :]
    return gx, gy


def gradient_magnitude(image):
    """|Gx| + |Gy| per pixel; needs at least a 3x3 image."""
    gx, gy = _gradients(image)
    return np.abs(gx) + np.abs(gy)


def isotropic_gradient_magnitude(image):
    """sqrt(Gx^2 + Gy^2) per pixel; needs at least a 3x3 image.

    Rotation-invariant, so a circular rim of uniform contrast reads the
    same strength at every angle and survives one global threshold as a
    closed ring instead of breaking into diagonal arcs.
    """
    gx, gy = _gradients(image)
    return np.hypot(gx, gy)


def edge_map(gradmag, k=2.0):
    """Boolean grid: gradmag > mean + k*std (population std, strict)."""
    gm = np.asarray(gradmag, dtype=np.float64)
    if not np.all(np.isfinite(gm)):
        raise ValueError("gradient magnitude must be finite")
    tau = gm.mean() + k * gm.std()
    return gm > tau


def _groups_from_labels(labels, count):
    if count == 0:
        return []
    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    order = np.argsort(lab, kind="stable")  # stable keeps raster order
    ys = ys[order]
    xs = xs[order]
    lab = lab[order]
    bounds = np.searchsorted(lab, np.arange(1, count + 2))
    groups = []
    next_id = 1
    for i in range(count):
        lo, hi = bounds[i], bounds[i + 1]
        if hi - lo < MIN_GROUP_SIZE:
            continue
        pts = np.column_stack([xs[lo:hi], ys[lo:hi]]).astype(np.int64)
        groups.append(EdgeGroup(next_id, pts))
        next_id += 1
    return groups


def connected_groups(edges):
    """8-connected components of the true pixels, pruned below 5 pixels.

    Surviving groups are renumbered 1.. in raster-scan discovery order.
    """
    mask = np.asarray(edges, dtype=bool)
    labels, count = kernels.label_components(mask.astype(np.uint8))
    return _groups_from_labels(labels, count)


def restrict_to_roi(groups, mask):
    """Keep only mask-true points, then re-label and re-apply the size rule.

    Filtering can split a group, so connectivity is rebuilt from the kept
    points before the 5-pixel test.
    """
    flags = mask.flags
    height, width = flags.shape
    grid = np.zeros((height, width), dtype=np.uint8)
    for group in groups:
        xs = group.points[:, 0]
        ys = group.points[:, 1]
        if xs.min() < 0 or ys.min() < 0 \
                or xs.max() >= width or ys.max() >= height:
            raise StructureError("edge group exceeds mask dimensions")
        keep = flags[ys, xs]
        grid[ys[keep], xs[keep]] = 1
    labels, count = kernels.label_components(grid)
    return _groups_from_labels(labels, count)


def edge_image(edges):
    """0/255 rendering of an edge map for PGM dumps."""
    return GrayImage(np.where(np.asarray(edges, dtype=bool), 255.0, 0.0), 8)

"""Grayscale image container, PGM/PPM I/O, normalization, overlays.

Images are stored as float64 grids immediately on load so downstream stages
are quantization-free.  Only the netpbm formats are supported: PGM P2/P5 for
reading, PGM P5 and PPM P6 for writing.  Two-byte samples are big-endian per
the netpbm convention, which keeps fixtures portable across implementations.

Coordinates follow the (x, y) = (column, row) convention everywhere; arrays
are indexed [row, column].
"""

import numpy as np

from .errors import ImageFormatError, IntensityRangeError

DEFAULT_PIXEL_PITCH_MM = 0.0435

_WHITESPACE = (0x20, 0x09, 0x0A, 0x0B, 0x0C, 0x0D)


class GrayImage:
    """Real-valued 2D intensity grid with bit-depth and pixel-pitch metadata.

    The pixel array is frozen after construction; operations return new
    instances.  ``pixels`` has shape (height, width).
    """

    def __init__(self, pixels, bit_depth=8, pixel_pitch_mm=DEFAULT_PIXEL_PITCH_MM):
        arr = np.ascontiguousarray(pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("pixels must be a non-empty 2D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("intensities must be finite")
        if not (8 <= int(bit_depth) <= 16):
            raise ValueError("bit_depth must be in [8, 16]")
        if not (pixel_pitch_mm > 0):
            raise ValueError("pixel_pitch_mm must be positive")
        arr.flags.writeable = False
        self.pixels = arr
        self.bit_depth = int(bit_depth)
        self.pixel_pitch_mm = float(pixel_pitch_mm)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def data(self):
        """Row-major flat view of the intensities."""
        return self.pixels.reshape(-1)

    def __repr__(self):
        return "GrayImage(%dx%d, bit_depth=%d, pitch=%gmm)" % (
            self.width, self.height, self.bit_depth, self.pixel_pitch_mm)


def _skip_header_space(buf, pos):
    n = len(buf)
    while pos < n:
        c = buf[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#' comment runs to end of line
            while pos < n and buf[pos] not in (0x0A, 0x0D):
                pos += 1
        else:
            break
    return pos


def _header_token(buf, pos):
    pos = _skip_header_space(buf, pos)
    if pos >= len(buf):
        raise ImageFormatError("unexpected end of header at byte %d" % pos)
    start = pos
    while pos < len(buf) and buf[pos] not in _WHITESPACE and buf[pos] != 0x23:
        pos += 1
    return buf[start:pos], start, pos


def _header_int(buf, pos, what):
    token, start, pos = _header_token(buf, pos)
    try:
        value = int(token)
    except ValueError:
        raise ImageFormatError(
            "malformed %s at byte %d: %r" % (what, start, token)) from None
    if value < 0:
        raise ImageFormatError("negative %s at byte %d" % (what, start))
    return value, pos


def _bit_depth_for_maxval(maxval):
    return max(8, maxval.bit_length())


def load_pgm(path, pixel_pitch_mm=DEFAULT_PIXEL_PITCH_MM):
    """Read a P2 (ASCII) or P5 (binary) PGM file.

    Intensities are kept as read, not rescaled.  bit_depth is inferred from
    maxval (255 -> 8, 4095 -> 12, 65535 -> 16); maxval above 65535 is
    rejected.
    """
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, start, pos = _header_token(buf, 0)
    if magic not in (b"P2", b"P5"):
        raise ImageFormatError(
            "unsupported magic at byte %d: %r (want P2 or P5)" % (start, magic))
    width, pos = _header_int(buf, pos, "width")
    height, pos = _header_int(buf, pos, "height")
    maxval, pos = _header_int(buf, pos, "maxval")
    if width == 0 or height == 0:
        raise ImageFormatError("zero image dimension in header")
    if maxval == 0 or maxval > 65535:
        raise ImageFormatError("unsupported maxval %d (want 1..65535)" % maxval)
    count = width * height

    if magic == b"P5":
        if pos >= len(buf) or buf[pos] not in _WHITESPACE:
            raise ImageFormatError(
                "missing raster separator at byte %d" % pos)
        pos += 1
        dtype = ">u2" if maxval > 255 else np.uint8
        need = count * (2 if maxval > 255 else 1)
        raster = buf[pos:pos + need]
        if len(raster) < need:
            raise ImageFormatError(
                "raster truncated at byte %d: need %d bytes, have %d"
                % (pos, need, len(raster)))
        values = np.frombuffer(raster, dtype=dtype).astype(np.float64)
    else:
        tokens = buf[pos:].split()
        if len(tokens) < count:
            raise ImageFormatError(
                "P2 raster has %d values, expected %d" % (len(tokens), count))
        try:
            values = np.array([int(t) for t in tokens[:count]], dtype=np.float64)
        except ValueError as exc:
            raise ImageFormatError("malformed P2 raster value: %s" % exc) from None

    if values.max(initial=0.0) > maxval:
        raise ImageFormatError("raster value exceeds maxval %d" % maxval)
    pixels = values.reshape(height, width)
    return GrayImage(pixels, _bit_depth_for_maxval(maxval), pixel_pitch_mm)


def _quantize(image):
    """Round intensities and check them against the bit-depth range."""
    maxval = (1 << image.bit_depth) - 1
    rounded = np.rint(image.pixels)
    lo = rounded.min()
    hi = rounded.max()
    if lo < 0 or hi > maxval:
        raise IntensityRangeError(
            "intensities [%g, %g] outside [0, %d]; normalize first"
            % (lo, hi, maxval))
    return rounded, maxval


def save_pgm(image, path):
    """Write a binary (P5) PGM; maxval = 2^bit_depth - 1, big-endian 16-bit."""
    rounded, maxval = _quantize(image)
    arr = rounded.astype(">u2" if maxval > 255 else np.uint8)
    header = b"P5\n%d %d\n%d\n" % (image.width, image.height, maxval)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def normalize(image, lo, hi):
    """Affine rescale of [min, max] onto [lo, hi]; constant images map to lo."""
    if not (hi > lo):
        raise ValueError("normalize needs hi > lo")
    mn = image.pixels.min()
    mx = image.pixels.max()
    if mx == mn:
        out = np.full_like(image.pixels, lo)
    else:
        out = lo + (image.pixels - mn) / (mx - mn) * (hi - lo)
    return GrayImage(out, image.bit_depth, image.pixel_pitch_mm)


def circle_pixels(cx, cy, radius):
    """Integer midpoint rasterization of a circle, 1-pixel stroke.

    Returns the set of (x, y) pixels; no bounds clipping here.
    """
    if radius <= 0:
        return {(cx, cy)}
    pts = set()
    x = radius
    y = 0
    err = 1 - radius
    while x >= y:
        for px, py in ((x, y), (y, x), (-y, x), (-x, y),
                       (-x, -y), (-y, -x), (y, -x), (x, -y)):
            pts.add((cx + px, cy + py))
        y += 1
        if err < 0:
            err += 2 * y + 1
        else:
            x -= 1
            err += 2 * (y - x) + 1
    return pts


def render_overlay(image, detections, path):
    """Write a PPM overlay with detection circles drawn in red.

    Detections whose (rounded) center lies outside the image are skipped;
    the skipped count is returned.  Circle pixels falling outside the image
    are clipped.  With no detections the output is the grayscale raster
    replicated over three channels.
    """
    rounded, maxval = _quantize(image)
    dtype = ">u2" if maxval > 255 else np.uint8
    h, w = rounded.shape
    rgb = np.repeat(rounded.astype(dtype)[:, :, None], 3, axis=2)
    skipped = 0
    for det in detections:
        cx = int(round(det.center[0]))
        cy = int(round(det.center[1]))
        if not (0 <= cx < w and 0 <= cy < h):
            skipped += 1
            continue
        for px, py in circle_pixels(cx, cy, int(round(det.radius))):
            if 0 <= px < w and 0 <= py < h:
                rgb[py, px, 0] = maxval
                rgb[py, px, 1] = 0
                rgb[py, px, 2] = 0
    header = b"P6\n%d %d\n%d\n" % (w, h, maxval)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(rgb.tobytes())
    return skipped

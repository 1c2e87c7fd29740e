"""Shell validity measures and the nodule classification rule.

A fitted shell is accepted as a nodular detection when its cluster density
exceeds cd_threshold, its relative shell thickness stays under
rst_threshold, and the fitted radius converted to millimeters falls inside
the physical nodule radius gate.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError
from .shell_clustering import FcsConfig, shell_distances


@dataclass(frozen=True)
class ValidityConfig:
    cd_threshold: float = 1.15
    rst_threshold: float = 0.2
    min_radius_mm: float = 0.15
    max_radius_mm: float = 0.5
    characteristic_cutoff: float = 0.5

    def __post_init__(self):
        # cd_threshold 0 is allowed so FROC sweeps can reach the loosest
        # operating point (accept any positive density)
        if not (self.cd_threshold >= 0 and self.rst_threshold > 0):
            raise ValueError("thresholds must be positive (cd may be 0)")
        if not (0 < self.min_radius_mm < self.max_radius_mm):
            raise ValueError("need 0 < min_radius_mm < max_radius_mm")


@dataclass(frozen=True)
class Detection:
    """Classified candidate circle; accepted reflects the config's rule."""

    center: tuple
    radius: float
    cluster_density: float
    shell_thickness: float
    accepted: bool
    group_id: int


def cluster_density(fit, config=None):
    """Sum of memberships above the characteristic cutoff over 2*pi*r."""
    config = config or ValidityConfig()
    u = fit.memberships
    characteristic = u[u > config.characteristic_cutoff]
    return float(characteristic.sum()
                 / (2.0 * np.pi * fit.prototype.radius))


def relative_shell_thickness(fit, config=None):
    """Membership-weighted mean squared shell distance over the radius."""
    config = config or FcsConfig()
    um = fit.memberships ** config.m
    total = um.sum()
    if not total > 0.0:
        raise DegenerateFitError("zero membership mass")
    dsq = shell_distances(fit.points, fit.prototype) ** 2
    return float((um * dsq).sum() / (fit.prototype.radius * total))


def _decide(cd, rst, radius_px, config, pixel_pitch_mm):
    radius_mm = radius_px * pixel_pitch_mm
    return bool(cd > config.cd_threshold
                and rst < config.rst_threshold
                and config.min_radius_mm <= radius_mm <= config.max_radius_mm)


def classify(fit, config=None, pixel_pitch_mm=0.0435, fcs_config=None,
             group_id=0):
    """Detection from a fit: the cd/rst rule plus the physical radius gate."""
    config = config or ValidityConfig()
    cd = cluster_density(fit, config)
    rst = relative_shell_thickness(fit, fcs_config)
    accepted = _decide(cd, rst, fit.prototype.radius, config, pixel_pitch_mm)
    return Detection(fit.prototype.center, fit.prototype.radius, cd, rst,
                     accepted, group_id)


def reclassify(detection, config, pixel_pitch_mm=0.0435):
    """Re-apply the acceptance rule to a stored detection record.

    Used by FROC sweeps to re-threshold reports offline without refitting.
    """
    accepted = _decide(detection.cluster_density, detection.shell_thickness,
                       detection.radius, config, pixel_pitch_mm)
    return Detection(detection.center, detection.radius,
                     detection.cluster_density, detection.shell_thickness,
                     accepted, detection.group_id)

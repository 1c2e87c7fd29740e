"""Wavelet-enhanced nodular bright-spot detection with shell clustering.

Pipeline stages: dyadic wavelet enhancement, higher-order-statistics ROI
gating, gradient edge grouping, fuzzy shell fitting, validity
classification, plus a phantom generator and FROC evaluation harness.
"""

from ._backend import BACKEND as KERNEL_BACKEND
from .edges import EdgeGroup, connected_groups, edge_map, \
    gradient_magnitude, restrict_to_roi
from .evaluation import FrocPoint, Phantom, TruthMark, froc_curve, \
    generate_phantom, match_detections
from .image_io import GrayImage, load_pgm, normalize, render_overlay, \
    save_pgm
from .pipeline import DetectionReport, PipelineConfig, detect, read_report, \
    write_report
from .roi import RoiConfig, RoiMask, kurtosis, roi_mask, skewness
from .shell_clustering import FcsConfig, ShellFit, ShellPrototype, \
    fit_shell, seed_from_group, shell_distance, update_memberships, \
    update_prototype
from .validity import Detection, ValidityConfig, classify, cluster_density, \
    relative_shell_thickness
from .wavelet import FilterBank, SubbandPyramid, daubechies4, dwt2_forward, \
    dwt2_inverse, enhance, enhance_image, swt2_forward

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "GrayImage", "load_pgm", "save_pgm", "normalize", "render_overlay",
    "FilterBank", "SubbandPyramid", "daubechies4", "dwt2_forward",
    "dwt2_inverse", "swt2_forward", "enhance", "enhance_image",
    "RoiConfig", "RoiMask", "skewness", "kurtosis", "roi_mask",
    "EdgeGroup", "gradient_magnitude", "edge_map", "connected_groups",
    "restrict_to_roi",
    "FcsConfig", "ShellPrototype", "ShellFit", "shell_distance",
    "update_memberships", "update_prototype", "seed_from_group", "fit_shell",
    "Detection", "ValidityConfig", "cluster_density",
    "relative_shell_thickness", "classify",
    "PipelineConfig", "DetectionReport", "detect", "write_report",
    "read_report",
    "Phantom", "TruthMark", "FrocPoint", "generate_phantom",
    "match_detections", "froc_curve",
]

"""Exception types raised by the package.

Argument validation failures raise the standard ``ValueError``; the classes
here cover failures tied to input data or to numerical procedures.
"""


class MammocadError(Exception):
    """Base class for package-specific errors."""


class ImageFormatError(MammocadError):
    """Raised when an image file cannot be parsed or violates its header."""


class IntensityRangeError(MammocadError):
    """Raised when pixel values fall outside the representable range."""


class StructureError(MammocadError):
    """Raised when a composite object (pyramid, report) is inconsistent."""


class FitError(MammocadError):
    """Base class for shell-fitting failures."""


class UnderdeterminedFitError(FitError):
    """Raised when a point group is too small to constrain a circle."""


class DegenerateFitError(FitError):
    """Raised when the fitting iteration collapses numerically."""


class GenerationError(MammocadError):
    """Raised when phantom synthesis cannot satisfy placement constraints."""


class PipelineStageError(MammocadError):
    """Raised when a pipeline stage fails; names the stage."""

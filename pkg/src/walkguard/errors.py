"""Exception hierarchy shared across the package."""


class WalkguardError(Exception):
    """Base class for all package errors."""


class DimensionError(WalkguardError, ValueError):
    """Array shapes are incompatible with the requested operation."""


class ConfigError(WalkguardError, ValueError):
    """Invalid model or pipeline configuration."""


class DataError(WalkguardError, ValueError):
    """Dataset is empty, malformed, or inconsistent."""


class TrainingError(WalkguardError, RuntimeError):
    """Numeric failure during training (non-finite loss or gradient)."""


class NumericError(WalkguardError, ValueError):
    """Non-finite values where finite ones are required."""


class StateError(WalkguardError, RuntimeError):
    """Operation called in the wrong order (e.g. backward before forward)."""


class FormatError(WalkguardError, ValueError):
    """Malformed file content (PPM stream, model bundle, labels CSV)."""


class BundleVersionError(FormatError):
    """Model bundle written by a newer format version."""


class EvaluationError(WalkguardError, ValueError):
    """Metric is undefined for the given inputs (e.g. single-class AUC)."""

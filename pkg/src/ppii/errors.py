class PpiiError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(PpiiError):
    """An argument violates a precondition (bad shape, range, or geometry)."""


class CapExceeded(PpiiError):
    """Problem too large for the dense direct solver; use the DST backend."""


class DegenerateDistribution(PpiiError):
    """Mask distribution parameters are inconsistent with the patch size."""


class UndefinedMetric(PpiiError):
    """Metric has no defined value for this input (e.g. single-class labels)."""


class NoInputs(PpiiError):
    """Ingest matched no usable files."""

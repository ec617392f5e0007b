"""Exception types shared across the package.

Every error raised by the analysis core derives from IolensError so callers
(CLI, service) can distinguish domain failures from programming errors.
"""


class IolensError(Exception):
    """Base class for all iolens errors."""


class ParseError(IolensError):
    """A record could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class InvariantViolation(IolensError):
    """A structural constraint on a record or sequence does not hold."""

    def __init__(self, constraint: str, message: str = ""):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}" if message else constraint)


class EmptySequence(IolensError):
    """A stream contained no records."""


class LengthMismatch(IolensError):
    """Two lengths that must agree do not (RLE totals, paired vectors)."""


class EmptyMask(IolensError):
    """An operation that needs foreground pixels got an empty mask."""


class DimensionMismatch(IolensError):
    """Two masks or boxes have incompatible pixel dimensions."""


class NoOverlap(IolensError):
    """Two frame sequences share no common frame index."""


class ClipTruncated(IolensError):
    """Fewer frames remain than one full clip; the partial clip is dropped."""


class ArityError(IolensError):
    """Wrong number of values passed to a fixed-arity aggregation."""


class EmptySeries(IolensError):
    """A probability or area series contains no usable values."""


class NoImplantationDetected(IolensError):
    """No clip was labeled positive, so no implantation interval exists."""


class DegenerateVector(IolensError):
    """A direction vector has zero length (coincident points)."""


class TooFewPoints(IolensError):
    """Not enough points for the requested clustering."""


class TooFewSamples(IolensError):
    """Not enough samples for the requested statistic."""


class ZeroVariance(IolensError):
    """A statistic is undefined because the inputs have no spread."""


class NoOrientationAfterUnfold(IolensError):
    """No orientation sample exists at or after the unfolding time."""


class InvalidDof(IolensError):
    """Degrees of freedom must be >= 1."""


class NoGroundTruth(IolensError):
    """Average precision is undefined without ground-truth boxes."""


class SpecInvalid(IolensError):
    """A synthetic-video spec field is out of range; names the field."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class InsufficientBrands(IolensError):
    """A study needs at least two brands with usable videos."""


class PipelineStageError(IolensError):
    """Wraps any error raised inside run_video with the failing stage name."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}': {cause}")

"""Domain error types shared across the package."""


class FisheyeBevError(Exception):
    """Base class for all domain errors."""


class DomainError(FisheyeBevError):
    """An input is outside the mathematical domain of an operation."""


class BehindCamera(DomainError):
    """Point has non-positive depth along the optical axis."""


class FieldOfViewExceeded(DomainError):
    """Ray angle exceeds the pi/2 field-angle limit."""


class MonotonicityViolation(FisheyeBevError):
    """Distortion polynomial is not strictly increasing on [0, pi/2]."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(
            f"theta_d grid is non-increasing at grid index {index}; "
            "coefficient set rejected"
        )


class OutOfRange(DomainError):
    """A lookup or inversion argument falls outside the supported range."""


class CalibrationError(FisheyeBevError):
    """Calibration file is malformed or inconsistent."""


class FormatError(FisheyeBevError):
    """A serialized artifact (tensor container, interchange file) is invalid."""

"""Exception types raised across the package."""


class GrowthModelError(ValueError):
    """Base class for every error raised by ddgrowth."""


class InvalidParameterError(GrowthModelError):
    pass


class EmptyInputError(GrowthModelError):
    pass


class NormalizationError(GrowthModelError):
    pass


class ZeroMassDegreeError(GrowthModelError):
    """A degree inside the support carries no probability mass."""

    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(
            f"degree {degree} has zero probability mass; "
            "interpolate the distribution first (see `dist ingest`)"
        )


class InfeasibleRateError(GrowthModelError):
    pass


class InconsistentAttachmentError(GrowthModelError):
    pass


class DeadStartError(GrowthModelError):
    pass


class DomainError(GrowthModelError):
    pass


class SamplerExhaustedError(GrowthModelError):
    pass


class FitError(GrowthModelError):
    pass


class MissingRateError(GrowthModelError):
    pass


class FormatError(GrowthModelError):
    pass

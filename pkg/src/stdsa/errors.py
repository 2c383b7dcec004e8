"""Exception and warning types raised across the package."""


class StdsaError(ValueError):
    """Base class for every data or contract error raised by this package."""


class InvalidRecord(StdsaError):
    pass


class MissingColumn(StdsaError):
    pass


class ParseError(StdsaError):
    pass


class DuplicateRegion(StdsaError):
    pass


class UnknownRegion(StdsaError):
    pass


class PTooLarge(StdsaError):
    pass


class ConstantColumn(StdsaError):
    pass


class ZeroVariance(StdsaError):
    pass


class LengthMismatch(StdsaError):
    pass


class EmptyInput(StdsaError):
    pass


class DimensionMismatch(StdsaError):
    pass


class KTooLarge(StdsaError):
    pass


class CurveTooShort(StdsaError):
    pass


class DegenerateGeometry(StdsaError):
    pass


class PipelineError(StdsaError):
    """A module error annotated with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


class DegenerateIndicatorWarning(UserWarning):
    """An indicator is constant across the dataset and was mapped to 0."""


class ZeroVarianceWarning(UserWarning):
    """A region's values inside one dimension are constant; similarity set to 0."""


class CoincidentPointsWarning(UserWarning):
    pass

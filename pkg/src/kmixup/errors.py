"""Exception hierarchy shared by every kmixup module."""


class KMixupError(Exception):
    """Base class for all errors raised by kmixup."""


class ShapeError(KMixupError, ValueError):
    """Array sizes or dimensions are incompatible."""


class ParameterError(KMixupError, ValueError):
    """A scalar parameter is outside its admissible range."""


class DatasetTooSmallError(KMixupError, ValueError):
    """The dataset cannot supply two disjoint k-batches."""


class PreconditionError(KMixupError, ValueError):
    """A statistical statement's hypotheses do not hold for the inputs."""


class DegenerateDataError(KMixupError, ValueError):
    """Data is degenerate for the requested fit (e.g. log of zero)."""


class NumericError(KMixupError, ArithmeticError):
    """Non-finite values appeared during a computation."""


class CsvError(KMixupError, ValueError):
    """Base class for CSV parsing problems."""


class RaggedRowError(CsvError):
    pass


class NonNumericFeatureError(CsvError):
    pass


class EmptyDatasetError(CsvError):
    pass

class HeckeError(Exception):
    """Base class for computational errors (CLI exit code 1)."""


class DomainError(HeckeError, ValueError):
    pass


class BranchError(HeckeError, ValueError):
    pass


class ClassificationError(HeckeError, ValueError):
    pass


class AlphabetError(HeckeError, ValueError):
    pass


class ConvergenceError(HeckeError, ValueError):
    pass


class ChartError(HeckeError, ValueError):
    pass


class PoleError(HeckeError, ValueError):
    pass


class AccuracyError(HeckeError, ValueError):
    pass


class ResolutionError(HeckeError, ValueError):
    pass


class BoundaryNotice(HeckeError, ValueError):
    pass

"""Exception hierarchy shared by all modules."""


class RpsError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RpsError, ValueError):
    """An instance or game description is malformed."""


class BadPlayerCount(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class DuplicateMember(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class Overflow(ValidationError):
    """Weights too large to keep every sum inside a signed 64-bit integer."""


class EmptyCoalition(ValidationError):
    pass


class TooLarge(RpsError):
    """An exhaustive 2^n operation was requested above the enumeration limit."""


class FlowNotMaximal(RpsError):
    pass


class NotInCore(RpsError):
    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class NegativeAuxCapacity(RpsError):
    pass


class ReconstructionFailed(RpsError):
    pass


class NotSingletonInstance(ValidationError):
    pass


class NotConvex(ValidationError):
    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class NotThreePlayers(ValidationError):
    pass


class NonZeroSingletons(ValidationError):
    pass


class IntegralityRequired(ValidationError):
    pass


class NegativeResidual(RpsError):
    pass

"""Exception hierarchy shared by the numerical modules."""


class BlaschkeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BlaschkeError, ValueError):
    """Input outside the parameter domain of the family (|a_j| <= 1, bad kappa, ...)."""


class NotMultimodal(BlaschkeError):
    """The circle restriction does not have exactly 2m turning points."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class DegenerateCritical(BlaschkeError):
    """A zero of F' is (numerically) not simple."""


class SeedFailure(BlaschkeError):
    pass


class GapViolation(BlaschkeError):
    pass


class NotAlternating(BlaschkeError, ValueError):
    pass


class TargetOutsideV(BlaschkeError, ValueError):
    pass


class ContinuationStall(BlaschkeError):
    def __init__(self, message, s_reached=0.0):
        super().__init__(message)
        self.s_reached = s_reached


class TypeUnrealizable(BlaschkeError):
    pass


class DegenerateConfiguration(BlaschkeError):
    pass


class InvalidCombinatorics(BlaschkeError):
    pass


class BranchMismatch(BlaschkeError):
    pass


class NotConverged(BlaschkeError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class TraceLost(BlaschkeError):
    pass


class EndpointMismatch(BlaschkeError):
    pass

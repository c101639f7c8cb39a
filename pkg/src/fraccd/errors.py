"""Exception hierarchy shared by all fraccd modules."""


class FracCDError(ValueError):
    """Base class for all parameter and numerical errors raised by fraccd."""


class InvalidInterval(FracCDError):
    pass


class NonIntegrableTail(FracCDError):
    pass


class NonConvergent(FracCDError):
    pass


class SingularityTooStrong(FracCDError):
    pass


class GrowthTooFast(FracCDError):
    pass


class DomainError(FracCDError):
    pass


class SpecViolation(FracCDError):
    """Counterexample parameters violate the admissibility constraints."""


class NoViolationAtOrigin(FracCDError):
    pass

"""Exception hierarchy shared by all modules."""


class AlomariError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameters(AlomariError, ValueError):
    pass


class NonConvergence(AlomariError):
    """The adaptive integrator exhausted its panel budget."""


class OutOfDomain(AlomariError, ValueError):
    pass


class MissingDerivative(AlomariError):
    pass


class InconsistentCase(AlomariError, ValueError):
    """Rule parameters do not match the constraints of the requested case."""


class RootIsolationFailure(AlomariError):
    pass


class DomainViolation(AlomariError, ValueError):
    """A bound was requested outside the parameter range it is stated for."""


class MaxDegreeReached(AlomariError):
    """Every probed monomial vanished; rerun with a larger max_degree."""


class StepTooLarge(AlomariError, ValueError):
    pass

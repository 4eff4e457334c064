"""Exception hierarchy shared by all modules."""


class OpBellError(Exception):
    """Base class for every error raised by :mod:`opbell`."""


class NonSymmetric(OpBellError, ValueError):
    pass


class DimensionMismatch(OpBellError, ValueError):
    pass


class DomainViolation(OpBellError, ValueError):
    """An argument (or an eigenvalue) lies outside a function's domain."""


class NotPositiveDefinite(OpBellError, ValueError):
    pass


class NotPSD(OpBellError, ValueError):
    pass


class SignChange(OpBellError, ValueError):
    """``f`` vanishes or changes sign on ``[m, M]``, so the ratio chord/f is undefined."""


class DegenerateChord(OpBellError, ValueError):
    pass


class SingularOperator(OpBellError, ValueError):
    pass


class NoConvergence(OpBellError, RuntimeError):
    pass


class UnknownCheck(OpBellError, KeyError):
    pass


class InvalidConfig(OpBellError, ValueError):
    pass

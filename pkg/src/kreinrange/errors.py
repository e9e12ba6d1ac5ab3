"""Exception hierarchy shared by every kreinrange module."""


class KreinRangeError(Exception):
    """Base class for all errors raised by kreinrange."""


class InvalidDimension(KreinRangeError, ValueError):
    pass


class InvalidMetric(KreinRangeError, ValueError):
    """The metric is singular, not Hermitian, or otherwise unusable."""


class NotJHermitian(KreinRangeError, ValueError):
    pass


class EmptySignClass(KreinRangeError, ValueError):
    """No vector can have the requested J-norm sign (r = 0 or r = n)."""


class ClassificationError(KreinRangeError):
    """A classification rule could not be applied.

    ``certificate`` carries whatever was checked before the rule gave up,
    so callers can still report the inequality values.
    """

    def __init__(self, msg, certificate=None):
        super().__init__(msg)
        self.certificate = certificate


class NotBlockForm(ClassificationError):
    pass


class ZeroOffDiagonal(NotBlockForm):
    """Both off-diagonal blocks vanish; W^J is a pair of half-lines."""


class DegenerateAlphaBeta(NotBlockForm):
    pass


class NotNormal(ClassificationError):
    pass


class NotCommuting(ClassificationError):
    pass


class ConditionViolated(ClassificationError):
    pass


class NotApplicable(ClassificationError):
    pass


class EmptyOmega(KreinRangeError):
    """The pencil is never in class J on the sampled angle grid."""


class DocumentError(KreinRangeError, ValueError):
    """A matrix document could not be parsed or is inconsistent."""

"""Exception hierarchy.

Input problems derive from :class:`InputError` (also a ``ValueError``);
numerical failures derive from :class:`NumericalError` (also an
``ArithmeticError``).  The CLI maps the two families to exit codes 2 and 3.
"""


class MonomulError(Exception):
    """Base class for all package errors."""


class InputError(MonomulError, ValueError):
    pass


class NumericalError(MonomulError, ArithmeticError):
    pass


# series
class NonzeroConstantTerm(InputError):
    pass


class SingularLinearTerm(NumericalError):
    pass


class ZeroLinearTerm(NumericalError):
    pass


class BadBranch(InputError):
    pass


# measures
class OutOfDomain(InputError):
    pass


class PoleHit(NumericalError):
    pass


class RankMismatch(NumericalError):
    pass


class DomainViolation(NumericalError):
    pass


# convolution
class DomainEscape(NumericalError):
    pass


# operator model
class TruncationExceeded(InputError):
    pass


# semigroups
class DomainExit(NumericalError):
    pass


class StepLimitExceeded(DomainExit):
    pass


class SchemeDisagreement(NumericalError):
    pass


class ZeroFirstMoment(InputError):
    pass


class RecompositionFailure(NumericalError):
    pass

"""Exception hierarchy shared by every module."""


class WalkCodesError(Exception):
    """Base class for all library errors."""


class PreconditionError(WalkCodesError):
    """An input violates an operation's precondition (CLI exit code 2)."""


class CertificationError(WalkCodesError):
    """A certificate or bound check failed (CLI exit code 3)."""


class DecodingFailure(WalkCodesError):
    """A decoder could not produce a unique answer."""


# f2
class DimensionTooLarge(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class OutsideUniqueRadius(DecodingFailure):
    pass


class SearchExhausted(WalkCodesError):
    pass


# spectra / graphs
class TooLarge(PreconditionError):
    pass


class MissingMarginal(PreconditionError):
    pass


class NotClosedUnderInverse(PreconditionError):
    pass


class NotPowerOfTwo(PreconditionError):
    pass


class BiasCertificationFailed(CertificationError):
    pass


# product and walks
class IndexOutOfRange(PreconditionError):
    pass


class TooManyWalks(PreconditionError):
    pass


class WidthTooSmall(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class BoundViolated(CertificationError):
    pass


# lifting
class BadIndices(PreconditionError):
    pass


class BadResidue(PreconditionError):
    pass


class GroundSetTooLarge(PreconditionError):
    pass


# decoding
class LocalityTooSmall(PreconditionError):
    pass


class PremiseViolated(CertificationError):
    pass


class DegreeTooHigh(PreconditionError):
    pass


class EmptyList(DecodingFailure):
    pass


# parameters
class BadAlpha(PreconditionError):
    pass


class Infeasible(PreconditionError):
    pass

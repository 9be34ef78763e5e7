"""Exception hierarchy shared by all modules."""


class DiracTorusError(Exception):
    """Base class for every error raised by this package."""


class NumericalFailure(DiracTorusError):
    """A numerical procedure did not meet its own accuracy contract."""


class NotADiffeomorphism(DiracTorusError, ValueError):
    pass


class RationalRotation(DiracTorusError, ValueError):
    pass


class InversionFailure(NumericalFailure):
    pass


class NonPositiveDensity(NumericalFailure):
    pass


class PrecisionExceeded(NumericalFailure):
    pass


class UnsupportedSymbol(DiracTorusError, ValueError):
    pass


class CutoffTooSmall(NumericalFailure):
    pass


class EigensolveFailure(NumericalFailure):
    pass


class SingularBlock(NumericalFailure):
    pass


class IndefiniteC(NumericalFailure):
    pass


class FactorizationFailure(NumericalFailure):
    pass


class SpuriousSpectrum(NumericalFailure):
    pass


class StepTooLarge(NumericalFailure):
    pass


class ZeroLambda(DiracTorusError, ValueError):
    pass


class SingularD(NumericalFailure):
    pass


class ConfigError(DiracTorusError, ValueError):
    pass

"""Exception hierarchy shared by all layers."""


class QTorusError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(QTorusError):
    """Invalid user configuration; never reaches the builders."""


# scalars
class DegenerateDenominator(QTorusError, ZeroDivisionError):
    pass


class EvalPole(QTorusError):
    pass


# cartan
class UnknownType(ConfigError):
    pass


class NotCartan(ConfigError):
    pass


class NotSymmetrizable(ConfigError):
    pass


class NegativeL(ConfigError):
    pass


class LatticeOutOfRange(ConfigError):
    pass


# skew / series
class MixedInstance(QTorusError):
    pass


class SubstitutionIntoShiftedSymbol(QTorusError):
    pass


class PoleOnSupport(QTorusError):
    pass


class NonSimplePole(QTorusError):
    pass


class NonLinearFactor(QTorusError):
    pass


# generators / relations
class ConfigMismatch(ConfigError):
    pass


class NonIntegerExponent(QTorusError):
    pass


class OutOfRange(QTorusError, ValueError):
    pass


# repr
class NumericPole(QTorusError):
    pass

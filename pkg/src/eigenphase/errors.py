"""Exception hierarchy.

Every error raised by the library derives from :class:`EigenphaseError` and
falls into one of three families whose ``exit_code`` the command line uses
directly: bad input data (1), bad configuration (2) and numerical failure (3).
"""


class EigenphaseError(Exception):
    exit_code = 3


class InputError(EigenphaseError):
    exit_code = 1


class ConfigError(EigenphaseError, ValueError):
    exit_code = 2


class NumericalError(EigenphaseError, ArithmeticError):
    exit_code = 3


# ingest
class MalformedHeader(InputError):
    pass


class DuplicateObservation(InputError):
    pass


class EmptyInput(InputError):
    pass


class SingleSeries(InputError):
    pass


class NoCommonDates(InputError):
    pass


class LagTooLarge(ConfigError):
    pass


# corrlab
class WindowOutOfRange(ConfigError):
    pass


class WindowTooLarge(ConfigError):
    pass


# spectral
class NotSymmetric(NumericalError, ValueError):
    pass


class NoConvergence(NumericalError):
    pass


class ZeroMatrix(NumericalError, ValueError):
    pass


class BadGroupCount(ConfigError):
    pass


# phase
class BadThresholds(ConfigError):
    pass


class DateNotCovered(InputError, LookupError):
    pass


# analysis
class InsufficientPoints(InputError):
    pass

"""Exception hierarchy.

Every error carries the process exit code the command line maps it to.
"""


class KakutaniError(Exception):
    exit_code = 1


class ConfigError(KakutaniError, ValueError):
    exit_code = 2


class MassNotOne(ConfigError):
    """The block lengths do not add up to exactly one."""


class DegenerateBlock(ConfigError):
    """A length or ratio lies outside the open unit interval."""


class BudgetExceeded(KakutaniError):
    exit_code = 3

    def __init__(self, what, limit):
        super().__init__(f"{what} exceeded budget of {limit}")
        self.what = what
        self.limit = limit


class InvariantFailure(KakutaniError):
    exit_code = 4


class NumericError(KakutaniError, ArithmeticError):
    exit_code = 5


class DomainError(NumericError):
    pass


class NotRankOne(NumericError):
    pass


class NotHigherRank(NumericError):
    pass


class BoundaryZero(NumericError):
    pass


class PrecisionExhausted(NumericError):
    def __init__(self, message, certified):
        super().__init__(message)
        self.certified = certified


class RationalInput(NumericError):
    def __init__(self, message, quotients=()):
        super().__init__(message)
        self.quotients = list(quotients)


class EmptyPointSet(KakutaniError, ValueError):
    pass


class DegenerateData(NumericError):
    pass

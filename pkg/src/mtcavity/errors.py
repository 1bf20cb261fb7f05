"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented exit statuses without a lookup table.
"""


class MtCavityError(Exception):
    exit_code = 3


class ConfigError(MtCavityError):
    exit_code = 2


class ParseError(ConfigError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(ConfigError):
    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message)


class MissingOpenParameter(ConfigError):
    """A quantity with no defensible default was not supplied."""


class DegenerateInput(MtCavityError, ValueError):
    pass


class NumericalBlowup(MtCavityError):
    def __init__(self, message, time=None):
        self.time = time
        super().__init__(message if time is None else f"{message} at t={time!r}")


class NoCrossing(MtCavityError):
    pass


class SupersonicVelocity(MtCavityError, ValueError):
    pass


class NoAsymptotes(MtCavityError):
    pass


class NoConnection(MtCavityError):
    pass


class ToleranceUnmet(MtCavityError):
    pass


class NegativeVariance(MtCavityError, ValueError):
    pass


class NoConvergence(MtCavityError):
    def __init__(self, message, result=None):
        self.result = result
        super().__init__(message)


class GridTooCoarse(MtCavityError):
    pass


class ZeroSplitting(MtCavityError):
    pass


class OutputError(MtCavityError):
    exit_code = 4

"""Exception hierarchy.

Configuration problems and numerical problems are kept apart so the CLI can
map them onto distinct exit codes.
"""


class QKDError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(QKDError, ValueError):
    """Invalid user input: bad parameter ranges, malformed config files."""


class ParseError(ConfigError):
    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"{line_number}:"
        super().__init__(f"{where} {message}" if where else message)


class NumericalError(QKDError, ArithmeticError):
    """A quantity in the key-rate pipeline is undefined for the given inputs."""


class DegenerateSelectionError(NumericalError):
    """An observable has zero selection probability, so it was never sampled."""


class ZeroObservationError(NumericalError):
    """A relative fluctuation bound was requested for an observable equal to zero."""


class NoVacuumError(NumericalError):
    """No pulses are left for the vacuum decoy (P_mu + P_nu >= 1)."""


class IntensityOrderingError(NumericalError):
    """The decoy intensity is not strictly below the signal intensity."""


class UndefinedErrorRateError(NumericalError):
    """The single-photon yield bound is zero, so no error rate can be attributed."""


class IncompleteBoundsError(NumericalError):
    """A basis pair needed by the C quantity has no error-rate bound."""


class InconsistencyError(NumericalError):
    """Internal identity violated beyond round-off."""


class InfeasibleParamsError(NumericalError):
    """Protocol parameters violate the probability/intensity constraints."""


class SearchFailureError(NumericalError):
    """The optimizer could not find any feasible starting point."""

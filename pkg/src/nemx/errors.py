"""Exception hierarchy. CLI exit codes are attached to the classes."""


class NemError(Exception):
    exit_code = 1


class InvalidParameterError(NemError, ValueError):
    """A value violates a model invariant (prices, device limits, weights...)."""

    exit_code = 2


class ConfigError(NemError):
    exit_code = 2


class DataError(NemError):
    exit_code = 3


class SolverError(NemError):
    """Internal numerical failure, e.g. bisection that did not converge."""

    exit_code = 4


class InfeasibleError(NemError):
    exit_code = 4

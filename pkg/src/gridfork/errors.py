"""Exception types shared across the package."""


class GridforkError(Exception):
    """Base class for all gridfork errors."""


class ParameterError(GridforkError, ValueError):
    """A model or shape parameter is outside its legal range."""


class InvalidPairError(GridforkError, ValueError):
    """A node pair is not eligible for the requested operation."""


class UnknownEdgeError(GridforkError, KeyError):
    """The edge does not exist in the topology."""


class DomainError(GridforkError, ValueError):
    """An input lies outside the mathematical domain of a formula."""


class SingularityError(DomainError):
    """The formula is evaluated exactly at a pole."""


class ConfigError(GridforkError, ValueError):
    """An experiment configuration file is malformed or inconsistent."""


class GridMismatchError(GridforkError, ValueError):
    """Two curves were compared on different time grids."""


class HonestMinorityWarning(UserWarning):
    """Honest aggregate power trails the adversary; the robust level is negative."""

"""Exception hierarchy shared across the package.

Every domain failure derives from :class:`FraglayoutError` so the CLI can map
it to a single exit code without enumerating causes.
"""


class FraglayoutError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(FraglayoutError):
    """Malformed or empty read input."""


class ShearError(FraglayoutError):
    """Infeasible parameters for shearing a reference sequence."""


class ContractViolation(FraglayoutError):
    """A caller broke a documented precondition (bad permutation, NaN, ...)."""


class ConfigError(FraglayoutError):
    """Invalid optimizer or benchmark configuration."""

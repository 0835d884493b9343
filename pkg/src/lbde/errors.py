"""Exception types shared across the package.

The CLI maps these onto process exit codes: data errors exit with 1,
configuration errors with 2, numerical failures with 3.
"""


class DataError(ValueError):
    """Invalid observations: nonpositive, non-numeric, empty, or degenerate."""


class ConfigurationError(ValueError):
    """Invalid descriptor, grid, option combination, or file layout."""


class NumericalError(RuntimeError):
    """A numerical procedure failed or produced an unusable result."""


class TruncationError(NumericalError):
    """The slice sampler needed more mixture components than the hard cap allows."""


class DegenerateConditionalError(NumericalError):
    """A full conditional is improper for the current state."""

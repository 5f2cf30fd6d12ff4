"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific one that applies rather than a bare ValueError.
"""


class GhostsimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GhostsimError):
    """Invalid or inconsistent user configuration (CLI exit code 2)."""


class PhysicsPreconditionError(GhostsimError):
    """A physical validity condition was violated (CLI exit code 3).

    Examples: non-contracting Gaussian widths, divergent conditional
    amplitudes, a lens placed where no real output width exists.
    """


class ResourceBoundError(GhostsimError):
    """A grid or memory bound would be exceeded (CLI exit code 4).

    Raised before allocating, so the caller can retry with a smaller grid.
    """


class AnalysisError(GhostsimError):
    """A pattern does not support the requested measurement.

    Raised e.g. when fringe extraction finds no fringes.  Deliberately not a
    ConfigError: the inputs were valid, the data just does not carry the
    feature.
    """

"""Exception types shared across the package.

The CLI maps these onto exit codes, so user-facing failure modes get their
own class instead of a bare ValueError.
"""


class SpecificationError(ValueError):
    """A chain/bath specification violates its contract (wrong kind, bad shape, ...)."""


class DegenerateParameterizationError(ValueError):
    """Requested reparameterization is singular (e.g. jx + jy = 0)."""


class ResourceLimitError(ValueError):
    """Problem size exceeds the documented dense-solver limits."""


class NoUniqueNessError(RuntimeError):
    """The drift matrix is not Hurwitz: no unique steady state exists.

    Carries the offending eigenvalue in ``eigenvalue``.
    """

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class DegenerateNessError(RuntimeError):
    """The dense Liouvillian null space is not one-dimensional."""


class UndefinedCorrelatorError(RuntimeError):
    """g2 denominator vanished (an end spin is fully polarized, no emission)."""


class ConfigError(ValueError):
    """A sweep configuration file failed validation."""

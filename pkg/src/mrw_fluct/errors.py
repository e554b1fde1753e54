"""Exception types shared across the package."""


class MrwError(Exception):
    """Base class for all package-specific errors."""


class InvalidModelError(MrwError):
    """Raised when an operation requires a valid model but got a broken one."""


class UnsupportedModelError(MrwError):
    """Model falls outside what the requested computation supports
    (e.g. exact lattice computations on a Gaussian-kernel model)."""


class ResourceCapError(MrwError):
    """A configured size cap (cells, horizon, enumeration depth) was exceeded."""


class SolverError(MrwError):
    """Numerical solver failed to converge within its iteration budget."""


class EstimatorBudgetError(MrwError):
    """Too many Monte Carlo paths hit a simulation cap; the estimate is unusable."""


class NoDensityError(MrwError):
    """The requested distribution has no density (point-mass endpoints)."""

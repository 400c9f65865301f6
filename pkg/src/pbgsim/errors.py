"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration or CLI input (exit code 2)."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class EdgeSingularityError(DomainError):
    """Density of states evaluated exactly at the band edge, where it diverges."""


class ConsistencyError(ValueError):
    """Mode ladder, band cutoff and density normalization are mutually inconsistent."""


class UnsupportedSectorError(ValueError):
    """Requested excitation sector is outside the supported range (p <= 2)."""


class BasisMismatchError(ValueError):
    """State vector is not aligned with the basis expected by an operation."""


class IntegrationError(RuntimeError):
    """Numerical propagation failed: norm drift or non-finite amplitudes (exit code 3)."""

"""Exception hierarchy shared by every Hypercheck service."""

from typing import Optional


class HypercheckError(Exception):
    """Base class for all library errors."""


class ConfigError(HypercheckError):
    """Invalid precision context or run configuration."""


class ParseError(HypercheckError):
    """Malformed scalar literal or sequence specification."""


class DomainError(HypercheckError):
    """Parameters outside the domain where a formula is defined."""


class DomainPoleError(DomainError):
    """A Pochhammer denominator vanishes inside the summation range."""


class DivergenceError(HypercheckError):
    """A series did not converge numerically within the term budget."""


class PoleError(HypercheckError):
    """Gamma evaluated at a nonpositive integer."""

    def __init__(self, nearest: int, factor: Optional[str] = None):
        self.nearest = nearest
        self.factor = factor
        where = f" in factor {factor}" if factor else ""
        super().__init__(f"gamma pole at {nearest}{where}")


class RatioPoleError(PoleError):
    """Gamma(z - i) / Gamma(z) has no finite limit."""

"""Exception types raised by polyshadow."""


class ConfigurationError(ValueError):
    """Unsupported polytope, dimension, or option combination."""


class DegenerateShadowError(ValueError):
    """Projected vertices are (numerically) collinear; the shadow has no area."""


class DomainError(ValueError):
    """Argument outside the domain of a special function or oracle."""


class UnsupportedMethodError(ConfigurationError):
    """Estimation method not available for this polytope."""

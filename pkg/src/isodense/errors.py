"""Exception types shared across the toolkit."""


class GeometryError(ValueError):
    """Base class for domain errors in geometric operations."""


class SingularPointError(GeometryError):
    """An operation that divides by |q| was given the origin."""


class UndefinedCanonicalCircleError(GeometryError):
    """No axis-centered circle is tangent to the given point-direction pair."""


class OutOfDomainError(GeometryError):
    """Input lies outside the domain of the operation."""


class InvalidConfigurationError(GeometryError):
    """A point/vector configuration violates the preconditions of a predicate."""


class IntegrationDomainError(RuntimeError):
    """The shooting state left the region where the curvature law is defined."""


class InvalidBracketError(ValueError):
    """A root bracket does not straddle the sought transition."""

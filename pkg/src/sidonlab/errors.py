"""Exception and warning types shared across sidonlab."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class BoundOverflowWarning(RuntimeWarning):
    """A bound evaluated in log-space does not fit in a float64."""

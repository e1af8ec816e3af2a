"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operand shapes or subsystem dimensions do not fit together."""


class DomainError(ValueError):
    """A closed-form expression was evaluated outside its domain of validity."""


class IsometryViolation(ValueError):
    """A machine's linear action fails to preserve inner products."""


class NoRoot(RuntimeError):
    """A root search found no sign change to bracket."""

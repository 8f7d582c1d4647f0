"""Exception types shared across the package."""


class ConfigurationMismatch(ValueError):
    """Two divisor classes live on lattices of different configurations."""


class InvalidPointRef(ValueError):
    """A point reference does not exist in the ambient configuration."""


class InvalidConfiguration(ValueError):
    """A configuration violates one or more validity rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InternalConsistencyError(RuntimeError):
    """A computed object contradicts an invariant that must always hold."""


class TheoremViolation(RuntimeError):
    """No certificate branch applies to a valid configuration."""

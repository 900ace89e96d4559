class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Invalid run configuration; ``key`` points at the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

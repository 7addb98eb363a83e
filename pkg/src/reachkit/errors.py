class ReachkitError(ValueError):
    """Raised when an input violates the domain contract of an operation."""

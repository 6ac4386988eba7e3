"""
Exceptions shared across packages.
"""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""

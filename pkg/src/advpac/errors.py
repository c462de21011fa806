"""Exceptions shared across modules."""


class GuardExceeded(RuntimeError):
    """An exhaustive search would exceed its configured budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial

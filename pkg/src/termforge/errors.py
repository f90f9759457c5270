"""Exceptions shared by both library backends and the model checker."""


class UsageError(ValueError):
    """An operation was called outside its contract (wrong thread state,
    mismatched destroy/unprotect, arity mismatch, ...)."""


class CapacityError(RuntimeError):
    """A fixed-capacity registry (thread slots, symbols) is full."""


class StateCapExceeded(RuntimeError):
    """State-space generation hit the configured state cap."""

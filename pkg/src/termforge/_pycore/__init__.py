"""Pure-Python fallback backend."""

from . import workers
from .bflock import BfLock, ThreadContext
from .protection import ProtectionSet
from .rwlock import PlatformRwLock
from .table import TermHandle, TermLibrary, TermRef, TermSession

name = "python"

__all__ = [
    "BfLock", "ThreadContext", "ProtectionSet", "PlatformRwLock",
    "TermLibrary", "TermSession", "TermHandle", "TermRef", "workers", "name",
]

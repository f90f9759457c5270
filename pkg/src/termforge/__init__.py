"""termforge: thread-safe maximally-shared terms.

The concurrency core is the busy-forbidden readers-writer protocol; a
desk-scale explicit-state model checker re-verifies its correctness
properties, and `tf-bench` reproduces the performance experiments.

Hot paths live in a compiled extension (termforge._core); a pure-Python
twin with identical semantics is selected automatically when the
extension is unavailable (or via TERMFORGE_BACKEND / backend="python").
"""

from ._backend import BACKENDS, compiled_available, resolve
from ._common import (PROTECTION_SET, REFCOUNT, STRATEGIES, FunctionSymbol,
                      GcStats)
from .busy_forbidden import BfLock, PlatformRwLock, exclusive, shared
from .errors import CapacityError, StateCapExceeded, UsageError
from .term_core import (TermLibrary, argument, equal, function, run_script,
                        structural_equal)

__version__ = "0.1.0"

__all__ = [
    "BfLock", "PlatformRwLock", "shared", "exclusive",
    "TermLibrary", "FunctionSymbol", "GcStats",
    "STRATEGIES", "REFCOUNT", "PROTECTION_SET",
    "equal", "function", "argument", "structural_equal", "run_script",
    "UsageError", "CapacityError", "StateCapExceeded",
    "BACKENDS", "compiled_available", "resolve",
    "__version__",
]

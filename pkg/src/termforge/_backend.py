"""Backend selection: compiled extension when available, pure Python otherwise.

The choice is made per call site, not at import of this module, so tests
can force either backend. TERMFORGE_BACKEND=python|compiled overrides the
default resolution order.
"""

import os

from . import _pycore


def _load_compiled():
    try:
        from . import _core
        return _core
    except ImportError:
        return None


_COMPILED = _load_compiled()
BACKENDS = ("compiled", "python") if _COMPILED is not None else ("python",)


def compiled_available():
    return _COMPILED is not None


def resolve(backend=None):
    """Return the backend module for `backend` ('auto'/None, 'compiled',
    'python')."""
    if backend in (None, "auto"):
        backend = os.environ.get("TERMFORGE_BACKEND", "auto")
    if backend in (None, "auto"):
        backend = "compiled" if _COMPILED is not None else "python"
    if backend == "python":
        return _pycore
    if backend == "compiled":
        if _COMPILED is None:
            raise ImportError("compiled backend requested but the "
                              "termforge._core extension is not built")
        return _COMPILED
    raise ValueError(f"unknown backend {backend!r}")

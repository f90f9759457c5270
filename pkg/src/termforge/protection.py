"""Root-protection strategies.

Two mechanisms decide which terms the collector must keep, selected when
the library is constructed:

* ``refcount`` — every node carries an atomic counter equal to its
  external protections plus its parent occurrences; zero means dead.
  Protect/unprotect are single atomic updates but contend on popular
  nodes.
* ``protection-set`` — each thread keeps a local address -> multiplicity
  table; the collector marks everything reachable from the union of all
  roots. All updates are thread-local; the collector reads the sets only
  while every thread is fenced out by the exclusive section.

Both classify exactly the same nodes as live at any quiescent point.
"""

from ._common import PROTECTION_SET, REFCOUNT, STRATEGIES
from .errors import UsageError

__all__ = ["STRATEGIES", "REFCOUNT", "PROTECTION_SET", "validate_strategy",
           "protected", "refcount"]


def validate_strategy(name):
    if name not in STRATEGIES:
        raise UsageError(f"strategy must be one of {STRATEGIES}, got {name!r}")
    return name


def protected(lib, session, term):
    """Would the collector keep this term right now? Runs the strategy's
    liveness query inside the exclusive section (debug aid)."""
    return lib.debug_protected(session, term)


def refcount(lib, term):
    """Current reference count of a node (refcount strategy only)."""
    return lib.debug_refcount(term)

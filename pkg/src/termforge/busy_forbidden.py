"""Busy-forbidden readers-writer protocol.

Shared (reader) entry is contention-free: the calling thread writes its
own busy flag and reads its own forbidden flag, both normally in local
cache. Exclusive (writer) entry takes the internal mutex and sweeps all
registered threads' forbidden flags, waiting out anyone who is busy.
"""

from contextlib import contextmanager

from ._backend import resolve


def BfLock(capacity=64, sometimes_rate=1024, timed_lock_ms=1.0,
           wait_mode="timed", debug=False, backend=None):
    """Create a busy-forbidden lock on the chosen backend."""
    mod = resolve(backend)
    return mod.BfLock(capacity=capacity, sometimes_rate=sometimes_rate,
                      timed_lock_ms=timed_lock_ms, wait_mode=wait_mode,
                      debug=debug)


def PlatformRwLock(backend=None):
    """Baseline readers-writer lock (the expensive conventional kind)."""
    return resolve(backend).PlatformRwLock()


@contextmanager
def shared(lock, ctx):
    lock.enter_shared(ctx)
    try:
        yield
    finally:
        lock.leave_shared(ctx)


@contextmanager
def exclusive(lock, ctx):
    lock.enter_exclusive(ctx)
    try:
        yield
    finally:
        lock.leave_exclusive(ctx)

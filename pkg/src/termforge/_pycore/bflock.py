"""Pure-Python busy-forbidden readers-writer lock.

Shared entry touches only the calling thread's own two flags; exclusive
entry takes the internal mutex and sweeps every registered thread's
forbidden flag. Under CPython the GIL makes plain attribute accesses
sequentially consistent, so no extra atomics are needed here.
"""

import threading
import time
from collections import deque

from ..errors import CapacityError, UsageError

FREE, SHARED, EXCLUSIVE = 0, 1, 2

WAIT_MODES = ("timed", "yield", "spin")


class ThreadContext:
    __slots__ = (
        "index", "busy", "forbidden", "registered", "section",
        "thread_id", "sometimes_counter", "forced_sometimes",
        "lock_acquisitions", "timed_lock_attempts", "sweep_retries",
        "sometimes_fired", "flag_ops",
    )

    def __init__(self, index):
        self.index = index
        self.busy = False
        self.forbidden = False
        self.registered = True
        self.section = FREE
        self.thread_id = threading.get_ident()
        self.sometimes_counter = 0
        self.forced_sometimes = 0
        # per-thread so counting never adds cross-thread cache traffic
        self.lock_acquisitions = 0
        self.timed_lock_attempts = 0
        self.sweep_retries = 0
        self.sometimes_fired = 0
        self.flag_ops = 0


class BfLock:
    """Busy-forbidden protocol lock (Python fallback backend)."""

    def __init__(self, capacity=64, sometimes_rate=1024, timed_lock_ms=1.0,
                 wait_mode="timed", debug=False):
        if wait_mode not in WAIT_MODES:
            raise UsageError(f"wait_mode must be one of {WAIT_MODES}")
        if sometimes_rate is not None and sometimes_rate == 1:
            raise UsageError("sometimes_rate=1 would livelock the flag sweeps; "
                             "use force_sometimes() to exercise that branch")
        self.capacity = capacity
        self.sometimes_rate = sometimes_rate
        self.timed_lock_s = timed_lock_ms / 1000.0
        self.wait_mode = wait_mode
        self.debug = debug
        self._mutex = threading.Lock()
        self._slots = [None] * capacity
        self._high_water = 0
        self._exclusive_active = 0
        self.violations = []

    # -- registry -----------------------------------------------------

    def register_thread(self):
        with self._mutex:
            for i in range(self._high_water):
                slot = self._slots[i]
                if slot is None or not slot.registered:
                    ctx = ThreadContext(i)
                    self._slots[i] = ctx
                    return ctx
            if self._high_water >= self.capacity:
                raise CapacityError(f"thread registry full (capacity {self.capacity})")
            ctx = ThreadContext(self._high_water)
            self._slots[self._high_water] = ctx
            self._high_water += 1
            return ctx

    def deregister_thread(self, ctx):
        if ctx.section != FREE:
            raise UsageError("cannot deregister while inside a section")
        if not ctx.registered:
            raise UsageError("context already deregistered")
        # Tombstone only; a concurrent sweep sees either state, never a
        # torn slot. The slot is reused by a later register_thread.
        ctx.registered = False

    def registered_count(self):
        return sum(1 for c in self._slots[:self._high_water]
                   if c is not None and c.registered)

    def _live_contexts(self):
        for i in range(self._high_water):
            c = self._slots[i]
            if c is not None and c.registered:
                yield c

    # -- shared section ------------------------------------------------

    def enter_shared(self, ctx):
        if ctx.section != FREE:
            raise UsageError("enter_shared: caller already holds a section")
        ctx.busy = True
        ctx.flag_ops += 1
        while True:
            forbidden = ctx.forbidden
            ctx.flag_ops += 1
            if not forbidden:
                break
            ctx.busy = False
            ctx.flag_ops += 1
            self._backoff(ctx)
            ctx.busy = True
            ctx.flag_ops += 1
        ctx.section = SHARED
        if self.debug and self._exclusive_active:
            self.violations.append("shared entered while exclusive active")

    def _backoff(self, ctx):
        if self.wait_mode == "timed":
            ctx.timed_lock_attempts += 1
            if self._mutex.acquire(timeout=self.timed_lock_s):
                ctx.lock_acquisitions += 1
                self._mutex.release()
        elif self.wait_mode == "yield":
            time.sleep(0)

    def leave_shared(self, ctx):
        if ctx.section != SHARED:
            raise UsageError("leave_shared: caller is not in the shared section")
        ctx.busy = False
        ctx.flag_ops += 1
        ctx.section = FREE

    # -- exclusive section ----------------------------------------------

    def enter_exclusive(self, ctx):
        if ctx.section != FREE:
            raise UsageError("enter_exclusive: caller already holds a section")
        self._mutex.acquire()
        ctx.lock_acquisitions += 1
        pending = deque(self._live_contexts())
        while pending:
            c = pending.popleft()
            if not c.registered:
                continue
            c.forbidden = True
            if c.busy or self._sometimes(ctx):
                c.forbidden = False
                ctx.sweep_retries += 1
                pending.append(c)
        ctx.section = EXCLUSIVE
        if self.debug:
            if self._exclusive_active:
                self.violations.append("two threads in exclusive")
            for c in self._live_contexts():
                if c.section == SHARED:
                    self.violations.append("exclusive entered while a shared "
                                           "section is occupied")
            self._exclusive_active = 1

    def leave_exclusive(self, ctx):
        if ctx.section != EXCLUSIVE:
            raise UsageError("leave_exclusive: caller is not in the exclusive section")
        if self.debug:
            self._exclusive_active = 0
        pending = deque(c for c in self._live_contexts() if c.forbidden)
        while pending:
            c = pending.popleft()
            if self._sometimes(ctx):
                c.forbidden = True
                pending.append(c)
            else:
                c.forbidden = False
        self._mutex.release()
        ctx.section = FREE

    # -- heuristics and counters -----------------------------------------

    def _sometimes(self, ctx):
        if ctx.forced_sometimes > 0:
            ctx.forced_sometimes -= 1
            ctx.sometimes_fired += 1
            return True
        if not self.sometimes_rate:
            return False
        ctx.sometimes_counter += 1
        if ctx.sometimes_counter % self.sometimes_rate == 0:
            ctx.sometimes_fired += 1
            return True
        return False

    def force_sometimes(self, ctx, n=1):
        """Make the next n sometimes-checks by ctx fire (test hook)."""
        ctx.forced_sometimes += n

    def counters(self):
        acq = retries = fired = timed = 0
        for i in range(self._high_water):
            c = self._slots[i]
            if c is None:
                continue
            acq += c.lock_acquisitions
            retries += c.sweep_retries
            fired += c.sometimes_fired
            timed += c.timed_lock_attempts
        return {
            "internal_lock_acquisitions": acq,
            "sweep_retries": retries,
            "sometimes_fired": fired,
            "timed_lock_attempts": timed,
        }

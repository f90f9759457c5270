"""Pure-Python maximally-shared term table.

Nodes live in a hash table whose buckets are prepend-only linked lists;
publication happens through an emulated compare-and-swap on the bucket
head. Creation and copying run inside the busy-forbidden shared section,
garbage collection and rehashing inside the exclusive section. Node
addresses are virtual (monotonic integers), which keeps runs and script
replays deterministic.
"""

import threading

from .._common import STRATEGIES, FunctionSymbol, GcStats
from ..errors import UsageError
from .bflock import BfLock
from .protection import ProtectionSet, make_strategy

_HASH_SEED = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def _mix(z):
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def node_hash(symbol_id, child_addrs):
    h = _mix(_HASH_SEED ^ symbol_id)
    for a in child_addrs:
        h = _mix(h ^ a)
    return h


class Node:
    __slots__ = ("addr", "symbol", "children", "next", "rc")

    def __init__(self, addr, symbol, children, nxt):
        self.addr = addr
        self.symbol = symbol
        self.children = children
        self.next = nxt
        self.rc = 0


class TermRef:
    """Unprotected address view of a term; valid while the term is live."""

    __slots__ = ("_node",)

    def __init__(self, node):
        self._node = node

    @property
    def address(self):
        return self._node.addr

    @property
    def symbol(self):
        return self._node.symbol

    @property
    def arity(self):
        return self._node.symbol.arity

    def argument(self, i):
        n = self._node
        if not 0 <= i < len(n.children):
            raise UsageError(f"argument index {i} out of range for "
                             f"{n.symbol.name}/{n.symbol.arity}")
        return TermRef(n.children[i])

    def snapshot(self):
        n = self._node
        return (n.addr, n.symbol.symbol_id, tuple(c.addr for c in n.children))

    def __repr__(self):
        return f"<term {self.symbol.name}/{self.arity} @{self.address:#x}>"


class TermHandle(TermRef):
    """A protected root: the node stays live until destroy()."""

    __slots__ = ("_session", "_alive")

    def __init__(self, node, session):
        super().__init__(node)
        self._session = session
        self._alive = True


class SharedBatch:
    """One shared section covering many creations, protecting only adopted
    roots: the cheap idiom for building big terms under the set strategy."""

    __slots__ = ("_session",)

    def __init__(self, session):
        self._session = session

    def __enter__(self):
        lib = self._session.lib
        lib.lock.enter_shared(self._session.ctx)
        return self

    def __exit__(self, *exc):
        self._session.lib.lock.leave_shared(self._session.ctx)
        return False

    def create_unprotected(self, symbol, args=()):
        lib = self._session.lib
        children = tuple(lib._resolve(a) for a in args)
        if len(children) != symbol.arity:
            raise UsageError(f"{symbol.name}/{symbol.arity} applied to "
                             f"{len(children)} arguments")
        h = node_hash(symbol.symbol_id, [c.addr for c in children])
        node = lib._insert(h & (len(lib.buckets) - 1), symbol, children)
        return TermRef(node)

    def adopt(self, ref):
        session = self._session
        node = session.lib._resolve(ref)
        session.lib.strategy.protect(session, node)
        session.outstanding += 1
        return TermHandle(node, session)


class TermSession:
    """Per-thread access point: wraps a lock context plus protection state."""

    __slots__ = ("lib", "ctx", "pset", "outstanding", "destroyed_since_gc")

    def __init__(self, lib, ctx, debug):
        self.lib = lib
        self.ctx = ctx
        self.pset = ProtectionSet(debug=debug)
        self.outstanding = 0
        self.destroyed_since_gc = 0

    @property
    def thread_index(self):
        return self.ctx.index

    def create(self, symbol, args=()):
        return self.lib.create(self, symbol, args)

    def copy(self, term):
        return self.lib.copy(self, term)

    def destroy(self, handle):
        self.lib.destroy(self, handle)

    def collect(self):
        return self.lib.collect_garbage(self)

    def shared_batch(self):
        return SharedBatch(self)


class TermLibrary:
    """Thread-safe hash-consed term storage (Python fallback backend)."""

    backend = "python"

    def __init__(self, strategy="protection-set", initial_buckets=1 << 10,
                 gc_threshold=1 << 16, gc_fraction=0.75, auto_gc=True,
                 capacity_threads=64, sometimes_rate=1024, timed_lock_ms=1.0,
                 max_load=0.75, debug=False):
        if strategy not in STRATEGIES:
            raise UsageError(f"strategy must be one of {STRATEGIES}")
        if initial_buckets & (initial_buckets - 1):
            raise UsageError("initial_buckets must be a power of two")
        self.strategy = make_strategy(strategy)
        self.lock = BfLock(capacity=capacity_threads,
                           sometimes_rate=sometimes_rate,
                           timed_lock_ms=timed_lock_ms, debug=debug)
        self.debug = debug
        self.buckets = [None] * initial_buckets
        self.memory = {}          # addr -> Node, the owning map for liveness
        self._next_addr = 16      # virtual address allocator (never 0)
        self._cas_lock = threading.Lock()   # emulates hardware CAS atomicity
        self._symbols = {}
        self._symbol_list = []
        self._symbols_lock = threading.Lock()
        self._sessions = {}
        self.gc_threshold = gc_threshold
        self.gc_fraction = gc_fraction
        self.auto_gc = auto_gc
        self.max_load = max_load
        self._last_live = 0
        self.last_gc_stats = None
        self.gc_runs = 0
        self.race_hook = None     # test hook: called between scan and CAS

    # -- symbols ---------------------------------------------------------

    def declare_symbol(self, name, arity):
        if arity < 0:
            raise UsageError("arity must be non-negative")
        with self._symbols_lock:
            sym = self._symbols.get((name, arity))
            if sym is None:
                sym = FunctionSymbol(len(self._symbol_list), name, arity)
                self._symbols[(name, arity)] = sym
                self._symbol_list.append(sym)
            return sym

    # -- sessions ---------------------------------------------------------

    def register_thread(self):
        ctx = self.lock.register_thread()
        session = TermSession(self, ctx, self.debug)
        self._sessions[ctx.index] = session
        return session

    def deregister_thread(self, session):
        if session.outstanding:
            raise UsageError(f"deregister with {session.outstanding} live handles")
        self.lock.deregister_thread(session.ctx)
        self._sessions.pop(session.ctx.index, None)

    def iter_sessions(self):
        return list(self._sessions.values())

    # -- core operations ----------------------------------------------------

    def create(self, session, symbol, args=()):
        children = tuple(self._resolve(a) for a in args)
        if len(children) != symbol.arity:
            raise UsageError(f"{symbol.name}/{symbol.arity} applied to "
                             f"{len(children)} arguments")
        ctx = session.ctx
        self.lock.enter_shared(ctx)
        try:
            h = node_hash(symbol.symbol_id, [c.addr for c in children])
            node = self._insert(h & (len(self.buckets) - 1), symbol, children)
            self.strategy.protect(session, node)
            session.outstanding += 1
        finally:
            self.lock.leave_shared(ctx)
        return TermHandle(node, session)

    def _insert(self, bucket_idx, symbol, children):
        candidate = None
        while True:
            old_head = self.buckets[bucket_idx]
            node = old_head
            while node is not None:
                if node.symbol is symbol and node.children == children:
                    return node
                node = node.next
            if candidate is None:
                addr = self._next_addr
                self._next_addr += 16
                candidate = Node(addr, symbol, children, old_head)
            else:
                candidate.next = old_head
            if self.race_hook is not None:
                self.race_hook(bucket_idx, candidate)
            with self._cas_lock:
                won = self.buckets[bucket_idx] is old_head
                if won:
                    self.buckets[bucket_idx] = candidate
            if won:
                self.memory[candidate.addr] = candidate
                self.strategy.on_publish(candidate)
                return candidate
            # lost the race: rescan, reusing the candidate if still needed

    def copy(self, session, term):
        node = self._resolve(term)
        ctx = session.ctx
        self.lock.enter_shared(ctx)
        try:
            self.strategy.protect(session, node)
            session.outstanding += 1
        finally:
            self.lock.leave_shared(ctx)
        return TermHandle(node, session)

    def destroy(self, session, handle):
        if not isinstance(handle, TermHandle) or not handle._alive:
            raise UsageError("destroy of a dead or unprotected handle")
        if handle._session is not session:
            raise UsageError("destroy must be called by the owning session")
        handle._alive = False
        self.strategy.unprotect(session, handle._node)
        session.outstanding -= 1
        session.destroyed_since_gc += 1
        if self.auto_gc and self._gc_due(session):
            self.collect_garbage(session)

    def _gc_due(self, session):
        threshold = max(self.gc_threshold, self.gc_fraction * self._last_live)
        parties = max(1, self.lock.registered_count())
        return session.destroyed_since_gc * parties >= threshold

    def collect_garbage(self, session):
        ctx = session.ctx
        self.lock.enter_exclusive(ctx)
        try:
            dead = self.strategy.sweep(self)
            reclaimed = len(dead)
            live = 0
            for i, head in enumerate(self.buckets):
                prev, node, new_head = None, head, head
                while node is not None:
                    nxt = node.next
                    if node in dead:
                        if prev is None:
                            new_head = nxt
                        else:
                            prev.next = nxt
                        del self.memory[node.addr]
                    else:
                        if prev is None:
                            new_head = node
                        prev = node
                        live += 1
                    node = nxt
                self.buckets[i] = new_head
            self._last_live = live
            for s in self.iter_sessions():
                s.destroyed_since_gc = 0
            if live > self.max_load * len(self.buckets):
                self._rehash(live)
            stats = GcStats(reclaimed=reclaimed, live=live,
                            n_buckets=len(self.buckets))
            self.last_gc_stats = stats
            self.gc_runs += 1
        finally:
            self.lock.leave_exclusive(ctx)
        return stats

    def _rehash(self, live):
        size = len(self.buckets)
        while live > self.max_load * size:
            size *= 2
        new_buckets = [None] * size
        mask = size - 1
        for node in self.iter_nodes():
            h = node_hash(node.symbol.symbol_id,
                          [c.addr for c in node.children])
            idx = h & mask
            node.next = new_buckets[idx]
            new_buckets[idx] = node
        self.buckets = new_buckets

    def force_rehash(self, session):
        """Double the bucket array under the exclusive section (debug)."""
        self.lock.enter_exclusive(session.ctx)
        try:
            self._rehash(2 * len(self.buckets))
        finally:
            self.lock.leave_exclusive(session.ctx)

    # -- inspection (lock-free) -----------------------------------------------

    def _resolve(self, term):
        if isinstance(term, TermRef):
            node = term._node
            if isinstance(term, TermHandle) and not term._alive:
                raise UsageError("use of a destroyed handle")
            return node
        raise UsageError(f"not a term: {term!r}")

    def iter_nodes(self):
        for head in self.buckets:
            node = head
            while node is not None:
                yield node
                node = node.next

    # -- debug / statistics ------------------------------------------------------

    def live_node_count(self, session):
        self.lock.enter_exclusive(session.ctx)
        try:
            return sum(1 for _ in self.iter_nodes())
        finally:
            self.lock.leave_exclusive(session.ctx)

    def dump_nodes(self, session):
        """Snapshot of all live nodes as (addr, symbol_id, child addrs)."""
        self.lock.enter_exclusive(session.ctx)
        try:
            return [(n.addr, n.symbol.symbol_id,
                     tuple(c.addr for c in n.children))
                    for n in self.iter_nodes()]
        finally:
            self.lock.leave_exclusive(session.ctx)

    def symbols(self):
        return list(self._symbol_list)

    def live_node_estimate(self):
        return len(self.memory)

    def bucket_histogram(self, session):
        self.lock.enter_exclusive(session.ctx)
        try:
            hist = []
            for head in self.buckets:
                n, node = 0, head
                while node is not None:
                    n, node = n + 1, node.next
                hist.append(n)
            return hist
        finally:
            self.lock.leave_exclusive(session.ctx)

    def debug_protected(self, session, term):
        """Strategy liveness query, run inside the exclusive section."""
        node = self._resolve(term)
        self.lock.enter_exclusive(session.ctx)
        try:
            return self.strategy.protected(self, node)
        finally:
            self.lock.leave_exclusive(session.ctx)

    def debug_refcount(self, term):
        return self._resolve(term).rc

    def audit(self, session, post_gc=False):
        """Exclusive-section consistency audit; raises AssertionError on
        any violated library invariant."""
        self.lock.enter_exclusive(session.ctx)
        try:
            self._audit_locked(post_gc)
        finally:
            self.lock.leave_exclusive(session.ctx)

    def _audit_locked(self, post_gc):
        mask = len(self.buckets) - 1
        seen = {}
        n_nodes = 0
        for idx, head in enumerate(self.buckets):
            node = head
            while node is not None:
                n_nodes += 1
                h = node_hash(node.symbol.symbol_id,
                              [c.addr for c in node.children])
                assert h & mask == idx, "node stored in the wrong bucket"
                key = (node.symbol.symbol_id,
                       tuple(c.addr for c in node.children))
                assert key not in seen, "duplicate structure in table"
                seen[key] = node
                assert self.memory.get(node.addr) is node, \
                    "table and memory map disagree"
                node = node.next
        assert n_nodes == len(self.memory), "memory map size mismatch"
        for node in self.iter_nodes():
            for child in node.children:
                assert self.memory.get(child.addr) is child, \
                    "dangling child address"
        if self.strategy.uses_sets:
            marked = self.strategy._mark(self)
            for session_ in self.iter_sessions():
                for addr in session_.pset.roots():
                    assert addr in self.memory, "protected root missing"
            if post_gc:
                for node in self.iter_nodes():
                    assert node in marked, "unreachable node survived GC"
        else:
            parents = {}
            for node in self.iter_nodes():
                for child in node.children:
                    parents[child] = parents.get(child, 0) + 1
            external = 0
            for node in self.iter_nodes():
                p = parents.get(node, 0)
                assert node.rc >= p, "count below parent occurrences"
                external += node.rc - p
            held = sum(s.outstanding for s in self.iter_sessions())
            assert external == held, \
                f"count conservation broken: {external} != {held}"
            if post_gc:
                for node in self.iter_nodes():
                    assert node.rc > 0, "zero-count node survived GC"

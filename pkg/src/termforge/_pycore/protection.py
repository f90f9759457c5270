"""Root-protection strategies for the Python backend.

Two interchangeable mechanisms decide which nodes the collector keeps:
atomic reference counts stored on the nodes, or per-thread protection
sets mapping address to multiplicity.
"""

import threading

from ..errors import UsageError


class ProtectionSet:
    """Single-owner address -> multiplicity map.

    A Python dict is already an open-addressed hash table; the owner tag
    exists so debug builds can assert the single-writer discipline.
    """

    __slots__ = ("owner_thread", "slots", "debug")

    def __init__(self, debug=False):
        self.owner_thread = threading.get_ident()
        self.slots = {}
        self.debug = debug

    def _check_owner(self):
        if self.debug and threading.get_ident() != self.owner_thread:
            raise UsageError("protection set mutated by a non-owner thread")

    def protect(self, addr):
        self._check_owner()
        self.slots[addr] = self.slots.get(addr, 0) + 1

    def unprotect(self, addr):
        self._check_owner()
        mult = self.slots.get(addr, 0)
        if mult == 0:
            raise UsageError(f"unprotect without matching protect for {addr:#x}")
        if mult == 1:
            del self.slots[addr]
        else:
            self.slots[addr] = mult - 1

    def total(self):
        return sum(self.slots.values())

    def roots(self):
        return self.slots.keys()


class RefcountStrategy:
    """count = external protections + parent occurrences; 0 means dead."""

    name = "refcount"
    uses_sets = False

    def protect(self, session, node):
        node.rc += 1

    def unprotect(self, session, node):
        if node.rc == 0:
            raise UsageError("unprotect of a node with zero count")
        node.rc -= 1

    def on_publish(self, node):
        for child in node.children:
            child.rc += 1

    def protected(self, lib, node):
        return node.rc != 0

    def sweep(self, lib):
        """Reclaim every node whose count cascades to zero. Runs inside
        the exclusive section; returns the set of dead nodes."""
        dead = set()
        worklist = [n for n in lib.iter_nodes() if n.rc == 0]
        while worklist:
            n = worklist.pop()
            if n in dead:
                continue
            dead.add(n)
            for child in n.children:
                child.rc -= 1
                if child.rc == 0:
                    worklist.append(child)
        return dead


class ProtectionSetStrategy:
    """Mark from the union of every thread's protection roots, sweep the rest."""

    name = "protection-set"
    uses_sets = True

    def protect(self, session, node):
        session.pset.protect(node.addr)

    def unprotect(self, session, node):
        session.pset.unprotect(node.addr)

    def on_publish(self, node):
        pass

    def protected(self, lib, node):
        return node in self._mark(lib)

    def _mark(self, lib):
        # Work-list DFS: term chains can be deep enough to blow the
        # interpreter recursion limit.
        marked = set()
        stack = []
        for session in lib.iter_sessions():
            for addr in session.pset.roots():
                node = lib.memory.get(addr)
                if node is not None and node not in marked:
                    marked.add(node)
                    stack.append(node)
        while stack:
            n = stack.pop()
            for child in n.children:
                if child not in marked:
                    marked.add(child)
                    stack.append(child)
        return marked

    def sweep(self, lib):
        marked = self._mark(lib)
        return {n for n in lib.iter_nodes() if n not in marked}


def make_strategy(name):
    if name == RefcountStrategy.name:
        return RefcountStrategy()
    if name == ProtectionSetStrategy.name:
        return ProtectionSetStrategy()
    raise UsageError(f"unknown protection strategy {name!r}")

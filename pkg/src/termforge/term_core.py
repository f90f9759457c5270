"""Maximally-shared terms: public operations and the script interface.

Terms are immutable trees stored with full sharing, so equality is a
single address comparison. Creation and copying run under the shared
section of the busy-forbidden lock; inspection never locks; garbage
collection stops the world via the exclusive section.
"""

import random as _random
from dataclasses import dataclass

from ._backend import resolve
from ._common import PROTECTION_SET, REFCOUNT, STRATEGIES, FunctionSymbol, GcStats
from .errors import UsageError

__all__ = [
    "TermLibrary", "FunctionSymbol", "GcStats", "STRATEGIES",
    "REFCOUNT", "PROTECTION_SET", "equal", "function", "argument",
    "structural_equal", "run_script", "random_script", "ScriptResult",
]


def TermLibrary(strategy="protection-set", backend=None, **kwargs):
    """Create a term library on the chosen backend ('auto' by default)."""
    return resolve(backend).TermLibrary(strategy=strategy, **kwargs)


# -- inspection helpers (work on handles and views of either backend) ----

def equal(t, u):
    """Constant-time term equality: same address iff equal."""
    return t.address == u.address


def function(t):
    return t.symbol


def argument(t, i):
    return t.argument(i)


def structural_equal(t, u):
    """Recursive structural comparison, independent of address identity.

    This is the oracle the sharing invariant is tested against; it never
    concludes equality from address equality, but memoizes visited pairs
    so shared structures stay tractable.
    """
    seen = set()
    stack = [(t, u)]
    while stack:
        a, b = stack.pop()
        key = (a.address, b.address)
        if key in seen:
            continue
        seen.add(key)
        fa, fb = a.symbol, b.symbol
        if fa.name != fb.name or fa.arity != fb.arity:
            return False
        for i in range(fa.arity):
            stack.append((a.argument(i), b.argument(i)))
    return True


# -- deterministic single-threaded scripts ---------------------------------

@dataclass
class ScriptResult:
    live_count: int
    live_terms: tuple      # sorted canonical strings, one per live node
    gc_runs: int


def canonical_terms(lib, session):
    """Canonical string per live node, sharing-aware, sorted."""
    nodes = lib.dump_nodes(session)
    names = {s.symbol_id: s.name for s in lib.symbols()}
    children = {addr: kids for addr, _, kids in nodes}
    symbol_of = {addr: sym for addr, sym, _ in nodes}
    canon = {}

    def render(addr):
        stack = [(addr, False)]
        while stack:
            a, expanded = stack.pop()
            if a in canon:
                continue
            kids = children[a]
            if expanded or not kids:
                parts = ", ".join(canon[k] for k in kids)
                name = names[symbol_of[a]]
                canon[a] = f"{name}({parts})" if kids else name
            else:
                stack.append((a, True))
                stack.extend((k, False) for k in kids)
        return canon[addr]

    return tuple(sorted(render(addr) for addr, _, _ in nodes))


def run_script(text, strategy=REFCOUNT, backend=None, **lib_kwargs):
    """Run the one-op-per-line script format:

        create <sym> <idx...>   # args are indices of earlier creates
        destroy <idx>
        gc

    Returns the post-run live-node multiset for strategy comparisons.
    """
    lib_kwargs.setdefault("initial_buckets", 1 << 6)
    lib = TermLibrary(strategy=strategy, backend=backend, **lib_kwargs)
    session = lib.register_thread()
    handles = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *rest = line.split()
        try:
            if op == "create":
                name = rest[0]
                args = [handles[int(i)] for i in rest[1:]]
                if any(h is None for h in args):
                    raise UsageError("argument handle already destroyed")
                sym = lib.declare_symbol(name, len(args))
                handles.append(session.create(sym, args))
            elif op == "destroy":
                idx = int(rest[0])
                if handles[idx] is None:
                    raise UsageError("handle destroyed twice")
                session.destroy(handles[idx])
                handles[idx] = None
            elif op == "gc":
                session.collect()
            else:
                raise UsageError(f"unknown op {op!r}")
        except (IndexError, ValueError) as exc:
            raise UsageError(f"script line {lineno}: {exc}") from exc
    return ScriptResult(
        live_count=lib.live_node_count(session),
        live_terms=canonical_terms(lib, session),
        gc_runs=lib.gc_runs,
    )


def random_script(seed, n_ops=120, n_constants=3, n_functions=3, max_arity=2):
    """Generate a valid random script; ends with a gc so results are
    compared at a collected point."""
    rng = _random.Random(seed)
    lines = []
    live = []          # indices of not-yet-destroyed creates
    created = 0
    for _ in range(n_ops):
        roll = rng.random()
        if roll < 0.55 or not live:
            if live and rng.random() < 0.6:
                name = f"f{rng.randrange(n_functions)}"
                arity = rng.randrange(1, max_arity + 1)
                args = [str(rng.choice(live)) for _ in range(arity)]
                lines.append(f"create {name}_{arity} {' '.join(args)}")
            else:
                lines.append(f"create c{rng.randrange(n_constants)}")
            live.append(created)
            created += 1
        elif roll < 0.9:
            victim = live.pop(rng.randrange(len(live)))
            lines.append(f"destroy {victim}")
        else:
            lines.append("gc")
    lines.append("gc")
    return "\n".join(lines) + "\n"

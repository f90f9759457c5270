"""Per-thread benchmark workloads for the Python backend.

These mirror the compiled kernels operation for operation; they exist so
every scenario can run (slowly) without the extension and so the two
backends can be benchmarked against each other.
"""

import random

_MASK64 = (1 << 64) - 1


def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def lock_microbench(lock, ctx, iterations, seed, p_shared):
    """Enter and leave a randomly chosen section `iterations` times.

    `lock` is either a BfLock (ctx required) or a PlatformRwLock (ctx None).
    """
    threshold = int(p_shared * (1 << 64))
    state = seed
    if ctx is not None:
        enter_s = lambda: lock.enter_shared(ctx)
        leave_s = lambda: lock.leave_shared(ctx)
        enter_x = lambda: lock.enter_exclusive(ctx)
        leave_x = lambda: lock.leave_exclusive(ctx)
    else:
        enter_s, leave_s = lock.enter_shared, lock.leave_shared
        enter_x, leave_x = lock.enter_exclusive, lock.leave_exclusive
    for _ in range(iterations):
        state, r = _splitmix64(state)
        if r < threshold:
            enter_s()
            leave_s()
        else:
            enter_x()
            leave_x()


def build_chain(session, f, c, depth, per_root=False):
    """Build the doubling chain (leaf c, then f applied to two copies of
    the previous level) up to `depth`; returns the protected root handle.

    per_root=False protects every level through the normal create and
    immediately drops the previous handle; per_root=True builds the whole
    chain inside one shared section and protects only the root.
    """
    if per_root:
        with session.shared_batch() as batch:
            cur = batch.create_unprotected(c)
            for _ in range(depth):
                cur = batch.create_unprotected(f, (cur, cur))
            return batch.adopt(cur)
    cur = session.create(c)
    for _ in range(depth):
        nxt = session.create(f, (cur, cur))
        session.destroy(cur)
        cur = nxt
    return cur


def lookup_chain(session, f, c, depth, times, per_root=False):
    """Recreate the (already interned) chain `times` times."""
    for _ in range(times):
        root = build_chain(session, f, c, depth, per_root=per_root)
        session.destroy(root)


def traverse(root, times):
    """Breadth-first walks ignoring sharing; returns total visits."""
    visits = 0
    for _ in range(times):
        queue = [root._node]
        head = 0
        while head < len(queue):
            node = queue[head]
            head += 1
            visits += 1
            queue.extend(node.children)
        del queue
    return visits


class ExploreShared:
    """Work queue + seen set for the synthetic exploration workload."""

    def __init__(self, mutex_cls):
        self.mutex = mutex_cls()
        self.queue = []
        self.seen = set()
        self.active = 0


def explore(session, shared, pair_sym, xsyms, ysyms):
    """Grid exploration: state (i, j) expands right and down. States travel
    through the shared queue as terms; hash consing makes the seen-check an
    address lookup. Returns the number of states this worker popped."""
    width, height = len(xsyms), len(ysyms)
    xindex = {s.symbol_id: i for i, s in enumerate(xsyms)}
    yindex = {s.symbol_id: j for j, s in enumerate(ysyms)}
    popped = 0
    my_handles = []

    def push_state(i, j):
        x = session.create(xsyms[i])
        y = session.create(ysyms[j])
        h = session.create(pair_sym, (x, y))
        session.destroy(x)   # the pair keeps its leaves reachable
        session.destroy(y)
        with shared.mutex:
            if h.address not in shared.seen:
                shared.seen.add(h.address)
                shared.queue.append(h)
                my_handles.append(h)
                return
        session.destroy(h)

    while True:
        with shared.mutex:
            if shared.queue:
                state = shared.queue.pop()
                shared.active += 1
            elif shared.active == 0:
                break
            else:
                continue
        popped += 1
        i = xindex[state.argument(0).symbol.symbol_id]
        j = yindex[state.argument(1).symbol.symbol_id]
        if i + 1 < width:
            push_state(i + 1, j)
        if j + 1 < height:
            push_state(i, j + 1)
        with shared.mutex:
            shared.active -= 1
    for h in my_handles:
        session.destroy(h)
    return popped


def stress_burst(session, n_ops, seed, pool, max_pool=64):
    """Random create/copy/destroy/collect mix; mutates `pool` in place."""
    rng = random.Random(seed)
    lib = session.lib
    f = lib.declare_symbol("f", 2)
    g = lib.declare_symbol("g", 1)
    consts = [lib.declare_symbol(f"c{i}", 0) for i in range(4)]
    for _ in range(n_ops):
        op = rng.randrange(100)
        if op < 40 or not pool:
            h = session.create(rng.choice(consts))
            pool.append(h)
        elif op < 65 and len(pool) >= 2:
            a, b = rng.choice(pool), rng.choice(pool)
            pool.append(session.create(f, (a, b)))
        elif op < 75:
            pool.append(session.create(g, (rng.choice(pool),)))
        elif op < 85:
            pool.append(session.copy(rng.choice(pool)))
        elif op < 99 or len(pool) > max_pool:
            h = pool.pop(rng.randrange(len(pool)))
            session.destroy(h)
        else:
            session.collect()
        while len(pool) > max_pool:
            session.destroy(pool.pop(rng.randrange(len(pool))))

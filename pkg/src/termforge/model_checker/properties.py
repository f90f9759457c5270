"""Property catalog and the fixpoint machinery that evaluates it.

Safety properties run as monitor automata composed with the LTS; the
conditional-liveness properties evaluate the nested greatest/least
fixpoint ("success occurs within finitely many steps unless interrupts
occur continuously, and success stays reachable") on the product graph.
"""

from dataclasses import dataclass

from .lts import label_args, label_name

NEUTRAL, INTERRUPT, SUCCESS = 0, 1, 2


@dataclass
class Verdict:
    property_id: str
    name: str
    holds: bool
    detail: str = ""
    counterexample: list = None     # label sequence from the initial state
    lasso: tuple = None             # (prefix labels, cycle labels)

    @property
    def verdict(self):
        return "PASS" if self.holds else "FAIL"


def parsed_labels(lts):
    """[(name, args)] indexed by label id."""
    return [(label_name(lb), label_args(lb)) for lb in lts.labels]


def participants(lts):
    """Thread ids occurring in the protocol call/return labels."""
    ids = set()
    for name, args in parsed_labels(lts):
        if name.startswith(("enter_", "leave_")) and args:
            ids.add(int(args[0]))
        elif name in ("create_call", "destroy_call") and args:
            ids.add(int(args[0]))
    return sorted(ids)


def term_names(lts):
    return sorted({args[1] for name, args in parsed_labels(lts)
                   if name in ("create_call", "create_return")})


def address_names(lts):
    return sorted({args[2] for name, args in parsed_labels(lts)
                   if name == "create_return"})


# -- product of an LTS with a deterministic monitor -------------------------


class Product:
    """Reachable (state, monitor) pairs with a BFS predecessor tree."""

    __slots__ = ("lts", "states", "index", "adj", "pred")

    def __init__(self, lts, update, m0):
        self.lts = lts
        self.states = [(lts.initial, m0)]
        self.index = {self.states[0]: 0}
        self.adj = []
        self.pred = [None]
        head = 0
        while head < len(self.states):
            s, m = self.states[head]
            out = []
            for lbl, t in lts.successors(s):
                m2 = update(m, lbl)
                key = (t, m2)
                pid = self.index.get(key)
                if pid is None:
                    pid = len(self.states)
                    self.index[key] = pid
                    self.states.append(key)
                    self.pred.append((head, lbl))
                out.append((lbl, pid))
            self.adj.append(out)  # expansion order == state order
            head += 1

    def trace_to(self, pid):
        labels = []
        while self.pred[pid] is not None:
            pid, lbl = self.pred[pid]
            labels.append(self.lts.labels[lbl])
        return labels[::-1]


# -- safety -----------------------------------------------------------------


def check_safety(lts, prop_id, name, update, m0, violated):
    """BFS over the monitor product; FAIL with the shortest trace whose
    endpoint violates the monitor predicate."""
    states = [(lts.initial, m0)]
    index = {states[0]: 0}
    pred = [None]
    if violated(m0):
        return Verdict(prop_id, name, False, "violated initially",
                       counterexample=[])
    head = 0
    while head < len(states):
        s, m = states[head]
        for lbl, t in lts.successors(s):
            m2 = update(m, lbl)
            key = (t, m2)
            if key in index:
                continue
            index[key] = len(states)
            states.append(key)
            pred.append((head, lbl))
            if violated(m2):
                labels = []
                pid = len(states) - 1
                while pred[pid] is not None:
                    pid, lb = pred[pid]
                    labels.append(lts.labels[lb])
                return Verdict(prop_id, name, False,
                               "monitor violation",
                               counterexample=labels[::-1])
        head += 1
    return Verdict(prop_id, name, True)


# -- conditional liveness (the nu X. mu Y pattern) ---------------------------


def _success_reachable(product, classify):
    """States from which a success-labelled edge stays reachable."""
    n = len(product.states)
    rev = [[] for _ in range(n)]
    seeds = []
    for u, out in enumerate(product.adj):
        for lbl, v in out:
            rev[v].append(u)
            if classify(lbl) == SUCCESS:
                seeds.append(u)
    reach = [False] * n
    stack = []
    for u in seeds:
        if not reach[u]:
            reach[u] = True
            stack.append(u)
    while stack:
        u = stack.pop()
        for w in rev[u]:
            if not reach[w]:
                reach[w] = True
                stack.append(w)
    return reach


def eval_conditional_liveness(product, classify, active):
    """Greatest fixpoint Y of: mu Z. (neutral steps shrink toward success
    while the obligation is active, interrupts restart Y, success must
    remain reachable). Returns (Y, Z, reachable) as boolean lists."""
    n = len(product.states)
    reach = _success_reachable(product, classify)
    neutral_rev = [[] for _ in range(n)]
    neutral_deg = [0] * n
    interrupt_succ = [[] for _ in range(n)]
    for u, out in enumerate(product.adj):
        for lbl, v in out:
            cls = classify(lbl)
            if cls == NEUTRAL:
                neutral_rev[v].append(u)
                neutral_deg[u] += 1
            elif cls == INTERRUPT:
                interrupt_succ[u].append(v)
    is_active = [active(product.states[u][1]) for u in range(n)]

    Y = [True] * n
    while True:
        # eligibility under the current Y
        eligible = [False] * n
        for u in range(n):
            if not reach[u]:
                continue
            if any(not Y[v] for v in interrupt_succ[u]):
                continue
            if not is_active[u]:
                ok = True
                for lbl, v in product.adj[u]:
                    if classify(lbl) == NEUTRAL and not Y[v]:
                        ok = False
                        break
                if not ok:
                    continue
            eligible[u] = True
        # least fixpoint: universal attractor over neutral edges
        Z = [False] * n
        remaining = neutral_deg[:]
        queue = []
        for u in range(n):
            if eligible[u] and (not is_active[u] or remaining[u] == 0):
                Z[u] = True
                queue.append(u)
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for u in neutral_rev[v]:
                if Z[u] or not eligible[u] or not is_active[u]:
                    continue
                remaining[u] -= 1
                if remaining[u] == 0:
                    Z[u] = True
                    queue.append(u)
        if Z == Y:
            return Y, Z, reach
        Y = Z


def check_conditional_liveness(lts, prop_id, name, update, m0,
                               trigger, classify_for, active):
    """For every edge labelled by `trigger`, the target must satisfy the
    fixpoint. On failure, produce the trigger trace plus a witness lasso
    of neutral steps when one exists."""
    product = Product(lts, update, m0)
    classify = classify_for
    Y, Z, reach = eval_conditional_liveness(product, classify, active)
    for u, out in enumerate(product.adj):
        for lbl, v in out:
            if trigger(lbl) and not Y[v]:
                prefix = product.trace_to(u) + [lts.labels[lbl]]
                detail, extension, lasso = _failure_witness(
                    product, classify, Y, Z, reach, v,
                    lambda u: active(product.states[u][1]))
                return Verdict(prop_id, name, False, detail,
                               counterexample=prefix + extension, lasso=lasso)
    return Verdict(prop_id, name, True)


def _failure_witness(product, classify, Y, Z, reach, start, obligated):
    """Explain why `start` fails the fixpoint: a reachable state with no
    path to success, or failing that, a cycle of excused steps.

    Returns (detail, extension labels, lasso or None). Only edges whose
    failure actually propagates are followed (targets outside Y, or
    outside Z for neutral steps from obligated states)."""
    labels = product.lts.labels

    def failing_edges(u):
        for lbl, v in product.adj[u]:
            cls = classify(lbl)
            if cls == SUCCESS:
                continue
            if cls == NEUTRAL and obligated(u):
                if not Z[v]:
                    yield lbl, v
            elif not Y[v]:
                yield lbl, v

    # nearest dead state within the failing region
    pred = {start: None}
    queue = [start]
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        if not reach[u]:
            ext = []
            while pred[u] is not None:
                u, lbl = pred[u]
                ext.append(labels[lbl])
            return ("a state with success unreachable is reachable",
                    ext[::-1], None)
        for lbl, v in failing_edges(u):
            if v not in pred:
                pred[v] = (u, lbl)
                queue.append(v)
    # otherwise the failing region is closed, so it contains a cycle
    path, on_path = [], {}
    u = start
    while u not in on_path:
        on_path[u] = len(path)
        for lbl, v in failing_edges(u):
            path.append((lbl, v))
            u = v
            break
        else:
            return ("bounded progress violated", [], None)
    i = on_path[u]
    prefix = [labels[lbl] for lbl, _ in path[:i]]
    cycle = [labels[lbl] for lbl, _ in path[i:]]
    return ("progress can be postponed forever", prefix, (prefix, cycle))


# -- monitors for the protocol properties -------------------------------------


def _const_monitor():
    return (lambda m, lbl: m), 0


def bf1(lts):
    names = parsed_labels(lts)

    def update(m, lbl):
        n, _ = names[lbl]
        if n == "enter_exclusive_return":
            return min(m + 1, 2)
        if n == "leave_exclusive_call":
            return m - 1
        return m

    return check_safety(
        lts, "bf-1", "at most one thread in the exclusive section",
        update, 0, lambda m: m >= 2)


def bf2(lts):
    names = parsed_labels(lts)

    def update(m, lbl):
        s, x = m
        n, _ = names[lbl]
        if n == "enter_shared_return":
            return (s + 1, x)
        if n == "leave_shared_call":
            return (s - 1, x)
        if n == "enter_exclusive_return":
            return (s, x + 1)
        if n == "leave_exclusive_call":
            return (s, x - 1)
        return m

    return check_safety(
        lts, "bf-2", "no thread in exclusive while any thread is in shared",
        update, (0, 0), lambda m: m[0] > 0 and m[1] > 0)


def _liveness_for_thread(lts, prop_id, name, p, trigger_name, success_name,
                         interrupt_names, pipeline):
    """Shared scaffolding for the entry/exit liveness properties."""
    names = parsed_labels(lts)
    inc, dec = pipeline

    def update(m, lbl):
        n, args = names[lbl]
        if n in inc and (not args or int(args[0]) != p):
            return m + 1
        if n in dec and (not args or int(args[0]) != p):
            return m - 1
        return m

    trig = [False] * len(names)
    cls = [NEUTRAL] * len(names)
    for lid, (n, args) in enumerate(names):
        if n == trigger_name and args and int(args[0]) == p:
            trig[lid] = True
        if n == success_name and args and int(args[0]) == p:
            cls[lid] = SUCCESS
        elif n in interrupt_names or n == "improbable":
            cls[lid] = INTERRUPT

    return check_conditional_liveness(
        lts, prop_id, name, update, 0,
        trigger=lambda lbl: trig[lbl],
        classify_for=lambda lbl: cls[lbl],
        active=lambda m: m == 0)


def bf3(lts):
    """Shared entry granted within bounded steps unless a thread is in the
    exclusive pipeline."""
    for p in participants(lts):
        v = _liveness_for_thread(
            lts, "bf-3", "shared entry eventually granted", p,
            "enter_shared_call", "enter_shared_return",
            {"enter_shared_call", "enter_exclusive_call",
             "leave_exclusive_return"},
            pipeline=({"enter_exclusive_call"}, {"leave_exclusive_return"}))
        if not v.holds:
            v.detail = f"thread {p}: {v.detail}"
            return v
    return Verdict("bf-3", "shared entry eventually granted", True)


def bf4(lts):
    """Exclusive entry granted within bounded steps unless another thread
    occupies a shared or exclusive pipeline."""
    for p in participants(lts):
        v = _liveness_for_thread(
            lts, "bf-4", "exclusive entry eventually granted", p,
            "enter_exclusive_call", "enter_exclusive_return",
            {"enter_shared_call", "leave_shared_return",
             "enter_exclusive_call", "leave_exclusive_return"},
            pipeline=({"enter_shared_call", "enter_exclusive_call"},
                      {"leave_shared_return", "leave_exclusive_return"}))
        if not v.holds:
            v.detail = f"thread {p}: {v.detail}"
            return v
    return Verdict("bf-4", "exclusive entry eventually granted", True)


def bf5(lts):
    """Leaving either section completes within bounded steps."""
    for p in participants(lts):
        for sect in ("shared", "exclusive"):
            v = _liveness_for_thread(
                lts, "bf-5", "sections are left within bounded steps", p,
                f"leave_{sect}_call", f"leave_{sect}_return",
                {"enter_shared_call", "enter_exclusive_call"},
                pipeline=(set(), set()))
            if not v.holds:
                v.detail = f"thread {p} leaving {sect}: {v.detail}"
                return v
    return Verdict("bf-5", "sections are left within bounded steps", True)


def bf6(lts):
    """A thread outside both sections can instantly start entering either."""
    names = parsed_labels(lts)
    threads = participants(lts)
    pos = {p: i for i, p in enumerate(threads)}

    def update(m, lbl):
        n, args = names[lbl]
        if not args or n not in ("enter_shared_call", "leave_shared_return",
                                 "enter_exclusive_call",
                                 "leave_exclusive_return"):
            return m
        i = pos.get(int(args[0]))
        if i is None:
            return m
        shared, excl = m[i]
        if n == "enter_shared_call":
            shared = True
        elif n == "leave_shared_return":
            shared = False
        elif n == "enter_exclusive_call":
            excl = True
        else:
            excl = False
        return m[:i] + ((shared, excl),) + m[i + 1:]

    m0 = tuple((False, False) for _ in threads)
    product = Product(lts, update, m0)
    enter_labels = {}
    for lid, (n, args) in enumerate(names):
        if n in ("enter_shared_call", "enter_exclusive_call") and args:
            enter_labels.setdefault(int(args[0]), set()).add(lid)
    for u, (s, m) in enumerate(product.states):
        enabled = {lbl for lbl, _ in product.adj[u]}
        for p in threads:
            shared, excl = m[pos[p]]
            if shared or excl:
                continue
            want = enter_labels.get(p, set())
            missing = [product.lts.labels[l] for l in want if l not in enabled]
            if len(want) < 2 or missing:
                return Verdict(
                    "bf-6", "free threads can instantly start entering",
                    False, f"thread {p} cannot issue {missing or 'entry calls'}",
                    counterexample=product.trace_to(u))
    return Verdict("bf-6", "free threads can instantly start entering", True)


BF_PROPERTIES = {
    "bf-1": (bf1, "safety"),
    "bf-2": (bf2, "safety"),
    "bf-3": (bf3, "liveness"),
    "bf-4": (bf4, "liveness"),
    "bf-5": (bf5, "liveness"),
    "bf-6": (bf6, "entry"),
}


# -- term-library properties ---------------------------------------------------


def tl1(lts):
    """A live term keeps its address: a create may return a fresh address
    only when no thread owns the term."""
    names = parsed_labels(lts)
    for t in term_names(lts):
        def update(m, lbl, t=t):
            addr, owners = m
            n, args = names[lbl]
            if n == "create_return" and args[1] == t:
                return (args[2], owners | {args[0]})
            if n == "destroy_call" and args[1] == t:
                return (addr, owners - {args[0]})
            return m

        def viol_edge(m, lbl, t=t):
            addr, owners = m
            n, args = names[lbl]
            return (n == "create_return" and args[1] == t
                    and addr is not None and args[2] != addr and owners)

        v = _safety_on_edges(lts, "tl-1", "owned terms keep their address",
                             update, (None, frozenset()), viol_edge)
        if not v.holds:
            v.detail = f"term {t}: address changed while owned"
            return v
    return Verdict("tl-1", "owned terms keep their address", True)


def tl2(lts):
    """Same address implies same term while anyone owns it."""
    names = parsed_labels(lts)
    for a in address_names(lts):
        def update(m, lbl, a=a):
            term, owners = m
            n, args = names[lbl]
            if n == "create_return" and args[2] == a:
                return (args[1], owners | {args[0]})
            if n == "destroy_call" and term is not None and args[1] == term:
                return (term, owners - {args[0]})
            return m

        def viol_edge(m, lbl, a=a):
            term, owners = m
            n, args = names[lbl]
            return (n == "create_return" and args[2] == a
                    and term is not None and args[1] != term and owners)

        v = _safety_on_edges(lts, "tl-2", "one address stores one term",
                             update, (None, frozenset()), viol_edge)
        if not v.holds:
            v.detail = f"address {a}: reused while owned"
            return v
    return Verdict("tl-2", "one address stores one term", True)


def _safety_on_edges(lts, prop_id, name, update, m0, viol_edge):
    states = [(lts.initial, m0)]
    index = {states[0]: 0}
    pred = [None]
    head = 0
    while head < len(states):
        s, m = states[head]
        for lbl, t in lts.successors(s):
            if viol_edge(m, lbl):
                labels = []
                pid = head
                while pred[pid] is not None:
                    pid, lb = pred[pid]
                    labels.append(lts.labels[lb])
                labels.reverse()
                labels.append(lts.labels[lbl])
                return Verdict(prop_id, name, False, "monitor violation",
                               counterexample=labels)
            m2 = update(m, lbl)
            key = (t, m2)
            if key not in index:
                index[key] = len(states)
                states.append(key)
                pred.append((head, lbl))
        head += 1
    return Verdict(prop_id, name, True)


def tl3(lts):
    """An idle thread can always start creating an unknown term or
    destroying an owned one, through internal steps only."""
    names = parsed_labels(lts)
    terms = term_names(lts)
    for p in participants(lts):
        mine = [False] * len(names)
        for lid, (n, args) in enumerate(names):
            if (n in ("create_call", "create_return", "destroy_call",
                      "destroy_return") and args and args[0] == str(p)):
                mine[lid] = True

        def update(m, lbl, p=p):
            busy, known = m
            n, args = names[lbl]
            if not args or args[0] != str(p):
                return m
            if n in ("create_call", "destroy_call"):
                return (True, known)
            if n == "create_return":
                return (False, known | {args[1]})
            if n == "destroy_return":
                return (False, known - {args[1]})
            return m

        product = Product(lts, update, (False, frozenset()))
        n_prod = len(product.states)
        tau_adj = [[] for _ in range(n_prod)]
        tau_rev = [[] for _ in range(n_prod)]
        for u, out in enumerate(product.adj):
            for lbl, v in out:
                if not mine[lbl]:
                    tau_adj[u].append(v)
                    tau_rev[v].append(u)
        for t in terms:
            for op in ("create_call", "destroy_call"):
                want = {lid for lid, (n, args) in enumerate(names)
                        if n == op and args[0] == str(p) and args[1] == t}
                srcs = [u for u, out in enumerate(product.adj)
                        if any(lbl in want for lbl, _ in out)]
                good = _backward_closure(tau_rev, srcs, n_prod)
                bad_pre = _backward_closure(
                    tau_rev, [u for u in range(n_prod) if not good[u]], n_prod)
                for u, (s, m) in enumerate(product.states):
                    busy, known = m
                    relevant = (t not in known) if op == "create_call" \
                        else (t in known)
                    if not busy and relevant and bad_pre[u]:
                        return Verdict(
                            "tl-3", "idle threads can always start", False,
                            f"thread {p} may lose the ability to {op}({t})",
                            counterexample=product.trace_to(u))
    return Verdict("tl-3", "idle threads can always start", True)


def _backward_closure(rev, seeds, n):
    mark = [False] * n
    stack = []
    for u in seeds:
        if not mark[u]:
            mark[u] = True
            stack.append(u)
    while stack:
        u = stack.pop()
        for w in rev[u]:
            if not mark[w]:
                mark[w] = True
                stack.append(w)
    return mark


def tl4(lts):
    """Started create/destroy calls finish, given fair scheduling."""
    names = parsed_labels(lts)
    update, m0 = _const_monitor()
    for p in participants(lts):
        for op, ret in (("create_call", "create_return"),
                        ("destroy_call", "destroy_return")):
            trig = [False] * len(names)
            cls = [NEUTRAL] * len(names)
            for lid, (n, args) in enumerate(names):
                if n == op and args[0] == str(p):
                    trig[lid] = True
                if n == ret and args[0] == str(p):
                    cls[lid] = SUCCESS
                elif n == "improbable":
                    cls[lid] = INTERRUPT
                elif (n in ("create_call", "destroy_call")
                      and args[0] != str(p)):
                    cls[lid] = INTERRUPT
            v = check_conditional_liveness(
                lts, "tl-4", "started operations finish", update, m0,
                trigger=lambda lbl, trig=trig: trig[lbl],
                classify_for=lambda lbl, cls=cls: cls[lbl],
                active=lambda m: True)
            if not v.holds:
                v.detail = f"thread {p} {op}: {v.detail}"
                return v
    return Verdict("tl-4", "started operations finish", True)


TERMLIB_PROPERTIES = {
    "tl-1": (tl1, "safety"),
    "tl-2": (tl2, "safety"),
    "tl-3": (tl3, "entry"),
    "tl-4": (tl4, "liveness"),
}


def check_property(lts, prop_id):
    catalog = {**BF_PROPERTIES, **TERMLIB_PROPERTIES}
    if prop_id not in catalog:
        raise KeyError(f"unknown property {prop_id!r}")
    fn, _ = catalog[prop_id]
    return fn(lts)

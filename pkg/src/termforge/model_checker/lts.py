"""Labelled transition systems with deterministic state numbering."""

from ..errors import StateCapExceeded

TAU = "tau"

DEFAULT_STATE_CAP = 50_000_000


class Lts:
    """States are dense ints, 0 is initial; labels are interned strings."""

    def __init__(self):
        self.n_states = 0
        self.initial = 0
        self.labels = []
        self._label_ids = {}
        self.src = []
        self.lbl = []
        self.dst = []
        self._succ = None

    # -- construction -------------------------------------------------

    def add_state(self):
        self.n_states += 1
        return self.n_states - 1

    def label_id(self, label):
        lid = self._label_ids.get(label)
        if lid is None:
            lid = len(self.labels)
            self._label_ids[label] = lid
            self.labels.append(label)
        return lid

    def add_transition(self, s, label, t):
        self.src.append(s)
        self.lbl.append(self.label_id(label))
        self.dst.append(t)
        self._succ = None

    @property
    def n_transitions(self):
        return len(self.src)

    @property
    def tau(self):
        """Label id of tau, or None if the LTS has no tau transitions."""
        return self._label_ids.get(TAU)

    # -- access ---------------------------------------------------------

    def successors(self, s):
        return self._adjacency()[s]

    def _adjacency(self):
        if self._succ is None:
            succ = [[] for _ in range(self.n_states)]
            for s, l, t in zip(self.src, self.lbl, self.dst):
                succ[s].append((l, t))
            self._succ = succ
        return self._succ

    def edges(self):
        return zip(self.src, self.lbl, self.dst)

    # -- transformations ----------------------------------------------------

    def relabel(self, fn):
        """New LTS with labels mapped through fn(label_string)."""
        out = Lts()
        out.n_states = self.n_states
        out.initial = self.initial
        for s, l, t in self.edges():
            out.add_transition(s, fn(self.labels[l]), t)
        return out

    def hide(self, hidden):
        """Relabel to tau every label whose name part is in `hidden`."""
        def fn(label):
            return TAU if label_name(label) in hidden else label
        return self.relabel(fn)

    def __repr__(self):
        return (f"Lts(states={self.n_states}, transitions={self.n_transitions}, "
                f"labels={len(self.labels)})")


def label_name(label):
    """'enter_shared_call(1)' -> 'enter_shared_call'."""
    i = label.find("(")
    return label if i < 0 else label[:i]


def label_args(label):
    """'insert(t0,a1,true,0)' -> ('t0', 'a1', 'true', '0')."""
    i = label.find("(")
    if i < 0:
        return ()
    return tuple(label[i + 1:-1].split(","))


def explore(initial, step_fn, state_cap=DEFAULT_STATE_CAP, check=None):
    """Breadth-first reachability with stable numbering.

    step_fn(state) yields (label, next_state) in a deterministic order;
    check(state), when given, may assert model invariants per state.
    """
    lts = Lts()
    index = {initial: lts.add_state()}
    frontier = [initial]
    if check is not None:
        check(initial)
    head = 0
    while head < len(frontier):
        state = frontier[head]
        sid = index[state]
        head += 1
        for label, nxt in step_fn(state):
            tid = index.get(nxt)
            if tid is None:
                if len(index) >= state_cap:
                    raise StateCapExceeded(
                        f"state cap {state_cap} exceeded during exploration")
                if check is not None:
                    check(nxt)
                tid = lts.add_state()
                index[nxt] = tid
                frontier.append(nxt)
            lts.add_transition(sid, label, tid)
    return lts

"""External-behaviour model of the busy-forbidden protocol.

Eleven per-thread states; the guard of each transition depends only on
which states the other threads occupy. The improbable self-loops mark the
retry behaviour an implementation may exhibit indefinitely.
"""

from .lts import DEFAULT_STATE_CAP, explore

SPEC_STATES = ("Free", "EnterS", "LOE1", "Shared", "LeaveS",
               "EnterE", "LOE2", "LOS", "Exclusive", "LeaveE1", "LeaveE2")

(FREE, ENTER_S, LOE1, SHARED, LEAVE_S,
 ENTER_E, LOE2, LOS, EXCLUSIVE, LEAVE_E1, LEAVE_E2) = range(11)

IMPROBABLE = "improbable"
TAU = "tau"


def build_spec_lts(n_threads, state_cap=DEFAULT_STATE_CAP):
    """Reachable interleaving of n_threads protocol participants."""
    initial = (FREE,) * n_threads

    def step(state):
        for p in range(n_threads):
            s = state[p]
            others = state[:p] + state[p + 1:]
            if s == FREE:
                yield f"enter_shared_call({p})", _set(state, p, ENTER_S)
                yield f"enter_exclusive_call({p})", _set(state, p, ENTER_E)
            elif s == ENTER_S:
                if any(o in (LOS, EXCLUSIVE) for o in others):
                    yield IMPROBABLE, state
                else:
                    yield TAU, _set(state, p, LOE1)
            elif s == LOE1:
                yield f"enter_shared_return({p})", _set(state, p, SHARED)
            elif s == SHARED:
                yield f"leave_shared_call({p})", _set(state, p, LEAVE_S)
            elif s == LEAVE_S:
                yield f"leave_shared_return({p})", _set(state, p, FREE)
            elif s == ENTER_E:
                if not any(o in (LOE2, LOS, EXCLUSIVE) for o in others):
                    yield TAU, _set(state, p, LOE2)
            elif s == LOE2:
                yield IMPROBABLE, state
                if not any(o in (LOE1, SHARED) for o in others):
                    yield TAU, _set(state, p, LOS)
            elif s == LOS:
                yield f"enter_exclusive_return({p})", _set(state, p, EXCLUSIVE)
            elif s == EXCLUSIVE:
                yield f"leave_exclusive_call({p})", _set(state, p, LEAVE_E1)
            elif s == LEAVE_E1:
                yield IMPROBABLE, state
                yield TAU, _set(state, p, LEAVE_E2)
            else:  # LEAVE_E2
                yield f"leave_exclusive_return({p})", _set(state, p, FREE)

    def check(state):
        assert sum(1 for s in state if s == EXCLUSIVE) <= 1, \
            "two threads reached Exclusive"
        if any(s == EXCLUSIVE for s in state):
            assert not any(s == SHARED for s in state), \
                "Shared and Exclusive occupied together"

    return explore(initial, step, state_cap=state_cap, check=check)


def _set(state, p, v):
    return state[:p] + (v,) + state[p + 1:]

"""Implementation model of the busy-forbidden protocol.

One transition per labelled step: flag stores and loads, mutex lock and
unlock, the internal completion step of each sweep, and the improbable
markers on the retry branches. The timed backoff is omitted (it only
matters for performance, not behaviour). The sometimes branches appear as
nondeterministic choices.

Mutants reintroduce the seeded bugs the property catalog must detect.
"""

from .lts import DEFAULT_STATE_CAP, explore

IMPROBABLE = "improbable"

MUTANTS = ("no-sometimes", "skip-busy-recheck", "no-forbidden-reset",
           "no-retry-loop")

# per-thread program counters
IDLE = ("idle",)
ES1, ES2, ES3, ES4, ES5 = ("es1",), ("es2",), ("es3",), ("es4",), ("es5",)
IN_SHARED, LS1, LS2 = ("sh",), ("ls1",), ("ls2",)
EE0, EE2, IN_EXCL, LE1, LE2 = ("ee0",), ("ee2",), ("ex",), ("le1",), ("le2",)
# ("saf", mask) / ("safb", mask, q) / ("safc", mask, q) / ("safi", mask, q)
# ("aat", mask) / ("aati", mask, q)


def build_impl_lts(n_threads, mutant=None, state_cap=DEFAULT_STATE_CAP):
    if mutant is not None and mutant not in MUTANTS:
        raise ValueError(f"unknown mutant {mutant!r}; pick one of {MUTANTS}")
    full = (1 << n_threads) - 1
    no_sometimes = mutant == "no-sometimes"
    skip_busy = mutant == "skip-busy-recheck"
    no_reset = mutant == "no-forbidden-reset"
    no_retry = mutant == "no-retry-loop"

    initial = ((IDLE,) * n_threads, 0, 0, False)

    def step(state):
        locs, busy, forb, locked = state

        def with_loc(p, pc, busy2=None, forb2=None, locked2=None):
            return (locs[:p] + (pc,) + locs[p + 1:],
                    busy if busy2 is None else busy2,
                    forb if forb2 is None else forb2,
                    locked if locked2 is None else locked2)

        for p in range(n_threads):
            pc = locs[p]
            kind = pc[0]
            if kind == "idle":
                yield f"enter_shared_call({p})", with_loc(p, ES1)
                yield f"enter_exclusive_call({p})", with_loc(p, EE0)
            elif kind == "es1":
                yield (f"store(busy({p}),true,{p})",
                       with_loc(p, ES2, busy2=busy | (1 << p)))
            elif kind == "es2":
                if no_retry:
                    # forbidden is never consulted
                    yield f"load(forbidden({p}),{_b(forb >> p & 1)},{p})", \
                        with_loc(p, ES5)
                elif forb >> p & 1:
                    yield f"load(forbidden({p}),true,{p})", with_loc(p, ES3)
                else:
                    yield f"load(forbidden({p}),false,{p})", with_loc(p, ES5)
            elif kind == "es3":
                yield (f"store(busy({p}),false,{p})",
                       with_loc(p, ES4, busy2=busy & ~(1 << p)))
            elif kind == "es4":
                yield IMPROBABLE, with_loc(p, ES1)
            elif kind == "es5":
                yield f"enter_shared_return({p})", with_loc(p, IN_SHARED)
            elif kind == "sh":
                yield f"leave_shared_call({p})", with_loc(p, LS1)
            elif kind == "ls1":
                yield (f"store(busy({p}),false,{p})",
                       with_loc(p, LS2, busy2=busy & ~(1 << p)))
            elif kind == "ls2":
                yield f"leave_shared_return({p})", with_loc(p, IDLE)
            elif kind == "ee0":
                if not locked:
                    yield f"lock({p})", with_loc(p, ("saf", 0), locked2=True)
            elif kind == "saf":
                mask = pc[1]
                if mask == full:
                    yield f"internal({p})", with_loc(p, EE2)
                else:
                    for q in range(n_threads):
                        if not mask >> q & 1:
                            yield (f"store(forbidden({q}),true,{p})",
                                   with_loc(p, ("safb", mask, q),
                                            forb2=forb | (1 << q)))
            elif kind == "safb":
                mask, q = pc[1], pc[2]
                if skip_busy:
                    yield (f"load(busy({q}),{_b(busy >> q & 1)},{p})",
                           with_loc(p, ("saf", mask | (1 << q))))
                elif busy >> q & 1:
                    yield f"load(busy({q}),true,{p})", with_loc(p, ("safc", mask, q))
                else:
                    yield f"load(busy({q}),false,{p})", \
                        with_loc(p, ("saf", mask | (1 << q)))
                if not no_sometimes:
                    yield (f"store(forbidden({q}),false,{p})",
                           with_loc(p, ("safi", mask, q), forb2=forb & ~(1 << q)))
            elif kind == "safc":
                mask, q = pc[1], pc[2]
                yield (f"store(forbidden({q}),false,{p})",
                       with_loc(p, ("safi", mask, q), forb2=forb & ~(1 << q)))
            elif kind == "safi":
                mask, q = pc[1], pc[2]
                yield IMPROBABLE, with_loc(p, ("saf", mask & ~(1 << q)))
            elif kind == "ee2":
                yield f"enter_exclusive_return({p})", with_loc(p, IN_EXCL)
            elif kind == "ex":
                start = full if no_reset else 0
                yield f"leave_exclusive_call({p})", with_loc(p, ("aat", start))
            elif kind == "aat":
                mask = pc[1]
                if mask == full:
                    yield f"internal({p})", with_loc(p, LE1)
                else:
                    for q in range(n_threads):
                        if not mask >> q & 1:
                            yield (f"store(forbidden({q}),false,{p})",
                                   with_loc(p, ("aat", mask | (1 << q)),
                                            forb2=forb & ~(1 << q)))
                            if not no_sometimes:
                                yield (f"store(forbidden({q}),true,{p})",
                                       with_loc(p, ("aati", mask, q),
                                                forb2=forb | (1 << q)))
            elif kind == "aati":
                mask, q = pc[1], pc[2]
                yield IMPROBABLE, with_loc(p, ("aat", mask & ~(1 << q)))
            elif kind == "le1":
                yield f"unlock({p})", with_loc(p, LE2, locked2=False)
            else:  # le2
                yield f"leave_exclusive_return({p})", with_loc(p, IDLE)

    return explore(initial, step, state_cap=state_cap)


def _b(bit):
    return "true" if bit else "false"


INTERNAL_ACTIONS = ("store", "load", "lock", "unlock", "internal")

"""Aldebaran (.aut) import/export.

Header ``des (<initial>, <#transitions>, <#states>)`` followed by one
``(<src>,"<label>",<dst>)`` line per transition.
"""

import re

from .lts import Lts

_HEADER = re.compile(r'^des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$')
_EDGE = re.compile(r'^\(\s*(\d+)\s*,\s*"((?:[^"\\]|\\.)*)"\s*,\s*(\d+)\s*\)\s*$')


def write_aut(lts, path):
    with open(path, "w") as fh:
        fh.write(f"des ({lts.initial},{lts.n_transitions},{lts.n_states})\n")
        labels = lts.labels
        for s, l, t in lts.edges():
            fh.write(f'({s},"{labels[l]}",{t})\n')


def read_aut(path):
    with open(path) as fh:
        header = fh.readline()
        m = _HEADER.match(header)
        if not m:
            raise ValueError(f"not an .aut file: bad header {header!r}")
        initial, n_trans, n_states = map(int, m.groups())
        lts = Lts()
        for _ in range(n_states):
            lts.add_state()
        lts.initial = initial
        for line in fh:
            line = line.strip()
            if not line:
                continue
            em = _EDGE.match(line)
            if not em:
                raise ValueError(f"bad .aut transition line: {line!r}")
            src, label, dst = em.groups()
            lts.add_transition(int(src), label, int(dst))
        if lts.n_transitions != n_trans:
            raise ValueError(f"header declared {n_trans} transitions, "
                             f"file has {lts.n_transitions}")
    return lts

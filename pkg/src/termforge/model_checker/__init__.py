"""Explicit-state model checker for the protocol and library models.

Generates the finite labelled transition systems of the protocol
specification, the protocol implementation (flag/mutex granularity), and
the term-library model; evaluates the safety, conditional-liveness, and
instant-entry properties on them; and decides divergence-preserving
branching bisimilarity between specification and implementation.
"""

from .aut import read_aut, write_aut
from .bf_impl import MUTANTS, build_impl_lts
from .bf_spec import SPEC_STATES, build_spec_lts
from .equivalence import check_equivalence
from .lts import Lts
from .properties import (BF_PROPERTIES, TERMLIB_PROPERTIES, Verdict,
                         check_property)
from .termlib_model import build_termlib_lts

__all__ = [
    "Lts", "build_spec_lts", "build_impl_lts", "build_termlib_lts",
    "SPEC_STATES", "MUTANTS", "check_equivalence", "check_property",
    "BF_PROPERTIES", "TERMLIB_PROPERTIES", "Verdict",
    "read_aut", "write_aut",
]

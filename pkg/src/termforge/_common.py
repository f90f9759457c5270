"""Types shared by the compiled and pure-Python backends."""

from dataclasses import dataclass

REFCOUNT = "refcount"
PROTECTION_SET = "protection-set"
STRATEGIES = (REFCOUNT, PROTECTION_SET)


@dataclass(frozen=True)
class FunctionSymbol:
    """An interned function symbol: (name, arity) is unique per library."""
    symbol_id: int
    name: str
    arity: int

    def __repr__(self):
        return f"FunctionSymbol({self.name}/{self.arity}#{self.symbol_id})"


@dataclass(frozen=True)
class GcStats:
    reclaimed: int
    live: int
    n_buckets: int

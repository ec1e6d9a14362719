"""Maximin-share values: exact search at desk scale, order-statistic bounds.

The maximin share of an agent over ``n`` parts is the best value the
agent can guarantee by partitioning all items into ``n`` parts and
receiving the worst part.  Exact computation enumerates set partitions
canonically (item 0 opens part 0; each later item may open at most one
new part) with branch-and-bound pruning, so it is only offered below a
configurable item cap.  The bounds variant sandwiches the value between
the n-th largest item value and m times that value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DeskCapError, InputError
from .setsystem import SetSystemSpec
from .valuation import Valuation, _value_of_subset, nth_value

DEFAULT_MMS_CAP = 12

ZERO = Fraction(0)


@dataclass(frozen=True)
class Partition:
    """Disjoint parts (possibly empty) covering all items."""

    parts: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class MmsResult:
    """Either an exact value with a witness partition, or certified bounds."""

    value: Fraction | None = None
    witness: Partition | None = None
    lower: Fraction | None = None
    upper: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.value is not None


def mms_exact(
    spec: SetSystemSpec,
    valuation: Valuation,
    n: int,
    *,
    max_items: int = DEFAULT_MMS_CAP,
) -> MmsResult:
    """Exhaustive maximin-share search with a witness partition.

    Parts are unordered; the enumeration is canonicalized so the first
    occupied part holds the smallest item, making the returned witness
    the first optimum in enumeration order (bit-reproducible).  Parts may
    be infeasible; their value is that of their best feasible subset.
    Empty parts are permitted, so n > m simply yields value 0.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if valuation.num_items != spec.num_items:
        raise InputError(
            f"valuation covers {valuation.num_items} items, spec has {spec.num_items}"
        )
    m = spec.num_items
    if m > max_items:
        raise DeskCapError(f"mms_exact capped at {max_items} items, instance has {m}")

    values = valuation.values
    memo: dict[frozenset[int], Fraction] = {}

    def val_of(s: frozenset[int]) -> Fraction:
        cached = memo.get(s)
        if cached is None:
            cached = _value_of_subset(spec, values, s)
            memo[s] = cached
        return cached

    suffixes = [frozenset(range(k, m)) for k in range(m + 1)]
    best: Fraction | None = None
    best_parts: tuple[frozenset[int], ...] | None = None

    def search(k: int, parts: list[frozenset[int]]) -> None:
        nonlocal best, best_parts
        if k == m:
            if len(parts) < n:
                candidate = ZERO
            else:
                candidate = min(val_of(p) for p in parts)
            if best is None or candidate > best:
                best = candidate
                best_parts = tuple(parts)
            return
        rest = suffixes[k]
        # Upper bound: each open part can at best absorb all remaining
        # items; a part not yet opened can at best become all of `rest`.
        bound = None
        for p in parts:
            pb = val_of(p | rest)
            if bound is None or pb < bound:
                bound = pb
        if len(parts) < n:
            rb = val_of(rest)
            if bound is None or rb < bound:
                bound = rb
        if best is not None and bound is not None and bound <= best:
            return
        for i in range(len(parts)):
            parts[i] = parts[i] | {k}
            search(k + 1, parts)
            parts[i] = parts[i] - {k}
        if len(parts) < n:
            parts.append(frozenset((k,)))
            search(k + 1, parts)
            parts.pop()

    search(0, [])
    assert best is not None and best_parts is not None
    padded = best_parts + (frozenset(),) * (n - len(best_parts))
    return MmsResult(value=best, witness=Partition(padded))


def mms_bounds(valuation: Valuation, n: int, m: int) -> MmsResult:
    """Certified sandwich: nth_value(n) <= maximin share <= m * nth_value(n)."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    nth = nth_value(valuation, n)
    return MmsResult(lower=nth, upper=m * nth)

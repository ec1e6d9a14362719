"""Per-agent valuations over item sets.

An agent has a nonnegative exact-rational value for each item, additive
on feasible sets.  The value of an arbitrary set is the value of its best
feasible subset, which makes the valuation fractionally subadditive (a
pointwise maximum of additive functions, one per maximal feasible set).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DegenerateInputError, InputError
from .rationals import parse_rational
from .setsystem import Capacity, SetSystemSpec, coerce_items

ZERO = Fraction(0)


class Valuation:
    """Item values plus a bundle-value query counter.

    Value data is immutable after construction; the counter is the only
    mutable state and only ever increases.  Equality ignores the counter.
    """

    __slots__ = ("_values", "_queries", "_sorted")

    def __init__(self, values: Iterable[Fraction | int | str]):
        vals = []
        for v in values:
            f = v if isinstance(v, Fraction) else parse_rational(v)
            if f < 0:
                raise InputError(f"item values must be nonnegative, got {f}")
            vals.append(f)
        self._values: tuple[Fraction, ...] = tuple(vals)
        self._queries = 0
        self._sorted: tuple[Fraction, ...] | None = None

    @classmethod
    def _wrap(cls, canonical: tuple[Fraction, ...]) -> "Valuation":
        # Trusted constructor: shares the tuple so identical agents keep
        # one value row (identity is what the block machinery dedupes on).
        val = cls.__new__(cls)
        val._values = canonical
        val._queries = 0
        val._sorted = None
        return val

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self._values

    @property
    def num_items(self) -> int:
        return len(self._values)

    @property
    def query_count(self) -> int:
        return self._queries

    def _count_query(self) -> None:
        self._queries += 1

    def _sorted_desc(self) -> tuple[Fraction, ...]:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._values, reverse=True))
        return self._sorted

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._values == other._values

    def __repr__(self) -> str:
        return f"Valuation({len(self._values)} items)"


def _value_of_subset(spec: SetSystemSpec, values: Sequence[Fraction], s: frozenset[int]) -> Fraction:
    """Max over feasible subsets of ``s`` of the value sum (no counting)."""
    if not s:
        return ZERO
    if isinstance(spec, Capacity):
        buckets: dict[int, list[Fraction]] = {}
        for j in s:
            buckets.setdefault(spec.class_of[j], []).append(values[j])
        total = ZERO
        for c, vals in buckets.items():
            cap = spec.classes[c][1]
            if cap <= 0:
                continue
            if len(vals) > cap:
                vals.sort(reverse=True)
                vals = vals[:cap]
            for v in vals:
                total += v
        return total
    best = ZERO
    for maximal in spec.maximal_sets:
        acc = ZERO
        for j in s & maximal:
            acc += values[j]
        if acc > best:
            best = acc
    return best


def bundle_value(spec: SetSystemSpec, valuation: Valuation, items: Iterable[int]) -> Fraction:
    """Value of a set: the best feasible subset's value sum.

    Capacity specs keep, per class, the largest values up to the class
    capacity (classes are independent constraints).  Explicit specs take
    the best intersection with a maximal set, which by heredity dominates
    every feasible subset.  Increments the valuation's query counter.
    """
    if valuation.num_items != spec.num_items:
        raise InputError(
            f"valuation covers {valuation.num_items} items, spec has {spec.num_items}"
        )
    s = coerce_items(spec, items)
    valuation._count_query()
    return _value_of_subset(spec, valuation.values, s)


def nth_value(valuation: Valuation, n: int) -> Fraction:
    """The ``n``-th largest item value (order statistic); 0 when n > m."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    ranked = valuation._sorted_desc()
    if n > len(ranked):
        return ZERO
    return ranked[n - 1]


def normalize_to_partition(
    valuation: Valuation,
    partition: Iterable[Iterable[int]],
    spec: SetSystemSpec,
) -> Valuation:
    """Divide each item value by the bundle value of the part holding it.

    The parts must be disjoint and cover all items, and every part must
    have positive bundle value.  In the result, each part's bundle value
    is exactly 1 (scaling all values of a part by one constant commutes
    with the max over feasible subsets).
    """
    m = spec.num_items
    if valuation.num_items != m:
        raise InputError(
            f"valuation covers {valuation.num_items} items, spec has {m}"
        )
    part_of: list[int] = [-1] * m
    parts: list[frozenset[int]] = []
    for idx, raw in enumerate(partition):
        part = coerce_items(spec, raw)
        for j in part:
            if part_of[j] != -1:
                raise InputError(f"item {j} appears in more than one part")
            part_of[j] = idx
        parts.append(part)
    uncovered = [j for j in range(m) if part_of[j] == -1]
    if uncovered:
        raise InputError(f"items not covered by the partition: {uncovered}")

    scales: list[Fraction] = []
    for idx, part in enumerate(parts):
        pv = bundle_value(spec, valuation, part)
        if pv == 0:
            raise DegenerateInputError(
                f"part {idx} has bundle value 0 and cannot be normalized"
            )
        scales.append(pv)
    new_values = tuple(
        valuation.values[j] / scales[part_of[j]] for j in range(m)
    )
    return Valuation._wrap(new_values)

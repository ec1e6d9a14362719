"""Shared test helpers: independent brute-force oracles and seeded suites.

The oracles here deliberately avoid the production evaluation paths:
``brute_bundle_value`` enumerates every subset and filters through the
feasibility query, and ``brute_mms`` enumerates labeled part assignments
directly.  They exist to cross-check the fast implementations.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from fairdiv import (
    Instance,
    is_feasible,
    mms_exact,
    normalize_to_partition,
    random_instance,
)

FAMILIES = ("capacity", "explicit-antichain", "free")


def brute_bundle_value(spec, values, items) -> Fraction:
    """Max value-sum over all feasible subsets, by full enumeration."""
    items = sorted(items)
    best = Fraction(0)
    for size in range(len(items) + 1):
        for combo in combinations(items, size):
            if is_feasible(spec, combo):
                total = sum((values[j] for j in combo), Fraction(0))
                if total > best:
                    best = total
    return best


def brute_mms(spec, values, n) -> Fraction:
    """Maximin share by enumerating labeled assignments (m <= ~6)."""
    m = spec.num_items
    best = Fraction(0) if n > m else None
    assignment = [0] * m

    def walk(k: int):
        nonlocal best
        if k == m:
            worst = None
            for part_idx in range(n):
                part = [j for j in range(m) if assignment[j] == part_idx]
                pv = brute_bundle_value(spec, values, part)
                if worst is None or pv < worst:
                    worst = pv
            if best is None or worst > best:
                best = worst
            return
        for part_idx in range(n):
            assignment[k] = part_idx
            walk(k + 1)

    walk(0)
    return best


def suite_instance(i: int, base_seed: int) -> Instance:
    """Deterministic suite member: families cycle, m and n vary with i."""
    meta = random.Random(1_000_003 * (base_seed + i))
    n = meta.choice((2, 3))
    m = meta.randint(n, 8)
    return random_instance(base_seed + i, m, n, FAMILIES[i % len(FAMILIES)])


def iter_suite(count: int, base_seed: int):
    for i in range(count):
        yield suite_instance(i, base_seed)


def normalized_by_witnesses(instance: Instance):
    """Rescale every agent by its own exact maximin witness.

    Returns (normalized instance, list of exact maximin values).  Every
    part of each witness has positive value on these suites (positive
    item values, feasible singletons, m >= n), so normalization is
    always defined.
    """

    normalized = []
    exact_values = []
    for val in instance.valuations:
        result = mms_exact(instance.spec, val, instance.n)
        exact_values.append(result.value)
        parts = [p for p in result.witness.parts if p]
        normalized.append(normalize_to_partition(val, parts, instance.spec))
    ninst = Instance(
        name=f"{instance.name}-normalized",
        n=instance.n,
        spec=instance.spec,
        valuations=tuple(normalized),
    )
    return ninst, exact_values


def random_subset(rng: random.Random, m: int) -> list[int]:
    return [j for j in range(m) if rng.random() < 0.5]


def reference_allocate_naive(instance, alpha):
    """Literal reference search: raw subsets via itertools, restart after
    every allocation.  Validates the block-level enumeration, whose
    continue-instead-of-restart scan must be indistinguishable."""
    from itertools import combinations

    from fairdiv import bundle_value

    items = sorted(range(instance.num_items))
    agents = sorted(range(instance.n))
    trace = []
    for tau in range(1, instance.num_items + 1):
        while True:
            hit = None
            for combo in combinations(items, tau):
                for agent in agents:
                    value = bundle_value(instance.spec, instance.valuations[agent], combo)
                    if value >= alpha:
                        hit = (combo, agent, value)
                        break
                if hit:
                    break
            if not hit:
                break
            combo, agent, value = hit
            trace.append((tau, agent, combo, value))
            items = [j for j in items if j not in combo]
            agents.remove(agent)
    return trace, agents


def reference_minimal_set(spec, valuations, items, thresholds):
    """Literal one-item-at-a-time removal scan; no blocks, no batching."""
    from fairdiv import bundle_value

    current = sorted(items)
    agents = sorted(valuations)
    while True:
        pick = None
        for agent in agents:
            v = bundle_value(spec, valuations[agent], current)
            t = thresholds[agent]
            if pick is None or v * pick[2] > pick[1] * t:
                pick = (agent, v, t)
        agent, _, threshold = pick
        order = sorted(current, key=lambda j: (valuations[agent].values[j], j))
        for j in order:
            rest = [x for x in current if x != j]
            if bundle_value(spec, valuations[agent], rest) >= threshold:
                current = rest
                break
        else:
            return frozenset(current), agent

"""Instance builders, random families, and JSON wire formats.

An instance bundles a hereditary set system with one valuation per
agent.  Serialized instances are single JSON documents; identical-agent
instances store one valuation row with an ``identical_agents`` flag to
keep large symmetric fixtures small.  Allocations serialize to a JSON
document mirroring the trace plus a summary block.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .allocator import MINIMAL, PHASE, ZERO_ESTIMATE, Allocation, TraceEvent
from .errors import InputError, ParseError
from .rationals import format_rational, parse_rational
from .setsystem import Capacity, SetSystemSpec, capacity, explicit_maximal
from .valuation import Valuation

RANDOM_FAMILIES = ("free", "explicit-antichain", "capacity")

_EVENT_KINDS = (PHASE, MINIMAL, ZERO_ESTIMATE)


@dataclass(frozen=True)
class Instance:
    """Agents, items (dense ids 0..m-1), a set system, and valuations."""

    name: str
    n: int
    spec: SetSystemSpec
    valuations: tuple[Valuation, ...]
    identical_agents: bool = False
    item_classes: tuple[str, ...] | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"need at least one agent, got {self.n}")
        if len(self.valuations) != self.n:
            raise InputError(
                f"{len(self.valuations)} valuations for {self.n} agents"
            )
        for i, val in enumerate(self.valuations):
            if val.num_items != self.spec.num_items:
                raise InputError(
                    f"valuation {i} covers {val.num_items} items, "
                    f"spec has {self.spec.num_items}"
                )
        if self.item_classes is not None and len(self.item_classes) != self.spec.num_items:
            raise InputError("item_classes length must match the item count")

    @property
    def num_items(self) -> int:
        return self.spec.num_items


def footnote_instance() -> Instance:
    """Three items a, b, c (ids 0, 1, 2) with maximal sets {a} and {b, c}
    and values 3, 2, 2.  One agent; replicate to taste."""
    spec = explicit_maximal(3, [{0}, {1, 2}])
    values = (Fraction(3), Fraction(2), Fraction(2))
    return Instance(
        name="footnote",
        n=1,
        spec=spec,
        valuations=(Valuation._wrap(values),),
        identical_agents=True,
    )


def replicate_agents(instance: Instance, n: int) -> Instance:
    """Clone a single-agent template into n identical agents."""
    if instance.n != 1:
        raise InputError("replicate_agents expects a single-agent template")
    if n < 1:
        raise InputError(f"need at least one agent, got {n}")
    row = instance.valuations[0].values
    return Instance(
        name=instance.name,
        n=n,
        spec=instance.spec,
        valuations=tuple(Valuation._wrap(row) for _ in range(n)),
        identical_agents=True,
        item_classes=instance.item_classes,
        seed=instance.seed,
    )


_ADVERSARIAL_ROWS: tuple[tuple[str, Fraction, int], ...] = (
    ("A", Fraction(40, 107), 2),
    ("B", Fraction(23, 107), 1),
    ("C", Fraction(17, 107), 2),
    ("D", Fraction(10, 107), 5),
    ("E", Fraction(4, 107), 11),
    ("F", Fraction(1, 107), 40),
)


def table1_instance(n: int) -> Instance:
    """The adversarial capacity instance with identical agents.

    Six item classes A..F with quantities (n, n/3, 2n/3, 2n/3, n/3, 40n),
    values (40, 23, 17, 10, 4, 1)/107 and capacities (2, 1, 2, 5, 11, 40).
    n must be a positive multiple of 330 so all quantities are integers.
    Items are laid out class by class, A first.
    """
    if n <= 0 or n % 330:
        raise InputError(f"agent count must be a positive multiple of 330, got {n}")
    quantities = {"A": n, "B": n // 3, "C": 2 * n // 3, "D": 2 * n // 3, "E": n // 3, "F": 40 * n}
    classes: list[tuple[frozenset[int], int]] = []
    values: list[Fraction] = []
    labels: list[str] = []
    next_id = 0
    for label, value, cap in _ADVERSARIAL_ROWS:
        count = quantities[label]
        members = frozenset(range(next_id, next_id + count))
        next_id += count
        classes.append((members, cap))
        values.extend([value] * count)
        labels.extend([label] * count)
    spec = capacity(next_id, classes)
    row = tuple(values)
    return Instance(
        name=f"table1-n{n}",
        n=n,
        spec=spec,
        valuations=tuple(Valuation._wrap(row) for _ in range(n)),
        identical_agents=True,
        item_classes=tuple(labels),
    )


def random_instance(
    seed: int,
    m: int,
    n: int,
    family: str,
    value_range: tuple[int, int] = (8, 4),
) -> Instance:
    """Seed-deterministic random instance from one of three families.

    ``free`` makes every subset feasible (one maximal set holding all
    items).  ``explicit-antichain`` draws random subsets, prunes
    dominated ones, and covers stray items with singletons so every item
    is feasible on its own.  ``capacity`` assigns items to random classes
    with capacities of at least one.  Values are uniform positive
    rationals with numerators and denominators bounded by ``value_range``.
    """
    if m < 0 or n < 1:
        raise InputError(f"need m >= 0 and n >= 1, got m={m}, n={n}")
    if family not in RANDOM_FAMILIES:
        raise InputError(f"unknown family {family!r}, expected one of {RANDOM_FAMILIES}")
    rng = random.Random(seed)
    max_num, max_den = value_range
    valuations = tuple(
        Valuation._wrap(
            tuple(
                Fraction(rng.randint(1, max_num), rng.randint(1, max_den))
                for _ in range(m)
            )
        )
        for _ in range(n)
    )

    if family == "free":
        spec: SetSystemSpec = explicit_maximal(m, [range(m)])
    elif family == "capacity":
        k = rng.randint(1, max(1, m))
        assignment = [rng.randrange(k) for _ in range(m)]
        classes = []
        for c in range(k):
            members = [j for j in range(m) if assignment[j] == c]
            if members:
                classes.append((members, rng.randint(1, len(members))))
        spec = capacity(m, classes)
    else:
        num_sets = rng.randint(1, max(2, m))
        sets: list[set[int]] = []
        for _ in range(num_sets):
            s = {j for j in range(m) if rng.random() < 0.5}
            if s:
                sets.append(s)
        covered = set().union(*sets) if sets else set()
        for j in range(m):
            if j not in covered:
                sets.append({j})
        spec = explicit_maximal(m, sets)

    return Instance(
        name=f"random-{family}-{seed}",
        n=n,
        spec=spec,
        valuations=valuations,
        seed=seed,
    )


def _spec_to_doc(spec: SetSystemSpec) -> dict[str, Any]:
    if isinstance(spec, Capacity):
        return {
            "type": "capacity",
            "classes": [
                {"items": sorted(members), "capacity": cap}
                for members, cap in spec.classes
            ],
        }
    return {
        "type": "explicit",
        "maximal_sets": [sorted(s) for s in spec.maximal_sets],
    }


def serialize_instance(instance: Instance) -> str:
    items: list[dict[str, Any]] = []
    for j in range(instance.num_items):
        entry: dict[str, Any] = {"id": j}
        if instance.item_classes is not None:
            entry["class"] = instance.item_classes[j]
        items.append(entry)
    if instance.identical_agents:
        val_docs = [_valuation_to_doc(0, instance.valuations[0])]
    else:
        val_docs = [
            _valuation_to_doc(i, val) for i, val in enumerate(instance.valuations)
        ]
    doc: dict[str, Any] = {
        "name": instance.name,
        "n": instance.n,
        "items": items,
        "set_system": _spec_to_doc(instance.spec),
        "identical_agents": instance.identical_agents,
        "valuations": val_docs,
    }
    if instance.seed is not None:
        doc["seed"] = instance.seed
    return json.dumps(doc, indent=2) + "\n"


def _valuation_to_doc(agent: int, val: Valuation) -> dict[str, Any]:
    return {
        "agent": agent,
        "values": {str(j): format_rational(v) for j, v in enumerate(val.values)},
    }


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"line {exc.lineno} column {exc.colno}") from exc


def _require(doc: dict[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise ParseError(f"missing field {key!r}", location=where)
    return doc[key]


def _parse_values_row(entry: dict[str, Any], m: int, where: str) -> tuple[Fraction, ...]:
    raw = _require(entry, "values", where)
    if not isinstance(raw, dict):
        raise ParseError("values must be an object keyed by item id", location=where)
    row: list[Fraction | None] = [None] * m
    for key, text in raw.items():
        try:
            j = int(key)
        except ValueError:
            raise ParseError(f"bad item id {key!r}", location=f"{where}.values") from None
        if not 0 <= j < m:
            raise ParseError(f"item id {j} outside [0, {m})", location=f"{where}.values")
        if row[j] is not None:
            raise ParseError(f"duplicate value for item {j}", location=f"{where}.values")
        try:
            value = parse_rational(text)
        except ParseError as exc:
            raise ParseError(str(exc), location=f"{where}.values.{key}") from None
        row[j] = value
    missing = [j for j in range(m) if row[j] is None]
    if missing:
        raise ParseError(f"missing values for items {missing}", location=f"{where}.values")
    return tuple(row)  # type: ignore[arg-type]


def parse_instance(text: str) -> Instance:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    name = _require(doc, "name", "instance")
    n = _require(doc, "n", "instance")
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"n must be a positive integer, got {n!r}", location="n")
    items = _require(doc, "items", "instance")
    if not isinstance(items, list):
        raise ParseError("items must be a list", location="items")
    m = len(items)
    labels: list[str] | None = None
    for idx, entry in enumerate(items):
        if not isinstance(entry, dict) or entry.get("id") != idx:
            raise ParseError(
                f"items must carry dense ids in order; entry {idx} is {entry!r}",
                location=f"items[{idx}]",
            )
        if "class" in entry:
            if labels is None:
                labels = [""] * m
            labels[idx] = entry["class"]

    ss = _require(doc, "set_system", "instance")
    sstype = _require(ss, "type", "set_system")
    try:
        if sstype == "capacity":
            classes = _require(ss, "classes", "set_system")
            spec: SetSystemSpec = capacity(
                m,
                [
                    (entry["items"], entry["capacity"])
                    for entry in classes
                ],
            )
        elif sstype == "explicit":
            spec = explicit_maximal(m, _require(ss, "maximal_sets", "set_system"))
        else:
            raise ParseError(f"unknown set_system type {sstype!r}", location="set_system.type")
    except (InputError, KeyError, TypeError) as exc:
        raise ParseError(f"bad set system: {exc}", location="set_system") from exc

    identical = bool(doc.get("identical_agents", False))
    val_docs = _require(doc, "valuations", "instance")
    if not isinstance(val_docs, list) or not val_docs:
        raise ParseError("valuations must be a non-empty list", location="valuations")
    if identical:
        if len(val_docs) != 1:
            raise ParseError(
                "identical_agents instances carry exactly one valuation row",
                location="valuations",
            )
        row = _parse_values_row(val_docs[0], m, "valuations[0]")
        valuations = tuple(Valuation._wrap(row) for _ in range(n))
    else:
        if len(val_docs) != n:
            raise ParseError(
                f"expected {n} valuation rows, got {len(val_docs)}", location="valuations"
            )
        rows = []
        for i, entry in enumerate(val_docs):
            if entry.get("agent") != i:
                raise ParseError(
                    f"valuation rows must be in agent order; row {i} is for {entry.get('agent')!r}",
                    location=f"valuations[{i}]",
                )
            rows.append(_parse_values_row(entry, m, f"valuations[{i}]"))
        valuations = tuple(Valuation._wrap(row) for row in rows)

    return Instance(
        name=str(name),
        n=n,
        spec=spec,
        valuations=valuations,
        identical_agents=identical,
        item_classes=tuple(labels) if labels is not None else None,
        seed=doc.get("seed"),
    )


def serialize_allocation(allocation: Allocation, *, alpha: Fraction | None = None) -> str:
    """Render an allocation document: the trace events plus a summary.

    ``min_ratio_to_mu`` reports the worst value-to-estimate ratio among
    traced bundles with positive thresholds; it needs alpha because
    thresholds store alpha * mu.
    """
    events = [
        {
            "kind": event.kind,
            "phase": event.phase,
            "agent": event.agent,
            "bundle": list(event.bundle),
            "value": format_rational(event.value),
            "threshold": format_rational(event.threshold),
        }
        for event in allocation.trace
    ]
    min_ratio: Fraction | None = None
    if alpha is not None:
        for event in allocation.trace:
            if event.threshold > 0:
                ratio = alpha * event.value / event.threshold
                if min_ratio is None or ratio < min_ratio:
                    min_ratio = ratio
    doc: dict[str, Any] = {
        "events": events,
        "unallocated_agents": sorted(allocation.unallocated_agents),
        "summary": {
            "allocated": len(allocation.bundles),
            "unallocated": len(allocation.unallocated_agents),
            "min_ratio_to_mu": format_rational(min_ratio) if min_ratio is not None else None,
        },
    }
    if alpha is not None:
        doc["alpha"] = format_rational(alpha)
    return json.dumps(doc, indent=2) + "\n"


def parse_allocation(text: str) -> Allocation:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("allocation document must be a JSON object")
    raw_events = _require(doc, "events", "allocation")
    events: list[TraceEvent] = []
    for idx, entry in enumerate(raw_events):
        where = f"events[{idx}]"
        kind = _require(entry, "kind", where)
        if kind not in _EVENT_KINDS:
            raise ParseError(f"unknown event kind {kind!r}", location=where)
        events.append(
            TraceEvent(
                kind=kind,
                phase=_require(entry, "phase", where),
                agent=_require(entry, "agent", where),
                bundle=tuple(_require(entry, "bundle", where)),
                value=parse_rational(_require(entry, "value", where)),
                threshold=parse_rational(_require(entry, "threshold", where)),
            )
        )
    bundles = {event.agent: frozenset(event.bundle) for event in events}
    unallocated = frozenset(_require(doc, "unallocated_agents", "allocation"))
    return Allocation(bundles, tuple(events), unallocated)

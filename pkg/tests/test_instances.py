from fractions import Fraction

import pytest

from fairdiv import (
    Capacity,
    InputError,
    ParseError,
    bundle_value,
    footnote_instance,
    is_feasible,
    parse_allocation,
    parse_instance,
    parse_rational,
    random_instance,
    replicate_agents,
    serialize_allocation,
    serialize_instance,
    table1_instance,
)
from fairdiv import EstimateVector, allocate_from_estimates, fair_divide

ALPHA_PRIME = Fraction(40, 107)


@pytest.fixture(scope="module")
def table1():
    return table1_instance(330)


def test_table1_shape(table1):
    assert table1.n == 330
    assert table1.num_items == 43 * 330
    assert isinstance(table1.spec, Capacity)
    counts = {}
    for label in table1.item_classes:
        counts[label] = counts.get(label, 0) + 1
    n = 330
    assert counts == {"A": n, "B": n // 3, "C": 2 * n // 3, "D": 2 * n // 3, "E": n // 3, "F": 40 * n}


def test_table1_value_identities(table1):
    """Class values expressed in terms of the 40/107 ratio."""
    value_of = {}
    for j, label in enumerate(table1.item_classes):
        value_of.setdefault(label, table1.valuations[0].values[j])
    assert value_of["A"] == ALPHA_PRIME
    assert value_of["B"] == Fraction(13, 4) * ALPHA_PRIME - 1 == Fraction(23, 107)
    assert value_of["C"] == 1 - Fraction(9, 4) * ALPHA_PRIME == Fraction(17, 107)
    assert value_of["D"] == Fraction(1, 4) * ALPHA_PRIME == Fraction(10, 107)
    assert value_of["E"] == 2 - Fraction(21, 4) * ALPHA_PRIME == Fraction(4, 107)
    assert value_of["F"] == Fraction(1, 40) * ALPHA_PRIME == Fraction(1, 107)


def test_table1_two_part_types_consume_everything(table1):
    """2n/3 parts of one A, C, D + forty F and n/3 parts of one A, B, E +
    forty F partition the items, each part feasible with value 1."""
    by_class: dict[str, list[int]] = {}
    for j, label in enumerate(table1.item_classes):
        by_class.setdefault(label, []).append(j)
    n = table1.n
    f_iter = iter(by_class["F"])
    a_iter = iter(by_class["A"])
    parts = []
    for i in range(2 * n // 3):
        parts.append(
            [next(a_iter), by_class["C"][i], by_class["D"][i]]
            + [next(f_iter) for _ in range(40)]
        )
    for i in range(n // 3):
        parts.append(
            [next(a_iter), by_class["B"][i], by_class["E"][i]]
            + [next(f_iter) for _ in range(40)]
        )
    used = [j for part in parts for j in part]
    assert len(used) == len(set(used)) == table1.num_items
    assert next(f_iter, None) is None and next(a_iter, None) is None
    val = table1.valuations[0]
    for part in parts[:2] + parts[-2:]:
        assert is_feasible(table1.spec, part)
        assert bundle_value(table1.spec, val, part) == 1


def test_table1_requires_multiple_of_330():
    for bad in (0, -330, 100, 331):
        with pytest.raises(InputError):
            table1_instance(bad)
    assert table1_instance(660).n == 660


def test_footnote_template():
    inst = footnote_instance()
    assert inst.n == 1
    assert bundle_value(inst.spec, inst.valuations[0], {1, 2}) == 4
    assert not is_feasible(inst.spec, {0, 1})
    two = replicate_agents(inst, 2)
    assert two.n == 2
    assert two.valuations[0].values is two.valuations[1].values


def test_random_instance_deterministic():
    a = random_instance(42, m=7, n=3, family="explicit-antichain")
    b = random_instance(42, m=7, n=3, family="explicit-antichain")
    assert a == b
    c = random_instance(43, m=7, n=3, family="explicit-antichain")
    assert a != c


def test_random_free_family_everything_feasible():
    inst = random_instance(5, m=6, n=2, family="free")
    assert is_feasible(inst.spec, range(6))


def test_random_explicit_items_all_covered():
    for seed in range(10):
        inst = random_instance(seed, m=8, n=2, family="explicit-antichain")
        for j in range(8):
            assert is_feasible(inst.spec, {j})


def test_random_instance_rejects_unknown_family():
    with pytest.raises(InputError):
        random_instance(1, m=4, n=2, family="matroid")


def test_instance_round_trips():
    fixtures = [
        footnote_instance(),
        table1_instance(330),
        random_instance(11, m=6, n=2, family="capacity"),
        random_instance(12, m=6, n=3, family="explicit-antichain"),
        random_instance(13, m=5, n=2, family="free"),
    ]
    for inst in fixtures:
        assert parse_instance(serialize_instance(inst)) == inst


def test_identical_agents_shorthand_keeps_one_row(table1):
    doc = serialize_instance(table1)
    assert doc.count('"agent"') == 1
    parsed = parse_instance(doc)
    assert parsed.n == 330
    assert parsed.valuations[0].values is parsed.valuations[329].values


def test_allocation_round_trip(table1):
    small = replicate_agents(footnote_instance(), 2)
    alloc, _ = fair_divide(small, Fraction(11, 30), Fraction(1, 16))
    assert parse_allocation(serialize_allocation(alloc, alpha=Fraction(11, 30))) == alloc
    mu = EstimateVector((Fraction(1),) * 330)
    big = allocate_from_estimates(table1, mu, ALPHA_PRIME + Fraction(1, 10**7))
    assert parse_allocation(serialize_allocation(big)) == big


def test_rational_wire_format():
    assert parse_rational("40/107") == Fraction(40, 107)
    assert parse_rational("80/214") == Fraction(40, 107)
    assert parse_rational("3") == 3
    assert parse_rational(3) == 3
    with pytest.raises(ParseError):
        parse_rational("0.5")
    with pytest.raises(ParseError):
        parse_rational("1/0")


def test_parse_errors_carry_location():
    inst = random_instance(1, m=3, n=2, family="free")
    doc = serialize_instance(inst)

    with pytest.raises(ParseError, match="line"):
        parse_instance(doc[:40])
    with pytest.raises(ParseError, match="set_system"):
        parse_instance(doc.replace('"type": "explicit"', '"type": "mystery"'))
    with pytest.raises(ParseError, match="values"):
        parse_instance(doc.replace('"0": ', '"9": ', 1))
    with pytest.raises(ParseError, match="missing field"):
        parse_instance("{}")

import pytest
from hypothesis import given, strategies as st

from abagrad.core import (
    Abaf,
    AbafError,
    ParseError,
    Rule,
    check_flat,
    parse_abaf,
    serialize_abaf,
)
from abagrad.generator import GenParams, gen_abaf

EXAMPLE1 = "a a\na b\na c\nc a q\nc b x\nc c y\nr q b c\nw b 0.1\nw c 0.2"

EXAMPLE2 = """a a
a b
a c
a d
c a na
c b nb
c c nc
c d nd
r c a b
r nb a
r nc b d
"""


def test_parse_example1():
    d = parse_abaf(EXAMPLE1)
    assert d.assumptions == {"a", "b", "c"}
    assert d.contrary == {"a": "q", "b": "x", "c": "y"}
    assert d.tau == {"a": 0.5, "b": 0.1, "c": 0.2}
    assert Rule("q", frozenset({"b", "c"})) in d.rules


def test_parse_minimal():
    d = parse_abaf("a a\nc a x")
    assert d.assumptions == {"a"}
    assert d.tau == {"a": 0.5}
    assert "x" in d.sentences  # implicitly declared


def test_parse_weight_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse_abaf("a a\nc a x\nw a 1.5")


def test_parse_weight_for_non_assumption():
    with pytest.raises(ParseError, match="non-assumption"):
        parse_abaf("a a\nc a x\nw q 0.3")


def test_parse_duplicate_contrary():
    with pytest.raises(ParseError, match="duplicate"):
        parse_abaf("a a\nc a x\nc a y")


def test_parse_missing_contrary():
    with pytest.raises(AbafError):
        parse_abaf("a a")


def test_parse_comments_and_blank_lines():
    d = parse_abaf("# header\n\na a  # trailing\nc a x\n")
    assert d.assumptions == {"a"}


def test_implicit_sentences_allowed_in_rules():
    d = parse_abaf("a a\nc a x\nr p q r2")
    assert {"p", "q", "r2"} <= d.sentences


def test_check_flat_example2():
    d = parse_abaf(EXAMPLE2)
    res = check_flat(d)
    assert not res.flat
    assert res.witnesses == {Rule("c", frozenset({"a", "b"}))}


def test_check_flat_without_offending_rule():
    d = parse_abaf(EXAMPLE2.replace("r c a b\n", ""))
    assert check_flat(d).flat


def test_check_flat_rule_free():
    d = parse_abaf("a a\nc a x")
    res = check_flat(d)
    assert res.flat and not res.witnesses


def test_roundtrip_example1():
    d = parse_abaf(EXAMPLE1)
    assert parse_abaf(serialize_abaf(d)) == d


def test_serialize_minimal_framework():
    text = serialize_abaf(parse_abaf("a a\nc a x"))
    lines = [l for l in text.splitlines() if l]
    assert lines == ["a a", "c a x"]


def test_serialize_weight_roundtrip_exact():
    d = parse_abaf("a a\nc a x\nw a 0.1")
    d2 = parse_abaf(serialize_abaf(d))
    assert d2.tau["a"] == d.tau["a"]


def test_tau_range_enforced_on_construction():
    with pytest.raises(AbafError):
        Abaf({"a"}, frozenset(), {"a": "x"}, {"a": 1.2})


@given(
    n_asm=st.integers(1, 5),
    n_atoms=st.integers(0, 4),
    n_rules=st.integers(0, 8),
    max_body=st.integers(1, 4),
    flat=st.booleans(),
    seed=st.integers(0, 2**32),
)
def test_roundtrip_on_generated_frameworks(n_asm, n_atoms, n_rules, max_body, flat, seed):
    if flat and n_rules > 0 and n_atoms == 0:
        n_atoms = 1
    d = gen_abaf(GenParams(n_asm, n_atoms, n_rules, max_body, flat, seed))
    assert parse_abaf(serialize_abaf(d)) == d
    flatness = check_flat(d)
    assert flatness.flat == all(r.head not in d.assumptions for r in d.rules)

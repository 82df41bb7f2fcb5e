import pytest
from hypothesis import given, settings, strategies as st
import random

from helpers import random_automaton
from resta.bottomup import determinize, minimize
from resta.corpus import gen_An, gen_Aprime_n, gen_named
from resta.formats import load_automaton, parse_automaton, print_automaton
from resta.topdown import TopDownAutomaton
from resta.trees import ParseError

BU = """\
alphabet: f/2 a/0
kind: bottom-up
states: q0 q1
final: q1
rules:
a -> q0
f(q0,q0) -> q1   # comment
"""


def same(a, b):
    return (isinstance(b, TopDownAutomaton) == isinstance(a, TopDownAutomaton) and a.alphabet == b.alphabet and a.states == b.states
            and a.rules == b.rules and getattr(a, "finals", None) == getattr(b, "finals", None)
            and getattr(a, "initials", None) == getattr(b, "initials", None))


def test_parse_bottom_up():
    a = parse_automaton(BU)
    assert a.states == {"q0", "q1"} and a.finals == {"q1"}
    assert len(a.rules) == 2


def test_kind_defaults_to_bottom_up():
    a = parse_automaton(BU.replace("kind: bottom-up\n", ""))
    assert a.finals == {"q1"}


@pytest.mark.parametrize("make", [
    lambda: gen_named("example1"), lambda: gen_An(2), lambda: gen_Aprime_n(2),
    lambda: minimize(determinize(gen_named("example1"))),
], ids=["example1", "A2", "Aprime2", "minimal"])
def test_round_trip(make):
    a = make()
    text = print_automaton(a)
    b = parse_automaton(text)
    assert same(a, b)
    assert print_automaton(b) == text


def test_bracketed_state_names():
    text = print_automaton(determinize(gen_named("example1")))
    assert "{q1,q4}" in text
    assert print_automaton(parse_automaton(text)) == text


def test_top_down_format():
    text = """alphabet: f/2 a/0
kind: top-down
states: q r
initial: q
rules:
q(f) -> f(r,r)
r(a) -> a
"""
    a = parse_automaton(text)
    assert isinstance(a, TopDownAutomaton)
    assert a.initials == {"q"}


@pytest.mark.parametrize("text, line", [
    (BU.replace("a -> q0", "a q0"), 6),
    (BU.replace("f(q0,q0) -> q1", "f(q0,q0 -> q1"), 7),
    (BU.replace("f(q0,q0) -> q1", "f(q0,) -> q1"), 7),
    (BU.replace("f(q0,q0) -> q1", "f(q0) -> q1"), 7),
    (BU.replace("a -> q0", "a -> zz"), 6),
    (BU.replace("a -> q0", "g -> q0"), 6),
    (BU.replace("states: q0 q1", "bogus: x"), 3),
    (BU.replace("final: q1", "final: q1\nfinal: q0"), 5),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as e:
        parse_automaton(text)
    assert e.value.line == line
    assert f"line {line}" in str(e.value)


@pytest.mark.parametrize("text", [
    "kind: bottom-up\n",
    BU.replace("f/2 a/0", "f/x"),
    BU.replace("bottom-up", "sideways"),
    BU.replace("f(q0,q0) -> q1", "f(q0) -> q1"),
    BU.replace("a -> q0", "a -> zz"),
    BU.replace("final: q1", "initial: q1"),
    BU.replace("a -> q0", "g -> q0"),
])
def test_invalid_automata(text):
    with pytest.raises(ParseError):
        parse_automaton(text)


def test_top_down_symbol_mismatch():
    text = "alphabet: f/2 a/0\nkind: top-down\nstates: q\ninitial: q\nrules:\nq(f) -> a\n"
    with pytest.raises(ParseError) as e:
        parse_automaton(text)
    assert e.value.line == 6


def test_load_prefixes_path(tmp_path):
    p = tmp_path / "bad.aut"
    p.write_text("alphabet: f/2\nstates q\n")
    with pytest.raises(ParseError) as e:
        load_automaton(str(p))
    assert str(p) in str(e.value)
    good = tmp_path / "good.aut"
    good.write_text(BU)
    assert same(load_automaton(str(good)), parse_automaton(BU))


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_random_round_trip(seed):
    a = random_automaton(random.Random(seed))
    assert same(parse_automaton(print_automaton(a)), a)

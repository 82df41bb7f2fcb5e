import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import FAB, random_automaton
from resta.bottomup import (
    BottomUpAutomaton,
    Dfta,
    Rule,
    accepts,
    complement,
    complete,
    determinize,
    equivalent,
    is_empty,
    language_included,
    minimize,
    product,
    reachable_states,
    rename_states,
    representatives,
    trim,
)
from resta.bu_residuals import isomorphic
from resta.corpus import gen_An, gen_named
from resta.oracle import membership_of
from resta.trees import AlphabetError, enumerate_terms, parse_term

EX1 = gen_named("example1")
TERMS4 = enumerate_terms(FAB, 4)
TERMS3 = enumerate_terms(FAB, 3)


def automata(max_states=4):
    return st.integers(0, 10**6).map(lambda s: random_automaton(random.Random(s), max_states))


def same_on(a, b, terms):
    ma, mb = membership_of(a), membership_of(b)
    return all(ma(t) == mb(t) for t in terms)


def test_reachable_states_example1():
    assert reachable_states(EX1, parse_term("a1")) == {"q1", "q4"}
    assert reachable_states(EX1, parse_term("f(a1,b1)")) == {"q5"}
    assert reachable_states(EX1, parse_term("f(b1,b1)")) == frozenset()


def test_accepts_example1():
    assert accepts(EX1, parse_term("f(a1,b2)"))
    assert not accepts(EX1, parse_term("f(a2,b1)"))
    assert not accepts(EX1, parse_term("a1"))
    with pytest.raises(AlphabetError):
        accepts(EX1, parse_term("f(a,b)"))


def test_validation():
    with pytest.raises(ValueError):
        BottomUpAutomaton(FAB, ["p"], ["q"], [])
    with pytest.raises(ValueError):
        BottomUpAutomaton(FAB, ["p"], ["p"], [Rule("a", (), "q")])
    with pytest.raises(AlphabetError):
        BottomUpAutomaton(FAB, ["p"], ["p"], [Rule("f", ("p",), "p")])
    with pytest.raises(ValueError):
        Dfta(FAB, ["p", "q"], ["p"], [Rule("a", (), "p"), Rule("a", (), "q")])


def test_duplicate_rules_collapse():
    a = BottomUpAutomaton(FAB, ["p"], ["p"], [Rule("a", (), "p"), ("a", (), "p")])
    assert len(a.rules) == 1


def test_trim_examples():
    a = BottomUpAutomaton(FAB, ["p", "u"], ["p"], [Rule("a", (), "p"), Rule("b", (), "u")])
    t = trim(a)
    assert t.states == {"p"}
    assert equivalent(a, t)
    assert trim(EX1) == EX1
    empty = trim(BottomUpAutomaton(FAB, ["p"], [], [Rule("a", (), "p")]))
    assert not empty.finals and is_empty(empty)


def test_zero_state_automaton():
    z = BottomUpAutomaton(FAB, [], [], [])
    assert is_empty(z)
    assert not accepts(z, parse_term("a"))
    assert determinize(z).is_complete()


def test_determinize_example1_subset_state():
    d = determinize(EX1)
    assert d.is_deterministic() and d.is_complete()
    assert d.evaluate(parse_term("a1")) == "{q1,q4}"
    assert "{}" in d.states
    assert equivalent(d, EX1)


def test_determinize_An():
    a2 = gen_An(2)
    assert equivalent(a2, determinize(a2))


def test_determinize_of_complete_dfta_is_isomorphic():
    d = minimize(determinize(EX1))
    assert isomorphic(determinize(d), d)


def test_complement_requires_complete_dfta():
    with pytest.raises(ValueError):
        complement(EX1)
    with pytest.raises(ValueError):
        complement(trim(minimize(determinize(EX1))))


def test_product_and_complement_empty():
    lp = gen_named("Lprime")
    d = determinize(lp)
    assert is_empty(product(lp, complement(d), "and"))
    assert language_included(EX1, EX1)


def test_product_or_union():
    fab, fba = gen_named("fab"), gen_named("fab_fba")
    u = product(fab, fba, "or")
    assert equivalent(u, fba)
    with pytest.raises(ValueError):
        product(fab, fba, "xor")


def test_minimize_example1_counts():
    m = minimize(determinize(EX1))
    assert len(m.states) == 6  # 5 nonempty residuals plus the sink
    assert isomorphic(minimize(m), m)


def test_minimize_An_grows():
    sizes = [len(minimize(determinize(gen_An(n))).states) for n in (1, 2, 3)]
    assert sizes[2] > 5
    assert sizes == sorted(sizes)


def test_minimize_names_are_canonical():
    a = gen_An(2)
    b = rename_states(a, {q: f"x{q}" for q in a.states})
    assert minimize(determinize(a)) == minimize(determinize(b))


def test_representatives_are_minimal():
    d = minimize(determinize(EX1))
    reps = representatives(d)
    by_state: dict = {}
    for t in enumerate_terms(EX1.alphabet, 3):
        by_state.setdefault(d.evaluate(t), t)
    assert reps == by_state


def test_complete_adds_sink_only_when_needed():
    assert complete(minimize(determinize(EX1))).states == minimize(determinize(EX1)).states
    c = complete(EX1)
    assert c.is_complete() and "sink" in c.states and equivalent(c, EX1)


# -- randomized cross-checks against the naive evaluator ----------------------

@given(automata())
@settings(max_examples=40, deadline=None)
def test_determinize_and_trim_preserve_acceptance(a):
    d = determinize(a)
    assert d.is_deterministic() and d.is_complete()
    assert same_on(a, d, TERMS4)
    assert same_on(a, trim(a), TERMS4)


@given(automata())
@settings(max_examples=40, deadline=None)
def test_trim_idempotent(a):
    assert trim(trim(a)) == trim(a)


@given(automata())
@settings(max_examples=30, deadline=None)
def test_minimize_equivalent_and_idempotent(a):
    m = minimize(determinize(a))
    assert same_on(a, m, TERMS3)
    assert minimize(m) == m
    # every term reaches exactly one state
    for t in TERMS3:
        assert len(reachable_states(m, t)) == 1


@given(automata(3), automata(3))
@settings(max_examples=25, deadline=None)
def test_de_morgan(a, b):
    d1, d2 = determinize(a), determinize(b)
    lhs = complement(determinize(product(d1, d2, "and")))
    rhs = product(complement(d1), complement(d2), "or")
    assert equivalent(lhs, rhs)


@given(automata(3), automata(3))
@settings(max_examples=25, deadline=None)
def test_boolean_ops_pointwise(a, b):
    ma, mb = membership_of(a), membership_of(b)
    m_and, m_or = membership_of(product(a, b, "and")), membership_of(product(a, b, "or"))
    for t in TERMS3:
        assert m_and(t) == (ma(t) and mb(t))
        assert m_or(t) == (ma(t) or mb(t))
    inc = language_included(a, b)
    if inc:
        assert all(mb(t) for t in TERMS4 if ma(t))
    assert equivalent(a, b) == (inc and language_included(b, a))

import ast
import io
from pathlib import Path

import pytest

import resta.oracle as oracle
from resta.bottomup import determinize
from resta.corpus import gen_An, gen_named
from resta.oracle import (
    BoundedLanguage,
    bounded_difference,
    bounded_equivalent,
    brute_prime_down,
    brute_prime_up,
    brute_residual_down,
    brute_residual_up,
    brute_state_contexts,
    dump_counterexamples,
    height_bounds,
    membership_of,
)
from resta.td_residuals import canonical_down_rfta
from resta.topdown import to_bottom_up
from resta.trees import parse_context, parse_term, print_context

EX1 = gen_named("example1")


def ctxs(items):
    return {print_context(c) for c in items}


def test_residual_up_example1():
    bl = BoundedLanguage.of(EX1)
    assert ctxs(brute_residual_up(bl, parse_term("a1"), 2)) == {"f(<>,b1)", "f(<>,b2)"}


def test_residual_up_foreign_term_is_empty():
    bl = BoundedLanguage.of(EX1)
    assert brute_residual_up(bl, parse_term("f(b1,a1)"), 3) == frozenset()


def test_residual_down_Lprime():
    bl = BoundedLanguage.of(gen_named("Lprime"))
    got = brute_residual_down(bl, parse_context("f(a,<>)"), 1)
    assert {str(t) for t in got} == {"b", "c"}


def test_residual_down_identity_is_language():
    bl = BoundedLanguage.of(EX1, 2)
    got = brute_residual_down(bl, parse_context("<>"), 2)
    assert {str(t) for t in got} == {"f(a1,b1)", "f(a1,b2)", "f(a2,b2)"}


def test_bounds_validated():
    bl = BoundedLanguage.of(EX1)
    with pytest.raises(ValueError):
        brute_residual_up(bl, parse_term("a1"), 0)
    with pytest.raises(ValueError):
        brute_residual_down(bl, parse_context("<>"), 0)
    with pytest.raises(ValueError):
        bounded_equivalent(EX1, EX1, 0)
    with pytest.raises(ValueError):
        brute_prime_up(bl, 0, 2)


def test_A2_bounded_equivalent_to_determinized():
    a = gen_An(2)
    assert bounded_equivalent(a, determinize(a), 5)


def test_prime_up_example1():
    bl = BoundedLanguage.of(EX1)
    found = brute_prime_up(bl, 2, 3)
    assert sum(r.prime for r in found) == 5
    nonempty = [r for r in found if r.members]
    assert len(nonempty) == 5 and all(r.prime for r in nonempty)
    assert [r.prime for r in found if not r.members] == [False]


def test_prime_down_Lprime():
    found = brute_prime_down(BoundedLanguage.of(gen_named("Lprime")), 3, 2)
    assert sum(r.prime for r in found) == 4
    assert [r for r in found if not r.members][0].prime is False


def test_canonical_down_Lprime_differs():
    lp = gen_named("Lprime")
    can = to_bottom_up(canonical_down_rfta(lp))
    assert not bounded_equivalent(can, lp, 2)
    diff = bounded_difference(can, lp, 2)
    # no product of two-letter residuals fits inside L', so nothing is accepted
    assert {str(t) for t in diff} == {"f(a,b)", "f(a,c)", "f(b,a)", "f(b,c)", "f(c,a)", "f(c,b)"}


def test_state_contexts_bounded():
    assert ctxs(brute_state_contexts(EX1, "q1", 2)) == {"f(<>,b1)"}
    assert ctxs(brute_state_contexts(EX1, "q5", 3)) == {"<>"}
    with pytest.raises(KeyError):
        brute_state_contexts(EX1, "nope", 2)


def test_height_bounds_env(monkeypatch):
    monkeypatch.delenv("RESTA_MAX_HEIGHT", raising=False)
    assert height_bounds() == (3, 4)
    monkeypatch.setenv("RESTA_MAX_HEIGHT", "2")
    assert height_bounds() == (2, 2)
    monkeypatch.setenv("RESTA_MAX_HEIGHT", "0")
    with pytest.raises(ValueError):
        height_bounds()


def test_deterministic_order():
    bl = BoundedLanguage.of(gen_An(1), 3)
    first = [(str(r.witness), sorted(map(str, r.members))) for r in brute_prime_down(bl, 2, 3)]
    again = [(str(r.witness), sorted(map(str, r.members))) for r in brute_prime_down(bl, 2, 3)]
    assert first == again


def test_membership_top_down_matches_bottom_up():
    from resta.corpus import gen_Aprime_n
    ma, mb = membership_of(gen_Aprime_n(2)), membership_of(gen_An(2))
    for t in BoundedLanguage.of(gen_An(2), 4).terms():
        assert ma(t) == mb(t)


def test_dump_counterexamples():
    buf = io.StringIO()
    n = dump_counterexamples([parse_term("f(a,b)"), parse_context("f(<>,a)")], buf)
    assert n == 2
    assert buf.getvalue() == "f(a,b)\nf(<>,a)\n"


def test_oracle_only_uses_trees():
    tree = ast.parse(Path(oracle.__file__).read_text())
    local = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom) and n.level}
    assert local == {"trees"}

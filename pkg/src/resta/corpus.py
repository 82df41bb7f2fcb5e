"""Witness languages: the ``L_n`` family and small named languages.

Each named language comes with an automaton and an independent Python
membership predicate, so tests can compare the two.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .bottomup import BottomUpAutomaton, Rule
from .topdown import TdRule, TopDownAutomaton
from .trees import RankedAlphabet, Term, path_lengths

STAR = "q*"
FA = RankedAlphabet({"f": 2, "a": 0})


def _q(k: int) -> str:
    return f"q{k}"


def gen_An(n: int) -> BottomUpAutomaton:
    """Bottom-up RFTA with n+2 states for L_n (trees with a path of length n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    states = [STAR] + [_q(k) for k in range(n + 1)]
    rules = {Rule("a", (), STAR), Rule("a", (), _q(n)), Rule("f", (STAR, STAR), STAR)}
    others = [q for q in states if q != _q(0)]
    for k in range(1, n + 1):
        qk, down = _q(k), _q(k - 1)
        for q in others:
            rules |= {
                Rule("f", (qk, q), down), Rule("f", (q, qk), down),
                Rule("f", (qk, q), STAR), Rule("f", (q, qk), STAR),
            }
    return BottomUpAutomaton(FA, states, [_q(0)], rules)


def an_missing_rules(n: int) -> frozenset[Rule]:
    """Rules that the canonical RFTA of L_n has on top of ``gen_An(n)``.

    For k in 1..n: ``f(qk,q0) -> q(k-1)`` and ``f(q0,qk) -> q(k-1)``; for
    every state q: ``f(q,q0) -> q*`` and ``f(q0,q) -> q*``.
    """
    states = [STAR] + [_q(k) for k in range(n + 1)]
    out = set()
    for k in range(1, n + 1):
        out |= {Rule("f", (_q(k), _q(0)), _q(k - 1)), Rule("f", (_q(0), _q(k)), _q(k - 1))}
    for q in states:
        out |= {Rule("f", (q, _q(0)), STAR), Rule("f", (_q(0), q), STAR)}
    return frozenset(out)


def gen_Aprime_n(n: int) -> TopDownAutomaton:
    """Top-down RFTA for L_n; state q_k accepts L_(n-k), q* accepts every tree."""
    if n < 1:
        raise ValueError("n must be >= 1")
    states = [STAR] + [_q(k) for k in range(n + 1)]
    rules = {TdRule(STAR, "a", ()), TdRule(_q(n), "a", ()), TdRule(STAR, "f", (STAR, STAR))}
    for k in range(1, n + 1):
        rules.add(TdRule(_q(k - 1), "f", (_q(k), STAR)))
        rules.add(TdRule(_q(k - 1), "f", (STAR, _q(k))))
    return TopDownAutomaton(FA, states, [_q(0)], rules)


def in_Ln(n: int) -> Callable[[Term], bool]:
    return lambda t: n in path_lengths(t)


def _finite(alphabet: RankedAlphabet, words: list[tuple[str, str]]) -> BottomUpAutomaton:
    """Recognizer of a finite set of terms ``f(x, y)`` over constants."""
    consts = alphabet.constants
    states = [f"q{c}" for c in consts] + ["qf"]
    rules = [Rule(c, (), f"q{c}") for c in consts]
    rules += [Rule("f", (f"q{x}", f"q{y}"), "qf") for x, y in words]
    return BottomUpAutomaton(alphabet, states, ["qf"], rules)


def _example1() -> BottomUpAutomaton:
    alphabet = RankedAlphabet({"f": 2, "a1": 0, "b1": 0, "a2": 0, "b2": 0})
    rules = [
        Rule("a1", (), "q1"), Rule("b1", (), "q2"), Rule("b2", (), "q3"),
        Rule("a2", (), "q4"), Rule("a1", (), "q4"),
        Rule("f", ("q1", "q2"), "q5"), Rule("f", ("q4", "q3"), "q5"),
    ]
    return BottomUpAutomaton(alphabet, ["q1", "q2", "q3", "q4", "q5"], ["q5"], rules)


_ABC = RankedAlphabet({"f": 2, "a": 0, "b": 0, "c": 0})
_AB = RankedAlphabet({"f": 2, "a": 0, "b": 0})

EXAMPLE1_TERMS = ("f(a1,b1)", "f(a1,b2)", "f(a2,b2)")
LPRIME_PAIRS = [("a", "b"), ("a", "c"), ("b", "a"), ("b", "c"), ("c", "a"), ("c", "b")]


def _finite_membership(pairs) -> Callable[[Term], bool]:
    allowed = set(pairs)

    def member(t: Term) -> bool:
        return (t.symbol == "f" and all(not c.children for c in t.children)
                and (t.children[0].symbol, t.children[1].symbol) in allowed)
    return member


NAMED: dict[str, tuple[Callable[[], BottomUpAutomaton], Callable[[Term], bool]]] = {
    "example1": (_example1, _finite_membership([("a1", "b1"), ("a1", "b2"), ("a2", "b2")])),
    "Lprime": (lambda: _finite(_ABC, LPRIME_PAIRS), _finite_membership(LPRIME_PAIRS)),
    "fab_fba": (lambda: _finite(_AB, [("a", "b"), ("b", "a")]), _finite_membership([("a", "b"), ("b", "a")])),
    "fab": (lambda: _finite(_AB, [("a", "b")]), _finite_membership([("a", "b")])),
    "universal": (
        lambda: BottomUpAutomaton(_AB, ["q"], ["q"], [Rule("a", (), "q"), Rule("b", (), "q"), Rule("f", ("q", "q"), "q")]),
        lambda t: True,
    ),
}


def gen_named(name: str) -> BottomUpAutomaton:
    try:
        return NAMED[name][0]()
    except KeyError:
        raise KeyError(f"unknown language {name!r}; known: {', '.join(sorted(NAMED))}") from None


def named_membership(name: str) -> Callable[[Term], bool]:
    return NAMED[name][1]


def generate(name: str, n: int | None = None):
    """Dispatch used by the CLI: ``An N``, ``Aprime N`` or a named language."""
    if name in ("An", "Aprime"):
        if n is None:
            raise ValueError(f"{name} needs a parameter N")
        return gen_An(n) if name == "An" else gen_Aprime_n(n)
    if n is not None:
        raise ValueError(f"{name} takes no parameter")
    return gen_named(name)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    language: object
    expected: dict
    basis: dict


def load_manifest() -> list[CorpusEntry]:
    """Corpus entries with their expected classification records."""
    raw = json.loads(resources.files("resta").joinpath("data/corpus.json").read_text(encoding="utf-8"))
    out = []
    for item in raw["entries"]:
        gen = item["generator"]
        out.append(CorpusEntry(item["name"], generate(gen["name"], gen.get("n")), item["expected"], item["basis"]))
    return out

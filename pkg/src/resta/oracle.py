"""Brute-force reference implementations used as ground truth in tests.

Everything here works by exhaustive enumeration of terms and contexts up
to a height bound and a raw membership predicate.  Automata are only read
through their rule sets by the naive evaluators below, never through the
algorithms in the modules under test.
"""

from __future__ import annotations

import itertools
import os
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, TextIO

from .trees import Context, RankedAlphabet, Term, enumerate_contexts, enumerate_terms, plug, print_term

DEFAULT_CONTEXT_HEIGHT = 3
DEFAULT_TERM_HEIGHT = 4


def height_bounds() -> tuple[int, int]:
    """(context bound, term bound); ``RESTA_MAX_HEIGHT`` overrides both."""
    env = os.environ.get("RESTA_MAX_HEIGHT")
    if env:
        h = int(env)
        if h < 1:
            raise ValueError("RESTA_MAX_HEIGHT must be >= 1")
        return h, h
    return DEFAULT_CONTEXT_HEIGHT, DEFAULT_TERM_HEIGHT


def naive_bottom_up_accepts(alphabet, finals, rules) -> Callable[[Term], bool]:
    """Membership straight from a bottom-up rule list ``(symbol, children, target)``."""
    rules = [(r[0], tuple(r[1]), r[2]) for r in rules]
    finals = set(finals)

    def states(t: Term) -> set:
        kids = [states(c) for c in t.children]
        return {q for f, cs, q in rules if f == t.symbol and len(cs) == len(kids)
                and all(c in k for c, k in zip(cs, kids))}

    def member(t: Term) -> bool:
        alphabet.check(t)
        return bool(states(t) & finals)
    return member


def naive_top_down_accepts(alphabet, initials, rules) -> Callable[[Term], bool]:
    """Membership straight from a top-down rule list ``(state, symbol, children)``."""
    rules = [(r[0], r[1], tuple(r[2])) for r in rules]

    def acc(q, t: Term) -> bool:
        return any(s == q and f == t.symbol and len(cs) == len(t.children)
                   and all(acc(c, k) for c, k in zip(cs, t.children))
                   for s, f, cs in rules)

    def member(t: Term) -> bool:
        alphabet.check(t)
        return any(acc(q, t) for q in initials)
    return member


def membership_of(automaton) -> Callable[[Term], bool]:
    if hasattr(automaton, "initials"):
        return naive_top_down_accepts(automaton.alphabet, automaton.initials, automaton.rules)
    return naive_bottom_up_accepts(automaton.alphabet, automaton.finals, automaton.rules)


def brute_state_contexts(automaton, q: str, ctx_height: int) -> frozenset[Context]:
    """Bounded C_q of a bottom-up automaton: contexts c with c[q] rewriting to a final state.

    The hole is filled with a fresh constant whose only rule leads to ``q``.
    """
    if q not in automaton.states:
        raise KeyError(f"unknown state {q!r}")
    fresh = "__hole"
    while fresh in automaton.alphabet:
        fresh += "_"
    alpha = RankedAlphabet(list(automaton.alphabet.base().items()) + [(fresh, 0)])
    member = naive_bottom_up_accepts(alpha, automaton.finals, list(automaton.rules) + [(fresh, (), q)])
    leaf = Term(fresh)
    return frozenset(c for c in enumerate_contexts(automaton.alphabet.base(), ctx_height) if member(plug(c, leaf)))


@dataclass(frozen=True)
class BoundedLanguage:
    membership: Callable[[Term], bool]
    height_bound: int
    alphabet: RankedAlphabet

    @classmethod
    def of(cls, automaton, height_bound: int = DEFAULT_TERM_HEIGHT) -> "BoundedLanguage":
        return cls(membership_of(automaton), height_bound, automaton.alphabet.base())

    def terms(self, height: int | None = None) -> list[Term]:
        return enumerate_terms(self.alphabet, height or self.height_bound)

    def contexts(self, height: int) -> list[Context]:
        return enumerate_contexts(self.alphabet, height)


def brute_residual_up(lang: BoundedLanguage, t: Term, ctx_height: int) -> frozenset[Context]:
    """Contexts c of height <= ctx_height with c[t] in L."""
    if ctx_height < 1:
        raise ValueError("ctx_height must be >= 1")
    return frozenset(c for c in lang.contexts(ctx_height) if lang.membership(plug(c, t)))


def brute_residual_down(lang: BoundedLanguage, c: Context, term_height: int) -> frozenset[Term]:
    """Terms t of height <= term_height with c[t] in L."""
    if term_height < 1:
        raise ValueError("term_height must be >= 1")
    return frozenset(t for t in lang.terms(term_height) if lang.membership(plug(c, t)))


def bounded_difference(a, b, height: int) -> list[Term]:
    """Terms of height <= ``height`` on which the two automata disagree."""
    ma, mb = membership_of(a), membership_of(b)
    return [t for t in enumerate_terms(a.alphabet.base(), height) if ma(t) != mb(t)]


def bounded_equivalent(a, b, height: int) -> bool:
    if height < 1:
        raise ValueError("height must be >= 1")
    return not bounded_difference(a, b, height)


class BoundedResidual(NamedTuple):
    witness: Term | Context
    members: frozenset
    prime: bool


def _classify(found: dict[frozenset, object]) -> list[BoundedResidual]:
    out = []
    for res, wit in found.items():
        if not res:
            out.append(BoundedResidual(wit, res, False))
            continue
        below = [r for r in found if r < res]
        union = frozenset().union(*below) if below else frozenset()
        out.append(BoundedResidual(wit, res, union != res))
    return out


def brute_prime_up(lang: BoundedLanguage, term_height: int, ctx_height: int) -> list[BoundedResidual]:
    """Distinct bounded bottom-up residuals of terms up to ``term_height``, with prime flags.

    Witnesses are the first terms in enumeration order producing each residual.
    """
    if term_height < 1 or ctx_height < 1:
        raise ValueError("bounds must be >= 1")
    ctxs = lang.contexts(ctx_height)
    found: dict[frozenset, Term] = {}
    for t in lang.terms(term_height):
        res = frozenset(c for c in ctxs if lang.membership(plug(c, t)))
        found.setdefault(res, t)
    return _classify(found)


def brute_prime_down(lang: BoundedLanguage, ctx_height: int, term_height: int) -> list[BoundedResidual]:
    """Distinct bounded top-down residuals of contexts up to ``ctx_height``, with prime flags."""
    if term_height < 1 or ctx_height < 1:
        raise ValueError("bounds must be >= 1")
    terms = lang.terms(term_height)
    found: dict[frozenset, Context] = {}
    for c in lang.contexts(ctx_height):
        res = frozenset(t for t in terms if lang.membership(plug(c, t)))
        found.setdefault(res, c)
    return _classify(found)


def _hole_relations(lang: BoundedLanguage, ctx_height: int, term_height: int):
    """For each context and symbol of arity >= 2: the set of child tuples landing in L."""
    terms = lang.terms(term_height)
    for c in lang.contexts(ctx_height):
        for f in lang.alphabet.sorted_symbols():
            n = lang.alphabet.arity(f)
            if n < 2:
                continue
            rel = {kids for kids in itertools.product(terms, repeat=n)
                   if lang.membership(plug(c, Term(f, kids)))}
            yield c, f, n, rel


def brute_path_closed(lang: BoundedLanguage, ctx_height: int = 2, term_height: int = 2) -> list[Term]:
    """Counterexamples ``c[f(t1..tn)]`` to path-closure found within the bounds."""
    out = []
    for c, f, n, rel in _hole_relations(lang, ctx_height, term_height):
        for u, v in itertools.product(rel, repeat=2):
            for i in range(n):
                mixed = u[:i] + v[i:]
                if mixed not in rel:
                    out.append(plug(c, Term(f, mixed)))
                    break
            if out:
                return out
    return out


def brute_homogeneous(lang: BoundedLanguage, ctx_height: int = 2, term_height: int = 2) -> list[Term]:
    """Counterexamples to the exchange property found within the bounds."""
    terms = lang.terms(term_height)
    for c, f, n, rel in _hole_relations(lang, ctx_height, term_height):
        for b in rel:
            for o in itertools.product(terms, repeat=n):
                if o not in rel and all(b[:i] + (o[i],) + b[i + 1:] in rel for i in range(n)):
                    return [plug(c, Term(f, o))]
    return []


def dump_counterexamples(items: Iterable, stream: TextIO | None = None) -> int:
    """Write one item per line in term syntax; returns how many were written."""
    stream = stream or sys.stderr
    k = 0
    for x in items:
        stream.write((print_term(x) if isinstance(x, Term) else str(x)) + "\n")
        k += 1
    return k

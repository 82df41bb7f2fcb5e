"""Top-down residuals, canonical top-down RFTA and the class deciders.

A top-down residual ``c^-1 L`` is a tree language.  Over the minimal
complete DFTA D of L, every such residual is ``L(D)`` with the final
states replaced by ``S_c = {q | c[q] ->* F}``.  Since D is deterministic
and every state is reachable, residual inclusion and union reduce to
plain set inclusion and union on these subsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Union

from .bottomup import (
    BottomUpAutomaton,
    Dfta,
    determinize,
    equivalent,
    minimize,
    reachable_state_set,
    representatives,
    sorted_states,
)
from .topdown import TdRule, TopDownAutomaton, td_state_language, to_bottom_up
from .trees import HOLE_TERM, IDENTITY, Context, Term, compose

Language = Union[BottomUpAutomaton, TopDownAutomaton]
Residual = frozenset


def as_bottom_up(lang: Language) -> BottomUpAutomaton:
    return to_bottom_up(lang) if isinstance(lang, TopDownAutomaton) else lang


@dataclass(frozen=True)
class TdResidualCatalog:
    base: Dfta
    live: frozenset[str]
    residuals: tuple[Residual, ...]
    witness: dict[Residual, Context] = field(repr=False)
    prime: dict[Residual, bool] = field(default_factory=dict)

    def name(self, s: Residual) -> str:
        return f"r{self.residuals.index(s)}"

    def includes(self, s1: Residual, s2: Residual) -> bool:
        """L(s1) <= L(s2)."""
        return (s1 & self.live) <= (s2 & self.live)

    def is_initial(self, s: Residual) -> bool:
        return self.includes(s, self.base.finals)

    def language(self, s: Residual) -> BottomUpAutomaton:
        return self.base.with_finals(s)

    @property
    def primes(self) -> tuple[Residual, ...]:
        return tuple(s for s in self.residuals if self.prime.get(s))

    @property
    def nonempty(self) -> tuple[Residual, ...]:
        return tuple(s for s in self.residuals if s & self.live)


def enumerate_td_residuals(lang: Language) -> TdResidualCatalog:
    """Closure of ``{F}`` under one-step context extension, with witness contexts."""
    d = minimize(determinize(as_bottom_up(lang)))
    live = reachable_state_set(d)
    states = sorted_states(live)
    reps = representatives(d)
    delta = d.delta
    start = frozenset(d.finals)
    order = [start]
    witness = {start: IDENTITY}
    k = 0
    while k < len(order):
        s = order[k]
        for f, n in sorted(d.alphabet.items()):
            for i in range(n):
                for others in itertools.product(states, repeat=n - 1):
                    nxt = frozenset(q for q in states if delta[(f, others[:i] + (q,) + others[i:])] in s)
                    if nxt not in witness:
                        kids = [reps[o] for o in others[:i]] + [HOLE_TERM] + [reps[o] for o in others[i:]]
                        witness[nxt] = compose(witness[s], Context(Term(f, kids)))
                        order.append(nxt)
        k += 1
    return classify_td_primes(TdResidualCatalog(d, live, tuple(order), witness))


def classify_td_primes(cat: TdResidualCatalog) -> TdResidualCatalog:
    """A residual is prime unless it is the union of the residuals it strictly contains."""
    prime = {}
    for s in cat.residuals:
        core = s & cat.live
        if not core:
            prime[s] = False
            continue
        union: set[str] = set()
        for t in cat.residuals:
            tc = t & cat.live
            if tc < core:
                union |= tc
        prime[s] = union != core
    return replace(cat, prime=prime)


def td_residual_of_context(cat: TdResidualCatalog, c: Context) -> Residual:
    """``S_c``: the states q such that ``c[q]`` evaluates into a final state."""
    d = cat.base
    d.alphabet.extended().check(c.skeleton)
    frames = c.frames()
    sibling_states = [[d.evaluate(t) for t in sibs] for _, _, sibs in frames]
    out = set()
    for q in sorted_states(cat.live):
        x = q
        for (f, i, _), sib in zip(frames, sibling_states):
            x = d.delta[(f, tuple(sib[:i]) + (x,) + tuple(sib[i:]))]
        if x in d.finals:
            out.add(q)
    return frozenset(out)


def canonical_down_rfta(lang: Language, cat: TdResidualCatalog | None = None) -> TopDownAutomaton:
    """Canonical top-down RFTA: one state per prime residual.

    ``S(f) -> f(S1..Sn)`` is a rule when every tuple of states drawn from
    S1 x ... x Sn steps into S; ``S(a) -> a`` when the state of ``a`` is in S.
    """
    if cat is None:
        cat = enumerate_td_residuals(lang)
    d = cat.base
    delta = d.delta
    primes = cat.primes
    names = {s: cat.name(s) for s in primes}
    rules = []
    for s in primes:
        for f, n in sorted(d.alphabet.items()):
            for tup in itertools.product(primes, repeat=n):
                pools = [sorted(t & cat.live) for t in tup]
                if all(delta[(f, combo)] in s for combo in itertools.product(*pools)):
                    rules.append(TdRule(names[s], f, tuple(names[t] for t in tup)))
    initials = [names[s] for s in primes if cat.is_initial(s)]
    return TopDownAutomaton(d.alphabet, names.values(), initials, rules)


def state_residual_matches(a: TopDownAutomaton, cat: TdResidualCatalog | None = None) -> dict[str, Residual | None]:
    """For each state: the residual equal to its state language, or None."""
    if cat is None:
        cat = enumerate_td_residuals(a)
    langs = {s: cat.language(s) for s in cat.residuals}
    out: dict[str, Residual | None] = {}
    for q in sorted_states(a.states):
        lq = td_state_language(a, q)
        out[q] = next((s for s in cat.residuals if equivalent(lq, langs[s])), None)
    return out


def is_down_rfta(a: TopDownAutomaton) -> bool:
    """Every state language of ``a`` is a top-down residual of L(a)."""
    return all(s is not None for s in state_residual_matches(a).values())


def is_in_Ldown_rfta(lang: Language) -> bool:
    """Whether some top-down RFTA recognizes the language.

    Builds the canonical candidate and accepts iff it recognizes the
    language and each state language equals its defining residual; when
    the language is in the class the canonical automaton passes both.
    """
    cat = enumerate_td_residuals(lang)
    can = canonical_down_rfta(lang, cat)
    if not equivalent(to_bottom_up(can), as_bottom_up(lang)):
        return False
    return all(equivalent(td_state_language(can, cat.name(s)), cat.language(s)) for s in cat.primes)


def _relations(cat: TdResidualCatalog):
    """Yield ``(residual, symbol, arity, tuples)`` with tuples = {p | delta(f, p) in S}."""
    d = cat.base
    states = sorted_states(cat.live)
    for s in cat.residuals:
        for f, n in sorted(d.alphabet.items()):
            if n == 0:
                continue
            rel = {p for p in itertools.product(states, repeat=n) if d.delta[(f, p)] in s}
            yield s, f, n, rel


def is_path_closed(lang: Language, cat: TdResidualCatalog | None = None) -> bool:
    """Every residual's tuple relation is the product of its projections."""
    if cat is None:
        cat = enumerate_td_residuals(lang)
    for _, _, n, rel in _relations(cat):
        size = 1
        for i in range(n):
            size *= len({p[i] for p in rel})
        if rel and size != len(rel):
            return False
    return True


def is_homogeneous(lang: Language, cat: TdResidualCatalog | None = None) -> bool:
    """Every residual's tuple relation is closed under the exchange rule.

    For a tuple b in the relation and any tuple o: if every tuple obtained
    from b by replacing one coordinate with the matching coordinate of o is
    in the relation, then o is too.
    """
    if cat is None:
        cat = enumerate_td_residuals(lang)
    states = sorted_states(cat.live)
    for _, _, n, rel in _relations(cat):
        for b in rel:
            for o in itertools.product(states, repeat=n):
                if o in rel:
                    continue
                if all(b[:i] + (o[i],) + b[i + 1:] in rel for i in range(n)):
                    return False
    return True

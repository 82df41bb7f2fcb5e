"""Bottom-up finite tree automata.

An automaton is a plain immutable value: alphabet, state names (opaque
strings), final states and rules ``f(q1,...,qn) -> q``.  Every operation
returns a new automaton.  Derived automata get readable state names:
subset states are written ``{q1,q4}`` and product states ``(p,q)``.
"""

from __future__ import annotations

import itertools
import re
from functools import cached_property
from typing import Iterable, NamedTuple

from .trees import AlphabetError, RankedAlphabet, Term

_NUM = re.compile(r"(\d+)")


def state_key(name: str):
    """Natural sort key, so that q2 sorts before q10."""
    return [int(p) if p.isdigit() else p for p in _NUM.split(name)]


def sorted_states(states: Iterable[str]) -> list[str]:
    return sorted(states, key=state_key)


def subset_name(subset: Iterable[str]) -> str:
    return "{" + ",".join(sorted_states(subset)) + "}"


def pair_name(p: str, q: str) -> str:
    return f"({p},{q})"


class Rule(NamedTuple):
    symbol: str
    children: tuple[str, ...]
    target: str

    def __str__(self) -> str:
        if self.children:
            return f"{self.symbol}({','.join(self.children)}) -> {self.target}"
        return f"{self.symbol} -> {self.target}"


class BottomUpAutomaton:
    """A bottom-up FTA ``(Q, F, Q_f, Delta)``.

    Rules are stored as a set, so duplicates collapse.  The zero-state
    automaton is legal and recognizes the empty language.
    """

    def __init__(self, alphabet: RankedAlphabet, states: Iterable[str], finals: Iterable[str],
                 rules: Iterable[Rule | tuple]):
        self.alphabet = alphabet
        self.states = frozenset(states)
        self.finals = frozenset(finals)
        self.rules = frozenset(r if isinstance(r, Rule) else Rule(r[0], tuple(r[1]), r[2]) for r in rules)
        self._validate()

    def _validate(self) -> None:
        if not self.finals <= self.states:
            raise ValueError(f"final states {sorted_states(self.finals - self.states)} are not declared")
        for r in self.rules:
            if r.symbol not in self.alphabet:
                raise AlphabetError(f"rule {r} uses unknown symbol {r.symbol!r}")
            if self.alphabet.arity(r.symbol) != len(r.children):
                raise AlphabetError(f"rule {r} does not match the arity of {r.symbol!r}")
            for q in (*r.children, r.target):
                if q not in self.states:
                    raise ValueError(f"rule {r} uses undeclared state {q!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BottomUpAutomaton):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.states == other.states
                and self.finals == other.finals and self.rules == other.rules)

    def __hash__(self) -> int:
        return hash((self.alphabet, self.states, self.finals, self.rules))

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(states={len(self.states)}, finals={len(self.finals)}, "
                f"rules={len(self.rules)})")

    @cached_property
    def index(self) -> dict[tuple[str, tuple[str, ...]], frozenset[str]]:
        """Left-hand side ``(symbol, children)`` -> set of targets."""
        idx: dict[tuple[str, tuple[str, ...]], set[str]] = {}
        for r in self.rules:
            idx.setdefault((r.symbol, r.children), set()).add(r.target)
        return {k: frozenset(v) for k, v in idx.items()}

    @cached_property
    def by_symbol(self) -> dict[str, list[Rule]]:
        out: dict[str, list[Rule]] = {}
        for r in sorted(self.rules):
            out.setdefault(r.symbol, []).append(r)
        return out

    def is_deterministic(self) -> bool:
        return all(len(v) == 1 for v in self.index.values())

    def is_complete(self) -> bool:
        for f, n in self.alphabet.items():
            for tup in itertools.product(self.states, repeat=n):
                if (f, tup) not in self.index:
                    return False
        return True

    def with_finals(self, finals: Iterable[str]) -> "BottomUpAutomaton":
        return type(self)(self.alphabet, self.states, finals, self.rules)

    def size(self) -> dict[str, int]:
        return {"states": len(self.states), "rules": len(self.rules)}

    def step(self, symbol: str, child_sets: list[frozenset[str]]) -> frozenset[str]:
        """Targets of all rules for ``symbol`` whose i-th child lies in ``child_sets[i]``."""
        if not child_sets:
            return self.index.get((symbol, ()), frozenset())
        rules = self.by_symbol.get(symbol, ())
        combos = 1
        for s in child_sets:
            combos *= len(s)
        if combos == 0:
            return frozenset()
        out: set[str] = set()
        if combos <= len(rules):
            for tup in itertools.product(*child_sets):
                out.update(self.index.get((symbol, tup), ()))
        else:
            for r in rules:
                if all(q in s for q, s in zip(r.children, child_sets)):
                    out.add(r.target)
        return frozenset(out)

    def run(self, t: Term, memo: dict | None = None) -> frozenset[str]:
        """States reached by ``t``; no alphabet check (see :func:`reachable_states`)."""
        if memo is None:
            memo = {}
        hit = memo.get(t)
        if hit is not None:
            return hit
        res = self.step(t.symbol, [self.run(c, memo) for c in t.children])
        memo[t] = res
        return res


class Dfta(BottomUpAutomaton):
    """A deterministic bottom-up automaton (at most one rule per left-hand side)."""

    def _validate(self) -> None:
        super()._validate()
        if not self.is_deterministic():
            raise ValueError("automaton is not deterministic")

    @property
    def deterministic(self) -> bool:
        return True

    @cached_property
    def complete(self) -> bool:
        return self.is_complete()

    @cached_property
    def delta(self) -> dict[tuple[str, tuple[str, ...]], str]:
        return {k: next(iter(v)) for k, v in self.index.items()}

    def evaluate(self, t: Term) -> str | None:
        """The unique state reached by ``t``, or None if the run blocks."""
        d = self.delta
        kids = []
        for c in t.children:
            q = self.evaluate(c)
            if q is None:
                return None
            kids.append(q)
        return d.get((t.symbol, tuple(kids)))


def as_dfta(a: BottomUpAutomaton) -> Dfta:
    if isinstance(a, Dfta):
        return a
    return Dfta(a.alphabet, a.states, a.finals, a.rules)


def _check_alphabet(a: BottomUpAutomaton, t: Term) -> None:
    a.alphabet.check(t)


def reachable_states(a: BottomUpAutomaton, t: Term) -> frozenset[str]:
    """All states q with ``t ->* q``."""
    _check_alphabet(a, t)
    return a.run(t)


def accepts(a: BottomUpAutomaton, t: Term) -> bool:
    _check_alphabet(a, t)
    return bool(a.run(t) & a.finals)


def reachable_state_set(a: BottomUpAutomaton) -> frozenset[str]:
    """States reached by at least one term."""
    reach: set[str] = set()
    changed = True
    while changed:
        changed = False
        for r in a.rules:
            if r.target not in reach and all(c in reach for c in r.children):
                reach.add(r.target)
                changed = True
    return frozenset(reach)


def coreachable_state_set(a: BottomUpAutomaton, reach: frozenset[str] | None = None) -> frozenset[str]:
    """Reachable states that accept at least one context."""
    if reach is None:
        reach = reachable_state_set(a)
    co = set(a.finals & reach)
    changed = True
    while changed:
        changed = False
        for r in a.rules:
            if r.target in co and all(c in reach for c in r.children):
                for c in r.children:
                    if c not in co:
                        co.add(c)
                        changed = True
    return frozenset(co)


def dead_states(a: BottomUpAutomaton) -> frozenset[str]:
    """Reachable states with an empty context language (the sink of a complete DFTA)."""
    reach = reachable_state_set(a)
    return reach - coreachable_state_set(a, reach)


def restrict(a: BottomUpAutomaton, keep: Iterable[str]) -> BottomUpAutomaton:
    keep = frozenset(keep)
    rules = [r for r in a.rules if r.target in keep and all(c in keep for c in r.children)]
    return BottomUpAutomaton(a.alphabet, keep, a.finals & keep, rules)


def trim(a: BottomUpAutomaton) -> BottomUpAutomaton:
    """Keep only states that are both term-reachable and co-reachable."""
    return restrict(a, coreachable_state_set(a))


def _fresh(base: str, taken: frozenset[str]) -> str:
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def complete(a: BottomUpAutomaton) -> BottomUpAutomaton:
    """Add a sink state receiving every missing left-hand side.

    Complete automata are returned unchanged.
    """
    if a.is_complete():
        return a
    sink = _fresh("sink", a.states)
    states = a.states | {sink}
    rules = set(a.rules)
    idx = a.index
    for f, n in a.alphabet.items():
        for tup in itertools.product(sorted_states(states), repeat=n):
            if (f, tup) not in idx:
                rules.add(Rule(f, tup, sink))
    cls = Dfta if a.is_deterministic() else BottomUpAutomaton
    return cls(a.alphabet, states, a.finals, rules)


def _saturate(alphabet: RankedAlphabet, seeds, image):
    """Semi-naive forward closure shared by determinize and product.

    ``seeds`` maps each constant to the list of initial objects it yields;
    ``image(symbol, objs)`` returns the objects produced from a tuple of
    already-discovered objects.  Every tuple is visited exactly once: a
    tuple is generated when its largest discovery index is processed.
    Returns ``(order, transitions)`` with transitions keyed by index tuples.
    """
    order: list = []
    ids: dict = {}
    trans: dict[tuple[str, tuple[int, ...]], list[int]] = {}

    def add(obj) -> int:
        i = ids.get(obj)
        if i is None:
            i = ids[obj] = len(order)
            order.append(obj)
        return i

    for a in sorted(s for s, n in alphabet.items() if n == 0):
        trans[(a, ())] = [add(o) for o in seeds(a)]
    symbols = sorted((s, n) for s, n in alphabet.items() if n > 0)
    k = 0
    while k < len(order):
        for f, n in symbols:
            for j in range(n):
                ranges = [range(k)] * j + [(k,)] + [range(k + 1)] * (n - j - 1)
                for tup in itertools.product(*ranges):
                    trans[(f, tup)] = [add(o) for o in image(f, [order[i] for i in tup])]
        k += 1
    return order, trans


def determinize(a: BottomUpAutomaton) -> Dfta:
    """Subset construction over the reachable subsets; the empty subset is the sink."""
    def seeds(c):
        return [a.index.get((c, ()), frozenset())]

    def image(f, subsets):
        return [a.step(f, subsets)]

    order, trans = _saturate(a.alphabet, seeds, image)
    names = [subset_name(s) for s in order]
    rules = [Rule(f, tuple(names[i] for i in tup), names[t[0]]) for (f, tup), t in trans.items()]
    finals = [names[i] for i, s in enumerate(order) if s & a.finals]
    return Dfta(a.alphabet, names, finals, rules)


def _same_alphabet(a: BottomUpAutomaton, b: BottomUpAutomaton) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetError(f"alphabets differ: {a.alphabet} vs {b.alphabet}")


def product(a: BottomUpAutomaton, b: BottomUpAutomaton, mode: str = "and") -> BottomUpAutomaton:
    """Reachable product.  ``and`` gives L(a) & L(b), ``or`` gives L(a) | L(b)."""
    if mode not in ("and", "or"):
        raise ValueError(f"unknown product mode {mode!r}")
    _same_alphabet(a, b)
    if mode == "or":
        a, b = complete(a), complete(b)

    def seeds(c):
        return [(p, q) for p in sorted_states(a.index.get((c, ()), ())) for q in sorted_states(b.index.get((c, ()), ()))]

    def image(f, pairs):
        ta = a.index.get((f, tuple(p for p, _ in pairs)), ())
        if not ta:
            return []
        tb = b.index.get((f, tuple(q for _, q in pairs)), ())
        return [(p, q) for p in sorted_states(ta) for q in sorted_states(tb)]

    order, trans = _saturate(a.alphabet, seeds, image)
    names = [pair_name(p, q) for p, q in order]
    rules = [Rule(f, tuple(names[i] for i in tup), names[t]) for (f, tup), ts in trans.items() for t in ts]
    if mode == "and":
        finals = [names[i] for i, (p, q) in enumerate(order) if p in a.finals and q in b.finals]
    else:
        finals = [names[i] for i, (p, q) in enumerate(order) if p in a.finals or q in b.finals]
    cls = Dfta if a.is_deterministic() and b.is_deterministic() else BottomUpAutomaton
    return cls(a.alphabet, names, finals, rules)


def complement(d: BottomUpAutomaton) -> Dfta:
    if not d.is_deterministic():
        raise ValueError("complement needs a deterministic automaton")
    if not d.is_complete():
        raise ValueError("complement needs a complete automaton")
    d = as_dfta(d)
    return Dfta(d.alphabet, d.states, d.states - d.finals, d.rules)


def is_empty(a: BottomUpAutomaton) -> bool:
    return not (reachable_state_set(a) & a.finals)


def language_included(a: BottomUpAutomaton, b: BottomUpAutomaton) -> bool:
    """L(a) <= L(b), decided as emptiness of a & not(det(b))."""
    _same_alphabet(a, b)
    return is_empty(product(a, complement(determinize(b)), "and"))


def equivalent(a: BottomUpAutomaton, b: BottomUpAutomaton) -> bool:
    return language_included(a, b) and language_included(b, a)


def representatives(a: BottomUpAutomaton) -> dict[str, Term]:
    """For each term-reachable state, the smallest term reaching it.

    Smallest means minimal height, ties broken by preorder, which is the
    order of :func:`resta.trees.enumerate_terms`.  Because preorder
    sequences are prefix-free, the lexicographically least term of a given
    height is assembled greedily from least subterms.
    """
    exact: list[dict[str, Term]] = [{}]
    upto: list[dict[str, Term]] = [{}]
    found: dict[str, Term] = {}
    h = 0
    while True:
        h += 1
        layer: dict[str, Term] = {}
        for r in sorted(a.rules):
            n = len(r.children)
            if n == 0:
                if h == 1:
                    cand = Term(r.symbol)
                else:
                    continue
            elif h == 1:
                continue
            else:
                cand = None
                for j in range(n):
                    kids = []
                    for i, q in enumerate(r.children):
                        src = upto[h - 2] if i < j else (exact[h - 1] if i == j else upto[h - 1])
                        t = src.get(q)
                        if t is None:
                            break
                        kids.append(t)
                    else:
                        t = Term(r.symbol, kids)
                        if cand is None or t.preorder() < cand.preorder():
                            cand = t
                if cand is None:
                    continue
            old = layer.get(r.target)
            if old is None or cand.preorder() < old.preorder():
                layer[r.target] = cand
        merged = dict(upto[h - 1])
        for q, t in layer.items():
            if q not in merged or t.preorder() < merged[q].preorder():
                merged[q] = t
        exact.append(layer)
        upto.append(merged)
        new = [q for q in layer if q not in found]
        for q in new:
            found[q] = layer[q]
        if not new:
            return found


def minimize(d: BottomUpAutomaton) -> Dfta:
    """Minimal complete DFTA for L(d).

    Unreachable states are dropped, the result is completed, and states are
    merged by partition refinement over one-step context frames.  States
    are renamed ``s0, s1, ...`` in the order of their representative terms,
    so equal languages give identical automata.
    """
    if not d.is_deterministic():
        raise ValueError("minimize needs a deterministic automaton")
    d = complete(restrict(d, reachable_state_set(d)))
    states = sorted_states(d.states)
    delta = {k: next(iter(v)) for k, v in d.index.items()}

    frames = []
    for f, n in sorted(d.alphabet.items()):
        for i in range(n):
            for others in itertools.product(states, repeat=n - 1):
                frames.append((f, i, others))

    cls = {q: 0 if q in d.finals else 1 for q in states}
    count = len(set(cls.values()))
    while True:
        sigs = {}
        for q in states:
            sig = [cls[q]]
            for f, i, others in frames:
                sig.append(cls[delta[(f, others[:i] + (q,) + others[i:])]])
            sigs[q] = tuple(sig)
        numbering: dict[tuple, int] = {}
        new = {q: numbering.setdefault(sigs[q], len(numbering)) for q in states}
        if len(numbering) == count:
            break
        cls, count = new, len(numbering)

    blocks: dict[int, str] = {}
    for q in states:
        blocks.setdefault(cls[q], q)
    tmp = {c: f"c{c}" for c in blocks}
    rules = set()
    for (f, kids), targets in d.index.items():
        if all(blocks[cls[k]] == k for k in kids):
            rules.add(Rule(f, tuple(tmp[cls[k]] for k in kids), tmp[cls[next(iter(targets))]]))
    quotient = BottomUpAutomaton(d.alphabet, tmp.values(), {tmp[cls[q]] for q in d.finals}, rules)

    reps = representatives(quotient)
    ordered = sorted(quotient.states, key=lambda q: reps[q].order_key())
    rename = {q: f"s{i}" for i, q in enumerate(ordered)}
    return Dfta(
        d.alphabet,
        rename.values(),
        [rename[q] for q in quotient.finals],
        [Rule(r.symbol, tuple(rename[c] for c in r.children), rename[r.target]) for r in quotient.rules],
    )


def rename_states(a: BottomUpAutomaton, mapping: dict[str, str]) -> BottomUpAutomaton:
    return type(a)(
        a.alphabet,
        [mapping[q] for q in a.states],
        [mapping[q] for q in a.finals],
        [Rule(r.symbol, tuple(mapping[c] for c in r.children), mapping[r.target]) for r in a.rules],
    )

"""Top-down finite tree automata.

Rules are written ``q(f) -> f(q1,...,qn)``.  Acceptance is available both
as a memoized recursion over a materialized term and as a streaming run
over a preorder token stream, which only keeps the rules still alive on
the current root-to-node path.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

from .bottomup import BottomUpAutomaton, Rule, sorted_states
from .trees import AlphabetError, Context, ParseError, RankedAlphabet, Term


class TdRule(NamedTuple):
    state: str
    symbol: str
    children: tuple[str, ...]

    def __str__(self) -> str:
        if self.children:
            return f"{self.state}({self.symbol}) -> {self.symbol}({','.join(self.children)})"
        return f"{self.state}({self.symbol}) -> {self.symbol}"


class TopDownAutomaton:
    def __init__(self, alphabet: RankedAlphabet, states: Iterable[str], initials: Iterable[str],
                 rules: Iterable[TdRule | tuple]):
        self.alphabet = alphabet
        self.states = frozenset(states)
        self.initials = frozenset(initials)
        self.rules = frozenset(r if isinstance(r, TdRule) else TdRule(r[0], r[1], tuple(r[2])) for r in rules)
        if not self.initials <= self.states:
            raise ValueError(f"initial states {sorted_states(self.initials - self.states)} are not declared")
        for r in self.rules:
            if r.symbol not in alphabet:
                raise AlphabetError(f"rule {r} uses unknown symbol {r.symbol!r}")
            if alphabet.arity(r.symbol) != len(r.children):
                raise AlphabetError(f"rule {r} does not match the arity of {r.symbol!r}")
            for q in (r.state, *r.children):
                if q not in self.states:
                    raise ValueError(f"rule {r} uses undeclared state {q!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopDownAutomaton):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.states == other.states
                and self.initials == other.initials and self.rules == other.rules)

    def __hash__(self) -> int:
        return hash((self.alphabet, self.states, self.initials, self.rules))

    def __repr__(self) -> str:
        return f"TopDownAutomaton(states={len(self.states)}, initials={len(self.initials)}, rules={len(self.rules)})"

    @cached_property
    def index(self) -> dict[tuple[str, str], list[tuple[str, ...]]]:
        """``(state, symbol)`` -> right-hand side child tuples."""
        idx: dict[tuple[str, str], list[tuple[str, ...]]] = {}
        for r in sorted(self.rules):
            idx.setdefault((r.state, r.symbol), []).append(r.children)
        return idx

    def size(self) -> dict[str, int]:
        return {"states": len(self.states), "rules": len(self.rules)}


def _accepts_from(a: TopDownAutomaton, q: str, t: Term, memo: dict) -> bool:
    key = (q, t)
    hit = memo.get(key)
    if hit is not None:
        return hit
    ok = False
    for kids in a.index.get((q, t.symbol), ()):
        if all(_accepts_from(a, qi, ti, memo) for qi, ti in zip(kids, t.children)):
            ok = True
            break
    memo[key] = ok
    return ok


def accepting_states(a: TopDownAutomaton, t: Term, memo: dict | None = None) -> frozenset[str]:
    """States q with ``q(t) ->* t``."""
    memo = {} if memo is None else memo
    return frozenset(q for q in a.states if _accepts_from(a, q, t, memo))


def td_accepts(a: TopDownAutomaton, t: Term) -> bool:
    a.alphabet.check(t)
    memo: dict = {}
    return any(_accepts_from(a, q, t, memo) for q in sorted_states(a.initials))


# -- streaming -----------------------------------------------------------

def preorder_tokens(t: Term) -> Iterator[str]:
    """Serialize a term as ``SYMBOL arity`` lines in preorder."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield f"{s.symbol} {len(s.children)}"
        stack.extend(reversed(s.children))


def _token(line: str, lineno: int) -> tuple[str, int] | None:
    line = line.strip()
    if not line:
        return None
    parts = line.split()
    if len(parts) != 2 or not parts[1].isdigit():
        raise ParseError(f"expected 'SYMBOL arity', got {line!r}", line=lineno)
    return parts[0], int(parts[1])


def read_tokens(lines: Iterable[str]) -> Iterator[tuple[str, int]]:
    for lineno, line in enumerate(lines, 1):
        tok = _token(line, lineno)
        if tok is not None:
            yield tok


class _Frame:
    __slots__ = ("arity", "rules", "next")

    def __init__(self, arity: int, rules: list[TdRule]):
        self.arity = arity
        self.rules = rules
        self.next = 0


def td_accepts_stream(a: TopDownAutomaton, tokens: Iterable[str | tuple[str, int]]) -> bool:
    """Acceptance over a preorder token stream without building the term.

    Each open node keeps the rules that can still fire at it; finishing a
    child filters the parent's rules by the states that accepted the child.
    """
    def toks():
        for lineno, tok in enumerate(tokens, 1):
            if not isinstance(tok, tuple):
                tok = _token(tok, lineno)
            if tok is not None:
                yield tok

    stack: list[_Frame] = []
    result: bool | None = None
    for symbol, n in toks():
        if result is not None:
            raise ParseError("trailing tokens after a complete term")
        if symbol not in a.alphabet or a.alphabet.arity(symbol) != n:
            raise AlphabetError(f"token {symbol} {n} does not match the alphabet")
        if stack:
            parent = stack[-1]
            wanted = {r.children[parent.next] for r in parent.rules}
        else:
            wanted = a.initials
        rules = [TdRule(q, symbol, kids) for q in sorted_states(wanted) for kids in a.index.get((q, symbol), ())]
        stack.append(_Frame(n, rules))
        while stack and stack[-1].next == stack[-1].arity:
            done = stack.pop()
            accepted = {r.state for r in done.rules}
            if stack:
                parent = stack[-1]
                parent.rules = [r for r in parent.rules if r.children[parent.next] in accepted]
                parent.next += 1
            else:
                result = bool(accepted)
    if result is None:
        raise ParseError("token stream ended before the term was complete")
    return result


# -- conversions and state languages -------------------------------------

def to_bottom_up(a: TopDownAutomaton) -> BottomUpAutomaton:
    """Reverse every rule; initial states become final states."""
    return BottomUpAutomaton(a.alphabet, a.states, a.initials,
                             [Rule(r.symbol, r.children, r.state) for r in a.rules])


def to_top_down(a: BottomUpAutomaton) -> TopDownAutomaton:
    return TopDownAutomaton(a.alphabet, a.states, a.finals,
                            [TdRule(r.target, r.symbol, r.children) for r in a.rules])


def td_state_language(a: TopDownAutomaton, q: str) -> BottomUpAutomaton:
    """A bottom-up automaton for the terms accepted from state ``q``."""
    if q not in a.states:
        raise KeyError(f"unknown state {q!r}")
    return to_bottom_up(a).with_finals({q})


def is_td_deterministic(a: TopDownAutomaton) -> bool:
    return all(len(v) == 1 for v in a.index.values())


def hole_states(a: TopDownAutomaton, c: Context) -> frozenset[str]:
    """The set Q_c: states reaching the hole when running down from an initial state.

    Off-path siblings must be accepted by the corresponding child states.
    """
    a.alphabet.extended().check(c.skeleton)
    memo: dict = {}
    current = set(a.initials)
    for symbol, i, siblings in reversed(c.frames()):
        nxt = set()
        for q in current:
            for kids in a.index.get((q, symbol), ()):
                others = kids[:i] + kids[i + 1:]
                if all(_accepts_from(a, qo, to, memo) for qo, to in zip(others, siblings)):
                    nxt.add(kids[i])
        current = nxt
    return frozenset(current)

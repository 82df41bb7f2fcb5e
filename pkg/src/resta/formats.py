"""Line-oriented text format for bottom-up and top-down automata.

::

    alphabet: f/2 a/0
    kind: bottom-up
    states: q0 q1
    final: q1
    rules:
    a -> q0
    f(q0,q0) -> q1

Top-down files use ``kind: top-down``, an ``initial:`` line and rules
``q(f) -> f(q1,q2)`` / ``q(a) -> a``.  ``#`` starts a comment.  State
names may contain brackets (``{q1,q4}``, ``(p,q)``); commas inside
brackets do not separate arguments.
"""

from __future__ import annotations

from typing import Union

from .bottomup import BottomUpAutomaton, Rule, sorted_states, state_key
from .topdown import TdRule, TopDownAutomaton
from .trees import ParseError, RankedAlphabet

Automaton = Union[BottomUpAutomaton, TopDownAutomaton]

_OPEN = {"(": ")", "{": "}", "[": "]"}
_CLOSE = {v: k for k, v in _OPEN.items()}


def _split_args(text: str, lineno: int) -> list[str]:
    parts, depth, cur = [], [], []
    for ch in text:
        if ch in _OPEN:
            depth.append(ch)
        elif ch in _CLOSE:
            if not depth or depth[-1] != _CLOSE[ch]:
                raise ParseError(f"unbalanced {ch!r}", line=lineno)
            depth.pop()
        if ch == "," and not depth:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError("unbalanced brackets", line=lineno)
    parts.append("".join(cur).strip())
    if any(not p for p in parts):
        raise ParseError("empty argument", line=lineno)
    return parts


def _matching_open(text: str, lineno: int) -> int:
    """Index of the '(' matching the final ')' of ``text``."""
    depth = 0
    for i in range(len(text) - 1, -1, -1):
        ch = text[i]
        if ch in _CLOSE:
            depth += 1
        elif ch in _OPEN:
            depth -= 1
            if depth == 0:
                if ch != "(":
                    break
                return i
    raise ParseError(f"malformed application {text!r}", line=lineno)


def _application(text: str, lineno: int) -> tuple[str, list[str]]:
    """Split ``head(a,b)`` into ``("head", ["a", "b"])``; a bare name has no arguments."""
    text = text.strip()
    if not text.endswith(")"):
        return text, []
    k = _matching_open(text, lineno)
    head = text[:k].strip()
    if not head:
        raise ParseError(f"missing head in {text!r}", line=lineno)
    return head, _split_args(text[k + 1:-1], lineno)


def parse_automaton(text: str) -> Automaton:
    header: dict[str, str] = {}
    rule_lines: list[tuple[int, str]] = []
    in_rules = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_rules:
            rule_lines.append((lineno, line))
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", line=lineno)
        if key == "rules":
            in_rules = True
            if value.strip():
                rule_lines.append((lineno, value.strip()))
            continue
        if key not in ("alphabet", "kind", "states", "final", "initial"):
            raise ParseError(f"unknown header {key!r}", line=lineno)
        if key in header:
            raise ParseError(f"duplicate header {key!r}", line=lineno)
        header[key] = value.strip()

    if "alphabet" not in header:
        raise ParseError("missing 'alphabet:' line")
    try:
        alphabet = RankedAlphabet.parse(header["alphabet"])
    except ValueError as e:
        raise ParseError(f"bad alphabet: {e}") from None
    kind = header.get("kind", "bottom-up")
    if kind not in ("bottom-up", "top-down"):
        raise ParseError(f"unknown kind {kind!r}")
    states = header.get("states", "").split()

    declared = set(states)
    try:
        if kind == "bottom-up":
            if "initial" in header:
                raise ParseError("bottom-up automata have 'final:', not 'initial:'")
            rules = [_checked(_bu_rule(line, n), alphabet, declared, n) for n, line in rule_lines]
            return BottomUpAutomaton(alphabet, states, header.get("final", "").split(), rules)
        if "final" in header:
            raise ParseError("top-down automata have 'initial:', not 'final:'")
        rules = [_checked(_td_rule(line, n), alphabet, declared, n) for n, line in rule_lines]
        return TopDownAutomaton(alphabet, states, header.get("initial", "").split(), rules)
    except ParseError:
        raise
    except (ValueError, KeyError) as e:
        raise ParseError(str(e)) from None


def _checked(rule, alphabet: RankedAlphabet, states: set[str], lineno: int):
    if rule.symbol not in alphabet:
        raise ParseError(f"unknown symbol {rule.symbol!r}", line=lineno)
    if alphabet.arity(rule.symbol) != len(rule.children):
        raise ParseError(f"{rule.symbol!r} has arity {alphabet.arity(rule.symbol)}, got {len(rule.children)}", line=lineno)
    own = rule.target if isinstance(rule, Rule) else rule.state
    for q in (*rule.children, own):
        if q not in states:
            raise ParseError(f"undeclared state {q!r}", line=lineno)
    return rule


def _arrow(line: str, lineno: int) -> tuple[str, str]:
    lhs, sep, rhs = line.partition("->")
    if not sep or not lhs.strip() or not rhs.strip():
        raise ParseError(f"expected 'lhs -> rhs', got {line!r}", line=lineno)
    return lhs.strip(), rhs.strip()


def _bu_rule(line: str, lineno: int) -> Rule:
    lhs, rhs = _arrow(line, lineno)
    symbol, kids = _application(lhs, lineno)
    if any(ch.isspace() for ch in rhs):
        raise ParseError(f"bad target state {rhs!r}", line=lineno)
    return Rule(symbol, tuple(kids), rhs)


def _td_rule(line: str, lineno: int) -> TdRule:
    lhs, rhs = _arrow(line, lineno)
    state, inner = _application(lhs, lineno)
    if len(inner) != 1:
        raise ParseError(f"expected 'state(symbol)', got {lhs!r}", line=lineno)
    symbol, kids = _application(rhs, lineno)
    if symbol != inner[0]:
        raise ParseError(f"symbol mismatch: {inner[0]!r} vs {symbol!r}", line=lineno)
    return TdRule(state, symbol, tuple(kids))


def _rule_order(symbols: list[str]):
    pos = {s: i for i, s in enumerate(symbols)}

    def key(r):
        if isinstance(r, Rule):
            return (pos[r.symbol], [state_key(c) for c in r.children], state_key(r.target))
        return (state_key(r.state), pos[r.symbol], [state_key(c) for c in r.children])
    return key


def print_automaton(a: Automaton) -> str:
    symbols = [s for s in a.alphabet]
    lines = [f"alphabet: {a.alphabet}"]
    if isinstance(a, TopDownAutomaton):
        lines.append("kind: top-down")
        lines.append("states: " + " ".join(sorted_states(a.states)))
        lines.append("initial: " + " ".join(sorted_states(a.initials)))
    else:
        lines.append("kind: bottom-up")
        lines.append("states: " + " ".join(sorted_states(a.states)))
        lines.append("final: " + " ".join(sorted_states(a.finals)))
    lines.append("rules:")
    lines.extend(str(r) for r in sorted(a.rules, key=_rule_order(symbols)))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def load_automaton(path: str) -> Automaton:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_automaton(text)
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None

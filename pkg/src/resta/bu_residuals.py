"""Bottom-up residuals, prime residuals and canonical bottom-up RFTA.

The residual ``t^-1 L`` of a term is a set of contexts.  All residuals of
L are the context languages of the live states of the minimal complete
DFTA, which is the base of :class:`ResidualLatticeUp`.  Context
languages are handled as *marked context automata*: automata over
F + {<>} whose states carry a flag telling whether the hole has been seen
below.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .bottomup import (
    BottomUpAutomaton,
    Dfta,
    Rule,
    accepts,
    as_dfta,
    dead_states,
    determinize,
    minimize,
    representatives,
    sorted_states,
    trim,
    _saturate,
)
from .trees import HOLE, Context, Term


def _flag(q: str, seen: bool) -> str:
    return f"({q},{1 if seen else 0})"


def marked_context_automaton(a: BottomUpAutomaton, holes: Iterable[str]) -> BottomUpAutomaton:
    """Automaton over F + {<>} accepting the union of C_q for q in ``holes``.

    Every rule is copied once without the flag and once per child position
    carrying the flag upwards; ``<>`` introduces the flag at the hole states.
    Accepted trees therefore always contain exactly one hole.
    """
    holes = list(holes)
    states = [_flag(q, s) for q in a.states for s in (False, True)]
    rules = []
    for r in a.rules:
        rules.append(Rule(r.symbol, tuple(_flag(c, False) for c in r.children), _flag(r.target, False)))
        for i in range(len(r.children)):
            kids = tuple(_flag(c, j == i) for j, c in enumerate(r.children))
            rules.append(Rule(r.symbol, kids, _flag(r.target, True)))
    for q in holes:
        if q not in a.states:
            raise KeyError(f"unknown state {q!r}")
        rules.append(Rule(HOLE, (), _flag(q, True)))
    return BottomUpAutomaton(a.alphabet.extended(), states, [_flag(q, True) for q in a.finals], rules)


def context_language(a: BottomUpAutomaton, q: str) -> BottomUpAutomaton:
    """Marked automaton recognizing C_q, the contexts accepted by state ``q``."""
    if q not in a.states:
        raise KeyError(f"unknown state {q!r}")
    return marked_context_automaton(a, [q])


def accepts_context(marked: BottomUpAutomaton, c: Context) -> bool:
    return accepts(marked, c.skeleton)


def _frames(d: BottomUpAutomaton):
    states = sorted_states(d.states)
    for f, n in sorted(d.alphabet.items()):
        for i in range(n):
            for others in itertools.product(states, repeat=n - 1):
                yield f, i, others


def _require_complete_dfta(d: BottomUpAutomaton) -> Dfta:
    if not d.is_deterministic():
        raise ValueError("context inclusion needs a deterministic automaton")
    d = as_dfta(d)
    if not d.complete:
        raise ValueError("context inclusion needs a complete automaton")
    return d


def inclusion_relation(d: BottomUpAutomaton) -> frozenset[tuple[str, str]]:
    """All pairs (p, q) with C_p <= C_q in a complete DFTA.

    Greatest fixpoint: start from the pairs respecting finality and drop
    (p, q) whenever some one-step frame sends it outside the relation.
    """
    d = _require_complete_dfta(d)
    delta = d.delta
    frames = list(_frames(d))
    rel = {(p, q) for p in d.states for q in d.states if q in d.finals or p not in d.finals}
    changed = True
    while changed:
        changed = False
        for p, q in list(rel):
            for f, i, others in frames:
                fp = delta[(f, others[:i] + (p,) + others[i:])]
                fq = delta[(f, others[:i] + (q,) + others[i:])]
                if (fp, fq) not in rel:
                    rel.discard((p, q))
                    changed = True
                    break
    return frozenset(rel)


def context_inclusion(d: BottomUpAutomaton, p: str, q: str) -> bool:
    """C_p <= C_q in the complete DFTA ``d``."""
    for s in (p, q):
        if s not in d.states:
            raise KeyError(f"unknown state {s!r}")
    return (p, q) in inclusion_relation(d)


class ContextExplorer:
    """Joint run of several automata over all contexts at once.

    A configuration holds, per automaton, the set of states the hole path
    of some context has reached so far.  Off-path siblings range over the
    joint *term types*: for each term, the tuple of state sets it reaches
    in every automaton.  Visiting every configuration reachable from a
    start configuration covers every context exactly, with no height bound.
    """

    def __init__(self, automata: list[BottomUpAutomaton]):
        alphabet = automata[0].alphabet
        if any(x.alphabet != alphabet for x in automata):
            raise ValueError("automata must share an alphabet")
        self.automata = automata

        def seeds(c):
            return [tuple(x.index.get((c, ()), frozenset()) for x in automata)]

        def image(f, objs):
            return [tuple(x.step(f, [o[k] for o in objs]) for k, x in enumerate(automata))]

        types, _ = _saturate(alphabet, seeds, image)
        self.types = types
        self.frames = []
        for f, n in sorted(alphabet.items()):
            for i in range(n):
                for others in itertools.product(range(len(types)), repeat=n - 1):
                    self.frames.append((f, i, others))

    def successors(self, config: tuple[frozenset[str], ...]):
        types = self.types
        for f, i, others in self.frames:
            out = []
            for k, x in enumerate(self.automata):
                kids = [types[o][k] for o in others]
                kids.insert(i, config[k])
                out.append(x.step(f, kids))
            yield tuple(out)

    def find(self, start: tuple[frozenset[str], ...], bad) -> tuple[frozenset[str], ...] | None:
        """A reachable configuration satisfying ``bad``, or None."""
        seen = {start}
        todo = [start]
        while todo:
            cfg = todo.pop()
            if bad(cfg):
                return cfg
            for nxt in self.successors(cfg):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return None


def contexts_covered(a: BottomUpAutomaton, q: str, others: Iterable[str]) -> bool:
    """C_q is included in the union of C_p for p in ``others``."""
    ex = ContextExplorer([a, a])
    fin = a.finals
    return ex.find((frozenset([q]), frozenset(others)), lambda c: bool(c[0] & fin) and not c[1] & fin) is None


def _covered_in_dfta(d: Dfta, rel: frozenset[tuple[str, str]], q: str, others: Iterable[str]) -> bool:
    """:func:`contexts_covered` for a complete DFTA whose inclusion relation ``rel`` is known.

    A configuration (x, Y) is dropped once C_x is included in some C_y,
    and Y is kept as its maximal elements; neither change can hide a
    context accepted from x and rejected from all of Y.
    """
    delta = d.delta
    fin = d.finals
    frames = list(_frames(d))

    def norm(ys):
        return frozenset(y for y in ys if not any(z != y and (y, z) in rel and (z, y) not in rel for z in ys))

    start = (q, norm(others))
    seen = {start}
    todo = [start]
    while todo:
        x, ys = todo.pop()
        if any((x, y) in rel for y in ys):
            continue
        if x in fin and not ys & fin:
            return False
        for f, i, sib in frames:
            nx = delta[(f, sib[:i] + (x,) + sib[i:])]
            ny = norm({delta[(f, sib[:i] + (y,) + sib[i:])] for y in ys})
            cfg = (nx, ny)
            if cfg not in seen:
                seen.add(cfg)
                todo.append(cfg)
    return True


def same_context_language(a: BottomUpAutomaton, p: str, b: BottomUpAutomaton, q: str,
                          explorer: ContextExplorer | None = None) -> bool:
    """C_p in ``a`` equals C_q in ``b``."""
    ex = explorer or ContextExplorer([a, b])
    fa, fb = a.finals, b.finals
    return ex.find((frozenset([p]), frozenset([q])), lambda c: bool(c[0] & fa) != bool(c[1] & fb)) is None


@dataclass(frozen=True)
class ResidualLatticeUp:
    base: Dfta
    nodes: tuple[str, ...]
    reps: dict[str, Term] = field(repr=False)
    leq: frozenset[tuple[str, str]] = field(repr=False)
    prime: dict[str, bool]
    sink: str | None

    @property
    def live(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if n != self.sink)

    @property
    def primes(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if self.prime[n])

    def includes(self, p: str, q: str) -> bool:
        """C_p <= C_q."""
        return (p, q) in self.leq

    def strictly_below(self, q: str) -> list[str]:
        return [p for p in self.nodes if p != q and (p, q) in self.leq]

    def is_final(self, q: str) -> bool:
        return q in self.base.finals

    def context_automaton(self, q: str) -> BottomUpAutomaton:
        return context_language(self.base, q)


def build_lattice(a: BottomUpAutomaton) -> ResidualLatticeUp:
    """All bottom-up residuals of L(a), their inclusion order and prime flags."""
    d = minimize(determinize(a))
    reps = representatives(d)
    nodes = tuple(sorted(d.states, key=lambda q: reps[q].order_key()))
    dead = dead_states(d)
    sink = next(iter(dead)) if dead else None
    rel = inclusion_relation(d)
    prime = {}
    for q in nodes:
        if q in dead:
            prime[q] = False
            continue
        lower = [p for p in nodes if p != q and p not in dead and (p, q) in rel]
        prime[q] = not _covered_in_dfta(d, rel, q, lower)
    return ResidualLatticeUp(d, nodes, reps, rel, prime, sink)


def residual_of_term(lat: ResidualLatticeUp, t: Term) -> str:
    """The lattice node whose context language is ``t^-1 L``."""
    lat.base.alphabet.check(t)
    q = lat.base.evaluate(t)
    assert q is not None
    return q


def residual_matches(a: BottomUpAutomaton, lat: ResidualLatticeUp | None = None) -> dict[str, str | None]:
    """For each state of trim(a): the lattice node with the same context language, or None."""
    if lat is None:
        lat = build_lattice(a)
    t = trim(a)
    out: dict[str, str | None] = {q: None for q in sorted_states(t.states)}
    if not t.states:
        return out
    d = lat.base
    ex = ContextExplorer([t, d])
    for q in out:
        for n in lat.nodes:
            if same_context_language(t, q, d, n, ex):
                out[q] = n
                break
    return out


def is_bottom_up_rfta(a: BottomUpAutomaton) -> bool:
    """Every state of trim(a) accepts exactly some residual of L(a)."""
    return all(n is not None for n in residual_matches(a).values())


def canonical_up_rfta(a: BottomUpAutomaton, lat: ResidualLatticeUp | None = None) -> BottomUpAutomaton:
    """The canonical bottom-up RFTA of L(a).

    States are the prime residuals; ``f(p1..pn) -> p`` is a rule exactly
    when C_p is included in the residual of ``f(t_p1..t_pn)``.
    """
    if lat is None:
        lat = build_lattice(a)
    d = lat.base
    delta = d.delta
    primes = lat.primes
    rules = []
    for f, n in sorted(d.alphabet.items()):
        for tup in itertools.product(primes, repeat=n):
            target = delta[(f, tup)]
            for p in primes:
                if (p, target) in lat.leq:
                    rules.append(Rule(f, tup, p))
    return BottomUpAutomaton(d.alphabet, primes, [p for p in primes if p in d.finals], rules)


def isomorphic(a: BottomUpAutomaton, b: BottomUpAutomaton) -> bool:
    return find_isomorphism(a, b) is not None


def find_isomorphism(a: BottomUpAutomaton, b: BottomUpAutomaton) -> dict[str, str] | None:
    """A state bijection mapping finals to finals and rules onto rules, or None.

    Backtracking search; candidates are restricted to states with the
    same signature (finality plus how often the state occurs in each rule
    role).
    """
    if (a.alphabet != b.alphabet or len(a.states) != len(b.states)
            or len(a.finals) != len(b.finals) or len(a.rules) != len(b.rules)):
        return None

    def signatures(x: BottomUpAutomaton):
        sig: dict[str, dict] = {q: {} for q in x.states}
        for r in x.rules:
            for i, c in enumerate(r.children):
                key = (r.symbol, i)
                sig[c][key] = sig[c].get(key, 0) + 1
            key = (r.symbol, "target")
            sig[r.target][key] = sig[r.target].get(key, 0) + 1
        return {q: (q in x.finals, tuple(sorted(s.items(), key=repr))) for q, s in sig.items()}

    sa, sb = signatures(a), signatures(b)
    if sorted(sa.values(), key=repr) != sorted(sb.values(), key=repr):
        return None
    cands = {q: [p for p in sorted_states(b.states) if sb[p] == sa[q]] for q in a.states}
    order = sorted(a.states, key=lambda q: (len(cands[q]), q))
    involving: dict[str, list[Rule]] = {q: [] for q in a.states}
    for r in a.rules:
        for q in {*r.children, r.target}:
            involving[q].append(r)
    brules = b.rules
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(q: str) -> bool:
        for r in involving[q]:
            if all(c in mapping for c in r.children) and r.target in mapping:
                img = Rule(r.symbol, tuple(mapping[c] for c in r.children), mapping[r.target])
                if img not in brules:
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        q = order[k]
        for p in cands[q]:
            if p in used:
                continue
            mapping[q] = p
            used.add(p)
            if consistent(q) and search(k + 1):
                return True
            del mapping[q]
            used.discard(p)
        return False

    return dict(mapping) if search(0) else None


def find_embedding(a: BottomUpAutomaton, b: BottomUpAutomaton) -> dict[str, str] | None:
    """A state bijection a -> b preserving finality with every rule of ``a`` mapped into ``b``.

    The first one found in a deterministic search order, or None.
    """
    if a.alphabet != b.alphabet or len(a.states) != len(b.states) or len(a.rules) > len(b.rules):
        return None
    bstates = sorted_states(b.states)
    cands = {q: [p for p in bstates if (p in b.finals) == (q in a.finals)] for q in a.states}
    order = sorted(a.states, key=lambda q: (len(cands[q]), q))
    involving: dict[str, list[Rule]] = {q: [] for q in a.states}
    for r in a.rules:
        for q in {*r.children, r.target}:
            involving[q].append(r)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(q: str) -> bool:
        for r in involving[q]:
            if all(c in mapping for c in r.children) and r.target in mapping:
                if Rule(r.symbol, tuple(mapping[c] for c in r.children), mapping[r.target]) not in b.rules:
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        q = order[k]
        for p in cands[q]:
            if p in used:
                continue
            mapping[q] = p
            used.add(p)
            if consistent(q) and search(k + 1):
                return True
            del mapping[q]
            used.discard(p)
        return False

    return dict(mapping) if search(0) else None


def is_canonical_up_rfta(a: BottomUpAutomaton) -> bool:
    return isomorphic(a, canonical_up_rfta(a))


def canonical_rule_diff(a: BottomUpAutomaton) -> tuple[set[Rule], set[Rule]]:
    """Rules the canonical RFTA has and trim(a) lacks, and vice versa, in a's state names.

    States are matched by a rule-preserving embedding of trim(a) into the
    canonical automaton when one exists (then nothing is extra); otherwise
    by context-language equality with the prime residuals.
    """
    t = trim(a)
    lat = build_lattice(a)
    can = canonical_up_rfta(a, lat)
    emb = find_embedding(t, can)
    if emb is not None:
        inverse = {v: k for k, v in emb.items()}
    else:
        matches = residual_matches(a, lat)
        inverse = {n: q for q, n in matches.items() if n is not None}
        if len(inverse) != len(matches) or set(inverse) != set(lat.primes):
            raise ValueError("states are not in bijection with the prime residuals")
    translated = {Rule(r.symbol, tuple(inverse[c] for c in r.children), inverse[r.target]) for r in can.rules}
    own = set(t.rules)
    return translated - own, own - translated

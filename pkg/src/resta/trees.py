"""Ranked alphabets, ground terms and one-hole contexts.

Terms are immutable and hashable, so they can be used as dictionary keys
by the memoized runs in the automata modules.  Heights follow the
convention that a constant has height 1; the path-length measure used by
the ``L_n`` witness family is available separately through
:func:`path_lengths`.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Mapping

HOLE = "<>"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"\s*(?:(<>)|([A-Za-z_][A-Za-z0-9_]*)|([(),]))")


class AlphabetError(ValueError):
    """A term or automaton does not fit the alphabet it is used with."""


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos + 1}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class RankedAlphabet:
    """A finite set of symbols, each with a fixed arity.

    Symbol order is the order of declaration; it is only used for printing.
    ``with_hole=True`` builds the extended alphabet F + {<>} used by
    marked context automata.
    """

    __slots__ = ("_arity", "_has_hole", "_hash")

    def __init__(self, symbols: Mapping[str, int] | Iterable[tuple[str, int]], *, with_hole: bool = False):
        items = list(symbols.items()) if isinstance(symbols, Mapping) else list(symbols)
        arity: dict[str, int] = {}
        for name, n in items:
            if name == HOLE:
                raise AlphabetError("the hole token is reserved")
            if not isinstance(name, str) or not _IDENT.match(name):
                raise AlphabetError(f"invalid symbol name {name!r}")
            if name in arity:
                raise AlphabetError(f"duplicate symbol {name!r}")
            if not isinstance(n, int) or n < 0:
                raise AlphabetError(f"invalid arity {n!r} for {name!r}")
            arity[name] = n
        if not any(n == 0 for n in arity.values()):
            raise AlphabetError("a ranked alphabet needs at least one constant")
        if with_hole:
            arity[HOLE] = 0
        self._arity = arity
        self._has_hole = with_hole
        self._hash = hash((frozenset(arity.items()), with_hole))

    @classmethod
    def parse(cls, text: str) -> "RankedAlphabet":
        """Parse ``"f/2 a/0 b/0"``."""
        items = []
        for tok in text.split():
            name, sep, n = tok.partition("/")
            if not sep or not n.isdigit():
                raise ParseError(f"bad alphabet entry {tok!r}, expected NAME/ARITY")
            items.append((name, int(n)))
        return cls(items)

    def __str__(self) -> str:
        return " ".join(f"{s}/{n}" for s, n in self._arity.items() if s != HOLE)

    def __repr__(self) -> str:
        return f"RankedAlphabet({str(self)!r}{', with_hole=True' if self._has_hole else ''})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankedAlphabet):
            return NotImplemented
        return self._has_hole == other._has_hole and self._arity == other._arity

    def __hash__(self) -> int:
        return self._hash

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._arity

    def __iter__(self) -> Iterator[str]:
        return iter(self._arity)

    def __len__(self) -> int:
        return len(self._arity)

    @property
    def has_hole(self) -> bool:
        return self._has_hole

    def arity(self, symbol: str) -> int:
        try:
            return self._arity[symbol]
        except KeyError:
            raise AlphabetError(f"unknown symbol {symbol!r}") from None

    def items(self):
        return self._arity.items()

    @property
    def constants(self) -> list[str]:
        return [s for s, n in self._arity.items() if n == 0]

    def sorted_symbols(self) -> list[str]:
        return sorted(self._arity)

    def extended(self) -> "RankedAlphabet":
        """The alphabet with the hole added as an extra constant."""
        if self._has_hole:
            return self
        return RankedAlphabet([(s, n) for s, n in self._arity.items()], with_hole=True)

    def base(self) -> "RankedAlphabet":
        if not self._has_hole:
            return self
        return RankedAlphabet([(s, n) for s, n in self._arity.items() if s != HOLE])

    def check(self, term: "Term") -> None:
        """Raise :class:`AlphabetError` unless ``term`` is built over this alphabet."""
        stack = [term]
        while stack:
            t = stack.pop()
            if t.symbol not in self._arity:
                raise AlphabetError(f"symbol {t.symbol!r} is not in alphabet {self}")
            if self._arity[t.symbol] != len(t.children):
                raise AlphabetError(
                    f"symbol {t.symbol!r} has arity {self._arity[t.symbol]}, got {len(t.children)} children"
                )
            stack.extend(t.children)


class Term:
    """A ranked tree ``symbol(children...)``; immutable, hash is cached."""

    __slots__ = ("symbol", "children", "height", "_hash", "_key")

    def __init__(self, symbol: str, children: Iterable["Term"] = ()):
        self.symbol = symbol
        self.children = tuple(children)
        self.height = 1 + max((c.height for c in self.children), default=0)
        self._hash = hash((symbol, self.children))
        self._key = None

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return self._hash == other._hash and self.symbol == other.symbol and self.children == other.children

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Term({print_term(self)!r})"

    def __str__(self) -> str:
        return print_term(self)

    def __lt__(self, other: "Term") -> bool:
        return self.order_key() < other.order_key()

    def preorder(self) -> tuple[str, ...]:
        if self._key is None:
            out = [self.symbol]
            for c in self.children:
                out.extend(c.preorder())
            self._key = tuple(out)
        return self._key

    def order_key(self) -> tuple[int, tuple[str, ...]]:
        """Height first, then the preorder symbol sequence.

        Preorder sequences of ranked terms are prefix-free, so this is a
        total order and plain tuple comparison suffices.
        """
        return (self.height, self.preorder())

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def subterm(self, position: Iterable[int]) -> "Term":
        t = self
        for i in position:
            t = t.children[i]
        return t

    def hole_count(self) -> int:
        if self.symbol == HOLE:
            return 1
        return sum(c.hole_count() for c in self.children)


HOLE_TERM = Term(HOLE)


class Context:
    """A term over F + {<>} with exactly one hole."""

    __slots__ = ("skeleton", "hole_path")

    def __init__(self, skeleton: Term):
        n = skeleton.hole_count()
        if n != 1:
            raise ValueError(f"a context needs exactly one hole, found {n}")
        self.skeleton = skeleton
        self.hole_path = _find_hole(skeleton)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Context):
            return NotImplemented
        return self.skeleton == other.skeleton

    def __hash__(self) -> int:
        return hash(("ctx", self.skeleton))

    def __repr__(self) -> str:
        return f"Context({print_context(self)!r})"

    def __str__(self) -> str:
        return print_context(self)

    def __lt__(self, other: "Context") -> bool:
        return self.skeleton.order_key() < other.skeleton.order_key()

    @property
    def height(self) -> int:
        return self.skeleton.height

    @property
    def depth(self) -> int:
        """Number of edges from the root down to the hole."""
        return len(self.hole_path)

    def frames(self) -> list[tuple[str, int, tuple[Term, ...]]]:
        """Hole-path frames from the hole upwards: ``(symbol, position, siblings)``.

        ``siblings`` holds the off-path subterms with the hole position removed.
        """
        frames = []
        t = self.skeleton
        for i in self.hole_path:
            frames.append((t.symbol, i, t.children[:i] + t.children[i + 1:]))
            t = t.children[i]
        frames.reverse()
        return frames


def _find_hole(t: Term) -> tuple[int, ...]:
    path = []
    while t.symbol != HOLE:
        for i, c in enumerate(t.children):
            if c.hole_count():
                path.append(i)
                t = c
                break
    return tuple(path)


IDENTITY = Context(HOLE_TERM)


def _replace_hole(t: Term, path: tuple[int, ...], by: Term) -> Term:
    if not path:
        return by
    i = path[0]
    children = list(t.children)
    children[i] = _replace_hole(children[i], path[1:], by)
    return Term(t.symbol, children)


def _check_same(alphabet: RankedAlphabet | None, *parts: Term) -> None:
    if alphabet is None:
        return
    ext = alphabet.extended()
    for p in parts:
        ext.check(p)


def plug(c: Context, t: Term, alphabet: RankedAlphabet | None = None) -> Term:
    """Return ``c[t]``: the hole of ``c`` replaced by ``t``."""
    if alphabet is not None:
        _check_same(alphabet, c.skeleton)
        alphabet.base().check(t)
    return _replace_hole(c.skeleton, c.hole_path, t)


def compose(outer: Context, inner: Context, alphabet: RankedAlphabet | None = None) -> Context:
    """Context composition: ``compose(o, i)[t] == o[i[t]]``."""
    _check_same(alphabet, outer.skeleton, inner.skeleton)
    return Context(_replace_hole(outer.skeleton, outer.hole_path, inner.skeleton))


def path_lengths(t: Term) -> frozenset[int]:
    """Lengths of all root-to-leaf paths, counted in edges (a constant has 0)."""
    if not t.children:
        return frozenset({0})
    return frozenset(n + 1 for c in t.children for n in path_lengths(c))


# -- enumeration ---------------------------------------------------------

def _by_height(alphabet: RankedAlphabet, max_height: int, with_hole: bool) -> list[list[Term]]:
    """``layers[h]`` = terms of height exactly h (index 0 unused), each layer sorted.

    With ``with_hole`` the layers hold contexts (exactly one hole) instead,
    built on top of the plain term layers.
    """
    symbols = [s for s in alphabet.sorted_symbols() if s != HOLE]
    terms: list[list[Term]] = [[]]
    for h in range(1, max_height + 1):
        if h == 1:
            layer = [Term(s) for s in symbols if alphabet.arity(s) == 0]
        else:
            lower = [t for layer_ in terms[1:h - 1] for t in layer_]
            top = terms[h - 1]
            allt = lower + top
            layer = []
            for s in symbols:
                n = alphabet.arity(s)
                if n == 0:
                    continue
                for kids in itertools.product(allt, repeat=n):
                    if any(k.height == h - 1 for k in kids):
                        layer.append(Term(s, kids))
        layer.sort(key=Term.preorder)
        terms.append(layer)
    if not with_hole:
        return terms

    ctxs: list[list[Term]] = [[], [HOLE_TERM]]
    for h in range(2, max_height + 1):
        low_t = [t for layer_ in terms[1:h] for t in layer_]
        low_c = [c for layer_ in ctxs[1:h] for c in layer_]
        layer = []
        for s in symbols:
            n = alphabet.arity(s)
            for i in range(n):
                for c in low_c:
                    for others in itertools.product(low_t, repeat=n - 1):
                        kids = others[:i] + (c,) + others[i:]
                        if any(k.height == h - 1 for k in kids):
                            layer.append(Term(s, kids))
        layer.sort(key=Term.preorder)
        ctxs.append(layer)
    return ctxs


def enumerate_terms(alphabet: RankedAlphabet, max_height: int) -> list[Term]:
    """All ground terms of height <= max_height, by height then preorder."""
    if max_height < 1:
        raise ValueError("max_height must be >= 1")
    layers = _by_height(alphabet.base(), max_height, with_hole=False)
    return [t for layer in layers[1:] for t in layer]


def enumerate_contexts(alphabet: RankedAlphabet, max_height: int) -> list[Context]:
    """All one-hole contexts of height <= max_height (the hole counts as height 1)."""
    if max_height < 1:
        raise ValueError("max_height must be >= 1")
    layers = _by_height(alphabet.base(), max_height, with_hole=True)
    return [Context(t) for layer in layers[1:] for t in layer]


# -- text syntax ---------------------------------------------------------

def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("hole", HOLE, start))
        elif m.group(2):
            toks.append(("ident", m.group(2), start))
        else:
            toks.append((m.group(3), m.group(3), start))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, alphabet: RankedAlphabet | None, allow_hole: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet
        self.allow_hole = allow_hole

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def term(self) -> Term:
        tok = self.peek()
        if tok[0] == "hole":
            if not self.allow_hole:
                raise ParseError("hole not allowed in a ground term", tok[2])
            self.i += 1
            return HOLE_TERM
        _, name, pos = self.take("ident")
        children = []
        if self.peek()[0] == "(":
            self.i += 1
            children.append(self.term())
            while self.peek()[0] == ",":
                self.i += 1
                children.append(self.term())
            self.take(")")
        if self.alphabet is not None:
            if name not in self.alphabet:
                raise ParseError(f"unknown symbol {name!r}", pos)
            if self.alphabet.arity(name) != len(children):
                raise ParseError(
                    f"arity mismatch: {name!r} has arity {self.alphabet.arity(name)}, got {len(children)}", pos
                )
        return Term(name, children)

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])


def parse_term(text: str, alphabet: RankedAlphabet | None = None) -> Term:
    p = _Parser(text, alphabet, allow_hole=False)
    t = p.term()
    p.done()
    return t


def parse_context(text: str, alphabet: RankedAlphabet | None = None) -> Context:
    p = _Parser(text, alphabet, allow_hole=True)
    t = p.term()
    p.done()
    try:
        return Context(t)
    except ValueError as e:
        raise ParseError(str(e)) from None


def print_term(t: Term) -> str:
    if not t.children:
        return t.symbol
    return f"{t.symbol}({','.join(print_term(c) for c in t.children)})"


def print_context(c: Context) -> str:
    return print_term(c.skeleton)

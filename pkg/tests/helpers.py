"""Shared fixtures: random automata and the small named corpus."""

import itertools
import random

from resta.bottomup import BottomUpAutomaton, Rule, is_empty, trim
from resta.trees import RankedAlphabet

FAB = RankedAlphabet({"f": 2, "a": 0, "b": 0})


def random_automaton(rng: random.Random, max_states: int = 5, alphabet=FAB, density: float = 0.15):
    n = rng.randint(1, max_states)
    states = [f"p{i}" for i in range(n)]
    rules = []
    for sym, k in alphabet.items():
        if k == 0:
            rules += [Rule(sym, (), q) for q in states if rng.random() < 0.4]
        else:
            for kids in itertools.product(states, repeat=k):
                rules += [Rule(sym, kids, q) for q in states if rng.random() < density]
    finals = [q for q in states if rng.random() < 0.4] or [rng.choice(states)]
    return BottomUpAutomaton(alphabet, states, finals, rules)


def random_trimmed(seed: int, count: int, **kw):
    """``count`` trimmed automata with nonempty languages, deterministic in ``seed``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a = trim(random_automaton(rng, **kw))
        if a.states and not is_empty(a):
            out.append(a)
    return out

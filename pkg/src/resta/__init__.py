"""Residual finite tree automata: residual languages, prime residuals and canonical RFTA."""

from .trees import (
    HOLE,
    AlphabetError,
    Context,
    ParseError,
    RankedAlphabet,
    Term,
    compose,
    enumerate_contexts,
    enumerate_terms,
    parse_context,
    parse_term,
    path_lengths,
    plug,
    print_context,
    print_term,
)
from .bottomup import (
    BottomUpAutomaton,
    Dfta,
    Rule,
    accepts,
    complement,
    complete,
    determinize,
    equivalent,
    is_empty,
    language_included,
    minimize,
    product,
    reachable_states,
    trim,
)
from .topdown import (
    TdRule,
    TopDownAutomaton,
    is_td_deterministic,
    td_accepts,
    td_accepts_stream,
    td_state_language,
    to_bottom_up,
    to_top_down,
)
from .bu_residuals import (
    ResidualLatticeUp,
    build_lattice,
    canonical_up_rfta,
    context_inclusion,
    context_language,
    is_bottom_up_rfta,
    is_canonical_up_rfta,
    isomorphic,
    residual_of_term,
)
from .td_residuals import (
    TdResidualCatalog,
    canonical_down_rfta,
    classify_td_primes,
    enumerate_td_residuals,
    is_down_rfta,
    is_homogeneous,
    is_in_Ldown_rfta,
    is_path_closed,
    td_residual_of_context,
)
from .formats import parse_automaton, print_automaton

__version__ = "0.1.0"

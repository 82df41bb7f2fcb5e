"""Command-line front end.

Exit status: 0 for success or a true answer, 1 for a false answer (or a
failed ``--verify`` cross-check), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from .bottomup import (
    BottomUpAutomaton,
    accepts,
    determinize,
    equivalent,
    minimize,
    sorted_states,
    trim,
)
from .bu_residuals import (
    build_lattice,
    canonical_rule_diff,
    canonical_up_rfta,
    is_canonical_up_rfta,
    isomorphic,
    residual_matches,
)
from .corpus import NAMED, generate
from .formats import load_automaton, print_automaton
from .oracle import (
    BoundedLanguage,
    bounded_difference,
    brute_homogeneous,
    brute_path_closed,
    brute_prime_down,
    brute_prime_up,
    dump_counterexamples,
    height_bounds,
    membership_of,
)
from .td_residuals import (
    as_bottom_up,
    canonical_down_rfta,
    enumerate_td_residuals,
    is_homogeneous,
    is_in_Ldown_rfta,
    is_path_closed,
    state_residual_matches,
)
from .topdown import TopDownAutomaton, td_accepts, td_accepts_stream, to_bottom_up, to_top_down
from .trees import AlphabetError, ParseError, parse_term, print_context, print_term

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


def automaton_record(a) -> dict:
    if isinstance(a, TopDownAutomaton):
        return {
            "kind": "top-down",
            "alphabet": str(a.alphabet),
            "states": sorted_states(a.states),
            "initial": sorted_states(a.initials),
            "rules": print_automaton(a).split("rules:\n", 1)[1].splitlines(),
        }
    return {
        "kind": "bottom-up",
        "alphabet": str(a.alphabet),
        "states": sorted_states(a.states),
        "final": sorted_states(a.finals),
        "rules": print_automaton(a).split("rules:\n", 1)[1].splitlines(),
    }


def classify(lang) -> dict:
    """Classification record of the language of a bottom-up or top-down automaton."""
    lat = build_lattice(as_bottom_up(lang))
    cat = enumerate_td_residuals(lang)
    up = canonical_up_rfta(as_bottom_up(lang), lat)
    down = canonical_down_rfta(lang, cat)
    return {
        "regular": True,
        "path_closed": is_path_closed(lang, cat),
        "homogeneous": is_homogeneous(lang, cat),
        "down_rfta": is_in_Ldown_rfta(lang),
        "prime_count_up": len(lat.primes),
        "prime_count_down": len(cat.primes),
        "canonical_sizes": {
            "up": {"states": len(up.states), "rules": len(up.rules)},
            "down": {"states": len(down.states), "rules": len(down.rules)},
        },
    }


def _emit(args, record, text: str | None = None) -> None:
    if args.json:
        print(json.dumps(record, indent=2))
    else:
        print(text if text is not None else _plain(record), end="" if text and text.endswith("\n") else "\n")


def _plain(record, indent: str = "") -> str:
    if not isinstance(record, dict):
        return f"{indent}{record}"
    lines = []
    for k, v in record.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_plain(v, indent + "  "))
        elif isinstance(v, bool):
            lines.append(f"{indent}{k}: {'true' if v else 'false'}")
        elif isinstance(v, list) and any(" " in str(x) for x in v):
            lines.append(f"{indent}{k}:")
            lines.extend(f"{indent}  {x}" for x in v)
        elif isinstance(v, list):
            lines.append(f"{indent}{k}: {' '.join(map(str, v)) or '-'}")
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines)


def _answer(args, value: bool, record: dict | None = None) -> int:
    record = {"result": value, **(record or {})}
    _emit(args, record)
    return EXIT_TRUE if value else EXIT_FALSE


def _emit_automaton(args, a) -> int:
    if args.json:
        print(json.dumps(automaton_record(a), indent=2))
    else:
        sys.stdout.write(print_automaton(a))
    return EXIT_TRUE


def _verify_equivalent(a, b) -> bool:
    _, term_h = height_bounds()
    diff = bounded_difference(a, b, term_h)
    if diff:
        print(f"verify: {len(diff)} disagreement(s) up to height {term_h}", file=sys.stderr)
        dump_counterexamples(diff[:20])
    return not diff


# -- subcommands -----------------------------------------------------------

def cmd_accepts(args) -> int:
    a = load_automaton(args.automaton)
    if args.streaming:
        td = a if isinstance(a, TopDownAutomaton) else to_top_down(a)
        if args.term == "-":
            ok = td_accepts_stream(td, sys.stdin)
        else:
            with open(args.term, encoding="utf-8") as fh:
                ok = td_accepts_stream(td, fh)
    else:
        t = parse_term(args.term, a.alphabet)
        ok = td_accepts(a, t) if isinstance(a, TopDownAutomaton) else accepts(a, t)
    return _answer(args, ok)


def _bottom_up(path: str) -> BottomUpAutomaton:
    return as_bottom_up(load_automaton(path))


def cmd_determinize(args) -> int:
    return _emit_automaton(args, determinize(_bottom_up(args.automaton)))


def cmd_minimize(args) -> int:
    return _emit_automaton(args, minimize(determinize(_bottom_up(args.automaton))))


def cmd_trim(args) -> int:
    return _emit_automaton(args, trim(_bottom_up(args.automaton)))


def cmd_equiv(args) -> int:
    a, b = _bottom_up(args.first), _bottom_up(args.second)
    if a.alphabet != b.alphabet:
        raise AlphabetError("the two automata use different alphabets")
    ok = equivalent(a, b)
    if not ok:
        _, term_h = height_bounds()
        dump_counterexamples(bounded_difference(a, b, term_h)[:20])
    return _answer(args, ok)


def _up_records(lang, primes_only: bool) -> list[dict]:
    lat = build_lattice(as_bottom_up(lang))
    out = []
    for n in lat.nodes:
        if primes_only and not lat.prime[n]:
            continue
        out.append({
            "name": n,
            "witness": print_term(lat.reps[n]),
            "empty": n == lat.sink,
            "final": lat.is_final(n),
            "prime": lat.prime[n],
            "strictly_contains": [p for p in lat.strictly_below(n) if p != lat.sink],
        })
    return out


def _down_records(lang, primes_only: bool) -> list[dict]:
    cat = enumerate_td_residuals(lang)
    out = []
    for s in cat.residuals:
        if primes_only and not cat.prime[s]:
            continue
        core = s & cat.live
        out.append({
            "name": cat.name(s),
            "witness": print_context(cat.witness[s]),
            "empty": not core,
            "initial": bool(core) and cat.is_initial(s),
            "prime": cat.prime[s],
            "states": sorted_states(core),
        })
    return out


def _residual_listing(args, primes_only: bool) -> int:
    lang = load_automaton(args.automaton)
    records = (_up_records if args.direction == "up" else _down_records)(lang, primes_only)
    if args.json:
        print(json.dumps({"direction": args.direction, "residuals": records}, indent=2))
    else:
        for r in records:
            flags = [k for k in ("prime", "final", "initial", "empty") if r.get(k)]
            if "strictly_contains" in r:
                extra = " contains=" + (",".join(r["strictly_contains"]) or "-")
            else:
                extra = " states={" + ",".join(r["states"]) + "}"
            print(f"{r['name']} {r['witness']} [{' '.join(flags)}]{extra}")
    if args.verify and not _verify_residual_count(lang, args.direction):
        return EXIT_FALSE
    return EXIT_TRUE


def _verify_residual_count(lang, direction: str) -> bool:
    """Residuals that differ on bounded contexts or terms differ exactly, so
    the bounded count can never exceed the exact one."""
    ctx_h, term_h = height_bounds()
    bl = BoundedLanguage.of(lang, term_h)
    if direction == "up":
        found = brute_prime_up(bl, term_h, ctx_h)
        exact = len(build_lattice(as_bottom_up(lang)).nodes)
    else:
        found = brute_prime_down(bl, ctx_h, term_h)
        exact = len(enumerate_td_residuals(lang).residuals)
    if len(found) > exact:
        print(f"verify: {len(found)} bounded residuals but only {exact} exact ones", file=sys.stderr)
        dump_counterexamples(r.witness for r in found)
        return False
    return True


def cmd_residuals(args) -> int:
    return _residual_listing(args, primes_only=False)


def cmd_primes(args) -> int:
    return _residual_listing(args, primes_only=True)


def cmd_canonical(args) -> int:
    lang = load_automaton(args.automaton)
    can = canonical_up_rfta(as_bottom_up(lang)) if args.direction == "up" else canonical_down_rfta(lang)
    code = _emit_automaton(args, can)
    if args.verify and not _verify_equivalent(as_bottom_up(can), as_bottom_up(lang)):
        return EXIT_FALSE
    return code


def cmd_is_rfta(args) -> int:
    a = load_automaton(args.automaton)
    if isinstance(a, TopDownAutomaton):
        bad = [q for q, s in state_residual_matches(a).items() if s is None]
    else:
        bad = [q for q, n in residual_matches(a).items() if n is None]
    for q in bad:
        print(f"state {q} does not accept a residual language", file=sys.stderr)
    return _answer(args, not bad, {"offending_states": bad})


def cmd_is_canonical(args) -> int:
    a = load_automaton(args.automaton)
    if isinstance(a, TopDownAutomaton):
        ok = isomorphic(to_bottom_up(a), to_bottom_up(canonical_down_rfta(a)))
        return _answer(args, ok)
    ok = is_canonical_up_rfta(a)
    record: dict = {}
    if not ok:
        try:
            missing, extra = canonical_rule_diff(a)
        except ValueError as e:
            record["reason"] = str(e)
        else:
            record["missing_rules"] = sorted(map(str, missing))
            record["extra_rules"] = sorted(map(str, extra))
    return _answer(args, ok, record)


def cmd_classify(args) -> int:
    lang = load_automaton(args.automaton)
    record = classify(lang)
    _emit(args, record)
    if args.verify:
        ok = True
        ctx_h, term_h = height_bounds()
        bl = BoundedLanguage(membership_of(lang), term_h, lang.alphabet)
        h = min(ctx_h, 2), min(term_h, 2)
        for key, brute in (("path_closed", brute_path_closed), ("homogeneous", brute_homogeneous)):
            cex = brute(bl, *h)
            if record[key] and cex:
                ok = False
                print(f"verify: {key} contradicted by bounded search", file=sys.stderr)
                dump_counterexamples(cex)
        if not ok:
            return EXIT_FALSE
    return EXIT_TRUE


def cmd_gen(args) -> int:
    return _emit_automaton(args, generate(args.name, args.n))


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--verify", action="store_true",
                        help="cross-check with the bounded oracle (RESTA_MAX_HEIGHT sets the bound)")

    p = argparse.ArgumentParser(prog="resta", description="Residual finite tree automata toolkit.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func: Callable, help: str):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("accepts", cmd_accepts, "membership of a term")
    sp.add_argument("automaton")
    sp.add_argument("term", help="term text, or with --streaming a token file ('-' for stdin)")
    sp.add_argument("--streaming", action="store_true", help="read 'SYMBOL arity' preorder tokens")

    for name, func, text in (("determinize", cmd_determinize, "subset construction"),
                             ("minimize", cmd_minimize, "minimal complete DFTA"),
                             ("trim", cmd_trim, "remove useless states")):
        add(name, func, text).add_argument("automaton")

    sp = add("equiv", cmd_equiv, "language equivalence")
    sp.add_argument("first")
    sp.add_argument("second")

    for name, func, text in (("residuals", cmd_residuals, "list residual languages"),
                             ("primes", cmd_primes, "list prime residual languages"),
                             ("canonical", cmd_canonical, "canonical RFTA")):
        sp = add(name, func, text)
        sp.add_argument("automaton")
        sp.add_argument("--direction", choices=("up", "down"), default="up")

    add("is-rfta", cmd_is_rfta, "is every state language a residual").add_argument("automaton")
    add("is-canonical", cmd_is_canonical, "is the automaton its canonical RFTA").add_argument("automaton")
    add("classify", cmd_classify, "classification record of the language").add_argument("automaton")

    sp = add("gen", cmd_gen, "print a corpus automaton")
    sp.add_argument("name", help=f"An, Aprime or one of: {', '.join(sorted(NAMED))}")
    sp.add_argument("n", nargs="?", type=int)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, AlphabetError) as e:
        print(f"resta: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"resta: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

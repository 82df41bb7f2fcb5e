import json

import pytest

from resta.bottomup import accepts, equivalent
from resta.bu_residuals import build_lattice
from resta.cli import classify, main
from resta.corpus import NAMED, an_missing_rules, gen_An, gen_Aprime_n, gen_named, generate, in_Ln, load_manifest, named_membership
from resta.oracle import BoundedLanguage, brute_homogeneous, brute_path_closed, brute_prime_up
from resta.td_residuals import as_bottom_up, enumerate_td_residuals
from resta.topdown import is_td_deterministic, td_accepts, to_bottom_up
from resta.trees import enumerate_terms, parse_term

MANIFEST = load_manifest()
LABELS = {"literature", "hand", "enumeration", "exact"}


@pytest.mark.parametrize("entry", MANIFEST, ids=[e.name for e in MANIFEST])
def test_manifest_matches_classification(entry):
    got = classify(entry.language)
    got["residual_counts"] = {
        "up": len(build_lattice(as_bottom_up(entry.language)).live),
        "down": len(enumerate_td_residuals(entry.language).nonempty),
    }
    assert got == entry.expected
    assert set(entry.basis) == set(entry.expected)
    assert set(entry.basis.values()) <= LABELS


@pytest.mark.parametrize("entry", [e for e in MANIFEST if len(e.language.alphabet) <= 4],
                         ids=lambda e: e.name)
def test_enumeration_fields_agree_with_oracle(entry):
    bl = BoundedLanguage.of(entry.language, 3)
    for key, brute in (("path_closed", brute_path_closed), ("homogeneous", brute_homogeneous)):
        if entry.basis[key] == "enumeration":
            assert bool(brute(bl, 2, 2)) != entry.expected[key]


def test_classify_cli_matches_manifest(tmp_path, capsys):
    for entry in MANIFEST[:5]:
        p = tmp_path / "x.aut"
        assert main(["gen", entry.name]) == 0
        p.write_text(capsys.readouterr().out)
        assert main(["classify", str(p), "--json"]) == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec == {k: v for k, v in entry.expected.items() if k != "residual_counts"}


def test_Ln_prime_counts_bounded():
    # bounded residuals can only merge, so the bounded prime count is a lower bound
    for n in (1, 2):
        found = brute_prime_up(BoundedLanguage.of(gen_An(n), 4), 4, 3)
        assert sum(r.prime for r in found) <= n + 2


def test_generators_reject_bad_n():
    for g in (gen_An, gen_Aprime_n):
        with pytest.raises(ValueError):
            g(0)
    with pytest.raises(ValueError):
        generate("An")
    with pytest.raises(ValueError):
        generate("fab", 2)
    with pytest.raises(KeyError):
        gen_named("nope")


def test_An_examples():
    a = gen_An(2)
    assert len(a.states) == 4
    assert accepts(a, parse_term("f(f(a,a),a)"))
    assert not accepts(a, parse_term("a"))


def test_Aprime_examples():
    a = gen_Aprime_n(2)
    assert len(a.states) == 4 and a.initials == {"q0"}
    assert equivalent(to_bottom_up(a), gen_An(2))
    assert not is_td_deterministic(a)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_family_membership(n):
    a, ap, member = gen_An(n), gen_Aprime_n(n), in_Ln(n)
    for t in enumerate_terms(a.alphabet, 4):
        assert accepts(a, t) == member(t) == td_accepts(ap, t)


@pytest.mark.parametrize("name", sorted(NAMED))
def test_named_membership(name):
    a, member = gen_named(name), named_membership(name)
    for t in enumerate_terms(a.alphabet, 3 if len(a.alphabet) <= 3 else 2):
        assert accepts(a, t) == member(t)


def test_named_exact_sets():
    ex = gen_named("example1")
    assert len(ex.states) == 5 and len(ex.rules) == 7
    lp = [t for t in enumerate_terms(gen_named("Lprime").alphabet, 2) if accepts(gen_named("Lprime"), t)]
    assert len(lp) == 6
    ff = [str(t) for t in enumerate_terms(gen_named("fab_fba").alphabet, 3) if accepts(gen_named("fab_fba"), t)]
    assert ff == ["f(a,b)", "f(b,a)"]


def test_missing_rule_count():
    # 2n rules towards lower levels, 2(n+2) towards q* with f(q0,q0) -> q* counted once
    for n in (1, 2, 3):
        assert len(an_missing_rules(n)) == 2 * n + 2 * (n + 2) - 1

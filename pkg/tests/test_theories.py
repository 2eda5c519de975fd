import random

import pytest

from matchlog.parser import parse_pattern
from matchlog.printer import print_pattern
from matchlog.semantics import Valuation, eval_pattern, holds
from matchlog.syntax import (
    App, BOT, FreeEVar, FreeSVar, Imp, Notation, Signature, Sym, and_,
    expand, iff_, not_, well_formed,
)
from matchlog import theories

from genlib import (
    random_def_model, random_model, random_pattern, random_valuation,
    random_wf_pattern,
)

T = theories.def_theory()
ENV = T.notation_env()
x = FreeEVar("x")


def n(name, *args):
    return Notation(ENV[name], args)


# ---------------------------------------------------------------------------
# The DEF theory is definitionally exact


def test_def_theory_shape():
    assert T.signature.symbols == ("def",)
    assert len(T.notations) == 8
    assert list(T.axioms) == ["Definedness"]


def test_def_notation_expansions_exact():
    p, q = FreeEVar("p"), FreeEVar("q")
    d = Sym("def")
    assert expand(n("defined", p)) == App(d, p)
    assert expand(n("total", p)) == expand(not_(n("defined", not_(p))))
    assert expand(n("eq", p, q)) == expand(n("total", iff_(p, q)))
    assert expand(n("neq", p, q)) == expand(not_(n("eq", p, q)))
    assert expand(n("member", x, p)) == expand(n("defined", and_(x, p)))
    assert expand(n("subseteq", p, q)) == expand(n("total", Imp(p, q)))
    assert expand(n("not_member", x, p)) == expand(not_(n("member", x, p)))
    assert expand(n("not_subseteq", p, q)) == expand(not_(n("subseteq", p, q)))


def test_def_axiom_is_defined_x():
    assert expand(T.axioms["Definedness"]) == App(Sym("def"), x)


def test_def_surface_strings_roundtrip():
    # the printed surface matches the declared table
    assert print_pattern(n("defined", x)) == "⌈ x ⌉"
    assert print_pattern(n("total", x)) == "⌊ x ⌋"
    assert print_pattern(n("eq", x, x)) == "x = x"
    assert print_pattern(n("member", x, FreeEVar("y"))) == "x in y"


# ---------------------------------------------------------------------------
# Fixture models


def test_def_three_satisfies_axiom():
    m = theories.builtin_models()["def_three"]
    assert theories.satisfies_definedness(m)


def test_three_does_not_satisfy_def():
    m = theories.builtin_models()["three"]
    with pytest.raises(ValueError):
        theories.definedness_not_empty_iff(m, None, BOT)


def test_random_def_models_satisfy_axiom(rng):
    for _ in range(10):
        m = random_def_model(rng, symbols=("f",), max_size=4)
        assert holds(m, T)


# ---------------------------------------------------------------------------
# Lemma checkers


def test_definedness_not_empty_iff_examples():
    m = theories.builtin_models()["def_three"]
    c = theories.definedness_not_empty_iff(m, None, BOT)
    assert c.lhs is False and c.rhs is False and c.ok
    c = theories.definedness_not_empty_iff(m, None, x)
    assert c.lhs is True and c.rhs is True and c.ok


@pytest.mark.parametrize("seed", range(60))
def test_definedness_lemmas_random(seed):
    rng = random.Random(seed * 17 + 3)
    m = random_def_model(rng, symbols=("f",), max_size=4)
    phi = random_wf_pattern(rng, symbols=("f", "def"), depth=3,
                            evars=("u",), svars=("V",))
    rho = random_valuation(rng, m, phi)
    assert theories.definedness_not_empty_iff(m, rho, phi).ok
    assert theories.totality_not_full_iff(m, rho, phi).ok
    psi = random_wf_pattern(rng, symbols=("f", "def"), depth=3,
                            evars=("u",), svars=("V",))
    rho2 = random_valuation(rng, m, and_(phi, psi))
    assert theories.equal_iff_interpr_same(m, rho2, phi, psi).ok


def test_equality_of_identical_patterns_is_full():
    m = theories.builtin_models()["def_three"]
    sig = Signature(("def", "one", "two", "f"))
    f1 = parse_pattern("f $ one", sig, ENV)
    c = theories.equal_iff_interpr_same(m, None, f1, f1)
    assert c.lhs and c.rhs and c.ok
    eq = parse_pattern("(f $ one) = (f $ one)", sig, ENV)
    assert eval_pattern(m, None, eq) == m.full


def test_equality_of_different_denotations_is_empty():
    m = theories.builtin_models()["def_three"]
    sig = Signature(("def", "one", "two", "f"))
    eq = parse_pattern("(f $ one) = (f $ two)", sig, ENV)
    assert eval_pattern(m, None, eq) == frozenset()
    assert eval_pattern(m, None, parse_pattern("f $ one", sig, ENV)) != \
        eval_pattern(m, None, parse_pattern("f $ two", sig, ENV))


@pytest.mark.parametrize("seed", range(30))
def test_definedness_only_if_without_axiom(seed):
    """ceil(phi) full implies phi nonempty on any model whatsoever."""
    rng = random.Random(seed + 5)
    m = random_model(rng, symbols=("def", "f"), max_size=4)
    phi = random_wf_pattern(rng, symbols=("f", "def"), depth=3,
                            evars=("u",), svars=())
    rho = random_valuation(rng, m, phi)
    ceil = Notation(ENV["defined"], (phi,))
    if eval_pattern(m, rho, ceil) == m.full:
        assert eval_pattern(m, rho, phi)


# ---------------------------------------------------------------------------
# Counterexample suite


def test_counterexample_suite():
    rep = theories.counterexample_suite()
    assert rep["pattern_holds"] is True
    assert rep["f_one"] == ["f", "one", "two"]
    assert len(rep["f_one"]) == 3 and not rep["f_one_functional"]
    assert rep["f_two"] == []


# ---------------------------------------------------------------------------
# Transitive closure


def warshall(n, rel):
    closure = set(rel)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if (i, k) in closure and (k, j) in closure:
                    closure.add((i, j))
    return closure


@pytest.mark.parametrize("seed", range(3))
def test_transitive_closure_matches_warshall(seed):
    rng = random.Random(seed * 101 + 7)
    nbase = 3
    rel = {(rng.randrange(nbase), rng.randrange(nbase))
           for _ in range(rng.randint(1, 5))}
    m = theories.relation_model(nbase, rel)
    tc = theories.transitive_closure(Sym("R"))
    assert well_formed(tc)
    got = eval_pattern(m, None, tc)
    want = frozenset(f"c{i}_{j}" for i, j in warshall(nbase, rel))
    assert got == want


def test_transitive_closure_requires_wf():
    from matchlog.syntax import BoundSVar

    with pytest.raises(ValueError):
        theories.transitive_closure(BoundSVar(3))


def test_load_theory_and_models():
    assert theories.load_theory("DEF").name == "DEF"
    with pytest.raises(FileNotFoundError):
        theories.load_theory("NOPE")
    assert theories.load_model("three").name == "three"
    with pytest.raises(FileNotFoundError):
        theories.load_model("nope")

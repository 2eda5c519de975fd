import random

import pytest

from matchlog.parser import (
    ParseError, parse_model, parse_pattern, parse_theory,
)
from matchlog.printer import print_pattern
from matchlog.semantics import Model
from matchlog.syntax import (
    App, BOT, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Signature, Sym, BASE_NOTATIONS, and_, definedness_notations, expand,
    iff_, not_, or_, top,
)
from matchlog import theories

from genlib import random_pattern

DEF_NOTA = definedness_notations()
ALL_NOTA = dict(BASE_NOTATIONS, **DEF_NOTA)
SIG = Signature(("f", "g", "def", "pair"))


def rt(text, **kw):
    p = parse_pattern(text, SIG, ALL_NOTA, **kw)
    assert parse_pattern(print_pattern(p), SIG, ALL_NOTA, **kw) == p
    return p


def test_parse_examples():
    assert rt("exists . b0") == Exists(BoundEVar(0))
    p = rt("exists . b0 ---> b1")
    assert p == Exists(Imp(BoundEVar(0), BoundEVar(1)))
    assert rt("Bot") == BOT
    assert rt("x") == FreeEVar("x")
    assert rt("X") == FreeSVar("X")
    assert rt("f") == Sym("f")


def test_application_forms():
    assert rt("f $ x") == App(Sym("f"), FreeEVar("x"))
    assert rt("f x") == App(Sym("f"), FreeEVar("x"))
    assert rt("f x y") == App(App(Sym("f"), FreeEVar("x")), FreeEVar("y"))
    assert rt("f $ ! x") == App(Sym("f"), not_(FreeEVar("x")))


def test_precedences():
    p = rt("x and y or x")
    assert p == or_(and_(FreeEVar("x"), FreeEVar("y")), FreeEVar("x"))
    p = rt("x ---> y ---> x")
    assert p == Imp(FreeEVar("x"), Imp(FreeEVar("y"), FreeEVar("x")))
    p = rt("! x ---> y")
    assert p == Imp(not_(FreeEVar("x")), FreeEVar("y"))
    p = rt("x <---> y")
    assert p == iff_(FreeEVar("x"), FreeEVar("y"))


def test_quantifier_scopes_max_right():
    p = rt("mu . X or exists . b0")
    assert p == Mu(or_(FreeSVar("X"), Exists(BoundEVar(0))))


def test_named_binders_alpha_canonical():
    a = parse_pattern("exists x . x")
    b = parse_pattern("exists y . y")
    assert a == b == Exists(BoundEVar(0))
    c = parse_pattern("mu Z . Z", notations=ALL_NOTA)
    assert c == Mu(BoundSVar(0))
    d = parse_pattern("forall w . w ---> w")
    assert d == parse_pattern("forall . b0 ---> b0")


def test_named_binder_shadowing():
    p = parse_pattern("exists x . exists x . x")
    assert p == Exists(Exists(BoundEVar(0)))


def test_unicode_aliases():
    assert parse_pattern("∃ . b0") == Exists(BoundEVar(0))
    assert parse_pattern("μ . S0") == Mu(BoundSVar(0))
    assert parse_pattern("⊥") == BOT
    assert parse_pattern("¬ x") == not_(FreeEVar("x"))
    assert parse_pattern("x → y") == Imp(FreeEVar("x"), FreeEVar("y"))
    got = parse_pattern("⌈ x ⌉", SIG, ALL_NOTA)
    assert expand(got) == App(Sym("def"), FreeEVar("x"))


def test_definedness_surfaces():
    assert rt("⌈ x ⌉")
    assert rt("⌊ x ⌋")
    assert rt("x = y")
    assert rt("x != y")
    assert rt("x in y")
    assert rt("x notin y")
    assert rt("x subseteq y")
    assert rt("x notsubseteq y")
    assert expand(rt("x = y")) == expand(
        parse_pattern("total(x <---> y)", SIG, ALL_NOTA))


def test_pair_syntax():
    p = rt("<x, y>")
    assert p == App(App(Sym("pair"), FreeEVar("x")), FreeEVar("y"))
    with pytest.raises(ParseError):
        parse_pattern("<x, y>", Signature(("f",)), ALL_NOTA)


def test_transitive_closure_display_form():
    text = ("mu . R or exists . exists . exists . "
            "<b2,b0> and <b2,b1> in S0 and <b1,b0> in S0")
    p = parse_pattern(text, SIG, ALL_NOTA)
    assert p == theories.transitive_closure(FreeSVar("R"))


def test_print_not_chain_vs_raw():
    folded = not_(not_(FreeEVar("x")))
    assert print_pattern(folded) == "! ! x"
    raw = Imp(Imp(FreeEVar("x"), BOT), BOT)
    assert print_pattern(raw) == "(x ---> Bot) ---> Bot"
    assert print_pattern(folded, fold=False) == "(x ---> Bot) ---> Bot"


def test_parse_errors_carry_location():
    with pytest.raises(ParseError) as e:
        parse_pattern("x --->", SIG, ALL_NOTA)
    assert "line" in str(e.value)
    with pytest.raises(ParseError):
        parse_pattern("unknown_sym $ q9'@", SIG, ALL_NOTA)
    with pytest.raises(ParseError):
        parse_pattern("total(x, y)", SIG, ALL_NOTA)  # arity
    with pytest.raises(ParseError):
        parse_pattern("b99999999999999999999999", SIG, ALL_NOTA)


@pytest.mark.parametrize("seed", range(150))
def test_roundtrip_random(seed):
    rng = random.Random(seed * 13 + 1)
    phi = random_pattern(rng, symbols=("f", "g", "def"), depth=4,
                         evars=("x", "y"), svars=("X",), notations=ALL_NOTA)
    text = print_pattern(phi)
    assert parse_pattern(text, SIG, ALL_NOTA) == phi
    unfolded = print_pattern(phi, fold=False)
    assert parse_pattern(unfolded, SIG, ALL_NOTA) == expand(phi)
    utext = print_pattern(phi, unicode_ops=True)
    assert parse_pattern(utext, SIG, ALL_NOTA) == phi


# ---------------------------------------------------------------------------
# Theory files


def test_parse_def_theory_counts():
    text = theories.data_path("def.mlth").read_text()
    th = parse_theory(text)
    assert th.name == "DEF"
    assert th.signature.symbols == ("def",)
    assert len(th.notations) == 8
    assert list(th.axioms) == ["Definedness"]
    ax = expand(th.axioms["Definedness"])
    assert ax == App(Sym("def"), FreeEVar("x"))


def test_theory_imports():
    text = "theory T2\nimport DEF\nsymbol pair\naxiom Pairish : ⌈ x ⌉\n"
    th = parse_theory(text, resolve_import=theories.resolve_import)
    assert th.imports == ("DEF",)
    assert set(th.signature.symbols) == {"def", "pair"}
    assert "Definedness" in th.axioms and "Pairish" in th.axioms


def test_theory_rejects_ill_formed_axiom():
    with pytest.raises(ParseError):
        parse_theory("theory T\naxiom Bad : b0\n")


def test_theory_rejects_duplicates():
    with pytest.raises(ParseError):
        parse_theory("theory T\naxiom A : x\naxiom A : x\n")
    with pytest.raises(ParseError):
        parse_theory("theory T\nnotation n(p) := p\nnotation n(p) := ! p\n")


def test_theory_rejects_param_under_binder():
    with pytest.raises(ParseError):
        parse_theory("theory T\nnotation bad(p) := exists . p\n")


def test_comment_stripping_keeps_arrows():
    th = parse_theory("theory T -- named T\naxiom A : x ---> x -- reflexive\n")
    assert expand(th.axioms["A"]) == Imp(FreeEVar("x"), FreeEVar("x"))


# ---------------------------------------------------------------------------
# Model files


def test_parse_model_counterexample():
    m = theories.builtin_models()["three"]
    assert isinstance(m, Model)
    assert m.carrier == ("one", "two", "f")
    assert m.app_of("f", "one") == frozenset({"one", "two", "f"})
    assert m.app_of("f", "two") == frozenset()
    assert m.app_of("one", "one") == frozenset()
    assert m.syminterp["f"] == frozenset({"f"})


def test_model_errors():
    with pytest.raises(ParseError):
        parse_model("model m\nelements a a\n")
    with pytest.raises(ParseError):
        parse_model("model m\nelements a\nsymbol f = {b}\n")
    with pytest.raises(ParseError):
        parse_model("model m\nelements a\napp a b = {a}\n")
    with pytest.raises(ParseError):
        parse_model("model m\n")

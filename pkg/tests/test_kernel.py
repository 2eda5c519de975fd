import random

import pytest

from matchlog.kernel import (
    AppContext, Derivation, KernelError, Theorem, check,
)
from matchlog.proofjson import ProofDecodeError, decode_proof, encode_proof
from matchlog.parser import parse_pattern
from matchlog.printer import print_pattern
from matchlog.syntax import (
    App, BOT, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Signature, Sym, and_, bsvar_subst, evar_open, expand, not_, or_,
    well_formed,
)
from matchlog import theories

from genlib import DerivationGen, make_theory, random_theory_with_model

EMPTY = make_theory({}, name="EMPTY")
x, y = FreeEVar("x"), FreeEVar("y")
f = Sym("f")


def test_existence_for_any_theory():
    t = check(EMPTY, Derivation("Existence"))
    assert t.conclusion == Exists(BoundEVar(0))
    t2 = check(theories.def_theory(), Derivation("Existence"))
    assert t2.conclusion == t.conclusion


def test_modus_ponens_checks_and_mismatches():
    p1 = Derivation("Prop1", phi1=x, phi2=y)        # x -> (y -> x)
    p1b = Derivation("Prop1", phi1=x, phi2=x)       # x -> (x -> x)
    mp_bad = Derivation("ModusPonens", (p1, p1b))
    with pytest.raises(KernelError) as e:
        check(EMPTY, mp_bad)
    assert e.value.code == "rule-shape"
    assert e.value.node is not None

    # a correct instance: from |- a and |- a -> b conclude b
    th = make_theory({"A": x, "AB": Imp(x, y)})
    minor = Derivation("Hypothesis", axiom=x)
    major = Derivation("Hypothesis", axiom=Imp(x, y))
    got = check(th, Derivation("ModusPonens", (minor, major)))
    assert got.conclusion == y


def test_prop1_rejects_ill_formed_instantiation():
    with pytest.raises(KernelError) as e:
        check(EMPTY, Derivation("Prop1", phi1=BoundEVar(0), phi2=x))
    assert e.value.code == "ill-formed"


def test_hypothesis_unknown_axiom():
    with pytest.raises(KernelError) as e:
        check(EMPTY, Derivation("Hypothesis", axiom=x))
    assert e.value.code == "unknown-axiom"
    th = theories.def_theory()
    byname = check(th, Derivation("Hypothesis", axiom="Definedness"))
    assert byname.conclusion == App(Sym("def"), FreeEVar("x"))
    with pytest.raises(KernelError):
        check(th, Derivation("Hypothesis", axiom="Nope"))


def test_exquantifier_shape():
    body = BoundEVar(0)
    t = check(EMPTY, Derivation("ExQuantifier", phi=body, x="x"))
    assert t.conclusion == Imp(x, Exists(BoundEVar(0)))
    with pytest.raises(KernelError):
        check(EMPTY, Derivation("ExQuantifier", phi=BoundEVar(1), x="x"))


def test_exgen_side_condition():
    # child: open(b0, x) -> (y -> y) i.e. x -> (y -> y)
    th = make_theory({"A": Imp(x, Imp(y, y))})
    child = Derivation("Hypothesis", axiom=Imp(x, Imp(y, y)))
    good = Derivation("ExGen", (child,), phi=BoundEVar(0), x="x")
    t = check(th, good)
    assert t.conclusion == Imp(Exists(BoundEVar(0)), Imp(y, y))
    # x free in the consequent is rejected
    th2 = make_theory({"A": Imp(x, x)})
    child2 = Derivation("Hypothesis", axiom=Imp(x, x))
    bad = Derivation("ExGen", (child2,), phi=BoundEVar(0), x="x")
    with pytest.raises(KernelError) as e:
        check(th2, bad)
    assert e.value.code == "side-condition"


def test_prefixpoint_hand_substituted():
    # body of mu . (z or (s $ S0)) over symbols z, s
    z, s = Sym("z"), Sym("s")
    body = or_(z, App(s, BoundSVar(0)))
    t = check(make_theory({}, symbols=("z", "s")),
              Derivation("PreFixpoint", phi=body))
    mu = Mu(expand(body))
    by_hand = Imp(
        expand(or_(z, App(s, mu))),
        mu,
    )
    assert t.conclusion == by_hand
    # and agrees with the substitution operation
    assert t.conclusion == Imp(bsvar_subst(expand(body), mu, 0), mu)


def test_prefixpoint_rejects_nonpositive():
    with pytest.raises(KernelError) as e:
        check(EMPTY, Derivation("PreFixpoint", phi=not_(BoundSVar(0))))
    assert e.value.code == "side-condition"


def test_knaster_tarski():
    from matchlog.derived import build_imp_refl

    psi = Sym("f")
    th = make_theory({}, symbols=("f",))
    refl = build_imp_refl(th, psi)
    t = check(th, Derivation("KnasterTarski", (refl.derivation,),
                             phi=BoundSVar(0), psi=psi))
    assert t.conclusion == Imp(Mu(BoundSVar(0)), psi)
    with pytest.raises(KernelError):
        check(th, Derivation("KnasterTarski", (refl.derivation,),
                             phi=BoundSVar(0), psi=Sym("f") if False else FreeSVar("W")))


def test_svar_subst():
    th = make_theory({"A": Imp(FreeSVar("X"), FreeSVar("X"))}, symbols=("f",))
    child = Derivation("Hypothesis", axiom=Imp(FreeSVar("X"), FreeSVar("X")))
    t = check(th, Derivation("SvarSubst", (child,), psi=f, X="X"))
    assert t.conclusion == Imp(f, f)
    with pytest.raises(KernelError) as e:
        check(th, Derivation("SvarSubst", (child,), psi=BoundSVar(0), X="X"))
    assert e.value.code == "side-condition"


def test_framing():
    th = make_theory({"A": Imp(x, y)}, symbols=("f",))
    child = Derivation("Hypothesis", axiom=Imp(x, y))
    tl = check(th, Derivation("FramingL", (child,), phi=f))
    assert tl.conclusion == Imp(App(x, f), App(y, f))
    tr = check(th, Derivation("FramingR", (child,), phi=f))
    assert tr.conclusion == Imp(App(f, x), App(f, y))


def test_propagation_schemas():
    th = make_theory({}, symbols=("f",))
    t = check(th, Derivation("PropBotL", phi=f))
    assert t.conclusion == Imp(App(BOT, f), BOT)
    t = check(th, Derivation("PropOrR", phi1=f, phi2=x, phi3=y))
    assert t.conclusion == expand(Imp(App(f, or_(x, y)),
                                      or_(App(f, x), App(f, y))))
    body = BoundEVar(0)
    t = check(th, Derivation("PropExL", phi1=body, phi2=f))
    assert t.conclusion == Imp(App(Exists(BoundEVar(0)), f),
                               Exists(App(BoundEVar(0), f)))
    # a body capturing the propagated side is rejected through wf
    with pytest.raises(KernelError):
        check(th, Derivation("PropExL", phi1=body, phi2=BoundEVar(0)))


def test_singleton():
    th = make_theory({}, symbols=("f",))
    ctx1 = AppContext((("R", f),))
    ctx2 = AppContext(())
    t = check(th, Derivation("Singleton", ctx1=ctx1, ctx2=ctx2, x="x", phi=y))
    want = expand(not_(and_(App(f, and_(x, y)), and_(x, not_(y)))))
    assert t.conclusion == want
    bad_ctx = AppContext((("L", BoundEVar(0)),))
    with pytest.raises(KernelError):
        check(th, Derivation("Singleton", ctx1=bad_ctx, ctx2=ctx2, x="x", phi=y))


def test_conclusions_always_well_formed():
    rng = random.Random(42)
    for trial in range(25):
        theory, _ = random_theory_with_model(rng)
        gen = DerivationGen(rng, theory, symbols=theory.signature.symbols)
        for _ in range(8):
            t = gen.theorem()
            assert well_formed(t.conclusion)


def test_check_is_deterministic():
    d = Derivation("Prop2", phi1=x, phi2=y, phi3=x)
    a = check(EMPTY, d)
    b = check(EMPTY, d)
    assert a.conclusion == b.conclusion
    d2 = Derivation("Prop2", phi1=x, phi2=y, phi3=x)
    assert check(EMPTY, d2).conclusion == a.conclusion


def test_theorem_forgery_blocked():
    with pytest.raises(TypeError):
        Theorem(EMPTY, BOT, Derivation("Existence"))
    with pytest.raises(TypeError):
        Theorem(EMPTY, BOT, Derivation("Existence"), _token=object())


def test_theorem_accessors():
    from matchlog.kernel import conclusion, theory_of

    t = check(EMPTY, Derivation("Existence"))
    assert conclusion(t) == Exists(BoundEVar(0))
    assert theory_of(t) is EMPTY


def test_app_context_plug():
    c = AppContext((("L", f), ("R", x)))
    assert c.plug(y) == App(App(x, y), f)
    assert AppContext(()).plug(y) == y
    assert AppContext(()).is_identity


# ---------------------------------------------------------------------------
# Proof objects


def test_export_import_existence():
    t = check(EMPTY, Derivation("Existence"))
    data = encode_proof(t)
    assert b'"Existence"' in data
    t2 = decode_proof(EMPTY, data)
    assert t2.conclusion == t.conclusion
    assert encode_proof(t2) == data


def test_import_reverifies_and_detects_tamper():
    import json

    th = theories.def_theory()
    t = check(th, Derivation("Hypothesis", axiom="Definedness"))
    data = encode_proof(t)
    obj = json.loads(data)
    # edit the stored conclusion: the checker recomputes and notices
    obj["conclusion"]["patterns"] = [["bot"]]
    obj["conclusion"]["root"] = 0
    with pytest.raises(KernelError) as e:
        decode_proof(th, json.dumps(obj).encode())
    assert e.value.code == "rule-shape"


def test_import_rejects_garbage():
    with pytest.raises(ProofDecodeError):
        decode_proof(EMPTY, b"not json")
    with pytest.raises(ProofDecodeError):
        decode_proof(EMPTY, b'{"format": "other"}')
    with pytest.raises(ProofDecodeError):
        decode_proof(EMPTY, b'{"format": "mlproof", "version": 99}')


def test_Roundtrip_random_derivations():
    rng = random.Random(11)
    theory, _ = random_theory_with_model(rng)
    gen = DerivationGen(rng, theory, symbols=theory.signature.symbols)
    for _ in range(20):
        t = gen.theorem()
        data = encode_proof(t)
        t2 = decode_proof(theory, data)
        assert t2.conclusion == t.conclusion
        assert encode_proof(t2) == data


# ---------------------------------------------------------------------------
# Propagation/framing split equivalence: the single-context forms are
# derivable from the left/right rules and vice versa.


def test_single_context_propagation_derived():
    from matchlog.derived import (
        build_framed, build_prop_bot_ctx, build_prop_ex_ctx, build_prop_or_ctx,
    )

    th = make_theory({"A": Imp(x, y)}, symbols=("f", "g"))
    contexts = [
        AppContext(()),
        AppContext((("L", f),)),
        AppContext((("R", f),)),
        AppContext((("L", f), ("R", Sym("g")))),
        AppContext((("R", App(f, Sym("g"))), ("L", f))),
    ]
    hyp = check(th, Derivation("Hypothesis", axiom=Imp(x, y)))
    for c in contexts:
        t = build_prop_bot_ctx(th, c)
        assert t.conclusion == Imp(expand(c.plug(BOT)), BOT)
        t = build_prop_or_ctx(th, c, x, y)
        assert t.conclusion == expand(Imp(c.plug(or_(x, y)),
                                          or_(c.plug(x), c.plug(y))))
        t = build_prop_ex_ctx(th, c, BoundEVar(0))
        assert t.conclusion == Imp(expand(c.plug(Exists(BoundEVar(0)))),
                                   Exists(expand(c.plug(BoundEVar(0)))))
        t = build_framed(th, c, hyp)
        assert t.conclusion == Imp(expand(c.plug(x)), expand(c.plug(y)))


def test_lr_rules_are_single_context_instances():
    # the left/right schemas coincide with one-step contexts
    th = make_theory({}, symbols=("f",))
    from matchlog.derived import build_prop_bot_ctx, build_prop_or_ctx

    left = check(th, Derivation("PropBotL", phi=f)).conclusion
    assert left == build_prop_bot_ctx(th, AppContext((("L", f),))).conclusion
    right = check(th, Derivation("PropBotR", phi=f)).conclusion
    assert right == build_prop_bot_ctx(th, AppContext((("R", f),))).conclusion
    orl = check(th, Derivation("PropOrL", phi1=x, phi2=y, phi3=f)).conclusion
    assert orl == build_prop_or_ctx(th, AppContext((("L", f),)), x, y).conclusion

import random
from itertools import combinations

import pytest

import matchlog.semantics as semantics
from matchlog.parser import parse_pattern
from matchlog.semantics import (
    BudgetExceededError, DanglingIndexError, EvalError, Model,
    NonPositiveMuError, Valuation, entails_over, eval_pattern, holds,
    holds_detail, is_functional, is_predicate, lfp, lfp_by_prefixpoints,
)
from matchlog.syntax import (
    App, BOT, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Signature, Sym, and_, evar_open, expand, fevar_subst, fsvar_subst,
    iff_, not_, nu, or_, svar_open, top, well_formed, BASE_NOTATIONS,
    definedness_notations,
)
from matchlog import theories

from genlib import (
    random_def_model, random_model, random_pattern, random_valuation,
    random_wf_pattern,
)

ALL_NOTA = dict(BASE_NOTATIONS, **definedness_notations())


def three():
    return theories.builtin_models()["three"]


def small_model():
    return Model(
        carrier=("a", "b"),
        app={("a", "a"): frozenset(("b",)), ("a", "b"): frozenset(("a", "b"))},
        syminterp={"f": frozenset(("a",))},
        name="small",
    )


# ---------------------------------------------------------------------------
# Evaluation clauses


def test_eval_bot_empty():
    assert eval_pattern(small_model(), None, BOT) == frozenset()


def test_eval_variables_and_symbols():
    m = small_model()
    rho = Valuation({"x": "b"}, {"X": frozenset(("a",))})
    assert eval_pattern(m, rho, FreeEVar("x")) == frozenset(("b",))
    assert eval_pattern(m, rho, FreeSVar("X")) == frozenset(("a",))
    assert eval_pattern(m, rho, Sym("f")) == frozenset(("a",))
    # defaults: first carrier element / empty set
    assert eval_pattern(m, None, FreeEVar("q")) == frozenset(("a",))
    assert eval_pattern(m, None, FreeSVar("Q")) == frozenset()


def test_eval_imp_complement():
    m = small_model()
    got = eval_pattern(m, None, Imp(Sym("f"), BOT))
    assert got == frozenset(("b",))


def test_eval_app_counterexample_model():
    m = three()
    sig = Signature(("one", "two", "f"))
    assert eval_pattern(m, None, parse_pattern("f $ one", sig)) == m.full
    assert eval_pattern(m, None, parse_pattern("f $ two", sig)) == frozenset()


def test_eval_mu_identity_is_empty():
    assert eval_pattern(small_model(), None, Mu(BoundSVar(0))) == frozenset()


def test_eval_reachability():
    m = Model(
        carrier=("a", "b", "c", "d"),
        app={("d", "a"): frozenset(("b",)), ("d", "b"): frozenset(("c",))},
        syminterp={"z": frozenset(("a",)), "s": frozenset(("d",))},
        name="reach",
    )
    phi = parse_pattern("mu . z or (s $ S0)", Signature(("z", "s")))

    # oracle: breadth-first closure over the application table
    seen = set(m.syminterp["z"])
    frontier = list(seen)
    while frontier:
        nxt = []
        for e in frontier:
            for s in m.syminterp["s"]:
                for out in m.app_of(s, e):
                    if out not in seen:
                        seen.add(out)
                        nxt.append(out)
        frontier = nxt
    assert eval_pattern(m, None, phi) == frozenset(seen) == frozenset("abc")


def test_eval_dangling_index_error():
    with pytest.raises(DanglingIndexError):
        eval_pattern(small_model(), None, BoundEVar(0))
    with pytest.raises(DanglingIndexError):
        eval_pattern(small_model(), None, Exists(BoundEVar(1)))


def test_eval_nonpositive_mu():
    bad = Mu(not_(BoundSVar(0)))
    with pytest.raises(NonPositiveMuError):
        eval_pattern(small_model(), None, bad)
    # opt-in prefixpoint semantics on small carriers
    got = eval_pattern(small_model(), None, bad, nonpositive_mu="enumerate")
    assert got <= small_model().full


# ---------------------------------------------------------------------------
# Fixpoints


def test_lfp_identity_and_constant():
    m = small_model()
    assert lfp(lambda s: s, m) == frozenset()
    target = frozenset(("b",))
    assert lfp(lambda s: target, m) == target


def test_lfp_non_monotone_detected():
    m = small_model()
    flip = lambda s: m.full - s
    with pytest.raises(semantics.FixpointError):
        lfp(flip, m)


@pytest.mark.parametrize("seed", range(60))
def test_lfp_matches_prefixpoint_oracle(seed):
    rng = random.Random(seed)
    m = random_model(rng, symbols=("f",), max_size=4)
    body = random_pattern(rng, symbols=("f",), depth=3, mu_parities=(0,),
                          evars=(), svars=())
    phi = Mu(body)
    if not well_formed(phi):
        return
    X = "Xo"
    opened = svar_open(0, X, body)

    def transformer(s):
        return eval_pattern(m, Valuation({}, {X: s}), opened)

    # oracle: intersect all prefixpoints, enumerated exhaustively
    inter = m.full
    for r in range(len(m.carrier) + 1):
        for combo in combinations(m.carrier, r):
            s = frozenset(combo)
            if transformer(s) <= s:
                inter &= s
    assert eval_pattern(m, None, phi) == inter
    assert lfp(transformer, m) == inter


@pytest.mark.parametrize("seed", range(40))
def test_mu_transformer_monotone(seed):
    rng = random.Random(seed + 500)
    m = random_model(rng, symbols=("f",), max_size=4)
    body = random_pattern(rng, symbols=("f",), depth=3, mu_parities=(0,),
                          evars=(), svars=())
    if not well_formed(Mu(body)):
        return
    opened = svar_open(0, "Xm", body)
    elems = list(m.carrier)
    a = frozenset(e for e in elems if rng.random() < 0.4)
    b = a | frozenset(e for e in elems if rng.random() < 0.4)
    ea = eval_pattern(m, Valuation({}, {"Xm": a}), opened)
    eb = eval_pattern(m, Valuation({}, {"Xm": b}), opened)
    assert ea <= eb


def test_nu_duality_against_downward_iteration():
    rng = random.Random(9)
    for _ in range(30):
        m = random_model(rng, symbols=("f",), max_size=4)
        body = random_pattern(rng, symbols=("f",), depth=2, mu_parities=(0,),
                              evars=(), svars=())
        if not well_formed(nu(body)):
            continue
        opened = svar_open(0, "Xg", body)

        def transformer(s):
            return eval_pattern(m, Valuation({}, {"Xg": s}), opened)

        cur = m.full
        for _ in range(len(m.carrier) + 2):
            nxt = transformer(cur)
            if nxt == cur:
                break
            cur = nxt
        assert eval_pattern(m, None, nu(body)) == cur


# ---------------------------------------------------------------------------
# Satisfaction and entailment


def test_holds_existence_everywhere():
    rng = random.Random(3)
    for _ in range(10):
        m = random_model(rng, symbols=(), max_size=4)
        assert holds(m, Exists(BoundEVar(0)))


def test_holds_counterexample_pattern():
    m = three()
    sig = Signature(("one", "two", "f"))
    assert holds(m, parse_pattern("exists . f $ x <---> b0", sig))


def test_bot_never_holds():
    assert not holds(small_model(), BOT)


def test_holds_requires_wf():
    with pytest.raises(ValueError):
        holds(small_model(), BoundEVar(0))


def test_holds_budget():
    m = random_model(random.Random(0), max_size=4, min_size=4)
    phi = parse_pattern("X1 or X2 or X3 or X4 or ! X1")
    with pytest.raises(BudgetExceededError):
        holds(m, phi, budget=100)


def test_entails_over_suite():
    m = three()
    sig = Signature(("one", "two", "f"))
    good = parse_pattern("exists . f $ x <---> b0", sig)
    res = entails_over([m], (), good)
    assert res.ok
    # f is not functional: forall x exists y . f x = y fails
    th = theories.def_theory()
    env = th.notation_env()
    sig2 = sig.merged(th.signature)
    m2 = theories.builtin_models()["def_three"]
    bad = parse_pattern("forall . exists . (f $ b1) = b0", sig2, env)
    res = entails_over([m2], th, bad)
    assert not res.ok and res.countermodel == "def_three"
    rep = res.report()
    assert rep["entails"] is False and rep["model"] == "def_three"
    assert not entails_over([], (), BOT).ok is False  # vacuous truth
    assert entails_over([], (), BOT).ok


def test_functional_predicate():
    m = small_model()
    assert is_functional(m, None, FreeEVar("x"))
    assert is_predicate(m, None, BOT)
    assert is_predicate(m, None, top())
    assert not is_predicate(m, None, FreeEVar("x"))


@pytest.mark.parametrize("seed", range(30))
def test_defined_always_predicate(seed):
    rng = random.Random(seed + 90)
    m = random_def_model(rng, symbols=("f",), max_size=3)
    env = definedness_notations()
    phi = random_wf_pattern(rng, symbols=("f", "def"), depth=2,
                            evars=("u",), svars=())
    ceil = parse_pattern("⌈ u ⌉", Signature(("def",)), env)
    from matchlog.syntax import Notation

    wrapped = Notation(env["defined"], (phi,))
    for _ in range(4):
        rho = random_valuation(rng, m, wrapped)
        assert is_predicate(m, rho, wrapped)


# ---------------------------------------------------------------------------
# Substitution lemmas (syntactic vs semantic substitution)


@pytest.mark.parametrize("seed", range(80))
def test_set_substitution_lemma(seed):
    rng = random.Random(seed * 7 + 2)
    m = random_model(rng, symbols=("f",), max_size=4)
    phi = random_pattern(rng, symbols=("f",), depth=3,
                         evars=("u",), svars=("V",))
    psi = random_wf_pattern(rng, symbols=("f",), depth=2, evars=(), svars=())
    rho = random_valuation(rng, m, phi)
    lhs = eval_pattern(m, rho, fsvar_subst(phi, psi, "V"))
    rhs = eval_pattern(m, rho.with_svar("V", eval_pattern(m, rho, psi)), phi)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(80))
def test_element_substitution_lemma(seed):
    rng = random.Random(seed * 11 + 5)
    m = random_model(rng, symbols=("f",), max_size=4)
    phi = random_pattern(rng, symbols=("f",), depth=3,
                         evars=("u",), svars=("V",))
    # functional closed replacement: filter random closed patterns
    for _ in range(40):
        psi = random_wf_pattern(rng, symbols=("f",), depth=2,
                                evars=(), svars=())
        den = eval_pattern(m, None, psi)
        if len(den) == 1:
            break
    else:
        return
    (a,) = den
    rho = random_valuation(rng, m, phi)
    lhs = eval_pattern(m, rho, fevar_subst(phi, psi, "u"))
    rhs = eval_pattern(m, rho.with_evar("u", a), phi)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# Valuation and fresh-name irrelevance


@pytest.mark.parametrize("seed", range(30))
def test_valuation_irrelevance(seed):
    rng = random.Random(seed + 123)
    m = random_model(rng, symbols=("f",), max_size=4)
    phi = random_pattern(rng, symbols=("f",), depth=3,
                         evars=("u", "v"), svars=("V",))
    rho = random_valuation(rng, m, phi)
    noisy = Valuation(
        dict(rho.evars, zq=rng.choice(m.carrier)),
        dict(rho.svars, ZQ=frozenset(rng.sample(m.carrier,
                                                rng.randint(0, len(m.carrier))))),
    )
    assert eval_pattern(m, rho, phi) == eval_pattern(m, noisy, phi)


def test_fresh_name_irrelevance(monkeypatch, rng):
    m = random_model(rng, symbols=("f",), max_size=4)
    pats = [
        random_pattern(rng, symbols=("f",), depth=3, evars=("u",), svars=("V",))
        for _ in range(20)
    ]
    base = [eval_pattern(m, None, p) for p in pats if well_formed(p)]

    def odd_fresh_e(phi):
        used = semantics.free_evars(phi)
        i = 7
        while f"weird{i}" in used:
            i += 1
        return f"weird{i}"

    def odd_fresh_s(phi):
        used = semantics.free_svars(phi)
        i = 3
        while f"WEIRD{i}" in used:
            i += 1
        return f"WEIRD{i}"

    monkeypatch.setattr(semantics, "fresh_evar", odd_fresh_e)
    monkeypatch.setattr(semantics, "fresh_svar", odd_fresh_s)
    again = [eval_pattern(m, None, p) for p in pats if well_formed(p)]
    assert base == again

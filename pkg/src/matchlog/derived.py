"""Derived rules: proofs built by composing kernel rules.

Everything here produces plain ``Derivation`` values (so proofs stay
exportable data) and runs them through the kernel checker before handing
out a ``Theorem``; nothing in this module is trusted.

The workhorse is ``tauto``: a truth-table decision over the propositional
skeleton (implication/falsum structure, everything else opaque) paired with
a constructive translation into the three propositional axiom schemas plus
modus ponens.  The translation proves the formula under every assignment of
literal hypotheses and merges assignments by case analysis; hypotheses are
discharged by the standard mechanical deduction transformation, which stays
entirely inside the propositional fragment.

On top of that sit the classic toolkit lemmas, single-context propagation
and framing for application contexts, an equivalence congruence builder for
contexts that do not cross binders, the totality/conjunction equivalence,
and the lemma registry that proof scripts call by name.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache

from .kernel import AppContext, Derivation, KernelError, Theorem, check

# derivation builders recurse over proof structure, which outgrows the
# default interpreter limit long before it strains memory
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)
from .syntax import (
    App, BOT, Exists, FreeEVar, Hole, HOLE, Imp, Mu, Notation, Pattern, Sym,
    and_, expand, iff_, not_, or_, well_formed,
)

__all__ = [
    "TautoResult", "AtomBudgetError", "CongruenceError", "tauto",
    "build_imp_refl", "build_imp_trans", "build_bot_elim",
    "build_and_intro", "build_and_elim_l", "build_and_elim_r",
    "build_or_intro_l", "build_or_intro_r", "build_double_neg_elim",
    "build_top_intro", "build_destruct_or", "build_congruence",
    "build_total_and", "build_defined_singleton",
    "build_framed", "build_prop_bot_ctx", "build_prop_or_ctx",
    "build_prop_ex_ctx", "LemmaValue", "SCRIPT_LEMMAS", "call_script_lemma",
]

MAX_ATOMS = 16


class AtomBudgetError(ValueError):
    """The propositional skeleton has more distinct atoms than supported."""


class CongruenceError(ValueError):
    """A rewrite context is unsupported (e.g. the hole crosses a binder)."""


# ---------------------------------------------------------------------------
# Raw derivation builders (schema instances and composition)


@dataclass(frozen=True)
class PD:
    """A derivation paired with the conclusion it is known to produce."""

    d: Derivation
    p: Pattern


@lru_cache(maxsize=None)
def _prop1(p: Pattern, q: Pattern) -> PD:
    return PD(Derivation("Prop1", phi1=p, phi2=q), Imp(p, Imp(q, p)))


@lru_cache(maxsize=None)
def _prop2(p: Pattern, q: Pattern, r: Pattern) -> PD:
    return PD(Derivation("Prop2", phi1=p, phi2=q, phi3=r),
              Imp(Imp(p, Imp(q, r)), Imp(Imp(p, q), Imp(p, r))))


@lru_cache(maxsize=None)
def _prop3(p: Pattern) -> PD:
    return PD(Derivation("Prop3", phi=p), Imp(Imp(Imp(p, BOT), BOT), p))


def _mp(minor: PD, major: PD) -> PD:
    assert type(major.p) is Imp and major.p.lhs == minor.p, "mp shape"
    return PD(Derivation("ModusPonens", (minor.d, major.d)), major.p.rhs)


@lru_cache(maxsize=None)
def _imp_refl(p: Pattern) -> PD:
    pp = Imp(p, p)
    step = _mp(_prop1(p, pp), _prop2(p, pp, p))
    return _mp(_prop1(p, p), step)


def _imp_trans(ab: PD, bc: PD) -> PD:
    """From a -> b and b -> c build a -> c."""
    a = ab.p.lhs
    h = _Hyp(a)
    chain = _HMp(_HMp(h, _HThm(ab)), _HThm(bc))
    return _close(_deduce(a, chain))


@lru_cache(maxsize=None)
def _bot_elim(p: Pattern) -> PD:
    """falsum implies anything."""
    return _imp_trans(_prop1(BOT, Imp(p, BOT)), _prop3(p))


# ---------------------------------------------------------------------------
# Hypothetical proofs and the deduction transformation
#
# _H nodes are proofs under a multiset of hypothesis patterns.  _deduce
# discharges one hypothesis, mechanically: hypotheses become reflexivity or
# a Prop1 weakening, closed theorems are weakened, and modus ponens nodes
# distribute through Prop2.


class _H:
    __slots__ = ("p",)


class _Hyp(_H):
    def __init__(self, p: Pattern):
        self.p = p


class _HThm(_H):
    __slots__ = ("pd",)

    def __init__(self, pd: PD):
        self.pd = pd
        self.p = pd.p


class _HMp(_H):
    __slots__ = ("minor", "major")

    def __init__(self, minor: _H, major: _H):
        assert type(major.p) is Imp and major.p.lhs == minor.p, "hyp mp shape"
        self.minor = minor
        self.major = major
        self.p = major.p.rhs


def _deduce(a: Pattern, h: _H, cache: dict | None = None) -> _H:
    if cache is None:
        cache = {}
    got = cache.get(id(h))
    if got is not None:
        return got
    if isinstance(h, _Hyp):
        out = _HThm(_imp_refl(a)) if h.p == a else _HMp(h, _HThm(_prop1(h.p, a)))
    elif isinstance(h, _HThm):
        out = _HMp(h, _HThm(_prop1(h.p, a)))
    else:
        dmin = _deduce(a, h.minor, cache)
        dmaj = _deduce(a, h.major, cache)
        step = _HMp(dmaj, _HThm(_prop2(a, h.minor.p, h.p)))
        out = _HMp(dmin, step)
    cache[id(h)] = out
    return out


def _close(h: _H, cache: dict | None = None) -> PD:
    """Turn a hypothesis-free hypothetical proof into a derivation."""
    if cache is None:
        cache = {}
    got = cache.get(id(h))
    if got is not None:
        return got
    if isinstance(h, _Hyp):
        raise AssertionError("open hypothesis survived deduction")
    if isinstance(h, _HThm):
        out = h.pd
    else:
        out = _mp(_close(h.minor, cache), _close(h.major, cache))
    cache[id(h)] = out
    return out


def _htrans(hxy: _H, hyz: _H) -> _H:
    """Hypothetical transitivity: from x -> y and y -> z to x -> z."""
    x, y = hxy.p.lhs, hxy.p.rhs
    z = hyz.p.rhs
    lift = _HMp(hyz, _HThm(_prop1(Imp(y, z), x)))
    step = _HMp(lift, _HThm(_prop2(x, y, z)))
    return _HMp(hxy, step)


# ---------------------------------------------------------------------------
# Tautology decision and proof construction


def _skeletonize(p: Pattern, atoms: dict[Pattern, int]):
    t = type(p)
    if t is Imp:
        return ("i", _skeletonize(p.lhs, atoms), _skeletonize(p.rhs, atoms))
    if p == BOT:
        return ("f",)
    idx = atoms.setdefault(p, len(atoms))
    return ("a", idx)


def _skel_value(sk, assign) -> bool:
    if sk[0] == "f":
        return False
    if sk[0] == "a":
        return assign[sk[1]]
    return (not _skel_value(sk[1], assign)) or _skel_value(sk[2], assign)


def _skel_value3(sk, assign):
    """Three-valued evaluation under a partial assignment (None = unknown)."""
    if sk[0] == "f":
        return False
    if sk[0] == "a":
        return assign[sk[1]]
    l = _skel_value3(sk[1], assign)
    r = _skel_value3(sk[2], assign)
    if r is True or l is False:
        return True
    if l is True and r is False:
        return False
    return None


@dataclass
class TautoResult:
    """Outcome of the tautology procedure.

    Either a kernel-checked theorem, or a falsifying assignment of the
    skeleton's atoms (as pattern -> bool).
    """

    theorem: Theorem | None
    countermodel: dict[Pattern, bool] | None

    @property
    def ok(self) -> bool:
        return self.theorem is not None


class _TautoBuilder:
    # instance-independent lemma derivations, shared across calls
    lemma_cache: dict[tuple, PD] = {}

    def __init__(self):
        pass

    def false_imp(self, a: Pattern, b: Pattern) -> PD:
        """not a -> (a -> b)"""
        key = ("fi", a, b)
        got = self.lemma_cache.get(key)
        if got is None:
            na = Imp(a, BOT)
            bot = _HMp(_Hyp(a), _Hyp(na))
            out = _HMp(bot, _HThm(_bot_elim(b)))
            got = _close(_deduce(na, _deduce(a, out)))
            self.lemma_cache[key] = got
        return got

    def imp_false(self, a: Pattern, b: Pattern) -> PD:
        """a -> (not b -> not (a -> b))"""
        key = ("if", a, b)
        got = self.lemma_cache.get(key)
        if got is None:
            ab = Imp(a, b)
            nb = Imp(b, BOT)
            bot = _HMp(_HMp(_Hyp(a), _Hyp(ab)), _Hyp(nb))
            got = _close(_deduce(a, _deduce(nb, _deduce(ab, bot))))
            self.lemma_cache[key] = got
        return got

    def cases(self, a: Pattern, phi: Pattern) -> PD:
        """(a -> phi) -> ((not a -> phi) -> phi)"""
        key = ("cs", a, phi)
        got = self.lemma_cache.get(key)
        if got is None:
            h_pos = _Hyp(Imp(a, phi))
            h_neg = _Hyp(Imp(Imp(a, BOT), phi))
            h_nphi = _Hyp(Imp(phi, BOT))
            na = _htrans(h_pos, h_nphi)
            phi_proof = _HMp(na, h_neg)
            bot = _HMp(phi_proof, h_nphi)
            nn = _deduce(Imp(phi, BOT), bot)
            classical = _HMp(nn, _HThm(_prop3(phi)))
            got = _close(_deduce(h_pos.p, _deduce(h_neg.p, classical)))
            self.lemma_cache[key] = got
        return got

    def value_proof(self, node, atoms_by_idx, assign, memo) -> tuple[_H, bool]:
        """Prove the node or its negation under the partial assignment.

        Only the children that force the value are recursed into, so the
        proof mentions only the literals that actually decide the formula;
        every node visited must be decided (guaranteed by the case split).
        """
        got = memo.get(id(node))
        if got is not None:
            return got
        kind = node[0]
        if kind == "f":
            out = (_HThm(_imp_refl(BOT)), False)
        elif kind == "a":
            val = assign[node[1]]
            assert val is not None, "undecided atom reached in leaf proof"
            pat = atoms_by_idx[node[1]]
            out = (_Hyp(pat if val else Imp(pat, BOT)), val)
        else:
            vl = _skel_value3(node[1], assign)
            vr = _skel_value3(node[2], assign)
            lp = _pattern_of(node[1], atoms_by_idx)
            rp = _pattern_of(node[2], atoms_by_idx)
            if vr is True:
                hr, _ = self.value_proof(node[2], atoms_by_idx, assign, memo)
                out = (_HMp(hr, _HThm(_prop1(rp, lp))), True)
            elif vl is False:
                hl, _ = self.value_proof(node[1], atoms_by_idx, assign, memo)
                out = (_HMp(hl, _HThm(self.false_imp(lp, rp))), True)
            else:
                assert vl is True and vr is False, "undecided implication in leaf"
                hl, _ = self.value_proof(node[1], atoms_by_idx, assign, memo)
                hr, _ = self.value_proof(node[2], atoms_by_idx, assign, memo)
                step = _HMp(hl, _HThm(self.imp_false(lp, rp)))
                out = (_HMp(hr, step), False)
        memo[id(node)] = out
        return out


def _pattern_of(sk, atoms_by_idx) -> Pattern:
    if sk[0] == "f":
        return BOT
    if sk[0] == "a":
        return atoms_by_idx[sk[1]]
    return Imp(_pattern_of(sk[1], atoms_by_idx), _pattern_of(sk[2], atoms_by_idx))


def tauto(theory, phi: Pattern) -> TautoResult:
    """Decide the propositional skeleton of ``phi``; prove it when valid.

    Non-propositional subpatterns are opaque atoms (at most ``MAX_ATOMS``
    distinct ones).  A positive answer carries a theorem checked over
    ``theory``; a negative one carries the falsifying atom assignment.
    """
    if not well_formed(phi):
        raise ValueError("tauto requires a well-formed pattern")
    ex = expand(phi)
    atoms: dict[Pattern, int] = {}
    sk = _skeletonize(ex, atoms)
    n = len(atoms)
    if n > MAX_ATOMS:
        raise AtomBudgetError(
            f"propositional skeleton has {n} atoms (limit {MAX_ATOMS})")
    atoms_by_idx = {i: p for p, i in atoms.items()}

    for bits in range(1 << n):
        assign = [bool(bits >> i & 1) for i in range(n)]
        if not _skel_value(sk, assign):
            return TautoResult(None, {atoms_by_idx[i]: assign[i] for i in range(n)})

    builder = _TautoBuilder()
    target = _pattern_of(sk, atoms_by_idx)

    def prove(assign: list) -> _H:
        # stop splitting as soon as the partial assignment decides the value
        if _skel_value3(sk, assign) is True:
            h, val = builder.value_proof(sk, atoms_by_idx, assign, {})
            assert val, "tautology leaf evaluated false"
            return h
        i = assign.index(None)
        a = atoms_by_idx[i]
        pos = list(assign)
        pos[i] = True
        neg = list(assign)
        neg[i] = False
        d_pos = _deduce(a, prove(pos))
        d_neg = _deduce(Imp(a, BOT), prove(neg))
        return _HMp(d_neg, _HMp(d_pos, _HThm(builder.cases(a, target))))

    pd = _close(prove([None] * n))
    return TautoResult(check(theory, pd.d), None)


_TAUT_CACHE: dict[Pattern, Derivation] = {}


def _taut_theorem(theory, phi: Pattern) -> Theorem:
    """Internal helper for glue steps that are valid by construction.

    Tautology derivations use no axioms, so the derivation is cached by
    formula and only re-checked against the theory at hand.
    """
    key = expand(phi)
    d = _TAUT_CACHE.get(key)
    if d is None:
        res = tauto(theory, phi)
        if not res.ok:
            raise AssertionError(f"internal glue formula is not a tautology: {phi!r}")
        _TAUT_CACHE[key] = res.theorem.derivation
        return res.theorem
    return check(theory, d)


def _mp_theorems(theory, major: Theorem, *minors: Theorem) -> Theorem:
    """Chain ``major`` (an implication tower) with minor premises via MP."""
    d = major.derivation
    p = major.conclusion
    for m in minors:
        assert type(p) is Imp and p.lhs == m.conclusion, "theorem chain shape"
        d = Derivation("ModusPonens", (m.derivation, d))
        p = p.rhs
    return check(theory, d)


# ---------------------------------------------------------------------------
# Propositional toolkit


def _require_wf(*pats: Pattern):
    for p in pats:
        if not well_formed(p):
            raise ValueError(f"ill-formed pattern: {p!r}")


def build_imp_refl(theory, phi: Pattern) -> Theorem:
    """|- phi -> phi, from the three schemas and modus ponens."""
    _require_wf(phi)
    return check(theory, _imp_refl(expand(phi)).d)


def build_imp_trans(theory, t1: Theorem, t2: Theorem) -> Theorem:
    """From |- a -> b and |- b -> c, |- a -> c."""
    if type(t1.conclusion) is not Imp or type(t2.conclusion) is not Imp \
            or t1.conclusion.rhs != t2.conclusion.lhs:
        raise ValueError("imp_trans needs chainable implications")
    pd = _imp_trans(PD(t1.derivation, t1.conclusion), PD(t2.derivation, t2.conclusion))
    return check(theory, pd.d)


def build_bot_elim(theory, phi: Pattern) -> Theorem:
    _require_wf(phi)
    return check(theory, _bot_elim(expand(phi)).d)


def build_and_intro(theory, p: Pattern, q: Pattern) -> Theorem:
    _require_wf(p, q)
    return _taut_theorem(theory, Imp(p, Imp(q, and_(p, q))))


def build_and_elim_l(theory, p: Pattern, q: Pattern) -> Theorem:
    _require_wf(p, q)
    return _taut_theorem(theory, Imp(and_(p, q), p))


def build_and_elim_r(theory, p: Pattern, q: Pattern) -> Theorem:
    _require_wf(p, q)
    return _taut_theorem(theory, Imp(and_(p, q), q))


def build_or_intro_l(theory, p: Pattern, q: Pattern) -> Theorem:
    _require_wf(p, q)
    return _taut_theorem(theory, Imp(p, or_(p, q)))


def build_or_intro_r(theory, p: Pattern, q: Pattern) -> Theorem:
    _require_wf(p, q)
    return _taut_theorem(theory, Imp(q, or_(p, q)))


def build_double_neg_elim(theory, p: Pattern) -> Theorem:
    _require_wf(p)
    return _taut_theorem(theory, Imp(not_(not_(p)), p))


def build_top_intro(theory) -> Theorem:
    from .syntax import top

    return _taut_theorem(theory, top())


def build_destruct_or(theory, phi1: Pattern, phi2: Pattern, chi: Pattern,
                      t1: Theorem, t2: Theorem) -> Theorem:
    """From |- phi1 -> chi and |- phi2 -> chi, |- (phi1 or phi2) -> chi."""
    _require_wf(phi1, phi2, chi)
    if t1.conclusion != expand(Imp(phi1, chi)) or t2.conclusion != expand(Imp(phi2, chi)):
        raise ValueError("destruct_or premises do not match the given patterns")
    glue = _taut_theorem(
        theory,
        Imp(Imp(phi1, chi), Imp(Imp(phi2, chi), Imp(or_(phi1, phi2), chi))))
    return _mp_theorems(theory, glue, t1, t2)


# ---------------------------------------------------------------------------
# Framing and single-context propagation over application contexts


def build_framed(theory, ctx: AppContext, t: Theorem) -> Theorem:
    """Lift |- a -> b to |- C[a] -> C[b] for an application context C."""
    if type(t.conclusion) is not Imp:
        raise ValueError("framing needs an implication theorem")
    d, p = t.derivation, t.conclusion
    for direction, side in reversed(ctx.steps):
        rule = "FramingL" if direction == "L" else "FramingR"
        d = Derivation(rule, (d,), phi=side)
        if direction == "L":
            p = Imp(App(p.lhs, side), App(p.rhs, side))
        else:
            p = Imp(App(side, p.lhs), App(side, p.rhs))
    return check(theory, d)


def build_prop_bot_ctx(theory, ctx: AppContext) -> Theorem:
    """|- C[Bot] -> Bot for an application context C."""
    pd = _imp_refl(BOT)
    for direction, side in reversed(ctx.steps):
        # frame the inner result, then collapse the new falsum application
        rule = "FramingL" if direction == "L" else "FramingR"
        framed = Derivation(rule, (pd.d,), phi=side)
        inner = pd.p.lhs
        if direction == "L":
            fp = Imp(App(inner, side), App(BOT, side))
            collapse = PD(Derivation("PropBotL", phi=side), Imp(App(BOT, side), BOT))
        else:
            fp = Imp(App(side, inner), App(side, BOT))
            collapse = PD(Derivation("PropBotR", phi=side), Imp(App(side, BOT), BOT))
        pd = _imp_trans(PD(framed, fp), collapse)
    return check(theory, pd.d)


def build_prop_or_ctx(theory, ctx: AppContext, p1: Pattern, p2: Pattern) -> Theorem:
    """|- C[p1 or p2] -> C[p1] or C[p2] for an application context C."""
    _require_wf(p1, p2)
    a, b = expand(p1), expand(p2)
    d1, d2 = a, b  # the two disjunct images under the inner context
    pd = _imp_refl(expand(or_(a, b)))
    for direction, side in reversed(ctx.steps):
        rule = "FramingL" if direction == "L" else "FramingR"
        framed = Derivation(rule, (pd.d,), phi=side)
        inner_or = pd.p.rhs
        if direction == "L":
            fp = Imp(App(pd.p.lhs, side), App(inner_or, side))
            prop = Derivation("PropOrL", phi1=d1, phi2=d2, phi3=side)
            pp = Imp(App(inner_or, side),
                     expand(or_(App(d1, side), App(d2, side))))
            d1, d2 = App(d1, expand(side)), App(d2, expand(side))
        else:
            fp = Imp(App(side, pd.p.lhs), App(side, inner_or))
            prop = Derivation("PropOrR", phi1=side, phi2=d1, phi3=d2)
            pp = Imp(App(side, inner_or),
                     expand(or_(App(side, d1), App(side, d2))))
            d1, d2 = App(expand(side), d1), App(expand(side), d2)
        pd = _imp_trans(PD(framed, fp), PD(prop, pp))
    return check(theory, pd.d)


def build_prop_ex_ctx(theory, ctx: AppContext, body: Pattern) -> Theorem:
    """|- C[exists . body] -> exists . C[body] for an application context C.

    Context sides are closed, so they move under the binder unchanged.
    """
    bodyx = expand(body)
    ex = Exists(bodyx)
    _require_wf(ex)
    inner = bodyx  # image of the body under the inner context
    pd = _imp_refl(ex)
    for direction, side in reversed(ctx.steps):
        rule = "FramingL" if direction == "L" else "FramingR"
        framed = Derivation(rule, (pd.d,), phi=side)
        if direction == "L":
            fp = Imp(App(pd.p.lhs, side), App(Exists(inner), side))
            prop = Derivation("PropExL", phi1=inner, phi2=side)
            inner = App(inner, expand(side))
        else:
            fp = Imp(App(side, pd.p.lhs), App(side, Exists(inner)))
            prop = Derivation("PropExR", phi1=side, phi2=inner)
            inner = App(expand(side), inner)
        pp = Imp(fp.rhs, Exists(inner))
        pd = _imp_trans(PD(framed, fp), PD(prop, pp))
    return check(theory, pd.d)


# ---------------------------------------------------------------------------
# Equivalence congruence over binder-free contexts


def _iff_forward(theory, t_iff: Theorem, p: Pattern, q: Pattern) -> Theorem:
    glue = _taut_theorem(theory, Imp(iff_(p, q), Imp(p, q)))
    return _mp_theorems(theory, glue, t_iff)


def _iff_backward(theory, t_iff: Theorem, p: Pattern, q: Pattern) -> Theorem:
    glue = _taut_theorem(theory, Imp(iff_(p, q), Imp(q, p)))
    return _mp_theorems(theory, glue, t_iff)


def _combine_iff(theory, fwd: Theorem, bwd: Theorem, a: Pattern, b: Pattern) -> Theorem:
    glue = _taut_theorem(theory, Imp(Imp(a, b), Imp(Imp(b, a), iff_(a, b))))
    return _mp_theorems(theory, glue, fwd, bwd)


def _plug(ctx: Pattern, filler: Pattern) -> Pattern:
    t = type(ctx)
    if t is Hole:
        return filler
    if t is App:
        return App(_plug(ctx.left, filler), _plug(ctx.right, filler))
    if t is Imp:
        return Imp(_plug(ctx.lhs, filler), _plug(ctx.rhs, filler))
    if t is Exists:
        return Exists(_plug(ctx.body, filler))
    if t is Mu:
        return Mu(_plug(ctx.body, filler))
    if t is Notation:
        return Notation(ctx.defn, tuple(_plug(a, filler) for a in ctx.args))
    return ctx


def _count_holes(ctx: Pattern) -> int:
    t = type(ctx)
    if t is Hole:
        return 1
    if t is App:
        return _count_holes(ctx.left) + _count_holes(ctx.right)
    if t is Imp:
        return _count_holes(ctx.lhs) + _count_holes(ctx.rhs)
    if t in (Exists, Mu):
        return _count_holes(ctx.body)
    if t is Notation:
        return sum(_count_holes(a) for a in ctx.args)
    return 0


def build_congruence(theory, ctx: Pattern, t_iff: Theorem,
                     p: Pattern, q: Pattern) -> Theorem:
    """From |- p <---> q, derive |- C[p] <---> C[q].

    ``ctx`` is a core pattern with exactly one ``Hole``; the hole may sit
    under applications and propositional structure but not under a binder.
    The identity context returns the given theorem.
    """
    px, qx = expand(p), expand(q)
    if t_iff.conclusion != expand(iff_(px, qx)):
        raise ValueError("equivalence theorem does not match the given sides")
    ctx = expand(ctx)
    if _count_holes(ctx) != 1:
        raise CongruenceError("congruence context must have exactly one hole")
    return _congruence(theory, ctx, t_iff, px, qx)


def _congruence(theory, ctx: Pattern, t_iff: Theorem,
                p: Pattern, q: Pattern) -> Theorem:
    t = type(ctx)
    if t is Hole:
        return t_iff
    if t is Imp:
        hole_left = _count_holes(ctx.lhs) == 1
        sub_ctx = ctx.lhs if hole_left else ctx.rhs
        other = ctx.rhs if hole_left else ctx.lhs
        sub = _congruence(theory, sub_ctx, t_iff, p, q)
        a, b = _plug(sub_ctx, p), _plug(sub_ctx, q)
        if hole_left:
            target = iff_(Imp(a, other), Imp(b, other))
        else:
            target = iff_(Imp(other, a), Imp(other, b))
        glue = _taut_theorem(theory, Imp(iff_(a, b), target))
        return _mp_theorems(theory, glue, sub)
    if t is App:
        hole_left = _count_holes(ctx.left) == 1
        sub_ctx = ctx.left if hole_left else ctx.right
        other = ctx.right if hole_left else ctx.left
        sub = _congruence(theory, sub_ctx, t_iff, p, q)
        a, b = _plug(sub_ctx, p), _plug(sub_ctx, q)
        fwd = _iff_forward(theory, sub, a, b)
        bwd = _iff_backward(theory, sub, a, b)
        step = AppContext((("L", other),)) if hole_left else AppContext((("R", other),))
        f1 = build_framed(theory, step, fwd)
        f2 = build_framed(theory, step, bwd)
        big_a = step.plug(a)
        big_b = step.plug(b)
        return _combine_iff(theory, f1, f2, big_a, big_b)
    if t in (Exists, Mu):
        raise CongruenceError("cannot rewrite under a binder")
    raise CongruenceError(f"hole in unsupported position: {ctx!r}")


# ---------------------------------------------------------------------------
# Definedness-flavoured derived rules


def _definedness_symbol(theory) -> Sym:
    env = theory.notation_env() if hasattr(theory, "notation_env") else {}
    d = env.get("defined")
    if d is None:
        raise ValueError("theory does not provide the definedness notation")
    probe = expand(Notation(d, (BOT,)))
    if type(probe) is App and type(probe.left) is Sym:
        sym = probe.left
    else:
        raise ValueError("definedness notation does not expand to an application")
    has_axiom = any(
        type(ax) is App and ax.left == sym and type(ax.right) is FreeEVar
        for ax in theory.expanded_axioms
    )
    if not has_axiom:
        raise ValueError("theory does not include the definedness axiom")
    return sym


def _env_notation(theory, name: str):
    env = theory.notation_env()
    d = env.get(name)
    if d is None:
        raise ValueError(f"theory does not provide notation {name!r}")
    return lambda *args: Notation(d, tuple(args))


def build_total_and(theory, p: Pattern, q: Pattern) -> "LemmaValue":
    """|- floor(p and q) <---> floor(p) and floor(q), over a definedness theory.

    Both directions are by framing propositional facts through the
    definedness symbol; splitting the disjunction under the symbol is one
    propagation step.
    """
    _require_wf(p, q)
    dsym = _definedness_symbol(theory)
    total = _env_notation(theory, "total")
    defined = _env_notation(theory, "defined")

    A = and_(p, q)
    ceil_np = expand(defined(not_(p)))
    ceil_nq = expand(defined(not_(q)))
    ceil_nA = expand(defined(not_(A)))
    ceil_split = expand(defined(or_(not_(p), not_(q))))

    fr_p = check(theory, Derivation(
        "FramingR", (_taut_theorem(theory, Imp(not_(p), not_(A))).derivation,),
        phi=dsym))
    fr_q = check(theory, Derivation(
        "FramingR", (_taut_theorem(theory, Imp(not_(q), not_(A))).derivation,),
        phi=dsym))
    dir1_glue = _taut_theorem(theory, Imp(
        Imp(ceil_np, ceil_nA),
        Imp(Imp(ceil_nq, ceil_nA),
            Imp(total(A), and_(total(p), total(q))))))
    dir1 = _mp_theorems(theory, dir1_glue, fr_p, fr_q)

    fr_split = check(theory, Derivation(
        "FramingR",
        (_taut_theorem(theory, Imp(not_(A), or_(not_(p), not_(q)))).derivation,),
        phi=dsym))
    prop = check(theory, Derivation(
        "PropOrR", phi1=dsym, phi2=not_(p), phi3=not_(q)))
    dir2_glue = _taut_theorem(theory, Imp(
        Imp(ceil_nA, ceil_split),
        Imp(Imp(ceil_split, or_(ceil_np, ceil_nq)),
            Imp(and_(total(p), total(q)), total(A)))))
    dir2 = _mp_theorems(theory, dir2_glue, fr_split, prop)

    lhs = total(A)
    rhs = and_(total(p), total(q))
    thm = _combine_iff(theory, dir1, dir2, lhs, rhs)
    return LemmaValue(thm, iff_(lhs, rhs), (lhs, rhs))


def build_defined_singleton(theory, x: Pattern, phi: Pattern) -> "LemmaValue":
    """|- ! (ceil(x and phi) and ceil(x and ! phi)), x an element variable."""
    if type(x) is not FreeEVar:
        raise ValueError("defined_singleton needs a free element variable")
    _require_wf(phi)
    dsym = _definedness_symbol(theory)
    defined = _env_notation(theory, "defined")
    ctx = AppContext((("R", dsym),))
    d = Derivation("Singleton", ctx1=ctx, ctx2=ctx, x=x.name, phi=phi)
    thm = check(theory, d)
    display = not_(and_(defined(and_(x, phi)), defined(and_(x, not_(phi)))))
    return LemmaValue(thm, display, None)


# ---------------------------------------------------------------------------
# Lemma registry for proof scripts


@dataclass
class LemmaValue:
    """A theorem plus folded display forms for the proof mode.

    ``display`` expands to the theorem's conclusion.  ``equiv`` carries the
    two folded sides when the lemma is an equivalence usable by rewriting.
    """

    theorem: Theorem
    display: Pattern
    equiv: tuple[Pattern, Pattern] | None = None


def _lemma_taut(theory, args):
    if len(args) != 1:
        raise ValueError("taut expects one pattern argument")
    res = tauto(theory, args[0])
    if not res.ok:
        bad = {str(k): v for k, v in (res.countermodel or {}).items()}
        raise ValueError(f"not a propositional tautology; countermodel {bad}")
    phi = args[0]
    equiv = None
    if type(phi) is Notation and phi.defn.name == "iff":
        equiv = (phi.args[0], phi.args[1])
    return LemmaValue(res.theorem, phi, equiv)


def _lemma_total_and(theory, args):
    if len(args) != 2:
        raise ValueError("total_and expects two pattern arguments")
    return build_total_and(theory, args[0], args[1])


def _lemma_defined_singleton(theory, args):
    if len(args) != 2:
        raise ValueError("defined_singleton expects two pattern arguments")
    return build_defined_singleton(theory, args[0], args[1])


def _lemma_imp_refl(theory, args):
    if len(args) != 1:
        raise ValueError("imp_refl expects one pattern argument")
    thm = build_imp_refl(theory, args[0])
    return LemmaValue(thm, Imp(args[0], args[0]), None)


SCRIPT_LEMMAS = {
    "taut": _lemma_taut,
    "total_and": _lemma_total_and,
    "defined_singleton": _lemma_defined_singleton,
    "imp_refl": _lemma_imp_refl,
}


def call_script_lemma(theory, name: str, args: list[Pattern]) -> LemmaValue:
    fn = SCRIPT_LEMMAS.get(name)
    if fn is None:
        raise ValueError(f"unknown lemma {name!r}")
    return fn(theory, args)

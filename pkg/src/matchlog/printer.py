"""Pattern rendering.

Produces text the parser reads back to an equal tree.  Folded mode keeps
notation nodes (``! p``, ``p and q``, corner brackets); unfolded mode prints
the expanded core.  ``unicode_ops=True`` renders the handful of glyph forms
used in proof-state displays; connectives stay ASCII either way.
"""

from __future__ import annotations

from .syntax import (
    App, Bot, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Hole, Imp,
    Mu, Notation, Pattern, Sym, expand,
)

__all__ = ["print_pattern"]

# Precedence levels, loosest to tightest.
_Q = 0       # quantifier bodies scope maximally right
_IFF = 1
_IMP = 2
_OR = 3
_AND = 4
_CMP = 5
_APP = 6
_PRE = 7

_CMP_OPS = {
    "eq": "=",
    "neq": "!=",
    "member": "in",
    "not_member": "notin",
    "subseteq": "subseteq",
    "not_subseteq": "notsubseteq",
}


def print_pattern(phi: Pattern, fold: bool = True, unicode_ops: bool = False) -> str:
    """Render ``phi``; ``parse_pattern`` inverts this for conventional names."""
    if not fold:
        phi = expand(phi)
    return _pp(phi, _Q, unicode_ops)


def _wrap(s: str, level: int, need: int) -> str:
    return f"({s})" if level < need else s


def _quantifier(word: str, body: Pattern, need: int, uni: bool) -> str:
    return _wrap(f"{word} . {_pp(body, _Q, uni)}", _Q, need)


def _pp(phi: Pattern, need: int, uni: bool) -> str:
    t = type(phi)
    if t is Bot:
        return "⊥" if uni else "Bot"
    if t is FreeEVar or t is FreeSVar or t is Sym:
        return phi.name
    if t is BoundEVar:
        return f"b{phi.index}"
    if t is BoundSVar:
        return f"S{phi.index}"
    if t is Hole:
        return "_"
    if t is App:
        s = f"{_pp(phi.left, _APP, uni)} $ {_pp(phi.right, _PRE, uni)}"
        return _wrap(s, _APP, need)
    if t is Imp:
        s = f"{_pp(phi.lhs, _OR, uni)} ---> {_pp(phi.rhs, _IMP, uni)}"
        return _wrap(s, _IMP, need)
    if t is Exists:
        return _quantifier("∃" if uni else "exists", phi.body, need, uni)
    if t is Mu:
        return _quantifier("μ" if uni else "mu", phi.body, need, uni)
    if t is Notation:
        return _pp_notation(phi, need, uni)
    raise TypeError(f"cannot print {phi!r}")


def _pp_notation(phi: Notation, need: int, uni: bool) -> str:
    name = phi.defn.name
    a = phi.args
    if name == "not":
        return _wrap(f"! {_pp(a[0], _PRE, uni)}", _PRE, need)
    if name == "or":
        s = f"{_pp(a[0], _AND, uni)} or {_pp(a[1], _OR, uni)}"
        return _wrap(s, _OR, need)
    if name == "and":
        s = f"{_pp(a[0], _CMP, uni)} and {_pp(a[1], _AND, uni)}"
        return _wrap(s, _AND, need)
    if name == "iff":
        s = f"{_pp(a[0], _IMP, uni)} <---> {_pp(a[1], _IFF, uni)}"
        return _wrap(s, _IFF, need)
    if name == "Top":
        return "⊤" if uni else "Top"
    if name == "forall":
        return _quantifier("∀" if uni else "forall", a[0], need, uni)
    if name == "nu":
        return _quantifier("ν" if uni else "nu", a[0], need, uni)
    if name == "defined":
        return f"⌈ {_pp(a[0], _Q, uni)} ⌉"
    if name == "total":
        return f"⌊ {_pp(a[0], _Q, uni)} ⌋"
    op = _CMP_OPS.get(name)
    if op is not None:
        s = f"{_pp(a[0], _APP, uni)} {op} {_pp(a[1], _APP, uni)}"
        return _wrap(s, _CMP, need)
    inner = ", ".join(_pp(x, _Q, uni) for x in a)
    return f"{name}({inner})"

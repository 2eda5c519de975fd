"""Locally nameless pattern syntax.

Patterns mix named free variables with de Bruijn indices for bound ones:
element variables are bound by ``exists``, set variables by ``mu``, and the
two index namespaces are independent.  Construction is deliberately
unrestricted (pseudo-patterns); scoping and positivity are separate,
decidable checks, so proofs about patterns stay apart from the data.

Derived notations (``not``, ``or``, ``forall``, the definedness family, ...)
are first-class wrapper nodes that remember their name and arguments.
``expand`` erases them to the ten core constructors; printing can keep them
folded.  Substitution distributes through notation arguments so that
expanding commutes with substituting, which the test suite checks for every
shipped notation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

__all__ = [
    "Pattern", "FreeEVar", "FreeSVar", "BoundEVar", "BoundSVar", "Sym",
    "App", "Bot", "Imp", "Exists", "Mu", "Notation", "Hole", "BOT", "HOLE",
    "NotationDef", "Signature", "SubstitutionError",
    "wf_positive", "wf_closed_ex", "wf_closed_mu", "well_formed",
    "free_evars", "free_svars", "fresh_evar", "fresh_svar",
    "bevar_subst", "bsvar_subst", "evar_open", "svar_open",
    "evar_close", "svar_close", "fevar_subst", "fsvar_subst",
    "expand", "head_unfold", "pattern_size",
    "not_", "or_", "and_", "iff_", "top", "forall", "nu",
    "BASE_NOTATIONS", "definedness_notations",
    "is_evar_name", "is_svar_name", "RESERVED_WORDS",
]

MAX_INDEX = 2**63 - 1

# weak intern table: (class, *ctor args) -> node
import weakref

_INTERN: "weakref.WeakValueDictionary[tuple, Pattern]" = weakref.WeakValueDictionary()


class SubstitutionError(ValueError):
    """A substitution precondition was violated (e.g. non-closed payload)."""


class Pattern:
    """Base class of all pattern nodes.

    Nodes are immutable and compared structurally; hashes are computed once
    at construction.  Notation nodes compare by notation name and arguments,
    so equal abbreviations are equal patterns without expanding them.

    Construction interns nodes in a weak table, so structurally equal trees
    built through the constructors are usually the same object and equality
    short-circuits on identity; structural comparison stays the definition.
    """

    __slots__ = ("_hash", "__weakref__")

    def __new__(cls, *args):
        key = (cls,) + args
        got = _INTERN.get(key)
        if got is not None:
            return got
        obj = object.__new__(cls)
        _INTERN[key] = obj
        return obj

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if other.__class__ is not self.__class__:
            return NotImplemented if not isinstance(other, Pattern) else False
        if self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({', '.join(map(repr, self._key()))})"


class FreeEVar(Pattern):
    """A named free element variable."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((0x1, name))

    def _key(self):
        return (self.name,)


class FreeSVar(Pattern):
    """A named free set variable."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((0x2, name))

    def _key(self):
        return (self.name,)


class BoundEVar(Pattern):
    """A de Bruijn index referring to an enclosing ``exists``."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        if index < 0 or index > MAX_INDEX:
            raise ValueError(f"de Bruijn index out of range: {index}")
        self.index = index
        self._hash = hash((0x3, index))

    def _key(self):
        return (self.index,)


class BoundSVar(Pattern):
    """A de Bruijn index referring to an enclosing ``mu``."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        if index < 0 or index > MAX_INDEX:
            raise ValueError(f"de Bruijn index out of range: {index}")
        self.index = index
        self._hash = hash((0x4, index))

    def _key(self):
        return (self.index,)


class Sym(Pattern):
    """A constant symbol from the signature."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((0x5, name))

    def _key(self):
        return (self.name,)


class App(Pattern):
    """Binary application of one pattern to another."""

    __slots__ = ("left", "right")

    def __init__(self, left: Pattern, right: Pattern):
        self.left = left
        self.right = right
        self._hash = hash((0x6, left._hash, right._hash))

    def _key(self):
        return (self.left, self.right)


class Bot(Pattern):
    """The empty pattern (matches nothing)."""

    __slots__ = ()

    def __init__(self):
        self._hash = hash((0x7,))

    def _key(self):
        return ()


class Imp(Pattern):
    """Implication, the only primitive propositional connective besides Bot."""

    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs: Pattern, rhs: Pattern):
        self.lhs = lhs
        self.rhs = rhs
        self._hash = hash((0x8, lhs._hash, rhs._hash))

    def _key(self):
        return (self.lhs, self.rhs)


class Exists(Pattern):
    """Existential quantifier; its body refers to it as ``BoundEVar(0)``."""

    __slots__ = ("body",)

    def __init__(self, body: Pattern):
        self.body = body
        self._hash = hash((0x9, body._hash))

    def _key(self):
        return (self.body,)


class Mu(Pattern):
    """Least fixpoint binder; its body refers to it as ``BoundSVar(0)``."""

    __slots__ = ("body",)

    def __init__(self, body: Pattern):
        self.body = body
        self._hash = hash((0xA, body._hash))

    def _key(self):
        return (self.body,)


class NotationDef:
    """A named abbreviation.

    ``expander`` maps argument patterns to a one-level expansion, which may
    itself contain other notation nodes.  ``arg_binders`` records, per
    argument, whether the expansion places the argument under an element
    binder (``"ex"``), a set binder (``"mu"``) or no binder (``""``); bound
    substitutions shift their target index accordingly when they distribute
    through the node.

    Definitions compare by identity.  Notation names must be unique within
    any environment that mixes them.
    """

    __slots__ = ("name", "arity", "expander", "arg_binders")

    def __init__(self, name: str, arity: int,
                 expander: Callable[..., Pattern],
                 arg_binders: tuple[str, ...]):
        if len(arg_binders) != arity:
            raise ValueError("arg_binders must match arity")
        self.name = name
        self.arity = arity
        self.expander = expander
        self.arg_binders = arg_binders

    def __repr__(self):
        return f"NotationDef({self.name!r}, arity={self.arity})"


class Notation(Pattern):
    """An occurrence of a derived notation, kept foldable for printing."""

    __slots__ = ("defn", "args")

    def __init__(self, defn: NotationDef, args: tuple[Pattern, ...] = ()):
        if len(args) != defn.arity:
            raise ValueError(f"notation {defn.name} expects {defn.arity} arguments")
        self.defn = defn
        self.args = tuple(args)
        self._hash = hash((0xB, defn.name) + tuple(a._hash for a in self.args))

    def _key(self):
        return (self.defn.name, self.args)

    def __repr__(self):
        inner = ", ".join(map(repr, self.args))
        return f"Notation({self.defn.name}{', ' if inner else ''}{inner})"


class Hole(Pattern):
    """Placeholder for single-hole contexts used by congruence rewriting."""

    __slots__ = ()

    def __init__(self):
        self._hash = hash((0xC,))

    def _key(self):
        return ()


class Param(Pattern):
    """Template placeholder inside file-declared notation bodies (internal)."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._hash = hash((0xD, index))

    def _key(self):
        return (self.index,)


BOT = Bot()
HOLE = Hole()

_LEAVES = (FreeEVar, FreeSVar, BoundEVar, BoundSVar, Sym, Bot, Hole, Param)


# ---------------------------------------------------------------------------
# Structural operations


def pattern_size(phi: Pattern) -> int:
    t = type(phi)
    if t in _LEAVES:
        return 1
    if t is App:
        return 1 + pattern_size(phi.left) + pattern_size(phi.right)
    if t is Imp:
        return 1 + pattern_size(phi.lhs) + pattern_size(phi.rhs)
    if t in (Exists, Mu):
        return 1 + pattern_size(phi.body)
    if t is Notation:
        return 1 + sum(pattern_size(a) for a in phi.args)
    raise TypeError(f"not a pattern: {phi!r}")


@lru_cache(maxsize=65536)
def free_evars(phi: Pattern) -> frozenset[str]:
    t = type(phi)
    if t is FreeEVar:
        return frozenset((phi.name,))
    if t in _LEAVES:
        return frozenset()
    if t is App:
        return free_evars(phi.left) | free_evars(phi.right)
    if t is Imp:
        return free_evars(phi.lhs) | free_evars(phi.rhs)
    if t in (Exists, Mu):
        return free_evars(phi.body)
    out: frozenset[str] = frozenset()
    for a in phi.args:
        out |= free_evars(a)
    return out


@lru_cache(maxsize=65536)
def free_svars(phi: Pattern) -> frozenset[str]:
    t = type(phi)
    if t is FreeSVar:
        return frozenset((phi.name,))
    if t in _LEAVES:
        return frozenset()
    if t is App:
        return free_svars(phi.left) | free_svars(phi.right)
    if t is Imp:
        return free_svars(phi.lhs) | free_svars(phi.rhs)
    if t in (Exists, Mu):
        return free_svars(phi.body)
    out: frozenset[str] = frozenset()
    for a in phi.args:
        out |= free_svars(a)
    return out


def fresh_evar(phi: Pattern) -> str:
    """Deterministically pick an element variable name not free in ``phi``."""
    used = free_evars(phi)
    i = 0
    while f"x{i}" in used:
        i += 1
    return f"x{i}"


def fresh_svar(phi: Pattern) -> str:
    """Deterministically pick a set variable name not free in ``phi``."""
    used = free_svars(phi)
    i = 0
    while f"X{i}" in used:
        i += 1
    return f"X{i}"


def _shift(binder_kind: str, want: str) -> int:
    return 1 if binder_kind == want else 0


def bevar_subst(phi: Pattern, psi: Pattern, k: int) -> Pattern:
    """Substitute ``psi`` for the dangling element index ``k``.

    Dangling indices above the target are decremented, the target shifts by
    one under each element binder, and ``psi`` is inserted as-is.  Callers
    are expected to pass a locally closed ``psi``; the operation itself does
    not reject open payloads.
    """
    t = type(phi)
    if t is BoundEVar:
        if phi.index == k:
            return psi
        if phi.index > k:
            return BoundEVar(phi.index - 1)
        return phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(bevar_subst(phi.left, psi, k), bevar_subst(phi.right, psi, k))
    if t is Imp:
        return Imp(bevar_subst(phi.lhs, psi, k), bevar_subst(phi.rhs, psi, k))
    if t is Exists:
        return Exists(bevar_subst(phi.body, psi, k + 1))
    if t is Mu:
        return Mu(bevar_subst(phi.body, psi, k))
    args = tuple(
        bevar_subst(a, psi, k + _shift(b, "ex"))
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )
    return Notation(phi.defn, args)


def bsvar_subst(phi: Pattern, psi: Pattern, k: int) -> Pattern:
    """Set-variable twin of :func:`bevar_subst`; targets shift under ``mu``."""
    t = type(phi)
    if t is BoundSVar:
        if phi.index == k:
            return psi
        if phi.index > k:
            return BoundSVar(phi.index - 1)
        return phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(bsvar_subst(phi.left, psi, k), bsvar_subst(phi.right, psi, k))
    if t is Imp:
        return Imp(bsvar_subst(phi.lhs, psi, k), bsvar_subst(phi.rhs, psi, k))
    if t is Exists:
        return Exists(bsvar_subst(phi.body, psi, k))
    if t is Mu:
        return Mu(bsvar_subst(phi.body, psi, k + 1))
    args = tuple(
        bsvar_subst(a, psi, k + _shift(b, "mu"))
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )
    return Notation(phi.defn, args)


def evar_open(k: int, x: str, phi: Pattern) -> Pattern:
    """Open an element binder body: replace dangling index ``k`` by ``x``."""
    return bevar_subst(phi, FreeEVar(x), k)


def svar_open(k: int, X: str, phi: Pattern) -> Pattern:
    """Open a set binder body: replace dangling index ``k`` by ``X``."""
    return bsvar_subst(phi, FreeSVar(X), k)


def evar_close(k: int, x: str, phi: Pattern) -> Pattern:
    """Inverse of opening: abstract the free variable ``x`` as index ``k``.

    Dangling indices at or above ``k`` are incremented to make room, so
    ``evar_open(k, x, evar_close(k, x, phi)) == phi``.
    """
    t = type(phi)
    if t is FreeEVar:
        return BoundEVar(k) if phi.name == x else phi
    if t is BoundEVar:
        return BoundEVar(phi.index + 1) if phi.index >= k else phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(evar_close(k, x, phi.left), evar_close(k, x, phi.right))
    if t is Imp:
        return Imp(evar_close(k, x, phi.lhs), evar_close(k, x, phi.rhs))
    if t is Exists:
        return Exists(evar_close(k + 1, x, phi.body))
    if t is Mu:
        return Mu(evar_close(k, x, phi.body))
    args = tuple(
        evar_close(k + _shift(b, "ex"), x, a)
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )
    return Notation(phi.defn, args)


def svar_close(k: int, X: str, phi: Pattern) -> Pattern:
    t = type(phi)
    if t is FreeSVar:
        return BoundSVar(k) if phi.name == X else phi
    if t is BoundSVar:
        return BoundSVar(phi.index + 1) if phi.index >= k else phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(svar_close(k, X, phi.left), svar_close(k, X, phi.right))
    if t is Imp:
        return Imp(svar_close(k, X, phi.lhs), svar_close(k, X, phi.rhs))
    if t is Exists:
        return Exists(svar_close(k, X, phi.body))
    if t is Mu:
        return Mu(svar_close(k + 1, X, phi.body))
    args = tuple(
        svar_close(k + _shift(b, "mu"), X, a)
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )
    return Notation(phi.defn, args)


def _require_closed(psi: Pattern, op: str) -> None:
    if not (wf_closed_ex(psi, 0) and wf_closed_mu(psi, 0)):
        raise SubstitutionError(
            f"{op} requires a closed replacement pattern (no dangling indices)"
        )


def fevar_subst(phi: Pattern, psi: Pattern, x: str) -> Pattern:
    """Replace the free element variable ``x`` by the closed pattern ``psi``."""
    _require_closed(psi, "fevar_subst")
    return _fevar_subst(phi, psi, x)


def _fevar_subst(phi, psi, x):
    t = type(phi)
    if t is FreeEVar:
        return psi if phi.name == x else phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(_fevar_subst(phi.left, psi, x), _fevar_subst(phi.right, psi, x))
    if t is Imp:
        return Imp(_fevar_subst(phi.lhs, psi, x), _fevar_subst(phi.rhs, psi, x))
    if t is Exists:
        return Exists(_fevar_subst(phi.body, psi, x))
    if t is Mu:
        return Mu(_fevar_subst(phi.body, psi, x))
    return Notation(phi.defn, tuple(_fevar_subst(a, psi, x) for a in phi.args))


def fsvar_subst(phi: Pattern, psi: Pattern, X: str) -> Pattern:
    """Replace the free set variable ``X`` by the closed pattern ``psi``."""
    _require_closed(psi, "fsvar_subst")
    return _fsvar_subst(phi, psi, X)


def _fsvar_subst(phi, psi, X):
    t = type(phi)
    if t is FreeSVar:
        return psi if phi.name == X else phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(_fsvar_subst(phi.left, psi, X), _fsvar_subst(phi.right, psi, X))
    if t is Imp:
        return Imp(_fsvar_subst(phi.lhs, psi, X), _fsvar_subst(phi.rhs, psi, X))
    if t is Exists:
        return Exists(_fsvar_subst(phi.body, psi, X))
    if t is Mu:
        return Mu(_fsvar_subst(phi.body, psi, X))
    return Notation(phi.defn, tuple(_fsvar_subst(a, psi, X) for a in phi.args))


def _negate_bound_svar(phi: Pattern, k: int) -> Pattern:
    """Wrap every occurrence of the dangling set index ``k`` in a negation.

    Indices are kept as-is (no shifting, nothing foreign inserted), so the
    operation is capture-free.  Used by the greatest-fixpoint notation.
    """
    t = type(phi)
    if t is BoundSVar:
        return Imp(phi, BOT) if phi.index == k else phi
    if t in _LEAVES:
        return phi
    if t is App:
        return App(_negate_bound_svar(phi.left, k), _negate_bound_svar(phi.right, k))
    if t is Imp:
        return Imp(_negate_bound_svar(phi.lhs, k), _negate_bound_svar(phi.rhs, k))
    if t is Exists:
        return Exists(_negate_bound_svar(phi.body, k))
    if t is Mu:
        return Mu(_negate_bound_svar(phi.body, k + 1))
    args = tuple(
        _negate_bound_svar(a, k + _shift(b, "mu"))
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )
    return Notation(phi.defn, args)


# ---------------------------------------------------------------------------
# Expansion


@lru_cache(maxsize=65536)
def expand(phi: Pattern) -> Pattern:
    """Erase every notation node, yielding a core-constructor pattern."""
    t = type(phi)
    if t is Notation:
        return expand(phi.defn.expander(*phi.args))
    if t in _LEAVES:
        return phi
    if t is App:
        left, right = expand(phi.left), expand(phi.right)
        return phi if left is phi.left and right is phi.right else App(left, right)
    if t is Imp:
        lhs, rhs = expand(phi.lhs), expand(phi.rhs)
        return phi if lhs is phi.lhs and rhs is phi.rhs else Imp(lhs, rhs)
    if t is Exists:
        body = expand(phi.body)
        return phi if body is phi.body else Exists(body)
    if t is Mu:
        body = expand(phi.body)
        return phi if body is phi.body else Mu(body)
    raise TypeError(f"not a pattern: {phi!r}")


def head_unfold(phi: Pattern) -> Pattern:
    """Unfold notation heads until a core constructor is on top.

    Arguments stay folded, so the result reads well when printed.
    """
    while type(phi) is Notation:
        phi = phi.defn.expander(*phi.args)
    return phi


# ---------------------------------------------------------------------------
# Well-formedness


@lru_cache(maxsize=None)
def wf_closed_ex(phi: Pattern, bound: int) -> bool:
    """True when every dangling element index is below ``bound``."""
    t = type(phi)
    if t is BoundEVar:
        return phi.index < bound
    if t in _LEAVES:
        return True
    if t is App:
        return wf_closed_ex(phi.left, bound) and wf_closed_ex(phi.right, bound)
    if t is Imp:
        return wf_closed_ex(phi.lhs, bound) and wf_closed_ex(phi.rhs, bound)
    if t is Exists:
        return wf_closed_ex(phi.body, bound + 1)
    if t is Mu:
        return wf_closed_ex(phi.body, bound)
    return all(
        wf_closed_ex(a, bound + _shift(b, "ex"))
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )


@lru_cache(maxsize=None)
def wf_closed_mu(phi: Pattern, bound: int) -> bool:
    """True when every dangling set index is below ``bound``."""
    t = type(phi)
    if t is BoundSVar:
        return phi.index < bound
    if t in _LEAVES:
        return True
    if t is App:
        return wf_closed_mu(phi.left, bound) and wf_closed_mu(phi.right, bound)
    if t is Imp:
        return wf_closed_mu(phi.lhs, bound) and wf_closed_mu(phi.rhs, bound)
    if t is Exists:
        return wf_closed_mu(phi.body, bound)
    if t is Mu:
        return wf_closed_mu(phi.body, bound + 1)
    return all(
        wf_closed_mu(a, bound + _shift(b, "mu"))
        for a, b in zip(phi.args, phi.defn.arg_binders)
    )


@lru_cache(maxsize=None)
def _positive(phi: Pattern, parities: tuple[int, ...]) -> bool:
    # parities[j] is the number of implication left-branches crossed since
    # the j-th enclosing mu opened, reduced mod 2 (innermost last); an index
    # occurrence is fine when its binder's entry is even.  Keying on the
    # reduced parities lets shared subtrees hit the cache.
    t = type(phi)
    if t is BoundSVar:
        if phi.index < len(parities):
            return parities[-1 - phi.index] == 0
        return True
    if t in _LEAVES:
        return True
    if t is App:
        return _positive(phi.left, parities) and _positive(phi.right, parities)
    if t is Imp:
        flipped = tuple((p + 1) % 2 for p in parities)
        return _positive(phi.lhs, flipped) and _positive(phi.rhs, parities)
    if t is Exists:
        return _positive(phi.body, parities)
    if t is Mu:
        return _positive(phi.body, parities + (0,))
    raise TypeError(f"not a core pattern: {phi!r}")


@lru_cache(maxsize=None)
def wf_positive(phi: Pattern) -> bool:
    """True when no mu-bound index sits under an odd number of negations."""
    return _positive(expand(phi), ())


@lru_cache(maxsize=None)
def well_formed(phi: Pattern) -> bool:
    return wf_positive(phi) and wf_closed_ex(phi, 0) and wf_closed_mu(phi, 0)


# ---------------------------------------------------------------------------
# Names and signatures

RESERVED_WORDS = frozenset({
    "exists", "mu", "forall", "nu", "and", "or", "in", "notin",
    "subseteq", "notsubseteq", "Bot", "Top", "theory", "model",
    "import", "symbol", "notation", "axiom", "elements", "app",
})

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")
_BEVAR_RE = re.compile(r"b[0-9]+\Z")
_BSVAR_RE = re.compile(r"S[0-9]+\Z")


def _is_plain_name(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name not in RESERVED_WORDS \
        and not _BEVAR_RE.match(name) and not _BSVAR_RE.match(name)


def is_evar_name(name: str) -> bool:
    """Element variable names start with a lowercase letter or underscore."""
    return _is_plain_name(name) and (name[0].islower() or name[0] == "_")


def is_svar_name(name: str) -> bool:
    """Set variable names start with an uppercase letter."""
    return _is_plain_name(name) and name[0].isupper()


@dataclass(frozen=True)
class Signature:
    """A finite, ordered list of declared constant symbols.

    The element and set variable universes are the (countably infinite)
    name spaces described by :func:`is_evar_name` and :func:`is_svar_name`.
    """

    symbols: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for s in self.symbols:
            if not _is_plain_name(s):
                raise ValueError(f"invalid symbol name: {s!r}")
            if s in seen:
                raise ValueError(f"duplicate symbol: {s!r}")
            seen.add(s)

    def is_symbol(self, name: str) -> bool:
        return name in self.symbols

    def merged(self, other: "Signature") -> "Signature":
        extra = tuple(s for s in other.symbols if s not in self.symbols)
        return Signature(self.symbols + extra)


# ---------------------------------------------------------------------------
# Shipped notations


def _mk(defn, *args):
    return Notation(defn, tuple(args))


NOT_DEF = NotationDef("not", 1, lambda p: Imp(p, BOT), ("",))


def not_(p: Pattern) -> Pattern:
    return _mk(NOT_DEF, p)


OR_DEF = NotationDef("or", 2, lambda p, q: Imp(not_(p), q), ("", ""))


def or_(p: Pattern, q: Pattern) -> Pattern:
    return _mk(OR_DEF, p, q)


AND_DEF = NotationDef("and", 2, lambda p, q: not_(or_(not_(p), not_(q))), ("", ""))


def and_(p: Pattern, q: Pattern) -> Pattern:
    return _mk(AND_DEF, p, q)


IFF_DEF = NotationDef("iff", 2, lambda p, q: and_(Imp(p, q), Imp(q, p)), ("", ""))


def iff_(p: Pattern, q: Pattern) -> Pattern:
    return _mk(IFF_DEF, p, q)


TOP_DEF = NotationDef("Top", 0, lambda: not_(BOT), ())


def top() -> Pattern:
    return _mk(TOP_DEF)


FORALL_DEF = NotationDef("forall", 1, lambda b: not_(Exists(not_(b))), ("ex",))


def forall(body: Pattern) -> Pattern:
    return _mk(FORALL_DEF, body)


NU_DEF = NotationDef(
    "nu", 1,
    lambda b: not_(Mu(not_(_negate_bound_svar(b, 0)))),
    ("mu",),
)


def nu(body: Pattern) -> Pattern:
    return _mk(NU_DEF, body)


BASE_NOTATIONS: dict[str, NotationDef] = {
    d.name: d for d in (NOT_DEF, OR_DEF, AND_DEF, IFF_DEF, TOP_DEF, FORALL_DEF, NU_DEF)
}


def definedness_notations(def_symbol: str = "def") -> dict[str, NotationDef]:
    """The definedness family (ceil, floor, equality, membership, subset)."""
    sym = Sym(def_symbol)

    d_defined = NotationDef("defined", 1, lambda p: App(sym, p), ("",))

    def defined(p):
        return _mk(d_defined, p)

    d_total = NotationDef("total", 1, lambda p: not_(defined(not_(p))), ("",))

    def total(p):
        return _mk(d_total, p)

    d_eq = NotationDef("eq", 2, lambda p, q: total(iff_(p, q)), ("", ""))
    d_neq = NotationDef("neq", 2, lambda p, q: not_(_mk(d_eq, p, q)), ("", ""))
    d_member = NotationDef("member", 2, lambda x, p: defined(and_(x, p)), ("", ""))
    d_subseteq = NotationDef("subseteq", 2, lambda p, q: total(Imp(p, q)), ("", ""))
    d_not_member = NotationDef(
        "not_member", 2, lambda x, p: not_(_mk(d_member, x, p)), ("", "")
    )
    d_not_subseteq = NotationDef(
        "not_subseteq", 2, lambda p, q: not_(_mk(d_subseteq, p, q)), ("", "")
    )

    return {
        d.name: d
        for d in (d_defined, d_total, d_eq, d_neq, d_member,
                  d_subseteq, d_not_member, d_not_subseteq)
    }

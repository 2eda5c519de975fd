"""Finite models, valuations, pattern evaluation and entailment.

A pattern denotes the subset of a model's carrier that matches it.
Implication is set complement of a difference, application lifts the
model's binary application function pointwise, ``exists`` unions the body's
denotations over all carrier elements, and ``mu`` takes a least fixpoint.
Binder bodies are opened with fresh named variables, so the recursion is on
pattern size rather than structure.

``eval_pattern`` is the direct, set-based reference.  Validity checks
(``holds``/``entails_over``) enumerate valuations of the free variables and
funnel the hot evaluation loop through :mod:`matchlog.engine`, which picks
the compiled core when available.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Iterable

from . import syntax
from .syntax import (
    App, Bot, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Notation, Pattern, Sym, expand, free_evars, free_svars, fresh_evar,
    fresh_svar, svar_open, evar_open, well_formed, wf_positive,
)

__all__ = [
    "Model", "Valuation", "EvalError", "DanglingIndexError",
    "NonPositiveMuError", "BudgetExceededError", "FixpointError",
    "eval_pattern", "lfp", "lfp_by_prefixpoints", "holds", "holds_detail",
    "entails_over", "HoldsWitness", "EntailmentResult",
    "is_functional", "is_predicate", "default_budget",
]


class EvalError(Exception):
    """Base class for evaluation failures."""


class DanglingIndexError(EvalError):
    """A de Bruijn index with no matching binder was reached."""


class NonPositiveMuError(EvalError):
    """A mu body with negative occurrences of its variable was evaluated."""


class BudgetExceededError(EvalError):
    """A valuation enumeration would exceed the configured budget."""


class FixpointError(EvalError):
    """Kleene iteration failed to stabilize; the transformer is not monotone."""


@dataclass(frozen=True, eq=False)
class Model:
    """A finite model: carrier, application table and symbol interpretations.

    The application table is total; pairs missing from ``app`` map to the
    empty set.  Symbols must be interpreted explicitly.
    """

    carrier: tuple[str, ...]
    app: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    syminterp: dict[str, frozenset[str]] = field(default_factory=dict)
    name: str = "M"

    def __post_init__(self):
        if not self.carrier:
            raise ValueError("model carrier must be nonempty")
        if len(set(self.carrier)) != len(self.carrier):
            raise ValueError("duplicate carrier elements")
        cs = set(self.carrier)
        for (a, b), out in self.app.items():
            if a not in cs or b not in cs or not out <= cs:
                raise ValueError(f"app entry ({a},{b}) references unknown elements")
        for s, out in self.syminterp.items():
            if not out <= cs:
                raise ValueError(f"interpretation of {s} leaves the carrier")

    @cached_property
    def full(self) -> frozenset[str]:
        return frozenset(self.carrier)

    def app_of(self, a: str, b: str) -> frozenset[str]:
        return self.app.get((a, b), frozenset())

    def interp(self, symbol: str) -> frozenset[str]:
        try:
            return self.syminterp[symbol]
        except KeyError:
            raise EvalError(f"model {self.name} does not interpret symbol {symbol!r}")


@dataclass(frozen=True)
class Valuation:
    """Maps element variables to elements and set variables to subsets.

    Unmapped element variables default to the first carrier element and
    unmapped set variables to the empty set; evaluation only ever depends on
    the assignments of a pattern's free variables.
    """

    evars: dict[str, str] = field(default_factory=dict)
    svars: dict[str, frozenset[str]] = field(default_factory=dict)

    def evar(self, model: Model, x: str) -> str:
        return self.evars.get(x, model.carrier[0])

    def svar(self, X: str) -> frozenset[str]:
        return self.svars.get(X, frozenset())

    def with_evar(self, x: str, a: str) -> "Valuation":
        ev = dict(self.evars)
        ev[x] = a
        return Valuation(ev, self.svars)

    def with_svar(self, X: str, A: frozenset[str]) -> "Valuation":
        sv = dict(self.svars)
        sv[X] = A
        return Valuation(self.evars, sv)

    def check_against(self, model: Model) -> None:
        cs = set(model.carrier)
        for x, a in self.evars.items():
            if a not in cs:
                raise ValueError(f"valuation maps {x} outside the carrier")
        for X, A in self.svars.items():
            if not A <= cs:
                raise ValueError(f"valuation maps {X} outside the carrier")


def default_budget() -> int:
    env = os.environ.get("ML_BUDGET")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 10**6


def lfp(transformer: Callable[[frozenset[str]], frozenset[str]],
        model: Model) -> frozenset[str]:
    """Least fixpoint of a monotone transformer by Kleene iteration.

    Starting from the empty set, a monotone map on a carrier of size n
    stabilizes within n steps; failing to do so means the transformer was
    not monotone, which is reported rather than looped on.
    """
    cur: frozenset[str] = frozenset()
    for _ in range(len(model.carrier) + 2):
        nxt = transformer(cur)
        if nxt == cur:
            return cur
        cur = nxt
    raise FixpointError(
        "fixpoint iteration did not stabilize; transformer is not monotone")


def lfp_by_prefixpoints(transformer: Callable[[frozenset[str]], frozenset[str]],
                        model: Model) -> frozenset[str]:
    """Least fixpoint as the intersection of all prefixpoints.

    Enumerates every subset of the carrier, so it is only usable on small
    models; this is the semantics non-positive mu bodies get behind the
    opt-in flag.
    """
    n = len(model.carrier)
    if n > 16:
        raise EvalError("prefixpoint enumeration needs |carrier| <= 16")
    out = model.full
    for bits in range(1 << n):
        s = frozenset(e for i, e in enumerate(model.carrier) if bits >> i & 1)
        if transformer(s) <= s:
            out &= s
    return out


def eval_pattern(model: Model, valuation: Valuation | None, phi: Pattern,
                 *, nonpositive_mu: str = "error") -> frozenset[str]:
    """Denotation of ``phi`` in ``model`` under ``valuation``.

    Positivity of mu bodies is required by default; with
    ``nonpositive_mu="enumerate"`` such fixpoints are resolved by
    prefixpoint intersection on carriers of at most five elements.
    Dangling de Bruijn indices are an error.
    """
    rho = valuation or Valuation()
    rho.check_against(model)
    if nonpositive_mu not in ("error", "enumerate"):
        raise ValueError("nonpositive_mu must be 'error' or 'enumerate'")
    return _eval(model, rho, expand(phi), nonpositive_mu)


def _eval(model: Model, rho: Valuation, phi: Pattern,
          np_mu: str) -> frozenset[str]:
    t = type(phi)
    if t is FreeEVar:
        return frozenset((rho.evar(model, phi.name),))
    if t is FreeSVar:
        return rho.svar(phi.name)
    if t is BoundEVar or t is BoundSVar:
        raise DanglingIndexError(f"dangling index {phi!r} reached during evaluation")
    if t is Sym:
        return model.interp(phi.name)
    if t is Bot:
        return frozenset()
    if t is Imp:
        a = _eval(model, rho, phi.lhs, np_mu)
        b = _eval(model, rho, phi.rhs, np_mu)
        return model.full - (a - b)
    if t is App:
        a = _eval(model, rho, phi.left, np_mu)
        b = _eval(model, rho, phi.right, np_mu)
        out: frozenset[str] = frozenset()
        for e1 in a:
            for e2 in b:
                out |= model.app_of(e1, e2)
        return out
    if t is Exists:
        x = fresh_evar(phi.body)
        opened = evar_open(0, x, phi.body)
        out = frozenset()
        for a in model.carrier:
            out |= _eval(model, rho.with_evar(x, a), opened, np_mu)
        return out
    if t is Mu:
        X = fresh_svar(phi.body)
        opened = svar_open(0, X, phi.body)

        def transformer(s: frozenset[str]) -> frozenset[str]:
            return _eval(model, rho.with_svar(X, s), opened, np_mu)

        if not wf_positive(phi):
            if np_mu == "error":
                raise NonPositiveMuError(
                    "mu body has negative occurrences of its bound variable")
            if len(model.carrier) > 5:
                raise EvalError(
                    "prefixpoint semantics for non-positive mu needs |carrier| <= 5")
            return lfp_by_prefixpoints(transformer, model)
        return lfp(transformer, model)
    raise TypeError(f"cannot evaluate {phi!r}")


# ---------------------------------------------------------------------------
# Validity over all valuations


@dataclass(frozen=True)
class HoldsWitness:
    """A valuation under which a pattern fails to denote the full carrier."""

    valuation: Valuation
    denotation: frozenset[str]


def _axiom_patterns(target) -> list[Pattern]:
    if isinstance(target, Pattern):
        return [target]
    axioms = getattr(target, "axioms", None)
    if axioms is not None:
        return list(axioms.values())
    return list(target)


def enumeration_count(model: Model, phi: Pattern) -> int:
    n = len(model.carrier)
    k = len(free_evars(phi))
    j = len(free_svars(phi))
    return (n ** k) * (2 ** (n * j))


def holds_detail(model: Model, phi: Pattern,
                 budget: int | None = None) -> HoldsWitness | None:
    """None when ``phi`` denotes the full carrier under every valuation,
    otherwise a witnessing valuation."""
    if not well_formed(phi):
        raise ValueError("holds requires a well-formed pattern")
    limit = budget if budget is not None else default_budget()
    count = enumeration_count(model, phi)
    if count > limit:
        raise BudgetExceededError(
            f"{count} valuations exceed the budget of {limit}")

    from . import engine  # deferred: engine imports this module's types

    compiled = engine.compile_query(model, phi)
    if compiled is not None:
        return compiled.find_countermodel()

    fev = sorted(free_evars(phi))
    fsv = sorted(free_svars(phi))
    subsets = [frozenset(s) for r in range(len(model.carrier) + 1)
               for s in _subsets(model.carrier, r)]
    for evals in product(model.carrier, repeat=len(fev)):
        for svals in product(subsets, repeat=len(fsv)):
            rho = Valuation(dict(zip(fev, evals)), dict(zip(fsv, svals)))
            den = eval_pattern(model, rho, phi)
            if den != model.full:
                return HoldsWitness(rho, den)
    return None


def _subsets(items: tuple[str, ...], r: int):
    from itertools import combinations

    for combo in combinations(items, r):
        yield combo


def holds(model: Model, target, budget: int | None = None) -> bool:
    """Model satisfaction: every axiom denotes the full carrier under
    every valuation of its free variables."""
    for phi in _axiom_patterns(target):
        if holds_detail(model, phi, budget) is not None:
            return False
    return True


@dataclass(frozen=True)
class EntailmentResult:
    ok: bool
    countermodel: str | None = None
    witness: HoldsWitness | None = None

    def report(self) -> dict:
        if self.ok:
            return {"entails": True}
        w = self.witness
        return {
            "entails": False,
            "model": self.countermodel,
            "valuation": {
                "evars": dict(sorted(w.valuation.evars.items())),
                "svars": {k: sorted(v) for k, v in sorted(w.valuation.svars.items())},
            } if w else None,
            "denotation": sorted(w.denotation) if w else None,
        }


def entails_over(models: Iterable[Model], theory, phi: Pattern,
                 budget: int | None = None) -> EntailmentResult:
    """Suite-relative entailment: among the given models, every one
    satisfying the theory must satisfy ``phi``.

    An empty suite is vacuously entailed; this never claims anything about
    models outside the suite.
    """
    for model in models:
        if not holds(model, theory, budget):
            continue
        witness = holds_detail(model, phi, budget)
        if witness is not None:
            return EntailmentResult(False, model.name, witness)
    return EntailmentResult(True)


def is_functional(model: Model, valuation: Valuation | None, phi: Pattern) -> bool:
    """A pattern is functional at (model, valuation) when it denotes a singleton."""
    return len(eval_pattern(model, valuation, phi)) == 1


def is_predicate(model: Model, valuation: Valuation | None, phi: Pattern) -> bool:
    """A pattern is a predicate at (model, valuation) when it denotes
    nothing or everything."""
    den = eval_pattern(model, valuation, phi)
    return not den or den == model.full

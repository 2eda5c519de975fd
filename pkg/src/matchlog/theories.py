"""Shipped theories, fixture models and their verified facts.

The DEF theory (definedness symbol, totality/equality/membership/subset
notations and the definedness axiom) ships as a data file and is the
default theory almost everywhere.  Fixture models include the three-element
model whose application function treats ``f`` non-functionally, plus its
definedness extension.

The lemma checkers here evaluate both sides of the classic definedness
equivalences on a concrete model and report the verdict; they are
semantic facts about DEF models, not proof-system derivations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .parser import TheoryFile, parse_model, parse_pattern, parse_theory
from .semantics import (
    Model, Valuation, eval_pattern, holds, is_functional,
)
from .syntax import (
    App, BoundEVar, BoundSVar, Exists, FreeEVar, Mu, Notation, Pattern, Sym,
    and_, expand, or_, well_formed,
)

__all__ = [
    "data_path", "builtin_theories", "load_theory", "resolve_import",
    "def_theory", "load_model", "builtin_models",
    "satisfies_definedness", "LemmaCheck",
    "definedness_not_empty_iff", "totality_not_full_iff",
    "equal_iff_interpr_same", "counterexample_suite", "transitive_closure",
    "relation_model", "script_path",
]


def data_path(name: str) -> Path:
    return Path(str(resources.files("matchlog") / "data" / name))


@lru_cache(maxsize=None)
def _load_builtin_theory(name: str) -> TheoryFile:
    text = data_path(f"{name.lower()}.mlth").read_text(encoding="utf-8")
    return parse_theory(text, resolve_import=resolve_import)


def builtin_theories() -> dict[str, TheoryFile]:
    return {"DEF": _load_builtin_theory("def")}


def resolve_import(name: str) -> TheoryFile:
    builtin = builtin_theories()
    if name in builtin:
        return builtin[name]
    raise ValueError(f"cannot resolve imported theory {name!r}")


def def_theory() -> TheoryFile:
    return _load_builtin_theory("def")


def load_theory(spec: str, extra_dirs: tuple[str, ...] = ()) -> TheoryFile:
    """Load a theory by builtin name, by NAME.mlth in a search dir, or by path."""
    builtin = builtin_theories()
    if spec in builtin:
        return builtin[spec]
    candidates = [Path(spec)]
    for d in extra_dirs:
        candidates.append(Path(d) / f"{spec}.mlth")
        candidates.append(Path(d) / f"{spec.lower()}.mlth")
        candidates.append(Path(d) / spec)
    for c in candidates:
        if c.is_file():
            return parse_theory(c.read_text(encoding="utf-8"),
                                resolve_import=resolve_import)
    raise FileNotFoundError(f"no theory named {spec!r}")


def builtin_models() -> dict[str, Model]:
    return {
        "three": load_model(str(data_path("three.mlmodel"))),
        "def_three": load_model(str(data_path("def_three.mlmodel"))),
    }


@lru_cache(maxsize=None)
def _load_model_cached(path: str) -> Model:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def load_model(spec: str) -> Model:
    p = Path(spec)
    if p.is_file():
        return _load_model_cached(str(p))
    fixture = data_path(f"{spec}.mlmodel")
    if fixture.is_file():
        return _load_model_cached(str(fixture))
    raise FileNotFoundError(f"no model named {spec!r}")


def script_path(name: str) -> Path:
    return data_path(f"{name}.mlp")


# ---------------------------------------------------------------------------
# Semantic facts about definedness models


def satisfies_definedness(model: Model, theory: TheoryFile | None = None) -> bool:
    from .semantics import EvalError

    theory = theory or def_theory()
    try:
        return holds(model, theory)
    except EvalError:
        # models that do not even interpret the symbol cannot satisfy it
        return False


def _require_def_model(model: Model, theory: TheoryFile):
    if not satisfies_definedness(model, theory):
        raise ValueError(f"model {model.name} does not satisfy the definedness axiom")


def _notation(theory: TheoryFile, name: str):
    d = theory.notation_env().get(name)
    if d is None:
        raise ValueError(f"theory {theory.name} lacks notation {name!r}")
    return lambda *args: Notation(d, tuple(args))


@dataclass(frozen=True)
class LemmaCheck:
    """Both sides of a checked equivalence plus the verdict."""

    lhs: bool
    rhs: bool

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


def definedness_not_empty_iff(model: Model, rho: Valuation | None, phi: Pattern,
                              theory: TheoryFile | None = None) -> LemmaCheck:
    """phi nonempty iff ceil(phi) is the full carrier, on a DEF model."""
    theory = theory or def_theory()
    _require_def_model(model, theory)
    defined = _notation(theory, "defined")
    lhs = bool(eval_pattern(model, rho, phi))
    rhs = eval_pattern(model, rho, defined(phi)) == model.full
    return LemmaCheck(lhs, rhs)


def totality_not_full_iff(model: Model, rho: Valuation | None, phi: Pattern,
                          theory: TheoryFile | None = None) -> LemmaCheck:
    """phi not full iff floor(phi) is empty, on a DEF model."""
    theory = theory or def_theory()
    _require_def_model(model, theory)
    total = _notation(theory, "total")
    lhs = eval_pattern(model, rho, phi) != model.full
    rhs = not eval_pattern(model, rho, total(phi))
    return LemmaCheck(lhs, rhs)


def equal_iff_interpr_same(model: Model, rho: Valuation | None,
                           phi1: Pattern, phi2: Pattern,
                           theory: TheoryFile | None = None) -> LemmaCheck:
    """The equality pattern is full iff the two sides denote the same set."""
    theory = theory or def_theory()
    _require_def_model(model, theory)
    eq = _notation(theory, "eq")
    lhs = eval_pattern(model, rho, eq(phi1, phi2)) == model.full
    rhs = eval_pattern(model, rho, phi1) == eval_pattern(model, rho, phi2)
    return LemmaCheck(lhs, rhs)


def counterexample_suite() -> dict:
    """The classic non-functional model: the pattern saying "f agrees with
    some element" holds everywhere although f is not a function."""
    model = builtin_models()["three"]
    from .syntax import Signature

    sig = Signature(("one", "two", "f"))
    pat = parse_pattern("exists . f $ x <---> b0", sig)
    f_one = parse_pattern("f $ one", sig)
    f_two = parse_pattern("f $ two", sig)
    e1 = eval_pattern(model, None, f_one)
    e2 = eval_pattern(model, None, f_two)
    return {
        "model": model.name,
        "pattern_holds": holds(model, pat),
        "f_one": sorted(e1),
        "f_one_functional": len(e1) == 1,
        "f_two": sorted(e2),
        "carrier": sorted(model.carrier),
    }


# ---------------------------------------------------------------------------
# Transitive closure


def transitive_closure(R: Pattern, pair_symbol: str = "pair",
                       theory: TheoryFile | None = None) -> Pattern:
    """The least-fixpoint pattern denoting the transitive closure of the
    relation ``R`` encoded through the binary ``pair_symbol``.

    Shape: mu . R or exists exists exists <b2,b0> and <b2,b1> in S0
    and <b1,b0> in S0.
    """
    if not well_formed(R):
        raise ValueError("transitive_closure needs a well-formed relation pattern")
    theory = theory or def_theory()
    member = _notation(theory, "member")
    pair = Sym(pair_symbol)

    def pr(a: Pattern, b: Pattern) -> Pattern:
        return App(App(pair, a), b)

    b0, b1, b2 = BoundEVar(0), BoundEVar(1), BoundEVar(2)
    s0 = BoundSVar(0)
    step = Exists(Exists(Exists(
        and_(pr(b2, b0),
             and_(member(pr(b2, b1), s0),
                  member(pr(b1, b0), s0))))))
    return Mu(or_(R, step))


def relation_model(n: int, relation: set[tuple[int, int]],
                   pair_symbol: str = "pair",
                   relation_symbol: str = "R") -> Model:
    """A model encoding a relation over ``n`` base elements with an
    injective pairing and a definedness element.

    Elements: base ``e_i``, curried partials ``q_i``, pair codes ``c_i_j``,
    the pairing symbol's element ``p`` and the definedness element ``d``.
    """
    base = [f"e{i}" for i in range(n)]
    partial = [f"q{i}" for i in range(n)]
    codes = {(i, j): f"c{i}_{j}" for i in range(n) for j in range(n)}
    carrier = tuple(base + partial + list(codes.values()) + ["p", "d"])
    full = frozenset(carrier)
    app: dict[tuple[str, str], frozenset[str]] = {}
    for i in range(n):
        app[("p", base[i])] = frozenset((partial[i],))
        for j in range(n):
            app[(partial[i], base[j])] = frozenset((codes[(i, j)],))
    for m in carrier:
        app[("d", m)] = full
    syminterp = {
        pair_symbol: frozenset(("p",)),
        "def": frozenset(("d",)),
        relation_symbol: frozenset(codes[ij] for ij in relation),
    }
    return Model(carrier=carrier, app=app, syminterp=syminterp,
                 name=f"relation{n}")

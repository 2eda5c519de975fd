"""Hot-path backend selection and pattern/model compilation.

Well-formed closed-enough patterns are flattened to opcode arrays and
models to bitmask tables; the actual evaluation loop runs in the compiled
``_corehot`` extension when it was built, otherwise in the pure-Python
``_corepure`` twin.  Set ``MATCHLOG_PURE=1`` to force the fallback.
``benchmarks/bench_eval.py`` compares the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import _corepure
from .syntax import (
    App, Bot, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Pattern, Sym, expand, free_evars, free_svars, well_formed,
)

try:  # pragma: no cover - presence depends on the build
    from . import _corehot
except ImportError:  # pragma: no cover
    _corehot = None

__all__ = ["backend_name", "compile_query", "CompiledQuery", "core_module"]

_MAX_DEPTH = 150


def core_module(force_pure: bool = False):
    if force_pure or os.environ.get("MATCHLOG_PURE") == "1" or _corehot is None:
        return _corepure
    return _corehot


def backend_name() -> str:
    return "pure" if core_module() is _corepure else "compiled"


def _flatten(phi: Pattern, syms: dict[str, int], fev: dict[str, int],
             fsv: dict[str, int], ops: list, pa: list, pb: list,
             depth: int) -> int | None:
    """Postorder-flatten; returns the node id or None when not compilable."""
    if depth > _MAX_DEPTH:
        return None
    t = type(phi)
    if t is FreeEVar:
        ops.append(_corepure.OP_FEVAR)
        pa.append(fev[phi.name])
        pb.append(0)
    elif t is FreeSVar:
        ops.append(_corepure.OP_FSVAR)
        pa.append(fsv[phi.name])
        pb.append(0)
    elif t is Sym:
        ops.append(_corepure.OP_SYM)
        pa.append(syms[phi.name])
        pb.append(0)
    elif t is Bot:
        ops.append(_corepure.OP_BOT)
        pa.append(0)
        pb.append(0)
    elif t is BoundEVar:
        ops.append(_corepure.OP_BEVAR)
        pa.append(phi.index)
        pb.append(0)
    elif t is BoundSVar:
        ops.append(_corepure.OP_BSVAR)
        pa.append(phi.index)
        pb.append(0)
    elif t is App or t is Imp:
        l = phi.left if t is App else phi.lhs
        r = phi.right if t is App else phi.rhs
        li = _flatten(l, syms, fev, fsv, ops, pa, pb, depth + 1)
        ri = _flatten(r, syms, fev, fsv, ops, pa, pb, depth + 1)
        if li is None or ri is None:
            return None
        ops.append(_corepure.OP_APP if t is App else _corepure.OP_IMP)
        pa.append(li)
        pb.append(ri)
    elif t is Exists or t is Mu:
        bi = _flatten(phi.body, syms, fev, fsv, ops, pa, pb, depth + 1)
        if bi is None:
            return None
        ops.append(_corepure.OP_EXISTS if t is Exists else _corepure.OP_MU)
        pa.append(bi)
        pb.append(0)
    else:
        return None
    return len(ops) - 1


@dataclass
class CompiledQuery:
    """A pattern compiled against a model, ready for assignment sweeps."""

    model: object
    core: object
    fev_names: list[str]
    fsv_names: list[str]

    def _decode_mask(self, mask: int):
        carrier = self.model.carrier
        return frozenset(e for i, e in enumerate(carrier) if mask >> i & 1)

    def eval_with(self, evars: dict[str, str], svars: dict[str, frozenset[str]]):
        carrier = list(self.model.carrier)
        fev = [carrier.index(evars.get(x, carrier[0])) for x in self.fev_names]
        fsv = []
        for X in self.fsv_names:
            mask = 0
            for e in svars.get(X, frozenset()):
                mask |= 1 << carrier.index(e)
            fsv.append(mask)
        return self._decode_mask(self.core.eval_assignment(fev, fsv))

    def find_countermodel(self):
        """A HoldsWitness for the first failing valuation, or None."""
        from .semantics import HoldsWitness, Valuation

        hit = self.core.holds_all()
        if hit is None:
            return None
        fev_idx, fsv_masks = hit
        carrier = self.model.carrier
        rho = Valuation(
            {x: carrier[i] for x, i in zip(self.fev_names, fev_idx)},
            {X: self._decode_mask(m) for X, m in zip(self.fsv_names, fsv_masks)},
        )
        den = self._decode_mask(self.core.eval_assignment(list(fev_idx), list(fsv_masks)))
        return HoldsWitness(rho, den)


def compile_query(model, phi: Pattern, force_pure: bool = False) -> CompiledQuery | None:
    """Compile ``phi`` against ``model``; None when the pattern or model is
    outside what the cores support (the caller then uses the reference path)."""
    if not well_formed(phi):
        return None
    core_mod = core_module(force_pure)
    n = len(model.carrier)
    if core_mod is not _corepure and n > 63:
        core_mod = _corepure
    if n > 1024:
        return None

    phi = expand(phi)
    fev = {x: i for i, x in enumerate(sorted(free_evars(phi)))}
    fsv = {X: i for i, X in enumerate(sorted(free_svars(phi)))}

    sym_names = sorted({s.name for s in _symbols_of(phi)})
    syms = {s: i for i, s in enumerate(sym_names)}
    try:
        sym_masks = [_to_mask(model, model.interp(s)) for s in sym_names]
    except Exception:
        return None

    ops: list[int] = []
    pa: list[int] = []
    pb: list[int] = []
    if _flatten(phi, syms, fev, fsv, ops, pa, pb, 0) is None:
        return None

    index = {e: i for i, e in enumerate(model.carrier)}
    app_table = [0] * (n * n)
    for (a, b), out in model.app.items():
        app_table[index[a] * n + index[b]] = _to_mask(model, out)

    core = core_mod.Core(n, ops, pa, pb, app_table, sym_masks, len(fev), len(fsv))
    return CompiledQuery(model, core,
                         sorted(fev, key=fev.get), sorted(fsv, key=fsv.get))


def _to_mask(model, subset) -> int:
    mask = 0
    for i, e in enumerate(model.carrier):
        if e in subset:
            mask |= 1 << i
    return mask


def _symbols_of(phi: Pattern):
    t = type(phi)
    if t is Sym:
        yield phi
    elif t is App:
        yield from _symbols_of(phi.left)
        yield from _symbols_of(phi.right)
    elif t is Imp:
        yield from _symbols_of(phi.lhs)
        yield from _symbols_of(phi.rhs)
    elif t in (Exists, Mu):
        yield from _symbols_of(phi.body)

"""Concrete syntax: patterns, theory files, model files.

Pattern grammar (loosest to tightest):

    pattern   := iff
    iff       := imp [ '<--->' iff ]
    imp       := or [ '--->' imp ]
    or        := and [ 'or' or ]
    and       := cmp [ 'and' and ]
    cmp       := app [ ('='|'!='|'in'|'notin'|'subseteq'|'notsubseteq') app ]
    app       := prefix { ['$'] prefix }          (left associative)
    prefix    := '!' prefix | quantifier | atom
    quantifier:= ('exists'|'mu'|'forall'|'nu') [name] '.' pattern
    atom      := name | 'b'K | 'S'K | 'Bot' | 'Top' | '(' pattern ')'
               | '⌈' pattern '⌉' | '⌊' pattern '⌋' | '<' pattern ',' pattern '>'
               | name '(' pattern {',' pattern} ')'

Quantifier bodies scope maximally right.  Identifiers are symbols when
declared, otherwise free element variables (lowercase) or free set
variables (uppercase).  ``bK``/``SK`` are de Bruijn literals.  Binders may
carry a convenience name, which is abstracted away immediately, so
``exists x . x`` and ``exists y . y`` produce the same tree.  Math aliases
(∃ μ ∀ ν ⊥ ⊤ ¬ ∧ ∨ → ↔ ∈ ∉ ⊆ ⊄) are accepted on input.

Comments in theory, model and script files run from ``--`` (at a token
boundary, so ``--->`` is safe) to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from .semantics import Model
from .syntax import (
    App, BOT, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Notation, NotationDef, Param, Pattern, Signature, Sym,
    BASE_NOTATIONS, MAX_INDEX, evar_close, expand, is_evar_name,
    is_svar_name, svar_close, well_formed,
)

__all__ = [
    "ParseError", "TheoryFile", "parse_pattern", "parse_theory", "parse_model",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"{message} (line {line}, column {col})" if line else message)


@dataclass(frozen=True, eq=False)
class TheoryFile:
    """A named theory: symbols, notation definitions and axiom patterns."""

    name: str
    imports: tuple[str, ...] = ()
    signature: Signature = field(default_factory=Signature)
    notations: dict[str, NotationDef] = field(default_factory=dict)
    axioms: dict[str, Pattern] = field(default_factory=dict)

    @cached_property
    def expanded_axioms(self) -> frozenset[Pattern]:
        return frozenset(expand(p) for p in self.axioms.values())

    def notation_env(self) -> dict[str, NotationDef]:
        env = dict(BASE_NOTATIONS)
        env.update(self.notations)
        return env


EMPTY_THEORY = TheoryFile(name="EMPTY")


# ---------------------------------------------------------------------------
# Tokenizer

_KEYWORDS = {
    "exists", "mu", "forall", "nu", "and", "or", "in", "notin",
    "subseteq", "notsubseteq", "Bot", "Top",
}

_ALIAS_TOKENS = {
    "∃": ("KW", "exists"), "μ": ("KW", "mu"),
    "∀": ("KW", "forall"), "ν": ("KW", "nu"),
    "⊥": ("KW", "Bot"), "⊤": ("KW", "Top"),
    "¬": ("BANG", "!"), "∧": ("KW", "and"), "∨": ("KW", "or"),
    "→": ("ARROW", "--->"), "↔": ("DARROW", "<--->"),
    "∈": ("KW", "in"), "∉": ("KW", "notin"),
    "⊆": ("KW", "subseteq"), "⊄": ("KW", "notsubseteq"),
    "⌈": ("LCEIL", "⌈"), "⌉": ("RCEIL", "⌉"),
    "⌊": ("LFLOOR", "⌊"), "⌋": ("RFLOOR", "⌋"),
    "⟨": ("LANGLE", "<"), "⟩": ("RANGLE", ">"),
}

_TOKEN_RE = re.compile(
    r"""(?P<WS>\s+)
      | (?P<DARROW><--->)
      | (?P<ARROW>--->)
      | (?P<NEQ>!=)
      | (?P<ASSIGN>:=)
      | (?P<NAME>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<BANG>!)
      | (?P<DOLLAR>\$)
      | (?P<LPAR>\()
      | (?P<RPAR>\))
      | (?P<DOT>\.)
      | (?P<COMMA>,)
      | (?P<COLON>:)
      | (?P<EQ>=)
      | (?P<LANGLE><)
      | (?P<RANGLE>>)
      | (?P<LBRACE>\{)
      | (?P<RBRACE>\})
      | (?P<OTHER>.)
    """,
    re.VERBOSE,
)

_BEVAR_RE = re.compile(r"b([0-9]+)\Z")
_BSVAR_RE = re.compile(r"S([0-9]+)\Z")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        assert m is not None
        kind = m.lastgroup
        val = m.group()
        if kind == "WS":
            for ch in val:
                if ch == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
            pos = m.end()
            continue
        if kind == "NAME" and val in _KEYWORDS:
            kind = "KW"
        elif kind == "OTHER":
            alias = _ALIAS_TOKENS.get(val)
            if alias is None:
                raise ParseError(f"unexpected character {val!r}", line, col)
            kind, val = alias
        toks.append(_Tok(kind, val, line, col))
        col += m.end() - pos
        pos = m.end()
    toks.append(_Tok("EOF", "", line, col))
    return toks


_CMP_TOKENS = {
    ("EQ", "="): "eq",
    ("NEQ", "!="): "neq",
    ("KW", "in"): "member",
    ("KW", "notin"): "not_member",
    ("KW", "subseteq"): "subseteq",
    ("KW", "notsubseteq"): "not_subseteq",
}

_QUANT_WORDS = {"exists", "mu", "forall", "nu"}

# Token kinds that may start a prefix expression (applications juxtapose them).
_ATOM_STARTS = {"NAME", "BANG", "LPAR", "LANGLE", "LCEIL", "LFLOOR"}


class _PatternParser:
    def __init__(self, toks: list[_Tok], signature: Signature,
                 notations: dict[str, NotationDef],
                 params: dict[str, Param] | None = None,
                 pair_symbol: str = "pair"):
        self.toks = toks
        self.i = 0
        self.sig = signature
        self.env = notations
        self.params = params or {}
        self.pair_symbol = pair_symbol

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {what}, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def notation(self, name: str, args: tuple[Pattern, ...], tok: _Tok) -> Pattern:
        d = self.env.get(name)
        if d is None:
            raise ParseError(f"notation {name!r} is not available here",
                             tok.line, tok.col)
        if d.arity != len(args):
            raise ParseError(
                f"notation {name!r} expects {d.arity} arguments, got {len(args)}",
                tok.line, tok.col)
        return Notation(d, args)

    # precedence ladder -----------------------------------------------------

    def pattern(self) -> Pattern:
        return self.iff()

    def iff(self) -> Pattern:
        lhs = self.imp()
        if self.peek().kind == "DARROW":
            tok = self.next()
            return self.notation("iff", (lhs, self.iff()), tok)
        return lhs

    def imp(self) -> Pattern:
        lhs = self.or_()
        if self.peek().kind == "ARROW":
            self.next()
            return Imp(lhs, self.imp())
        return lhs

    def or_(self) -> Pattern:
        lhs = self.and_()
        t = self.peek()
        if t.kind == "KW" and t.text == "or":
            self.next()
            return self.notation("or", (lhs, self.or_()), t)
        return lhs

    def and_(self) -> Pattern:
        lhs = self.cmp()
        t = self.peek()
        if t.kind == "KW" and t.text == "and":
            self.next()
            return self.notation("and", (lhs, self.and_()), t)
        return lhs

    def cmp(self) -> Pattern:
        lhs = self.app()
        t = self.peek()
        name = _CMP_TOKENS.get((t.kind, t.text))
        if name is not None:
            self.next()
            return self.notation(name, (lhs, self.app()), t)
        return lhs

    def app(self) -> Pattern:
        out = self.prefix()
        while True:
            t = self.peek()
            if t.kind == "DOLLAR":
                self.next()
                out = App(out, self.prefix())
            elif t.kind in _ATOM_STARTS or (t.kind == "KW" and
                                            (t.text in _QUANT_WORDS or
                                             t.text in ("Bot", "Top"))):
                out = App(out, self.prefix())
            else:
                return out

    def prefix(self) -> Pattern:
        t = self.peek()
        if t.kind == "BANG":
            self.next()
            return self.notation("not", (self.prefix(),), t)
        if t.kind == "KW" and t.text in _QUANT_WORDS:
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> Pattern:
        t = self.next()
        word = t.text
        binder_name = None
        if self.peek().kind == "NAME":
            name_tok = self.next()
            binder_name = name_tok.text
        self.expect("DOT", "'.' after quantifier")
        body = self.pattern()
        if binder_name is not None:
            if word in ("exists", "forall"):
                if not is_evar_name(binder_name):
                    raise ParseError(
                        f"{binder_name!r} is not an element variable name",
                        t.line, t.col)
                body = evar_close(0, binder_name, body)
            else:
                if not is_svar_name(binder_name):
                    raise ParseError(
                        f"{binder_name!r} is not a set variable name",
                        t.line, t.col)
                body = svar_close(0, binder_name, body)
        if word == "exists":
            return Exists(body)
        if word == "mu":
            return Mu(body)
        return self.notation(word, (body,), t)

    def atom(self) -> Pattern:
        t = self.next()
        if t.kind == "LPAR":
            p = self.pattern()
            self.expect("RPAR", "')'")
            return p
        if t.kind == "LCEIL":
            p = self.pattern()
            self.expect("RCEIL", "closing corner bracket")
            return self.notation("defined", (p,), t)
        if t.kind == "LFLOOR":
            p = self.pattern()
            self.expect("RFLOOR", "closing floor bracket")
            return self.notation("total", (p,), t)
        if t.kind == "LANGLE":
            a = self.pattern()
            self.expect("COMMA", "',' in pair")
            b = self.pattern()
            self.expect("RANGLE", "'>'")
            if not self.sig.is_symbol(self.pair_symbol):
                raise ParseError(
                    f"pair syntax needs the symbol {self.pair_symbol!r} declared",
                    t.line, t.col)
            return App(App(Sym(self.pair_symbol), a), b)
        if t.kind == "KW" and t.text == "Bot":
            return BOT
        if t.kind == "KW" and t.text == "Top":
            return self.notation("Top", (), t)
        if t.kind == "NAME":
            return self.name_atom(t)
        raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)

    def name_atom(self, t: _Tok) -> Pattern:
        name = t.text
        m = _BEVAR_RE.match(name)
        if m:
            idx = int(m.group(1))
            if idx > MAX_INDEX:
                raise ParseError(f"de Bruijn index too large: {name}", t.line, t.col)
            return BoundEVar(idx)
        m = _BSVAR_RE.match(name)
        if m:
            idx = int(m.group(1))
            if idx > MAX_INDEX:
                raise ParseError(f"de Bruijn index too large: {name}", t.line, t.col)
            return BoundSVar(idx)
        if name in self.params:
            return self.params[name]
        if self.peek().kind == "LPAR" and name in self.env:
            self.next()
            args = [self.pattern()]
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.pattern())
            self.expect("RPAR", "')'")
            return self.notation(name, tuple(args), t)
        if self.sig.is_symbol(name):
            return Sym(name)
        if is_evar_name(name):
            return FreeEVar(name)
        if is_svar_name(name):
            return FreeSVar(name)
        raise ParseError(f"unknown name {name!r}", t.line, t.col)


def parse_pattern(text: str, signature: Signature | None = None,
                  notations: dict[str, NotationDef] | None = None,
                  *, pair_symbol: str = "pair") -> Pattern:
    """Parse a pattern; inverse of ``print_pattern`` on its output."""
    sig = signature or Signature()
    env = dict(BASE_NOTATIONS) if notations is None else dict(notations)
    p = _PatternParser(_tokenize(text), sig, env, pair_symbol=pair_symbol)
    out = p.pattern()
    tok = p.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return out


# ---------------------------------------------------------------------------
# Theory files

_COMMENT_RE = re.compile(r"(?:^|(?<=\s))--(?=\s|$).*")


def strip_comment(line: str) -> str:
    return _COMMENT_RE.sub("", line)


def _template_expander(template: Pattern, arity: int):
    def instantiate(*args: Pattern) -> Pattern:
        def go(p: Pattern) -> Pattern:
            t = type(p)
            if t is Param:
                return args[p.index]
            if t is App:
                return App(go(p.left), go(p.right))
            if t is Imp:
                return Imp(go(p.lhs), go(p.rhs))
            if t is Exists:
                return Exists(go(p.body))
            if t is Mu:
                return Mu(go(p.body))
            if t is Notation:
                return Notation(p.defn, tuple(go(a) for a in p.args))
            return p
        return go(template)

    return instantiate


def _params_under_binder(p: Pattern, under: bool = False) -> bool:
    t = type(p)
    if t is Param:
        return under
    if t is App:
        return _params_under_binder(p.left, under) or _params_under_binder(p.right, under)
    if t is Imp:
        return _params_under_binder(p.lhs, under) or _params_under_binder(p.rhs, under)
    if t in (Exists, Mu):
        return _params_under_binder(p.body, True)
    if t is Notation:
        return any(
            _params_under_binder(a, under or bool(b))
            for a, b in zip(p.args, p.defn.arg_binders)
        )
    return False


_DIRECTIVE_RE = re.compile(r"\s*(\w+)\s*(.*)\Z", re.DOTALL)
_NOTATION_HEAD_RE = re.compile(
    r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*\(([^)]*)\)\s*:=\s*(.+)\Z", re.DOTALL)
_AXIOM_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.+)\Z", re.DOTALL)


def parse_theory(text: str,
                 resolve_import: Callable[[str], TheoryFile] | None = None,
                 ) -> TheoryFile:
    """Parse a ``.mlth`` theory file.

    ``resolve_import`` maps an imported theory name to its ``TheoryFile``;
    without it, ``import`` directives are an error.
    """
    lines = [strip_comment(l) for l in text.splitlines()]
    entries = [(n + 1, l.strip()) for n, l in enumerate(lines) if l.strip()]
    if not entries:
        raise ParseError("empty theory file")
    lineno, head = entries[0]
    m = re.match(r"theory\s+([A-Za-z_][A-Za-z0-9_']*)\s*\Z", head)
    if not m:
        raise ParseError("theory file must start with 'theory NAME'", lineno, 1)
    name = m.group(1)

    imports: list[str] = []
    sig = Signature()
    notations = dict(BASE_NOTATIONS)
    own_notations: dict[str, NotationDef] = {}
    axioms: dict[str, Pattern] = {}

    for lineno, line in entries[1:]:
        dm = _DIRECTIVE_RE.match(line)
        if not dm:
            raise ParseError(f"cannot parse line: {line!r}", lineno, 1)
        kw, rest = dm.group(1), dm.group(2).strip()
        if kw == "import":
            if resolve_import is None:
                raise ParseError(f"imports not supported here: {rest}", lineno, 1)
            imported = resolve_import(rest)
            imports.append(imported.name)
            sig = sig.merged(imported.signature)
            for nname, ndef in imported.notations.items():
                if nname in notations and notations[nname] is not ndef:
                    raise ParseError(f"conflicting notation {nname!r}", lineno, 1)
                notations[nname] = ndef
                own_notations[nname] = ndef
            for aname, pat in imported.axioms.items():
                axioms.setdefault(aname, pat)
        elif kw == "symbol":
            if not rest or " " in rest:
                raise ParseError("expected one symbol name", lineno, 1)
            sig = sig.merged(Signature((rest,)))
        elif kw == "notation":
            nm = _NOTATION_HEAD_RE.match(rest)
            if not nm:
                raise ParseError("expected NAME(params) := pattern", lineno, 1)
            nname = nm.group(1)
            if nname in notations:
                raise ParseError(f"duplicate notation {nname!r}", lineno, 1)
            param_names = [p.strip() for p in nm.group(2).split(",") if p.strip()]
            params = {p: Param(i) for i, p in enumerate(param_names)}
            body = _PatternParser(
                _tokenize(nm.group(3)), sig, notations, params).pattern()
            if _params_under_binder(body):
                raise ParseError(
                    "notation parameters may not sit under a binder", lineno, 1)
            ndef = NotationDef(nname, len(param_names),
                               _template_expander(body, len(param_names)),
                               ("",) * len(param_names))
            notations[nname] = ndef
            own_notations[nname] = ndef
        elif kw == "axiom":
            am = _AXIOM_RE.match(rest)
            if not am:
                raise ParseError("expected 'axiom NAME : pattern'", lineno, 1)
            aname = am.group(1)
            if aname in axioms:
                raise ParseError(f"duplicate axiom {aname!r}", lineno, 1)
            pat = _PatternParser(_tokenize(am.group(2)), sig, notations).pattern()
            if not well_formed(pat):
                raise ParseError(f"axiom {aname!r} is not well formed", lineno, 1)
            axioms[aname] = pat
        else:
            raise ParseError(f"unknown directive {kw!r}", lineno, 1)

    return TheoryFile(name=name, imports=tuple(imports), signature=sig,
                      notations=own_notations, axioms=axioms)


# ---------------------------------------------------------------------------
# Model files

_SET_RE = re.compile(r"\{([^}]*)\}\s*\Z")


def _parse_elem_set(text: str, lineno: int, carrier: set[str]) -> frozenset[str]:
    m = _SET_RE.match(text.strip())
    if not m:
        raise ParseError(f"expected an element set like {{a b}}: {text!r}", lineno, 1)
    names = [n for n in re.split(r"[,\s]+", m.group(1).strip()) if n]
    for n in names:
        if n not in carrier:
            raise ParseError(f"unknown element {n!r}", lineno, 1)
    return frozenset(names)


def parse_model(text: str) -> Model:
    """Parse a ``.mlmodel`` file.

    Unlisted application entries default to the empty set, which keeps the
    application table total without spelling out every pair.
    """
    lines = [strip_comment(l) for l in text.splitlines()]
    entries = [(n + 1, l.strip()) for n, l in enumerate(lines) if l.strip()]
    if not entries:
        raise ParseError("empty model file")
    lineno, head = entries[0]
    m = re.match(r"model\s+([A-Za-z_][A-Za-z0-9_']*)\s*\Z", head)
    if not m:
        raise ParseError("model file must start with 'model NAME'", lineno, 1)
    name = m.group(1)

    carrier: tuple[str, ...] | None = None
    cset: set[str] = set()
    app: dict[tuple[str, str], frozenset[str]] = {}
    syminterp: dict[str, frozenset[str]] = {}

    for lineno, line in entries[1:]:
        if line.startswith("elements"):
            if carrier is not None:
                raise ParseError("duplicate elements line", lineno, 1)
            names = line.split()[1:]
            if not names:
                raise ParseError("model needs at least one element", lineno, 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate element names", lineno, 1)
            carrier = tuple(names)
            cset = set(names)
        elif line.startswith("symbol"):
            if carrier is None:
                raise ParseError("elements must be declared first", lineno, 1)
            sm = re.match(r"symbol\s+([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(.+)\Z", line)
            if not sm:
                raise ParseError("expected 'symbol NAME = {..}'", lineno, 1)
            syminterp[sm.group(1)] = _parse_elem_set(sm.group(2), lineno, cset)
        elif line.startswith("app"):
            if carrier is None:
                raise ParseError("elements must be declared first", lineno, 1)
            am = re.match(
                r"app\s+([A-Za-z_][A-Za-z0-9_']*)\s+([A-Za-z_][A-Za-z0-9_']*)"
                r"\s*=\s*(.+)\Z", line)
            if not am:
                raise ParseError("expected 'app A B = {..}'", lineno, 1)
            a, b = am.group(1), am.group(2)
            if a not in cset or b not in cset:
                raise ParseError(f"unknown element in app {a} {b}", lineno, 1)
            app[(a, b)] = _parse_elem_set(am.group(3), lineno, cset)
        else:
            raise ParseError(f"cannot parse line: {line!r}", lineno, 1)

    if carrier is None:
        raise ParseError("model has no elements line")
    return Model(name=name, carrier=carrier, app=app, syminterp=syminterp)

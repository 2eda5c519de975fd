"""The trusted proof checker.

Derivations are data: a DAG of rule applications with per-rule instantiation
payloads.  ``check`` verifies every node against its rule schema and side
conditions, working on fully expanded patterns, and issues a ``Theorem``
whose conclusion is guaranteed well formed.  Theorems cannot be constructed
any other way, so everything downstream (derived rules, tactics) can build
arbitrary derivations without being trusted.

Error codes are part of the contract: ``rule-shape``, ``side-condition``,
``ill-formed`` and ``unknown-axiom``, each carrying the index of the
offending node in depth-first order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .syntax import (
    App, BOT, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Pattern, Sym, and_, bsvar_subst, evar_open, expand, free_evars,
    free_svars, not_, well_formed, wf_closed_ex, wf_closed_mu,
)

__all__ = [
    "RULES", "RULE_TAGS", "AppContext", "Derivation", "Theorem",
    "KernelError", "check", "conclusion", "theory_of",
]

RULES = (
    "Hypothesis", "Prop1", "Prop2", "Prop3", "ModusPonens",
    "ExQuantifier", "ExGen", "PropBotL", "PropBotR", "PropOrL", "PropOrR",
    "PropExL", "PropExR", "FramingL", "FramingR", "SvarSubst",
    "PreFixpoint", "KnasterTarski", "Existence", "Singleton",
)

# Serialization tags follow the traditional rule names.
RULE_TAGS = {
    "Hypothesis": "Hypothesis",
    "Prop1": "Proposition 1",
    "Prop2": "Proposition 2",
    "Prop3": "Proposition 3",
    "ModusPonens": "Modus Ponens",
    "ExQuantifier": "Exists-Quantifier",
    "ExGen": "Exists-Generalization",
    "PropBotL": "Propagation Left Bot",
    "PropBotR": "Propagation Right Bot",
    "PropOrL": "Propagation Left Or",
    "PropOrR": "Propagation Right Or",
    "PropExL": "Propagation Left Exists",
    "PropExR": "Propagation Right Exists",
    "FramingL": "Framing Left",
    "FramingR": "Framing Right",
    "SvarSubst": "Substitution",
    "PreFixpoint": "Pre-Fixpoint",
    "KnasterTarski": "Knaster-Tarski",
    "Existence": "Existence",
    "Singleton": "Singleton",
}
TAG_RULES = {v: k for k, v in RULE_TAGS.items()}


class KernelError(Exception):
    """A derivation failed to check.

    ``code`` is one of ``rule-shape``, ``side-condition``, ``ill-formed``,
    ``unknown-axiom``; ``node`` is the depth-first index of the failing node.
    """

    def __init__(self, code: str, message: str, node: int | None = None):
        self.code = code
        self.node = node
        where = f" (node {node})" if node is not None else ""
        super().__init__(f"[{code}] {message}{where}")


@dataclass(frozen=True)
class AppContext:
    """A pattern with a hole reachable only through applications.

    ``steps`` runs from the root towards the hole: ``("L", side)`` plugs the
    subtree on the left of an application with ``side`` on the right,
    ``("R", side)`` the other way around.  The empty context is the
    identity.
    """

    steps: tuple[tuple[str, Pattern], ...] = ()

    def __post_init__(self):
        for d, side in self.steps:
            if d not in ("L", "R") or not isinstance(side, Pattern):
                raise ValueError("context steps must be ('L'|'R', pattern)")

    @property
    def is_identity(self) -> bool:
        return not self.steps

    def plug(self, phi: Pattern) -> Pattern:
        out = phi
        for d, side in reversed(self.steps):
            out = App(out, side) if d == "L" else App(side, out)
        return out

    def side_patterns(self) -> list[Pattern]:
        return [side for _, side in self.steps]


class Derivation:
    """One rule application; children are sub-derivations, payload carries
    the rule's instantiation (patterns, names, contexts, axiom reference).

    Nodes are immutable and may be shared, so large derived-rule builds stay
    compact.  Checking caches the verified conclusion per axiom set on the
    node itself, so composing already-checked derivations stays linear in
    the new nodes.
    """

    __slots__ = ("rule", "children", "payload", "checked")

    def __init__(self, rule: str, children: tuple["Derivation", ...] = (), **payload):
        if rule not in RULE_TAGS:
            raise ValueError(f"unknown rule {rule!r}")
        self.rule = rule
        self.children = tuple(children)
        self.payload = payload
        self.checked: dict = {}

    def __repr__(self):
        return f"Derivation({self.rule}, {len(self.children)} children)"


_TOKEN = object()


class Theorem:
    """A checked judgment: the theory it holds over and its conclusion.

    Only ``check`` (and proof import, which re-checks) can construct these.
    The underlying derivation stays inspectable for export and composition.
    """

    __slots__ = ("_theory", "_conclusion", "_derivation")

    def __init__(self, theory, conclusion: Pattern, derivation: Derivation,
                 *, _token=None):
        if _token is not _TOKEN:
            raise TypeError("Theorems are only created by the kernel checker")
        self._theory = theory
        self._conclusion = conclusion
        self._derivation = derivation

    @property
    def conclusion(self) -> Pattern:
        return self._conclusion

    @property
    def theory(self):
        return self._theory

    @property
    def derivation(self) -> Derivation:
        return self._derivation

    def __repr__(self):
        from .printer import print_pattern

        return f"Theorem(|- {print_pattern(self._conclusion)})"


def conclusion(t: Theorem) -> Pattern:
    return t.conclusion


def theory_of(t: Theorem):
    return t.theory


# ---------------------------------------------------------------------------
# Checking


def _axiom_set(theory) -> tuple[frozenset[Pattern], dict]:
    if theory is None:
        return frozenset(), {}
    expanded = getattr(theory, "expanded_axioms", None)
    if expanded is not None:
        return expanded, dict(getattr(theory, "axioms", {}))
    if isinstance(theory, Pattern):
        return frozenset((expand(theory),)), {}
    pats = list(theory)
    return frozenset(expand(p) for p in pats), {}


def _number_nodes(d: Derivation) -> dict[int, int]:
    order: dict[int, int] = {}
    stack = [d]
    while stack:
        node = stack.pop()
        if id(node) in order:
            continue
        order[id(node)] = len(order)
        stack.extend(reversed(node.children))
    return order


class _Checker:
    def __init__(self, theory, root: Derivation):
        self.axioms, self.named_axioms = _axiom_set(theory)
        self.root = root
        self.memo_key = (self.axioms, frozenset(self.named_axioms.items()))

    def idx(self, node) -> int:
        # numbering is only needed for diagnostics; compute it lazily
        return _number_nodes(self.root).get(id(node), -1)

    def fail(self, code: str, msg: str, node) -> KernelError:
        return KernelError(code, msg, self.idx(node))

    def need_children(self, node, count: int):
        if len(node.children) != count:
            raise self.fail(
                "rule-shape",
                f"{node.rule} takes {count} sub-derivations, got {len(node.children)}",
                node)

    def payload_pattern(self, node, key: str, wf: bool = True) -> Pattern:
        p = node.payload.get(key)
        if not isinstance(p, Pattern):
            raise self.fail("rule-shape", f"{node.rule} needs pattern payload {key!r}", node)
        px = expand(p)
        if wf and not well_formed(px):
            raise self.fail(
                "ill-formed", f"{node.rule} instantiated with ill-formed {key!r}", node)
        return px

    def payload_name(self, node, key: str) -> str:
        n = node.payload.get(key)
        if not isinstance(n, str) or not n:
            raise self.fail("rule-shape", f"{node.rule} needs name payload {key!r}", node)
        return n

    def payload_context(self, node, key: str) -> AppContext:
        c = node.payload.get(key)
        if not isinstance(c, AppContext):
            raise self.fail("rule-shape", f"{node.rule} needs context payload {key!r}", node)
        for side in c.side_patterns():
            if not well_formed(expand(side)):
                raise self.fail(
                    "ill-formed", f"{node.rule}: context side pattern ill-formed", node)
        return c

    def check(self, root: Derivation) -> Pattern:
        """Iterative postorder check with per-node caching across calls."""
        key = self.memo_key
        got = root.checked.get(key)
        if got is not None:
            return got
        stack: list[tuple[Derivation, bool]] = [(root, False)]
        while stack:
            node, ready = stack.pop()
            if node.checked.get(key) is not None:
                continue
            if not ready:
                stack.append((node, True))
                for c in node.children:
                    if c.checked.get(key) is None:
                        stack.append((c, False))
                continue
            concl = self._check_node(node)
            if not well_formed(concl):
                raise self.fail(
                    "side-condition",
                    f"{node.rule} produced an ill-formed conclusion", node)
            node.checked[key] = concl
        return root.checked[key]

    def _child(self, node, i: int) -> Pattern:
        c = node.children[i].checked.get(self.memo_key)
        assert c is not None, "child checked before parent"
        return c

    def _imp_child(self, node, i: int) -> tuple[Pattern, Pattern]:
        c = self._child(node, i)
        if type(c) is not Imp:
            raise self.fail(
                "rule-shape",
                f"{node.rule} needs an implication premise, got {c!r}", node)
        return c.lhs, c.rhs

    def _check_node(self, node: Derivation) -> Pattern:
        rule = node.rule

        if rule == "Hypothesis":
            self.need_children(node, 0)
            ax = node.payload.get("axiom")
            if isinstance(ax, str):
                pat = self.named_axioms.get(ax)
                if pat is None:
                    raise self.fail("unknown-axiom", f"no axiom named {ax!r}", node)
                ax = pat
            if not isinstance(ax, Pattern):
                raise self.fail("rule-shape", "Hypothesis needs an axiom", node)
            axx = expand(ax)
            if axx not in self.axioms:
                raise self.fail("unknown-axiom", "pattern is not an axiom of the theory", node)
            if not well_formed(axx):
                raise self.fail("ill-formed", "axiom is not well formed", node)
            return axx

        if rule == "Prop1":
            self.need_children(node, 0)
            p1 = self.payload_pattern(node, "phi1")
            p2 = self.payload_pattern(node, "phi2")
            return Imp(p1, Imp(p2, p1))

        if rule == "Prop2":
            self.need_children(node, 0)
            p1 = self.payload_pattern(node, "phi1")
            p2 = self.payload_pattern(node, "phi2")
            p3 = self.payload_pattern(node, "phi3")
            return Imp(Imp(p1, Imp(p2, p3)), Imp(Imp(p1, p2), Imp(p1, p3)))

        if rule == "Prop3":
            self.need_children(node, 0)
            p = self.payload_pattern(node, "phi")
            return Imp(Imp(Imp(p, BOT), BOT), p)

        if rule == "ModusPonens":
            self.need_children(node, 2)
            minor = self._child(node, 0)
            lhs, rhs = self._imp_child(node, 1)
            if lhs != minor:
                raise self.fail(
                    "rule-shape",
                    "modus ponens premises do not match: minor conclusion is not "
                    "the antecedent of the major", node)
            return rhs

        if rule == "ExQuantifier":
            self.need_children(node, 0)
            body = node.payload.get("phi")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "ExQuantifier needs the binder body", node)
            body = expand(body)
            x = self.payload_name(node, "x")
            ex = Exists(body)
            if not well_formed(ex):
                raise self.fail("ill-formed", "quantified pattern is ill-formed", node)
            return Imp(evar_open(0, x, body), ex)

        if rule == "ExGen":
            self.need_children(node, 1)
            lhs, rhs = self._imp_child(node, 0)
            body = node.payload.get("phi")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "ExGen needs the binder body", node)
            body = expand(body)
            x = self.payload_name(node, "x")
            if evar_open(0, x, body) != lhs:
                raise self.fail(
                    "rule-shape",
                    "ExGen premise antecedent is not the given body opened with x",
                    node)
            if x in free_evars(rhs):
                raise self.fail(
                    "side-condition",
                    f"ExGen requires {x!r} not free in the consequent", node)
            ex = Exists(body)
            if not well_formed(ex):
                raise self.fail("ill-formed", "quantified pattern is ill-formed", node)
            return Imp(ex, rhs)

        if rule == "PropBotL":
            self.need_children(node, 0)
            p = self.payload_pattern(node, "phi")
            return Imp(App(BOT, p), BOT)

        if rule == "PropBotR":
            self.need_children(node, 0)
            p = self.payload_pattern(node, "phi")
            return Imp(App(p, BOT), BOT)

        if rule == "PropOrL":
            self.need_children(node, 0)
            p1 = self.payload_pattern(node, "phi1")
            p2 = self.payload_pattern(node, "phi2")
            p3 = self.payload_pattern(node, "phi3")
            return expand(Imp(App(or_(p1, p2), p3),
                              or_(App(p1, p3), App(p2, p3))))

        if rule == "PropOrR":
            self.need_children(node, 0)
            p1 = self.payload_pattern(node, "phi1")
            p2 = self.payload_pattern(node, "phi2")
            p3 = self.payload_pattern(node, "phi3")
            return expand(Imp(App(p1, or_(p2, p3)),
                              or_(App(p1, p2), App(p1, p3))))

        if rule == "PropExL":
            self.need_children(node, 0)
            body = node.payload.get("phi1")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "PropExL needs the binder body", node)
            body = expand(body)
            p2 = self.payload_pattern(node, "phi2")
            concl = Imp(App(Exists(body), p2), Exists(App(body, p2)))
            if not well_formed(concl):
                raise self.fail("ill-formed", "propagation instance is ill-formed", node)
            return concl

        if rule == "PropExR":
            self.need_children(node, 0)
            p1 = self.payload_pattern(node, "phi1")
            body = node.payload.get("phi2")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "PropExR needs the binder body", node)
            body = expand(body)
            concl = Imp(App(p1, Exists(body)), Exists(App(p1, body)))
            if not well_formed(concl):
                raise self.fail("ill-formed", "propagation instance is ill-formed", node)
            return concl

        if rule == "FramingL":
            self.need_children(node, 1)
            lhs, rhs = self._imp_child(node, 0)
            p3 = self.payload_pattern(node, "phi")
            return Imp(App(lhs, p3), App(rhs, p3))

        if rule == "FramingR":
            self.need_children(node, 1)
            lhs, rhs = self._imp_child(node, 0)
            p1 = self.payload_pattern(node, "phi")
            return Imp(App(p1, lhs), App(p1, rhs))

        if rule == "SvarSubst":
            self.need_children(node, 1)
            child = self._child(node, 0)
            psi = node.payload.get("psi")
            if not isinstance(psi, Pattern):
                raise self.fail("rule-shape", "Substitution needs a pattern payload", node)
            psi = expand(psi)
            X = self.payload_name(node, "X")
            if not (wf_closed_ex(psi, 0) and wf_closed_mu(psi, 0)):
                raise self.fail(
                    "side-condition", "substituted pattern must be closed", node)
            if not well_formed(psi):
                raise self.fail(
                    "ill-formed", "substituted pattern must be well formed", node)
            from .syntax import fsvar_subst

            return fsvar_subst(child, psi, X)

        if rule == "PreFixpoint":
            self.need_children(node, 0)
            body = node.payload.get("phi")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "PreFixpoint needs the binder body", node)
            body = expand(body)
            mu = Mu(body)
            if not well_formed(mu):
                raise self.fail(
                    "side-condition",
                    "PreFixpoint needs a well-formed fixpoint pattern", node)
            return Imp(bsvar_subst(body, mu, 0), mu)

        if rule == "KnasterTarski":
            self.need_children(node, 1)
            lhs, rhs = self._imp_child(node, 0)
            body = node.payload.get("phi")
            if not isinstance(body, Pattern):
                raise self.fail("rule-shape", "KnasterTarski needs the binder body", node)
            body = expand(body)
            psi = self.payload_pattern(node, "psi")
            if not (wf_closed_ex(psi, 0) and wf_closed_mu(psi, 0)):
                raise self.fail(
                    "side-condition",
                    "KnasterTarski target pattern must be closed", node)
            if psi != rhs:
                raise self.fail(
                    "rule-shape",
                    "KnasterTarski premise consequent differs from the target", node)
            if bsvar_subst(body, psi, 0) != lhs:
                raise self.fail(
                    "rule-shape",
                    "KnasterTarski premise antecedent is not the body with the "
                    "target substituted", node)
            mu = Mu(body)
            if not well_formed(mu):
                raise self.fail(
                    "side-condition",
                    "KnasterTarski needs a well-formed fixpoint pattern", node)
            return Imp(mu, psi)

        if rule == "Existence":
            self.need_children(node, 0)
            return Exists(BoundEVar(0))

        if rule == "Singleton":
            self.need_children(node, 0)
            c1 = self.payload_context(node, "ctx1")
            c2 = self.payload_context(node, "ctx2")
            x = self.payload_name(node, "x")
            phi = self.payload_pattern(node, "phi")
            xe = FreeEVar(x)
            inner1 = c1.plug(and_(xe, phi))
            inner2 = c2.plug(and_(xe, not_(phi)))
            return expand(not_(and_(inner1, inner2)))

        raise self.fail("rule-shape", f"unknown rule {rule!r}", node)


def or_(p: Pattern, q: Pattern) -> Pattern:
    # local core-level disjunction: not p -> q
    return Imp(Imp(p, BOT), q)


def check(theory, derivation: Derivation) -> Theorem:
    """Verify a derivation against a theory and issue the Theorem.

    Pure: equal inputs give equal results; nodes are checked once each even
    when shared.  Payload patterns may contain notation nodes, which are
    expanded before any comparison.
    """
    if not isinstance(derivation, Derivation):
        raise TypeError("check expects a Derivation")
    checker = _Checker(theory, derivation)
    concl = checker.check(derivation)
    return Theorem(theory, concl, derivation, _token=_TOKEN)


def export_theorem(t: Theorem) -> bytes:
    """Canonical proof-object bytes for a theorem (see ``proofjson``)."""
    from .proofjson import encode_proof

    return encode_proof(t)


def import_theorem(theory, data: bytes) -> Theorem:
    """Decode and fully re-check a proof object; files are never trusted."""
    from .proofjson import decode_proof

    return decode_proof(theory, data)

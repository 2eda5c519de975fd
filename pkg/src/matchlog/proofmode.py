"""Interactive proof states and tactics.

A proof state is a named list of local hypotheses plus a goal; it converts
to a single judgment by folding the hypotheses into the goal as a chain of
implications, so tactics never leave the kernel's world.  Each tactic
replaces the focused goal by zero or more subgoals and registers a
justification that, given theorems for the subgoals' converted forms,
derives a theorem for the parent's converted form.  ``qed`` folds the
justifications bottom-up and re-checks the final derivation through the
kernel from scratch, so tactics cannot forge theorems.

Sessions are immutable; applying a tactic returns a new session linked to
the previous one, which makes undo trivial and replay deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from . import derived
from .derived import CongruenceError, LemmaValue, call_script_lemma, tauto
from .kernel import Derivation, Theorem, check
from .parser import ParseError, TheoryFile, _PatternParser, _tokenize
from .printer import print_pattern
from .syntax import (
    App, BOT, Bot, Exists, Hole, HOLE, Imp, Mu, Notation, Pattern, expand,
    well_formed,
)

__all__ = [
    "Hypothesis", "ProofState", "Session", "TacticError", "Tactic",
    "new_session", "apply_tactic", "apply_tactic_text", "undo", "qed",
    "run_script", "parse_tactic", "to_goal", "render_state", "state_json",
    "focused_state",
]

RULE_LINE = "-" * 38


class TacticError(ValueError):
    """A tactic could not be applied; the session is unchanged."""


@dataclass(frozen=True)
class Hypothesis:
    name: str
    pattern: Pattern


@dataclass(frozen=True)
class ProofState:
    hyps: tuple[Hypothesis, ...]
    goal: Pattern

    def hyp(self, name: str) -> Hypothesis:
        for h in self.hyps:
            if h.name == name:
                return h
        raise TacticError(f"no hypothesis named {name!r}")

    def replace_hyp(self, name: str, pattern: Pattern,
                    new_name: str | None = None) -> "ProofState":
        out = tuple(
            Hypothesis(new_name or h.name, pattern) if h.name == name else h
            for h in self.hyps
        )
        return ProofState(out, self.goal)


def to_goal(state: ProofState) -> Pattern:
    """Fold local hypotheses into the goal, right to left."""
    acc = state.goal
    for h in reversed(state.hyps):
        acc = Imp(h.pattern, acc)
    return acc


@dataclass(frozen=True)
class _GoalNode:
    nid: int
    state: ProofState
    children: tuple[int, ...] = ()
    combiner: object = None          # fn(list[Theorem]) -> Theorem
    theorem: Theorem | None = None


@dataclass(frozen=True, eq=False)
class Session:
    theory: TheoryFile
    nodes: dict[int, _GoalNode]
    root: int
    next_id: int
    script: tuple[str, ...] = ()
    prev: "Session | None" = None

    def node(self, nid: int) -> _GoalNode:
        return self.nodes[nid]


def new_session(theory: TheoryFile, goal: Pattern) -> Session:
    """Open a session; the goal's well-formedness obligation is discharged
    immediately and a failing obligation is a hard error."""
    if not well_formed(goal):
        raise TacticError("goal is not well formed")
    root = _GoalNode(0, ProofState((), goal))
    return Session(theory=theory, nodes={0: root}, root=0, next_id=1)


def _open_leaves(session: Session) -> list[int]:
    out: list[int] = []

    def walk(nid: int):
        node = session.node(nid)
        if node.theorem is not None:
            return
        if node.children:
            for c in node.children:
                walk(c)
        elif node.combiner is None:
            out.append(nid)

    walk(session.root)
    return out


def focused_goal_id(session: Session) -> int | None:
    leaves = _open_leaves(session)
    return leaves[0] if leaves else None


def focused_state(session: Session) -> ProofState | None:
    nid = focused_goal_id(session)
    return session.node(nid).state if nid is not None else None


def _propagate(theory, nodes: dict[int, _GoalNode], parents: dict[int, int],
               nid: int) -> None:
    # bubble completed subtrees upward, eagerly computing theorems
    while True:
        node = nodes[nid]
        if node.theorem is None and node.combiner is not None:
            kids = [nodes[c].theorem for c in node.children]
            if all(t is not None for t in kids):
                thm = node.combiner(kids)
                want = expand(to_goal(node.state))
                if thm.conclusion != want:
                    raise AssertionError(
                        "tactic justification proved the wrong judgment; "
                        "this is an internal error")
                nodes[nid] = replace(node, theorem=thm)
        if nid not in parents:
            return
        nid = parents[nid]


def _parents(nodes: dict[int, _GoalNode]) -> dict[int, int]:
    out = {}
    for node in nodes.values():
        for c in node.children:
            out[c] = node.nid
    return out


def _apply_result(session: Session, nid: int, tactic_text: str,
                  new_states: list[ProofState], combiner) -> Session:
    nodes = dict(session.nodes)
    child_ids = []
    next_id = session.next_id
    for st in new_states:
        nodes[next_id] = _GoalNode(next_id, st)
        child_ids.append(next_id)
        next_id += 1
    nodes[nid] = replace(nodes[nid], children=tuple(child_ids), combiner=combiner)
    _propagate(session.theory, nodes, _parents(nodes), nid)
    return Session(theory=session.theory, nodes=nodes, root=session.root,
                   next_id=next_id, script=session.script + (tactic_text,),
                   prev=session)


def undo(session: Session) -> Session:
    if session.prev is None:
        raise TacticError("nothing to undo")
    return session.prev


def qed(session: Session) -> Theorem:
    """Assemble the completed proof and re-check it through the kernel."""
    if _open_leaves(session):
        raise TacticError(f"{len(_open_leaves(session))} goal(s) still open")
    thm = session.node(session.root).theorem
    assert thm is not None
    rechecked = check(session.theory, thm.derivation)
    if rechecked.conclusion != expand(to_goal(session.node(session.root).state)):
        raise AssertionError("final re-check does not match the original goal")
    return rechecked


# ---------------------------------------------------------------------------
# Tactics


@dataclass(frozen=True)
class Tactic:
    kind: str
    names: tuple[str, ...] = ()
    lemma: str | None = None
    args: tuple[Pattern, ...] = ()
    at: int = 1


def _derive_from(theory, premises: list[Theorem], target: Pattern) -> Theorem:
    """Derive the expanded target from premise theorems by a propositional
    glue tautology plus modus ponens.  Failure here is an internal bug and
    is raised loudly."""
    formula = expand(target)
    for t in reversed(premises):
        formula = Imp(t.conclusion, formula)
    res = tauto(theory, formula)
    if not res.ok:
        raise AssertionError(
            "internal tactic justification is not a tautology; this is a bug")
    return derived._mp_theorems(theory, res.theorem, *premises)


def _fresh_hyp_name(state: ProofState) -> str:
    used = {h.name for h in state.hyps}
    i = 0
    while f"H{i}" in used:
        i += 1
    return f"H{i}"


def _head_unfold_imp(goal: Pattern):
    cur = goal
    while type(cur) is Notation:
        cur = cur.defn.expander(*cur.args)
    return cur if type(cur) is Imp else None


def _unfold_to_match(pattern: Pattern, goal: Pattern):
    """Strip notation heads and implication premises until the residual
    matches the goal; returns (premises, residual) or None."""
    goal_x = expand(goal)
    premises: list[Pattern] = []
    cur = pattern
    for _ in range(10_000):
        if expand(cur) == goal_x:
            return premises, cur
        t = type(cur)
        if t is Notation:
            cur = cur.defn.expander(*cur.args)
        elif t is Imp:
            premises.append(cur.lhs)
            cur = cur.rhs
        else:
            return None
    return None


def _as_disjunction(pattern: Pattern):
    if type(pattern) is Notation and pattern.defn.name == "or":
        return pattern.args[0], pattern.args[1]
    x = expand(pattern)
    if type(x) is Imp and type(x.lhs) is Imp and x.lhs.rhs == BOT:
        return x.lhs.lhs, x.rhs
    return None


def _tac_intro(session, nid, t: Tactic):
    state = session.node(nid).state
    imp = _head_unfold_imp(state.goal)
    if imp is None:
        raise TacticError("mlIntro: the goal is not an implication")
    name = t.names[0] if t.names else _fresh_hyp_name(state)
    if any(h.name == name for h in state.hyps):
        raise TacticError(f"mlIntro: hypothesis {name!r} already exists")
    new = ProofState(state.hyps + (Hypothesis(name, imp.lhs),), imp.rhs)
    return [new], lambda kids: kids[0]


def _tac_revert_last(session, nid, t: Tactic):
    state = session.node(nid).state
    if not state.hyps:
        raise TacticError("mlRevertLast: no local hypotheses")
    last = state.hyps[-1]
    new = ProofState(state.hyps[:-1], Imp(last.pattern, state.goal))
    return [new], lambda kids: kids[0]


def _tac_clear(session, nid, t: Tactic):
    state = session.node(nid).state
    state.hyp(t.names[0])
    new = ProofState(tuple(h for h in state.hyps if h.name != t.names[0]),
                     state.goal)
    theory = session.theory
    target = to_goal(state)
    return [new], lambda kids: _derive_from(theory, kids, target)


def _tac_exact(session, nid, t: Tactic):
    state = session.node(nid).state
    h = state.hyp(t.names[0])
    if expand(h.pattern) != expand(state.goal):
        raise TacticError(f"mlExact: hypothesis {t.names[0]!r} is not the goal")
    theory = session.theory
    target = to_goal(state)
    return [], lambda kids: _derive_from(theory, [], target)


def _tac_tauto(session, nid, t: Tactic):
    state = session.node(nid).state
    theory = session.theory
    target = to_goal(state)
    res = tauto(theory, target)
    if not res.ok:
        bad = {print_pattern(k): v for k, v in (res.countermodel or {}).items()}
        raise TacticError(f"mlTauto: not a propositional tautology ({bad})")
    return [], lambda kids: res.theorem


def _tac_destruct_or(session, nid, t: Tactic):
    state = session.node(nid).state
    hname, n1, n2 = t.names
    h = state.hyp(hname)
    split = _as_disjunction(h.pattern)
    if split is None:
        raise TacticError(f"mlDestructOr: hypothesis {hname!r} is not a disjunction")
    left, right = split
    for nm in (n1, n2):
        if any(x.name == nm and x.name != hname for x in state.hyps):
            raise TacticError(f"mlDestructOr: hypothesis {nm!r} already exists")
    s1 = state.replace_hyp(hname, left, n1)
    s2 = state.replace_hyp(hname, right, n2)
    theory = session.theory
    target = to_goal(state)
    return [s1, s2], lambda kids: _derive_from(theory, kids, target)


def _tac_apply(session, nid, t: Tactic):
    state = session.node(nid).state
    h = state.hyp(t.names[0])
    got = _unfold_to_match(h.pattern, state.goal)
    if got is None:
        raise TacticError(
            f"mlApply: hypothesis {t.names[0]!r} does not conclude the goal")
    premises, residual = got
    shown = residual
    for p in reversed(premises):
        shown = Imp(p, shown)
    base = state.replace_hyp(t.names[0], shown)
    subgoals = [ProofState(base.hyps, p) for p in premises]
    theory = session.theory
    target = to_goal(state)
    return subgoals, lambda kids: _derive_from(theory, kids, target)


def _tac_apply_meta(session, nid, t: Tactic):
    state = session.node(nid).state
    lemma = _call_lemma(session.theory, t)
    got = _unfold_to_match(lemma.display, state.goal)
    if got is None:
        raise TacticError(
            f"mlApplyMeta: {t.lemma!r} does not conclude the goal")
    premises, _ = got
    subgoals = [ProofState(state.hyps, p) for p in premises]
    theory = session.theory
    target = to_goal(state)
    return subgoals, lambda kids: _derive_from(theory, [lemma.theorem] + kids, target)


def _call_lemma(theory, t: Tactic) -> LemmaValue:
    try:
        return call_script_lemma(theory, t.lemma, list(t.args))
    except (ValueError, derived.AtomBudgetError) as exc:
        raise TacticError(f"{t.lemma}: {exc}")


# --- rewriting -------------------------------------------------------------


def _fold_children(p: Pattern):
    t = type(p)
    if t is App:
        return (("left", p.left), ("right", p.right))
    if t is Imp:
        return (("lhs", p.lhs), ("rhs", p.rhs))
    if t in (Exists, Mu):
        return (("body", p.body),)
    if t is Notation:
        return tuple((i, a) for i, a in enumerate(p.args))
    return ()


def _find_matches(goal: Pattern, lhs_x: Pattern):
    """Preorder positions (paths) of folded subtrees expanding to lhs_x."""
    matches: list[tuple] = []

    def walk(node: Pattern, path: tuple):
        if expand(node) == lhs_x:
            matches.append(path)
        for key, child in _fold_children(node):
            walk(child, path + (key,))

    walk(goal, ())
    return matches


def _replace_at(node: Pattern, path: tuple, new: Pattern) -> Pattern:
    if not path:
        return new
    key, rest = path[0], path[1:]
    t = type(node)
    if t is App:
        if key == "left":
            return App(_replace_at(node.left, rest, new), node.right)
        return App(node.left, _replace_at(node.right, rest, new))
    if t is Imp:
        if key == "lhs":
            return Imp(_replace_at(node.lhs, rest, new), node.rhs)
        return Imp(node.lhs, _replace_at(node.rhs, rest, new))
    if t is Exists:
        return Exists(_replace_at(node.body, rest, new))
    if t is Mu:
        return Mu(_replace_at(node.body, rest, new))
    if t is Notation:
        args = list(node.args)
        args[key] = _replace_at(args[key], rest, new)
        return Notation(node.defn, tuple(args))
    raise AssertionError("bad rewrite path")


def _fill_holes(ctx: Pattern, fillers: list[Pattern], counter: list[int]) -> Pattern:
    t = type(ctx)
    if t is Hole:
        out = fillers[counter[0]]
        counter[0] += 1
        return out
    if t is App:
        return App(_fill_holes(ctx.left, fillers, counter),
                   _fill_holes(ctx.right, fillers, counter))
    if t is Imp:
        return Imp(_fill_holes(ctx.lhs, fillers, counter),
                   _fill_holes(ctx.rhs, fillers, counter))
    if t is Exists:
        return Exists(_fill_holes(ctx.body, fillers, counter))
    if t is Mu:
        return Mu(_fill_holes(ctx.body, fillers, counter))
    return ctx


def _count_holes(ctx: Pattern) -> int:
    return derived._count_holes(ctx)


def _iff_trans(theory, t1: Theorem, a: Pattern, t2: Theorem, b: Pattern,
               c: Pattern) -> Theorem:
    from .syntax import iff_

    glue = derived._taut_theorem(
        theory, Imp(iff_(a, b), Imp(iff_(b, c), iff_(a, c))))
    return derived._mp_theorems(theory, glue, t1, t2)


def _rewrite_goal(theory, goal: Pattern, lemma: LemmaValue, occ: int):
    """Rewrite the occ-th folded occurrence of the lemma's left side.

    Returns (new goal, theorem of old <---> new, both expanded)."""
    from .syntax import iff_

    if lemma.equiv is None:
        raise TacticError("mlRewrite needs an equivalence lemma")
    lhs, rhs = lemma.equiv
    lhs_x, rhs_x = expand(lhs), expand(rhs)
    matches = _find_matches(goal, lhs_x)
    if occ < 1 or occ > len(matches):
        raise TacticError(
            f"mlRewrite: no occurrence {occ} (found {len(matches)})")
    path = matches[occ - 1]
    new_goal = _replace_at(goal, path, rhs)

    marked = _replace_at(goal, path, HOLE)
    ctx = expand(marked)
    holes = _count_holes(ctx)
    if holes == 0:
        thm = derived._taut_theorem(theory, iff_(expand(goal), expand(goal)))
        return new_goal, thm
    cur_thm: Theorem | None = None
    cur_from = _fill_holes(ctx, [lhs_x] * holes, [0])
    for i in range(holes):
        fillers = [rhs_x] * i + [HOLE] + [lhs_x] * (holes - i - 1)
        one_hole = _fill_holes(ctx, fillers, [0])
        try:
            step = derived.build_congruence(theory, one_hole, lemma.theorem, lhs_x, rhs_x)
        except CongruenceError as exc:
            raise TacticError(f"mlRewrite: {exc}")
        mid = _fill_holes(ctx, [rhs_x] * (i + 1) + [lhs_x] * (holes - i - 1), [0])
        if cur_thm is None:
            cur_thm = step
        else:
            prev = _fill_holes(ctx, [rhs_x] * i + [lhs_x] * (holes - i), [0])
            cur_thm = _iff_trans(theory, cur_thm, cur_from, step, prev, mid)
    assert expand(new_goal) == _fill_holes(ctx, [rhs_x] * holes, [0])
    return new_goal, cur_thm


def _tac_rewrite(session, nid, t: Tactic):
    state = session.node(nid).state
    lemma = _call_lemma(session.theory, t)
    theory = session.theory
    new_goal, iff_thm = _rewrite_goal(theory, state.goal, lemma, t.at)
    new_state = ProofState(state.hyps, new_goal)
    target = to_goal(state)
    return [new_state], lambda kids: _derive_from(theory, [iff_thm] + kids, target)


_TACTICS = {
    "mlIntro": _tac_intro,
    "mlRevertLast": _tac_revert_last,
    "mlClear": _tac_clear,
    "mlExact": _tac_exact,
    "mlTauto": _tac_tauto,
    "mlDestructOr": _tac_destruct_or,
    "mlApply": _tac_apply,
    "mlApplyMeta": _tac_apply_meta,
    "mlRewrite": _tac_rewrite,
}


def apply_tactic(session: Session, tactic: Tactic,
                 text: str | None = None) -> Session:
    nid = focused_goal_id(session)
    if nid is None:
        raise TacticError("no open goals")
    impl = _TACTICS.get(tactic.kind)
    if impl is None:
        raise TacticError(f"unknown tactic {tactic.kind!r}")
    try:
        new_states, combiner = impl(session, nid, tactic)
    except TacticError as exc:
        msg = str(exc)
        if msg.startswith(tactic.kind):
            raise
        raise TacticError(f"{tactic.kind}: {msg}") from None
    return _apply_result(session, nid, text or tactic.kind, new_states, combiner)


def apply_tactic_text(session: Session, text: str) -> Session:
    return apply_tactic(session, parse_tactic(text, session.theory), text)


# ---------------------------------------------------------------------------
# Tactic text syntax

_NAME_Q = r'"([^"]+)"'
_T_SIMPLE = {
    "mlRevertLast": re.compile(r"mlRevertLast\s*\Z"),
    "mlTauto": re.compile(r"mlTauto\s*\Z"),
}
_T_ONE_NAME = {
    "mlIntro": re.compile(rf"mlIntro(?:\s+{_NAME_Q})?\s*\Z"),
    "mlClear": re.compile(rf"mlClear\s+{_NAME_Q}\s*\Z"),
    "mlExact": re.compile(rf"mlExact\s+{_NAME_Q}\s*\Z"),
    "mlApply": re.compile(rf"mlApply\s+{_NAME_Q}\s*\Z"),
}
_T_DESTRUCT = re.compile(
    rf"mlDestructOr\s+{_NAME_Q}\s+as\s+{_NAME_Q}\s+{_NAME_Q}\s*\Z")
_T_META = re.compile(r"mlApplyMeta\s*\((.*)\)\s*\Z", re.DOTALL)
_T_REWRITE = re.compile(r"mlRewrite\s*\((.*)\)\s*(?:at\s+(\d+))?\s*\Z", re.DOTALL)


def _parse_lemma_call(inner: str, theory: TheoryFile) -> tuple[str, tuple[Pattern, ...]]:
    toks = _tokenize(inner)
    if not toks or toks[0].kind != "NAME":
        raise TacticError("expected a lemma name")
    name = toks[0].text
    parser = _PatternParser(toks, theory.signature, theory.notation_env())
    parser.i = 1
    args = []
    while parser.peek().kind != "EOF":
        try:
            args.append(parser.prefix())
        except ParseError as exc:
            raise TacticError(f"bad lemma argument: {exc}")
    return name, tuple(args)


def parse_tactic(text: str, theory: TheoryFile) -> Tactic:
    s = text.strip()
    word = s.split("(")[0].split()[0] if s else ""
    if word in _T_SIMPLE:
        if not _T_SIMPLE[word].match(s):
            raise TacticError(f"cannot parse tactic: {text!r}")
        return Tactic(word)
    if word in _T_ONE_NAME:
        m = _T_ONE_NAME[word].match(s)
        if not m:
            raise TacticError(f"cannot parse tactic: {text!r}")
        return Tactic(word, names=(m.group(1),) if m.group(1) else ())
    if word == "mlDestructOr":
        m = _T_DESTRUCT.match(s)
        if not m:
            raise TacticError(f"cannot parse tactic: {text!r}")
        return Tactic(word, names=(m.group(1), m.group(2), m.group(3)))
    if word == "mlApplyMeta":
        m = _T_META.match(s)
        if not m:
            raise TacticError(f"cannot parse tactic: {text!r}")
        name, args = _parse_lemma_call(m.group(1), theory)
        return Tactic(word, lemma=name, args=args)
    if word == "mlRewrite":
        m = _T_REWRITE.match(s)
        if not m:
            raise TacticError(f"cannot parse tactic: {text!r}")
        name, args = _parse_lemma_call(m.group(1), theory)
        return Tactic(word, lemma=name, args=args,
                      at=int(m.group(2)) if m.group(2) else 1)
    raise TacticError(f"unknown tactic {word!r}")


# ---------------------------------------------------------------------------
# Scripts and rendering


def run_script(theory: TheoryFile, goal: Pattern, lines,
               collect_transcript: bool = True):
    """Apply a tactic script and close the proof.

    Lines may carry ``*`` goal bullets (presentational) and ``--`` comments.
    The first failing tactic aborts with its diagnostic and step index.
    Returns (theorem, transcript), the transcript holding one rendered
    state per applied tactic."""
    from .parser import strip_comment

    session = new_session(theory, goal)
    transcript = [render_session(session)] if collect_transcript else []
    step = 0
    for raw in lines:
        line = strip_comment(raw).strip()
        while line.startswith("*"):
            line = line[1:].strip()
        if not line:
            continue
        step += 1
        try:
            session = apply_tactic_text(session, line)
        except TacticError as exc:
            raise TacticError(f"step {step} ({line}): {exc}")
        if collect_transcript:
            transcript.append(render_session(session))
    theorem = qed(session)
    return theorem, transcript


def render_state(state: ProofState) -> str:
    """The proof-state box: hypotheses above the rule, goal below."""
    lines = ["Γ ⊢"]
    for h in state.hyps:
        lines.append(f'"{h.name}" : {print_pattern(h.pattern, unicode_ops=True)},')
    lines.append(RULE_LINE)
    lines.append(print_pattern(state.goal, unicode_ops=True))
    return "\n".join(lines)


def render_session(session: Session) -> str:
    leaves = _open_leaves(session)
    if not leaves:
        return "No more goals."
    head = render_state(session.node(leaves[0]).state)
    if len(leaves) > 1:
        head += f"\n({len(leaves)} goals)"
    return head


def state_json(session: Session) -> dict:
    """Structured proof state for the service: the meta obligations, the
    global context, the named local hypotheses and the goal, with patterns
    both folded and expanded."""
    leaves = _open_leaves(session)
    state = session.node(leaves[0]).state if leaves else None

    def pat(p: Pattern) -> dict:
        return {
            "folded": print_pattern(p, unicode_ops=True),
            "expanded": print_pattern(p, fold=False, unicode_ops=True),
        }

    return {
        "obligations": [
            {"kind": "well_formed", "target": "goal", "discharged": True},
        ],
        "theory": session.theory.name,
        "axioms": sorted(session.theory.axioms),
        "hypotheses": [
            {"name": h.name, **pat(h.pattern)} for h in (state.hyps if state else ())
        ],
        "goal": pat(state.goal) if state else None,
        "goals_open": len(leaves),
        "closed": not leaves,
        "goal_stack": [
            print_pattern(session.node(nid).state.goal, unicode_ops=True)
            for nid in leaves
        ],
        "rendering": render_session(session),
        "steps": list(session.script),
    }

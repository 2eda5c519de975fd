"""Canonical JSON proof objects.

A proof object is a flat node list with child indices (DAG sharing is
preserved) plus a pattern table: every pattern node appears once and refers
to its children by index, so payloads that share large subpatterns stay
small on disk.  Notation nodes keep their name and are resolved against the
target theory's notation environment on decode.

Encoding is canonical: sorted keys, no floats, compact separators, so byte
equality is meaningful.  Decoding always re-checks through the kernel; the
stored conclusion is verified against the recomputed one.
"""

from __future__ import annotations

import json

from .kernel import (
    AppContext, Derivation, KernelError, RULE_TAGS, TAG_RULES, Theorem, check,
)
from .printer import print_pattern
from .syntax import (
    App, BOT, Bot, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp, Mu,
    Notation, NotationDef, Pattern, Sym, BASE_NOTATIONS,
)

__all__ = ["encode_proof", "decode_proof", "ProofDecodeError", "FORMAT_VERSION",
           "PatternTable", "derivation_to_obj", "obj_to_derivation"]

FORMAT_VERSION = 1


class ProofDecodeError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{message} (at {path})")


class PatternTable:
    """Interning encoder: one table entry per distinct pattern node."""

    def __init__(self):
        self.index: dict[Pattern, int] = {}
        self.entries: list = []

    def add(self, p: Pattern) -> int:
        got = self.index.get(p)
        if got is not None:
            return got
        t = type(p)
        if t is FreeEVar:
            entry = ["evar", p.name]
        elif t is FreeSVar:
            entry = ["svar", p.name]
        elif t is BoundEVar:
            entry = ["bev", p.index]
        elif t is BoundSVar:
            entry = ["bsv", p.index]
        elif t is Sym:
            entry = ["sym", p.name]
        elif t is Bot:
            entry = ["bot"]
        elif t is App:
            entry = ["app", self.add(p.left), self.add(p.right)]
        elif t is Imp:
            entry = ["imp", self.add(p.lhs), self.add(p.rhs)]
        elif t is Exists:
            entry = ["ex", self.add(p.body)]
        elif t is Mu:
            entry = ["mu", self.add(p.body)]
        elif t is Notation:
            entry = ["nota", p.defn.name] + [self.add(a) for a in p.args]
        else:
            raise TypeError(f"cannot serialize {p!r}")
        self.entries.append(entry)
        self.index[p] = len(self.entries) - 1
        return len(self.entries) - 1


def decode_pattern_table(entries, env: dict[str, NotationDef]) -> list[Pattern]:
    if not isinstance(entries, list):
        raise ProofDecodeError("pattern table must be a list", "$.patterns")
    out: list[Pattern] = []

    def child(ref, i, path):
        if not isinstance(ref, int) or ref < 0 or ref >= i:
            raise ProofDecodeError("pattern child must reference an earlier entry", path)
        return out[ref]

    for i, entry in enumerate(entries):
        path = f"$.patterns[{i}]"
        if not isinstance(entry, list) or not entry:
            raise ProofDecodeError("bad pattern entry", path)
        kind = entry[0]
        try:
            if kind == "evar":
                out.append(FreeEVar(entry[1]))
            elif kind == "svar":
                out.append(FreeSVar(entry[1]))
            elif kind == "bev":
                out.append(BoundEVar(int(entry[1])))
            elif kind == "bsv":
                out.append(BoundSVar(int(entry[1])))
            elif kind == "sym":
                out.append(Sym(entry[1]))
            elif kind == "bot":
                out.append(BOT)
            elif kind == "app":
                out.append(App(child(entry[1], i, path), child(entry[2], i, path)))
            elif kind == "imp":
                out.append(Imp(child(entry[1], i, path), child(entry[2], i, path)))
            elif kind == "ex":
                out.append(Exists(child(entry[1], i, path)))
            elif kind == "mu":
                out.append(Mu(child(entry[1], i, path)))
            elif kind == "nota":
                d = env.get(entry[1])
                if d is None:
                    raise ProofDecodeError(f"unknown notation {entry[1]!r}", path)
                args = tuple(child(r, i, path) for r in entry[2:])
                out.append(Notation(d, args))
            else:
                raise ProofDecodeError(f"unknown pattern kind {kind!r}", path)
        except ProofDecodeError:
            raise
        except Exception as exc:
            raise ProofDecodeError(f"bad pattern entry: {exc}", path)
    return out


def _encode_payload(payload: dict, table: PatternTable) -> dict:
    out = {}
    for k, v in payload.items():
        if isinstance(v, Pattern):
            out[k] = {"kind": "pattern", "v": table.add(v)}
        elif isinstance(v, AppContext):
            out[k] = {"kind": "context",
                      "v": [{"d": d, "side": table.add(side)} for d, side in v.steps]}
        elif isinstance(v, str):
            out[k] = {"kind": "name", "v": v}
        else:
            raise TypeError(f"cannot serialize payload {k}={v!r}")
    return out


def _decode_payload(obj, patterns: list[Pattern], path) -> dict:
    if not isinstance(obj, dict):
        raise ProofDecodeError("expected a payload object", path)

    def pat(ref, where):
        if not isinstance(ref, int) or ref < 0 or ref >= len(patterns):
            raise ProofDecodeError("pattern reference out of range", where)
        return patterns[ref]

    out = {}
    for k, item in obj.items():
        where = f"{path}.{k}"
        if not isinstance(item, dict) or "kind" not in item:
            raise ProofDecodeError("bad payload entry", where)
        kind = item["kind"]
        if kind == "pattern":
            out[k] = pat(item["v"], where)
        elif kind == "context":
            steps = []
            if not isinstance(item["v"], list):
                raise ProofDecodeError("context must be a step list", where)
            for j, step in enumerate(item["v"]):
                if not isinstance(step, dict) or step.get("d") not in ("L", "R"):
                    raise ProofDecodeError("bad context step", f"{where}[{j}]")
                steps.append((step["d"], pat(step["side"], f"{where}[{j}]")))
            out[k] = AppContext(tuple(steps))
        elif kind == "name":
            if not isinstance(item["v"], str):
                raise ProofDecodeError("name payload must be a string", where)
            out[k] = item["v"]
        else:
            raise ProofDecodeError(f"unknown payload kind {kind!r}", where)
    return out


def derivation_to_obj(d: Derivation) -> dict:
    """Flat node-list and pattern-table form; children are indices."""
    table = PatternTable()
    nodes: list[dict] = []
    index: dict[int, int] = {}
    # iterative postorder so deep proofs do not hit the recursion limit
    stack: list[tuple[Derivation, bool]] = [(d, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in index:
            continue
        if not ready:
            stack.append((node, True))
            for c in reversed(node.children):
                if id(c) not in index:
                    stack.append((c, False))
            continue
        entry = {
            "rule": RULE_TAGS[node.rule],
            "children": [index[id(c)] for c in node.children],
            "payload": _encode_payload(node.payload, table),
        }
        nodes.append(entry)
        index[id(node)] = len(nodes) - 1
    return {"patterns": table.entries, "nodes": nodes, "root": index[id(d)]}


def obj_to_derivation(obj, env, path="$") -> Derivation:
    nodes = obj.get("nodes")
    root = obj.get("root")
    if not isinstance(nodes, list) or not isinstance(root, int):
        raise ProofDecodeError("proof object needs 'nodes' and 'root'", path)
    patterns = decode_pattern_table(obj.get("patterns", []), env)
    decoded: list[Derivation] = []
    for i, entry in enumerate(nodes):
        npath = f"{path}.nodes[{i}]"
        if not isinstance(entry, dict):
            raise ProofDecodeError("bad node", npath)
        tag = entry.get("rule")
        rule = TAG_RULES.get(tag)
        if rule is None:
            raise ProofDecodeError(f"unknown rule tag {tag!r}", npath)
        children = entry.get("children", [])
        if not isinstance(children, list) or any(
                not isinstance(c, int) or c < 0 or c >= i for c in children):
            raise ProofDecodeError("children must reference earlier nodes", npath)
        payload = _decode_payload(entry.get("payload", {}), patterns,
                                  npath + ".payload")
        decoded.append(Derivation(rule, tuple(decoded[c] for c in children), **payload))
    if root < 0 or root >= len(decoded):
        raise ProofDecodeError("root index out of range", path)
    return decoded[root]


def encode_proof(t: Theorem) -> bytes:
    """Canonical bytes for a theorem's proof object."""
    obj = derivation_to_obj(t.derivation)
    obj["format"] = "mlproof"
    obj["version"] = FORMAT_VERSION
    ct = PatternTable()
    obj["conclusion"] = {"patterns": ct.entries, "root": ct.add(t.conclusion)}
    obj["conclusion_text"] = print_pattern(t.conclusion)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True).encode("ascii")


def decode_proof(theory, data: bytes) -> Theorem:
    """Parse proof-object bytes and re-check every node against ``theory``.

    The stored conclusion must match the recomputed one, so edits to the
    file surface as errors.
    """
    try:
        obj = json.loads(data.decode("utf-8"))
    except Exception as exc:
        raise ProofDecodeError(f"not valid JSON: {exc}")
    if not isinstance(obj, dict) or obj.get("format") != "mlproof":
        raise ProofDecodeError("not a proof object (missing format marker)")
    if obj.get("version") != FORMAT_VERSION:
        raise ProofDecodeError(f"unsupported version {obj.get('version')!r}")
    env = dict(BASE_NOTATIONS)
    theory_env = getattr(theory, "notation_env", None)
    if callable(theory_env):
        env = theory_env()
    deriv = obj_to_derivation(obj, env)
    thm = check(theory, deriv)
    stored = obj.get("conclusion")
    if stored is not None:
        from .syntax import expand

        cpats = decode_pattern_table(stored.get("patterns", []), env)
        ref = stored.get("root")
        if not isinstance(ref, int) or ref < 0 or ref >= len(cpats):
            raise ProofDecodeError("bad stored conclusion", "$.conclusion")
        if expand(cpats[ref]) != thm.conclusion:
            raise KernelError(
                "rule-shape",
                "stored conclusion does not match the checked derivation")
    return thm

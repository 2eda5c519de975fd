"""Command-line interface.

Exit codes: 0 for success / a true answer, 1 for a false answer or
countermodel, 2 for errors.  ``--json`` switches to machine-readable
output.  The ML_BUDGET environment variable caps valuation enumeration.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import theories
from .parser import ParseError, parse_model, parse_pattern
from .printer import print_pattern
from .proofjson import ProofDecodeError, encode_proof, decode_proof
from .semantics import (
    BudgetExceededError, EvalError, Model, Valuation, entails_over,
    eval_pattern, holds, holds_detail,
)
from .kernel import KernelError
from .proofmode import TacticError, run_script
from .syntax import Signature, expand, well_formed, wf_closed_ex, wf_closed_mu, wf_positive

ERRORS = (ParseError, EvalError, KernelError, ProofDecodeError, TacticError,
          ValueError, FileNotFoundError, OSError)


def _theory(name: str | None, theory_dir: tuple[str, ...] = ()):
    if name is None:
        return theories.def_theory()
    return theories.load_theory(name, tuple(theory_dir))


def _pattern(text: str, theory, model: Model | None = None):
    sig = theory.signature
    if model is not None:
        extra = tuple(s for s in model.syminterp if not sig.is_symbol(s))
        sig = sig.merged(Signature(extra))
    return parse_pattern(text, sig, theory.notation_env())


def _model(path: str) -> Model:
    return theories.load_model(path)


def _valuation(path: str | None, model: Model) -> Valuation:
    if path is None:
        return Valuation()
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return Valuation(
        dict(raw.get("evars", {})),
        {k: frozenset(v) for k, v in raw.get("svars", {}).items()},
    )


def _emit(as_json: bool, data: dict, text: str):
    click.echo(json.dumps(data, sort_keys=True) if as_json else text)


def _fail(exc: Exception, as_json: bool):
    if as_json:
        click.echo(json.dumps({"error": str(exc)}), err=True)
    else:
        click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
def main():
    """Matching logic workbench: patterns, models, proofs, tactics."""


@main.command("check-wf")
@click.argument("pattern")
@click.option("--theory", "-t", default=None, help="Theory name or path.")
@click.option("--theory-dir", multiple=True, help="Extra theory search dirs.")
@click.option("--json", "as_json", is_flag=True)
def check_wf(pattern, theory, theory_dir, as_json):
    """Check well-formedness of PATTERN."""
    try:
        th = _theory(theory, theory_dir)
        p = _pattern(pattern, th)
        parts = {
            "positive": wf_positive(p),
            "closed_element": wf_closed_ex(p, 0),
            "closed_set": wf_closed_mu(p, 0),
        }
        ok = all(parts.values())
        _emit(as_json, {"well_formed": ok, **parts},
              f"well_formed: {ok} ({', '.join(f'{k}={v}' for k, v in parts.items())})")
        sys.exit(0 if ok else 1)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("eval")
@click.argument("pattern")
@click.option("--model", "-m", "model_path", required=True)
@click.option("--valuation", "-v", "valuation_path", default=None,
              help="JSON file: {\"evars\": {..}, \"svars\": {..}}.")
@click.option("--theory", "-t", default=None)
@click.option("--theory-dir", multiple=True)
@click.option("--json", "as_json", is_flag=True)
def eval_cmd(pattern, model_path, valuation_path, theory, theory_dir, as_json):
    """Evaluate PATTERN in a model and print its denotation."""
    try:
        th = _theory(theory, theory_dir)
        m = _model(model_path)
        p = _pattern(pattern, th, m)
        rho = _valuation(valuation_path, m)
        den = sorted(eval_pattern(m, rho, p))
        _emit(as_json, {"denotation": den},
              "{" + ", ".join(den) + "}")
        sys.exit(0)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("model-check")
@click.argument("pattern", required=False)
@click.option("--axioms", is_flag=True, help="Check the theory's axioms instead.")
@click.option("--model", "-m", "model_path", required=True)
@click.option("--theory", "-t", default=None)
@click.option("--theory-dir", multiple=True)
@click.option("--json", "as_json", is_flag=True)
def model_check(pattern, axioms, model_path, theory, theory_dir, as_json):
    """Does the model satisfy PATTERN (or the theory's axioms)?"""
    try:
        th = _theory(theory, theory_dir)
        m = _model(model_path)
        if axioms:
            ok = holds(m, th)
            _emit(as_json, {"holds": ok}, f"holds: {ok}")
        else:
            if pattern is None:
                raise ValueError("give a pattern or --axioms")
            p = _pattern(pattern, th, m)
            witness = holds_detail(m, p)
            ok = witness is None
            if ok:
                _emit(as_json, {"holds": True}, "holds: True")
            else:
                report = {
                    "holds": False,
                    "valuation": {
                        "evars": dict(sorted(witness.valuation.evars.items())),
                        "svars": {k: sorted(v)
                                  for k, v in sorted(witness.valuation.svars.items())},
                    },
                    "denotation": sorted(witness.denotation),
                }
                _emit(as_json, report,
                      f"holds: False\ncounter-valuation: {report['valuation']}\n"
                      f"denotation: {{{', '.join(report['denotation'])}}}")
        sys.exit(0 if ok else 1)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("entails")
@click.option("--models", "models_dir", required=True,
              help="Directory of .mlmodel files (the model suite).")
@click.option("--theory", "-t", default=None)
@click.option("--theory-dir", multiple=True)
@click.option("--goal", "-g", required=True)
@click.option("--json", "as_json", is_flag=True)
def entails(models_dir, theory, theory_dir, goal, as_json):
    """Suite-relative entailment: every suite model satisfying the theory
    must satisfy the goal."""
    try:
        th = _theory(theory, theory_dir)
        suite = []
        for f in sorted(Path(models_dir).glob("*.mlmodel")):
            suite.append(parse_model(f.read_text(encoding="utf-8")))
        sig = th.signature
        for m in suite:
            sig = sig.merged(Signature(tuple(
                s for s in m.syminterp if not sig.is_symbol(s))))
        p = parse_pattern(goal, sig, th.notation_env())
        result = entails_over(suite, th, p)
        rep = result.report()
        rep["models_checked"] = len(suite)
        text = f"entails: {result.ok}" + (
            "" if result.ok else f"\ncountermodel: {result.countermodel}")
        _emit(as_json, rep, text)
        sys.exit(0 if result.ok else 1)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("check-proof")
@click.argument("proof_file", type=click.Path(exists=True))
@click.option("--theory", "-t", default=None)
@click.option("--theory-dir", multiple=True)
@click.option("--json", "as_json", is_flag=True)
def check_proof(proof_file, theory, theory_dir, as_json):
    """Re-check a .mlproof file and print the established judgment."""
    try:
        th = _theory(theory, theory_dir)
        thm = decode_proof(th, Path(proof_file).read_bytes())
        rendered = print_pattern(thm.conclusion, unicode_ops=True)
        _emit(as_json, {"checked": True, "conclusion": rendered},
              f"⊢ {rendered}")
        sys.exit(0)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("prove")
@click.argument("script", type=click.Path(exists=True))
@click.option("--theory", "-t", default=None)
@click.option("--theory-dir", multiple=True)
@click.option("--goal", "-g", required=True)
@click.option("--export", "export_path", default=None,
              help="Write the checked proof object here.")
@click.option("--transcript", "transcript_path", default=None,
              help="Write the per-step state transcript (JSON) here.")
@click.option("--json", "as_json", is_flag=True)
def prove(script, theory, theory_dir, goal, export_path, transcript_path, as_json):
    """Run a .mlp tactic script against a goal and check the result."""
    try:
        th = _theory(theory, theory_dir)
        p = _pattern(goal, th)
        lines = Path(script).read_text(encoding="utf-8").splitlines()
        thm, transcript = run_script(th, p, lines)
        if export_path:
            Path(export_path).write_bytes(encode_proof(thm))
        if transcript_path:
            Path(transcript_path).write_text(
                json.dumps(transcript, indent=1), encoding="utf-8")
        rendered = print_pattern(thm.conclusion, unicode_ops=True)
        _emit(as_json, {"proved": True, "conclusion": rendered, "steps": len(transcript) - 1},
              f"⊢ {rendered}")
        sys.exit(0)
    except ERRORS as exc:
        _fail(exc, as_json)


@main.command("serve")
@click.option("--port", "-p", default=7071, type=int)
@click.option("--host", default="127.0.0.1", help="Loopback by default.")
@click.option("--theory-dir", multiple=True)
@click.option("--snapshot-dir", default=None,
              help="Persist replayable session snapshots here.")
@click.option("--ui-dir", default=None,
              help="Serve the built web client from this directory.")
def serve(port, host, theory_dir, snapshot_dir, ui_dir):
    """Run the local proof-session service (JSON over HTTP)."""
    import uvicorn

    from .service import create_app

    app = create_app(theory_dirs=tuple(theory_dir), snapshot_dir=snapshot_dir,
                     static_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

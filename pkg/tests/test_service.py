import json

import pytest
from fastapi.testclient import TestClient

from matchlog.parser import parse_pattern
from matchlog.proofjson import decode_proof, encode_proof
from matchlog.proofmode import apply_tactic_text, new_session, state_json
from matchlog.service import create_app
from matchlog import theories

T = theories.def_theory()


@pytest.fixture
def client():
    return TestClient(create_app())


def make(client, goal="x ---> x", theory="DEF"):
    resp = client.post("/sessions", json={"theory": theory, "goal": goal})
    assert resp.status_code == 201
    return resp.json()["id"], resp.json()["state"]


def test_list_theories(client):
    assert "DEF" in client.get("/theories").json()["theories"]


def test_create_and_state(client):
    sid, state = make(client)
    assert state["goal"]["folded"] == "x ---> x"
    got = client.get(f"/sessions/{sid}/state").json()["state"]
    assert got == state


def test_create_rejects_bad_goal(client):
    assert client.post("/sessions", json={"theory": "DEF", "goal": "b0"}).status_code == 422
    assert client.post("/sessions", json={"theory": "DEF", "goal": "((("}).status_code == 422
    assert client.post("/sessions", json={"theory": "NOPE", "goal": "x"}).status_code == 422


def test_unknown_session_404(client):
    assert client.get("/sessions/zz/state").status_code == 404
    assert client.post("/sessions/zz/tactic", json={"tactic": "mlTauto"}).status_code == 404
    assert client.post("/sessions/zz/undo").status_code == 404
    assert client.get("/sessions/zz/proof").status_code == 404


def test_tactic_flow_and_equivalence_with_inprocess(client):
    """The service is a thin layer: each response equals the in-process
    proof-mode state for the same tactics."""
    sid, _ = make(client, goal="x ---> y ---> x")
    session = new_session(T, parse_pattern("x ---> y ---> x", T.signature,
                                           T.notation_env()))
    for tac in ['mlIntro "H0"', 'mlIntro "H1"', 'mlExact "H0"']:
        resp = client.post(f"/sessions/{sid}/tactic", json={"tactic": tac})
        assert resp.status_code == 200
        session = apply_tactic_text(session, tac)
        assert resp.json()["state"] == state_json(session)


def test_tactic_error_422_state_unchanged(client):
    sid, state = make(client)
    resp = client.post(f"/sessions/{sid}/tactic", json={"tactic": 'mlExact "zz"'})
    assert resp.status_code == 422
    assert "error" in resp.json()
    assert client.get(f"/sessions/{sid}/state").json()["state"] == state


def test_undo_endpoint(client):
    sid, state = make(client)
    client.post(f"/sessions/{sid}/tactic", json={"tactic": 'mlIntro "H0"'})
    resp = client.post(f"/sessions/{sid}/undo")
    assert resp.status_code == 200
    assert resp.json()["state"] == state
    assert client.post(f"/sessions/{sid}/undo").status_code == 422


def test_proof_export_matches_cli_prove(client, tmp_path):
    from click.testing import CliRunner

    from matchlog.cli import main

    sid, _ = make(client)
    for tac in ['mlIntro "H0"', 'mlExact "H0"']:
        client.post(f"/sessions/{sid}/tactic", json={"tactic": tac})
    resp = client.get(f"/sessions/{sid}/proof")
    assert resp.status_code == 200
    thm = decode_proof(T, resp.content)

    script = tmp_path / "s.mlp"
    script.write_text('mlIntro "H0"\nmlExact "H0"\n')
    out_path = tmp_path / "out.mlproof"
    CliRunner().invoke(main, ["prove", str(script), "--goal", "x ---> x",
                              "--export", str(out_path)])
    assert out_path.read_bytes() == resp.content


def test_proof_export_open_goals_422(client):
    sid, _ = make(client)
    assert client.get(f"/sessions/{sid}/proof").status_code == 422


def test_snapshot_replayable(tmp_path):
    client = TestClient(create_app(snapshot_dir=str(tmp_path)))
    sid, _ = make(client)
    client.post(f"/sessions/{sid}/tactic", json={"tactic": 'mlIntro "H0"'})
    client.post(f"/sessions/{sid}/tactic", json={"tactic": 'mlExact "H0"'})
    snap = json.loads((tmp_path / f"{sid}.json").read_text())
    assert snap["goal"] == "x ---> x"
    from matchlog.proofmode import run_script

    thm, _ = run_script(theories.load_theory(snap["theory"]),
                        parse_pattern(snap["goal"], T.signature, T.notation_env()),
                        snap["script"])
    assert thm.conclusion == parse_pattern("x ---> x")


def test_static_ui_serving(tmp_path):
    (tmp_path / "index.html").write_text("<html>ui</html>")
    (tmp_path / "main.js").write_text("console.log(1)")
    client = TestClient(create_app(static_dir=str(tmp_path)))
    assert client.get("/").text == "<html>ui</html>"
    js = client.get("/ui/main.js")
    assert js.status_code == 200
    assert js.headers["content-type"].startswith("text/javascript")
    assert client.get("/ui/nope.js").status_code == 404
    assert client.get("/ui/.hidden.js").status_code == 404

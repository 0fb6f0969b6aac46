import json

import pytest
from starlette.testclient import TestClient

from vlt.server import create_app
from vlt.session import SessionStore

SVG_A = """<svg xmlns="http://www.w3.org/2000/svg" width="100" height="100">
<rect id="a1" x="10" y="10" width="20" height="20" fill="red"/>
<rect id="a2" x="10" y="40" width="20" height="20" fill="blue"/>
</svg>"""
SVG_B = """<svg xmlns="http://www.w3.org/2000/svg" width="100" height="100">
<rect id="b1" x="60" y="10" width="20" height="20" fill="red"/>
<rect id="b2" x="60" y="40" width="20" height="20" fill="blue"/>
</svg>"""


@pytest.fixture()
def client(tmp_path):
    app = create_app(store=SessionStore(tmp_path))
    return TestClient(app)


def make_session(client, sid="s1", a=SVG_A, b=SVG_B):
    return client.post(
        "/sessions",
        files={"a": ("a.svg", a.encode(), "image/svg+xml"), "b": ("b.svg", b.encode(), "image/svg+xml")},
        data={"sessionId": sid},
    )


def test_create_and_get_session(client):
    r = make_session(client)
    assert r.status_code == 200
    state = r.json()
    assert state["id"] == "s1"
    assert len(state["a"]["elements"]) == 2
    assert state["aStar"] == state["a"]
    assert state["mapping"]["pairs"]
    assert state["rulesA"]["rules"]
    assert client.get("/sessions/s1").json()["id"] == "s1"


def test_malformed_input_names_design(client):
    r = make_session(client, a="<svg><broken")
    assert r.status_code == 400
    body = r.json()
    assert body["error"] == "DesignInputError"
    assert "design A" in body["detail"]


def test_unknown_session_is_404(client):
    assert client.get("/sessions/ghost").status_code == 404


def test_rules_endpoint_filters_by_selection(client):
    make_session(client)
    full = client.get("/sessions/s1/rules").json()
    assert full["rules"]
    none = client.get("/sessions/s1/rules", params={"selection": "zzz"}).json()
    assert none["rules"] == []
    hit = client.get("/sessions/s1/rules", params={"selection": "a1"}).json()
    assert all("a1" in r["members"] for r in hit["rules"])
    src = client.get("/sessions/s1/rules", params={"canvas": "source"}).json()
    assert any("b1" in r["members"] for r in src["rules"])


def test_command_roundtrip_and_changed_list(client):
    make_session(client)
    r = client.post("/sessions/s1/commands", json={"type": "global-copy"})
    assert r.status_code == 200
    body = r.json()
    assert set(body["changed"]) == {"a1", "a2"}
    moved = {e["id"]: e["geometry"] for e in body["state"]["aStar"]["elements"]}
    assert moved["a1"]["x"] == 60


def test_infeasible_command_is_409(client):
    make_session(client)
    client.post("/sessions/s1/commands", json={"type": "set-locks", "id": "a1", "properties": ["x"]})
    r = client.post(
        "/sessions/s1/commands",
        json={"type": "set-geometry", "id": "a1", "geometry": {"x": 99, "y": 10, "z": 0, "w": 20, "h": 20}},
    )
    assert r.status_code == 409
    assert r.json()["error"] == "LockedPropertyViolation"


def test_unknown_command_is_400(client):
    make_session(client)
    assert client.post("/sessions/s1/commands", json={"type": "zap"}).status_code == 400


def test_override_endpoint(client):
    make_session(client)
    r = client.post("/sessions/s1/match/override", json={"a": "a1", "b": "b2"})
    pairs = {p["a"]: p for p in r.json()["state"]["mapping"]["pairs"]}
    assert pairs["a1"]["b"] == "b2" and pairs["a1"]["overridden"]


def test_optimize_endpoint_and_trace(client):
    make_session(client)
    client.post(
        "/sessions/s1/commands",
        json={"type": "set-geometry", "id": "a2", "geometry": {"x": 12, "y": 40, "z": 1, "w": 20, "h": 20}},
    )
    r = client.post("/sessions/s1/optimize", json={"budget": 100, "seed": 5})
    assert r.status_code == 200
    trace = r.json()["trace"]
    totals = [t["total"] for t in trace]
    assert totals == sorted(totals)
    csv = client.get("/sessions/s1/trace.csv")
    assert csv.status_code == 200
    assert csv.text.splitlines()[0] == "iteration,total,r-rule,r-off,r-con"


def test_undo_endpoint(client):
    make_session(client)
    before = client.get("/sessions/s1").json()
    client.post("/sessions/s1/commands", json={"type": "global-copy"})
    after = client.post("/sessions/s1/undo", json={}).json()
    assert after["state"] == before


def test_export_endpoint(client):
    make_session(client)
    r = client.get("/sessions/s1/export.svg")
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("image/svg+xml")
    assert b"<svg" in r.content
    assert client.get("/sessions/s1/export.svg").content == r.content


def test_cors_headers_for_browser_ui(client):
    make_session(client)
    r = client.get("/sessions/s1", headers={"origin": "http://localhost:8000"})
    assert r.headers.get("access-control-allow-origin") == "*"
    pre = client.options(
        "/sessions/s1/commands",
        headers={
            "origin": "http://localhost:8000",
            "access-control-request-method": "POST",
        },
    )
    assert pre.status_code == 200


def test_persistence_across_app_restart(tmp_path):
    store = SessionStore(tmp_path)
    with TestClient(create_app(store=store)) as client:
        make_session(client)
        client.post("/sessions/s1/commands", json={"type": "global-copy"})
        exported = client.get("/sessions/s1/export.svg").content
    with TestClient(create_app(store=SessionStore(tmp_path))) as fresh:
        state = fresh.get("/sessions/s1").json()
        assert state["aStar"]["elements"][0]["geometry"]["x"] == 60
        assert fresh.get("/sessions/s1/export.svg").content == exported

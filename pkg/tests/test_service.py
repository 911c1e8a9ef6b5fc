"""HTTP layer checks through the in-process test client."""

import json
from importlib import resources

from fastapi.testclient import TestClient
from jsonschema import validate

from girthforge.service import app

client = TestClient(app)


def test_health():
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json()["status"] == "ok"


def test_design_returns_report_and_alist():
    res = client.post("/design", json={
        "m": 15, "n": 30, "J": 3, "K": 6, "T": 6,
        "mode": "BC4", "time_limit": 60.0,
    })
    assert res.status_code == 200
    payload = res.json()
    assert payload["status"] == "optimal"
    assert payload["z"] == 0
    alist = payload.pop("alist")
    assert alist is not None
    schema = json.loads(
        resources.files("girthforge.schemas")
        .joinpath("report.schema.json").read_text()
    )
    validate(payload, schema)
    res2 = client.post("/girth", json={"alist": alist})
    assert res2.status_code == 200
    assert res2.json()["girth"] >= 6


def test_design_rejects_unknown_mode():
    res = client.post("/design", json={
        "m": 10, "n": 20, "J": 3, "K": 6, "T": 6, "mode": "BC9",
    })
    assert res.status_code == 400


def test_design_rejects_odd_target():
    res = client.post("/design", json={
        "m": 10, "n": 20, "J": 3, "K": 6, "T": 7,
    })
    assert res.status_code == 400


def test_design_validates_payload_shape():
    res = client.post("/design", json={"m": 10, "n": 20})
    assert res.status_code == 422


def test_girth_rejects_malformed_alist():
    res = client.post("/girth", json={"alist": "not an alist"})
    assert res.status_code == 400


def test_bounds_known_values():
    for T, want in ((6, 20), (8, 70), (10, 170)):
        res = client.get("/bounds", params={"J": 3, "K": 6, "girth": T})
        assert res.status_code == 200
        body = res.json()
        assert body["min_n"] == want
        assert body["n_equals_2m"] is True


def test_bounds_rejects_bad_degrees():
    res = client.get("/bounds", params={"J": 6, "K": 6, "girth": 6})
    assert res.status_code == 400
    res = client.get("/bounds", params={"J": 3, "K": 6, "girth": 7})
    assert res.status_code == 400

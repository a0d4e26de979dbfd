"""HTTP layer: routes, validation codes, artifact round-trip."""

import json

import pytest
from fastapi.testclient import TestClient

from dickesim import __version__
from dickesim.service import app

from test_runs import base_doc


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def small_request() -> dict:
    doc = base_doc()
    doc["initial_conditions"] = doc["initial_conditions"][:1]
    return {"config": doc, "threads": 1}


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


def test_entropy_roundtrip(client):
    r = client.post("/entropy", json=small_request())
    assert r.status_code == 200
    body = r.json()
    assert body["kind"] == "entropy"
    names = [f["name"] for f in body["files"]]
    assert names == ["entropy_a.csv"]
    assert body["files"][0]["content"].startswith("t,delta_a\n")
    assert body["manifest"]["kind"] == "entropy"
    assert {f["name"] for f in body["manifest"]["files"]} == set(names)


def test_all_run_routes_exist(client):
    req = small_request()
    req["config"]["poincare_crossings"] = 5
    req["config"]["snapshots"] = {"policy": "fixed-times", "times": [0.0]}
    for route in ("/spectrum", "/poincare", "/wigner"):
        r = client.post(route, json=req)
        assert r.status_code == 200, (route, r.text)
        assert r.json()["kind"] == route.strip("/")


def test_invalid_config_is_422(client):
    req = small_request()
    req["config"]["model"]["J"] = 0.4
    r = client.post("/entropy", json=req)
    assert r.status_code == 422


def test_unknown_request_field_is_422(client):
    req = small_request()
    req["verbose"] = True
    assert client.post("/entropy", json=req).status_code == 422


def test_infeasible_energy_is_422_with_detail(client):
    req = small_request()
    req["config"]["energy"] = -50.0
    r = client.post("/entropy", json=req)
    assert r.status_code == 422
    assert "no positive root" in json.dumps(r.json())


def test_unknown_route_is_404(client):
    assert client.post("/nonsense", json={}).status_code == 404
    assert client.get("/entropy").status_code == 405

"""Tests for the HTTP service endpoints."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from symindex import __version__
from symindex.returnmap import random_return_map
from symindex.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def rotation_blocks_doc(theta):
    return {
        "n": 1,
        "A": [[np.cos(theta)]],
        "B": [[-np.sin(theta)]],
        "C": [[np.sin(theta)]],
        "D": [[np.cos(theta)]],
    }


class TestHealth:
    def test_health(self, client):
        doc = client.get("/v1/health").json()
        assert doc == {"status": "ok", "version": __version__}


class TestIndexEndpoint:
    def test_rotation_iterates(self, client):
        resp = client.post(
            "/v1/index",
            json={"blocks": rotation_blocks_doc(np.pi / 3), "k_max": 4},
        )
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["v"] == 1
        assert doc["version"] == __version__
        by_k = {e["k"]: e for e in doc["results"]}
        assert by_k[1]["s"] == {"doubled": 1}
        assert by_k[2]["s"] == {"doubled": 1}
        assert by_k[3]["s"] is None
        assert by_k[3]["error"] == "IterateDegenerate"
        assert by_k[3]["nondegenerate"] is True
        assert by_k[4]["s"] == {"doubled": -1}

    def test_phi_form_and_both_methods(self, client):
        blocks = random_return_map(2, rng_seed=31)
        resp = client.post(
            "/v1/index",
            json={
                "blocks": {"n": 2, "Phi": blocks.assemble().tolist()},
                "k_max": 1,
                "method": "both",
            },
        )
        assert resp.status_code == 200
        results = resp.json()["results"]
        values = {e["method"]: e["s"]["doubled"] for e in results if e["s"]}
        assert values["formula"] == values["qform"]

    def test_invalid_blocks_rejected(self, client):
        resp = client.post(
            "/v1/index",
            json={"blocks": {"n": 1, "A": [[2.0]], "B": [[1.0]], "C": [[1.0]], "D": [[2.0]]}},
        )
        assert resp.status_code == 422
        assert "identities" in resp.json()["detail"]

    def test_missing_blocks_rejected(self, client):
        resp = client.post("/v1/index", json={"blocks": {"n": 1, "A": [[1.0]]}})
        assert resp.status_code == 422


class TestChebEndpoint:
    def test_table_values(self, client):
        resp = client.post("/v1/cheb", json={"k": 2, "points": 5})
        rows = resp.json()["rows"]
        assert len(rows) == 5
        for row in rows:
            assert row["t"] == pytest.approx(2 * row["x"] ** 2 - 1, abs=1e-12)
            assert row["u"] == pytest.approx(4 * row["x"] ** 2 - 1, abs=1e-12)

    def test_bad_range_rejected(self, client):
        resp = client.post("/v1/cheb", json={"k": 2, "x_min": 1.0, "x_max": -1.0})
        assert resp.status_code == 422


class TestVerifyEndpoint:
    def test_small_run_agrees(self, client):
        req = {"n": 1, "trials": 4, "seed": 3, "k_max": 2}
        doc = client.post("/v1/verify", json=req).json()
        assert doc["ok"] is True
        assert doc["disagreements"] == []
        assert doc["checked"] > 0
        assert doc["agreements"] == doc["checked"]
        assert doc["seed"] == 3

    def test_deterministic(self, client):
        req = {"n": 1, "trials": 3, "seed": 9, "k_max": 2, "methods": ["formula", "qform"]}
        first = client.post("/v1/verify", json=req).content
        second = client.post("/v1/verify", json=req).content
        assert first == second


class TestOrbitEndpoint:
    def test_oscillator(self, client):
        w2 = float(np.sqrt(2.0))
        resp = client.post(
            "/v1/orbit",
            json={
                "system": f"oscillator:1.0:{w2}",
                "seed_point": [1.0, 0.0, 0.0, 0.0],
                "k_max": 2,
            },
        )
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["orbit"]["eta"] == pytest.approx(2 * np.pi, abs=1e-8)
        assert doc["blocks"]["A"][0][0] == pytest.approx(np.cos(2 * np.pi * w2), abs=1e-7)
        assert max(doc["block_residuals"].values()) <= 1e-6

    def test_henon_heiles_default_seed(self, client):
        resp = client.post(
            "/v1/orbit",
            json={"system": "henon-heiles:0.0833333333333333", "seed_point": []},
        )
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["orbit"]["residual"] <= 1e-8

    def test_unknown_system(self, client):
        resp = client.post(
            "/v1/orbit", json={"system": "pendulum", "seed_point": [0, 0, 0, 0]}
        )
        assert resp.status_code == 422

    def test_off_fixed_set_seed(self, client):
        resp = client.post(
            "/v1/orbit",
            json={"system": "oscillator:1.0:2.0", "seed_point": [1.0, 0.5, 0.0, 0.0]},
        )
        assert resp.status_code == 422
        assert "fixed set" in resp.json()["detail"]

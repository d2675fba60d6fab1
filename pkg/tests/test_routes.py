"""API endpoint tests"""
import logging

import pytest
from fastapi.testclient import TestClient


LEFT = {"p": 1.0, "v": [0.2, -0.1], "H": [0.9, 0.4], "S": -0.3}
RIGHT = {"p": 1.0, "v": [0.2, -0.1], "H": [0.9, 0.4], "S": 0.2}
FRONT = {"dtphi": 0.2, "d2phi": 0.0}


@pytest.fixture
def client():
    """Test client"""
    from main import app
    return TestClient(app)


def test_root(client):
    """Test root endpoint"""
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["service"] == "RMHD Contact API"


def test_health(client):
    """Health reports the active parameters"""
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["schema_version"] == 1
    assert data["params"]["gamma"] > 1.0


class TestStateEndpoints:
    """/api/state/*"""

    def test_admissible_state(self, client):
        response = client.post("/api/state/check", json={"p": 1.0, "v": [0.3, 0.1], "H": [1.0, 0.5], "S": 0.0})
        assert response.status_code == 200
        data = response.json()
        assert data["admissible"] is True
        assert data["failures"] == []
        assert set(data["checks"]) >= {"(9')", "(5.1)", "(5.1'')", "(9)", "gamma<=2"}
        print("✅ admissible state accepted")

    def test_negative_pressure(self, client):
        """p < 0 fails (9') and leaves the causality margin undefined"""
        response = client.post("/api/state/check", json={"p": -1.0, "v": [0.0, 0.0], "H": [1.0, 0.0], "S": 0.0})
        assert response.status_code == 200
        data = response.json()
        assert data["admissible"] is False
        assert data["checks"]["(9')"]["passed"] is False
        assert data["checks"]["(9)"]["margin"] is None
        print(f"✅ failures: {data['failures']}")

    def test_unknown_key_rejected(self, client):
        response = client.post("/api/state/check", json={"p": 1.0, "pressure": 1.0})
        assert response.status_code == 422

    def test_speeds(self, client):
        response = client.post(
            "/api/state/speeds",
            json={"state": {"p": 1.0, "v": [0.0, 0.0], "H": [1.0, 0.0], "S": 0.0}, "N": [1.0, 0.0]},
        )
        assert response.status_code == 200
        data = response.json()
        assert len(data["eigenvalues"]) >= 6
        assert data["margin"] > 0.0
        assert all(abs(x) < 1.0 for x in data["eigenvalues"])
        print(f"✅ speeds {data['speeds']}")

    def test_speeds_bad_normal(self, client):
        response = client.post("/api/state/speeds", json={"state": {"p": 1.0}, "N": [1.0, 0.0, 0.0]})
        assert response.status_code == 422

    def test_superluminal_state(self, client):
        """|v| >= 1 is a domain error naming the condition"""
        response = client.post(
            "/api/state/speeds",
            json={"state": {"p": 1.0, "v": [0.9, 0.6], "H": [1.0, 0.0], "S": 0.0}},
        )
        assert response.status_code == 422
        assert response.json()["detail"]["condition"] == "|v|<1"

    def test_rejection_logged_with_condition(self, client, caplog):
        """The violated condition travels in a header and into the access log"""
        caplog.set_level(logging.INFO, logger="main")
        response = client.post(
            "/api/state/speeds",
            json={"state": {"p": 1.0, "v": [0.9, 0.6], "H": [1.0, 0.0], "S": 0.0}},
        )
        assert response.headers["X-Contact-Condition"] == "|v|<1"
        assert "X-Request-ID" in response.headers
        warnings = [r.getMessage() for r in caplog.records if r.levelno == logging.WARNING]
        assert any("violates |v|<1" in m for m in warnings), warnings
        print("✅ rejected request logged with its condition")


class TestJumpEndpoints:
    """/api/jumps/*"""

    def test_classify_contact(self, client):
        response = client.post("/api/jumps/classify", json={"left": LEFT, "right": RIGHT, "front": FRONT})
        assert response.status_code == 200
        data = response.json()
        assert data["kind"] == "Contact"
        assert data["mass_flux"] == pytest.approx(0.0, abs=1e-12)
        assert set(data["residuals"]) == {"r10", "r11", "r12_1", "r12_2", "r13", "r14_1", "r14_2", "r15"}
        print("✅ contact classified")

    def test_identical_states(self, client):
        response = client.post("/api/jumps/classify", json={"left": LEFT, "right": LEFT, "front": FRONT})
        assert response.status_code == 200
        assert response.json()["kind"] == "NotADiscontinuity"

    def test_reduction(self, client):
        response = client.post("/api/jumps/reduction", json={"left": LEFT, "right": RIGHT, "front": FRONT})
        assert response.status_code == 200
        data = response.json()
        assert data["passed"] is True
        assert data["failed_steps"] == []
        assert data["first_failure"] is None
        assert set(data["equations"]) == set(data["steps"])
        print(f"✅ reduction steps {list(data['steps'])}")

    def test_reduction_pressure_jump(self, client):
        """A pressure jump breaks the chain at (11)"""
        right = dict(RIGHT, p=1.001)
        response = client.post("/api/jumps/reduction", json={"left": LEFT, "right": right, "front": FRONT})
        assert response.status_code == 200
        data = response.json()
        assert data["passed"] is False
        assert data["first_failure"] == "(11) [p] = 0"
        assert data["steps"]["(11) [p] = 0"] == pytest.approx(1e-3, rel=1e-6)


class TestInterfaceEndpoints:
    """/api/interface/*"""

    def test_cutoff(self, client):
        response = client.post("/api/interface/cutoff", json={"s": [0.0, 3.0, 6.0], "kind": "quintic"})
        assert response.status_code == 200
        data = response.json()
        assert data["chi"][0] == 1.0
        assert data["chi"][1] == pytest.approx(0.5)
        assert data["chi"][2] == 0.0
        assert data["max_slope"] < 0.5

    def test_unknown_cutoff(self, client):
        response = client.post("/api/interface/cutoff", json={"s": [0.0], "kind": "gaussian"})
        assert response.status_code == 422

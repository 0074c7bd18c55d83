import uuid
from pathlib import Path
from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from src.main import app
from src.services.analysis_service import AnalysisService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def client():
    """Test client for FastAPI app."""
    return TestClient(app, headers={"x-test-id": str(uuid.uuid4())})


def spec_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


class TestCheckEndpoint:
    def test_reach_free_sentence(self, client):
        """Test a sentence decided by automata."""
        payload = {"spec": spec_text("cycle.cps"), "formula": "(exists x (exists y (edge Cl x y)))"}

        with patch("src.api.endpoint.check.get_services", return_value=AnalysisService()):
            response = client.post("/api/check", json=payload)

        assert response.status_code == 200
        data = response.json()
        assert data["value"] is True
        assert data["bound"] is None

    def test_bounded_sentence(self, client):
        """Test a sentence with reachability atoms under a bound."""
        payload = {"spec": spec_text("chain3.cps"), "formula": "(exists x (exists y (reach x y)))", "bound": 6}

        with patch("src.api.endpoint.check.get_services", return_value=AnalysisService()):
            response = client.post("/api/check", json=payload)

        assert response.status_code == 200
        data = response.json()
        assert data["value"] is True
        assert data["exactness"] == "bounded"
        assert data["conclusive"] is True
        assert data["bound"] == 6

    def test_npt_sentence(self, client):
        """Test a sentence on the nested pushdown tree."""
        payload = {"spec": spec_text("npt_example.cps"), "formula": "(exists x (jump x x))", "npt": True}

        with patch("src.api.endpoint.check.get_services", return_value=AnalysisService()):
            response = client.post("/api/check", json=payload)

        assert response.status_code == 200
        assert response.json()["value"] is False

    def test_syntax_error(self, client):
        """Test a malformed formula is a bad request."""
        payload = {"spec": spec_text("cycle.cps"), "formula": "(exists x"}

        with patch("src.api.endpoint.check.get_services", return_value=AnalysisService()):
            response = client.post("/api/check", json=payload)

        assert response.status_code == 400
        assert "position" in response.json()["detail"]

    def test_missing_bound(self, client):
        """Test reachability atoms without a bound are a bad request."""
        payload = {"spec": spec_text("chain3.cps"), "formula": "(exists x (reach x x))"}

        with patch("src.api.endpoint.check.get_services", return_value=AnalysisService()):
            response = client.post("/api/check", json=payload)

        assert response.status_code == 400

    def test_blank_formula(self, client):
        """Test request validation of blank formulas."""
        payload = {"spec": spec_text("cycle.cps"), "formula": "   "}
        response = client.post("/api/check", json=payload)
        assert response.status_code == 422

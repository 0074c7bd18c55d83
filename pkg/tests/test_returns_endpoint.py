import uuid
from pathlib import Path
from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from src.main import app
from src.services.analysis_service import AnalysisService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SUBRETURNS_STACK = "[⊥ (b,2,0) (b,2,0)]:[⊥ (b,2,1) a]"


@pytest.fixture
def client():
    """Test client for FastAPI app."""
    return TestClient(app, headers={"x-test-id": str(uuid.uuid4())})


@pytest.fixture
def subreturns_text():
    return (FIXTURES / "subreturns.cps").read_text(encoding="utf-8")


class TestReturnsEndpoint:
    def test_count_returns(self, client, subreturns_text):
        """Test counting returns up to a threshold."""
        payload = {"spec": subreturns_text, "stack": SUBRETURNS_STACK, "threshold": 10}

        with patch("src.api.endpoint.returns.get_services", return_value=AnalysisService()):
            response = client.post("/api/returns", json=payload)

        assert response.status_code == 200
        data = response.json()
        assert data["kind"] == "return"
        assert data["threshold"] == 10
        assert sum(n for p, _, n in data["table"] if p == "q0") == 6

    def test_count_loops(self, client):
        """Test counting loops of a two-word stack."""
        payload = {
            "spec": (FIXTURES / "cycle.cps").read_text(encoding="utf-8"),
            "stack": "[⊥]:[⊥]",
            "threshold": 2,
            "kind": "high_loop",
        }

        with patch("src.api.endpoint.returns.get_services", return_value=AnalysisService()):
            response = client.post("/api/returns", json=payload)

        assert response.status_code == 200
        assert response.json()["kind"] == "high_loop"

    def test_unknown_kind(self, client, subreturns_text):
        """Test the kind is validated."""
        payload = {"spec": subreturns_text, "stack": "[⊥]", "kind": "sideways"}
        response = client.post("/api/returns", json=payload)
        assert response.status_code == 422

    def test_width_one_stack(self, client, subreturns_text):
        """Test returns of a single-word stack are a bad request."""
        payload = {"spec": subreturns_text, "stack": "[⊥ a]"}

        with patch("src.api.endpoint.returns.get_services", return_value=AnalysisService()):
            response = client.post("/api/returns", json=payload)

        assert response.status_code == 400

    def test_invalid_stack(self, client, subreturns_text):
        """Test a stack with an out-of-range link is a bad request."""
        payload = {"spec": subreturns_text, "stack": "[⊥ (a,2,5)]:[⊥]"}

        with patch("src.api.endpoint.returns.get_services", return_value=AnalysisService()):
            response = client.post("/api/returns", json=payload)

        assert response.status_code == 400

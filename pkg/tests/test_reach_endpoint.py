import uuid
from pathlib import Path
from unittest.mock import Mock, patch

import pytest
from fastapi.testclient import TestClient

from src.main import app
from src.pushdown.loader import load_spec
from src.services.analysis_service import AnalysisService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def client():
    """Test client for FastAPI app."""
    return TestClient(app, headers={"x-test-id": str(uuid.uuid4())})


@pytest.fixture
def cycle_text():
    return (FIXTURES / "cycle.cps").read_text(encoding="utf-8")


def reach_payload(spec, target_state, target_stack):
    return {
        "spec": spec,
        "source": {"state": "0", "stack": "[⊥]"},
        "target": {"state": target_state, "stack": target_stack},
    }


class TestReachEndpoint:
    def test_reachable(self, client, cycle_text):
        """Test a target reached by clone, push and pop."""
        with patch("src.api.endpoint.reach.get_services", return_value=AnalysisService()):
            response = client.post("/api/reach", json=reach_payload(cycle_text, "2", "[⊥]:[⊥]"))

        assert response.status_code == 200
        assert response.json()["reachable"] is True

    def test_unreachable(self, client, cycle_text):
        """Test a target no run reaches."""
        with patch("src.api.endpoint.reach.get_services", return_value=AnalysisService()):
            response = client.post("/api/reach", json=reach_payload(cycle_text, "1", "[⊥]"))

        assert response.status_code == 200
        assert response.json()["reachable"] is False

    def test_calls_service(self, client, cycle_text):
        """Test the parsed configurations are handed to the service."""
        mock_service = Mock(spec=AnalysisService)
        mock_service.load.return_value = load_spec(FIXTURES / "cycle.cps")
        mock_service.configuration.side_effect = AnalysisService.configuration
        mock_service.reach.return_value = True

        with patch("src.api.endpoint.reach.get_services", return_value=mock_service):
            response = client.post("/api/reach", json=reach_payload(cycle_text, "2", "[⊥]:[⊥]"))

        assert response.status_code == 200
        mock_service.load.assert_called_once_with(cycle_text)
        mock_service.reach.assert_called_once()

    def test_missing_target(self, client, cycle_text):
        """Test request validation of the target."""
        payload = {"spec": cycle_text, "source": {"state": "0", "stack": "[⊥]"}}
        response = client.post("/api/reach", json=payload)
        assert response.status_code == 422

    def test_malformed_stack(self, client, cycle_text):
        """Test an unparsable stack is a bad request."""
        with patch("src.api.endpoint.reach.get_services", return_value=AnalysisService()):
            response = client.post("/api/reach", json=reach_payload(cycle_text, "2", "[⊥ (a,2"))

        assert response.status_code == 400

"""
Tests for FastAPI endpoints.
"""
import pytest
from unittest.mock import patch


class TestPingEndpoint:
    """Tests for the health check endpoint."""

    def test_ping_returns_pong(self, app_client):
        """Test that /ping returns pong message."""
        response = app_client.get("/ping")

        assert response.status_code == 200
        assert response.json() == {"message": "pong"}


class TestTypecheckEndpoint:
    """Tests for the /typecheck endpoint."""

    def test_returns_principal_type(self, app_client):
        response = app_client.post("/typecheck", json={"source": "(fg (ctx (x bool@H)) (if x true false))"})

        assert response.status_code == 200
        assert response.json() == {"language": "fg", "type": "bool@H"}

    def test_lattice_override(self, app_client):
        response = app_client.post(
            "/typecheck",
            json={"source": "(fg (ctx (x bool@{b})) x)", "lattice": "(powerset a b)"},
        )

        assert response.status_code == 200
        assert response.json()["type"] == "bool@{b}"

    def test_type_error_returns_422_with_rule(self, app_client):
        """Test that a rejected program reports the failed rule."""
        response = app_client.post("/typecheck", json={"source": "(cg (unlabel true))"})

        assert response.status_code == 422
        assert response.json()["detail"]["rule"] == "CG-unlabel"

    def test_parse_error_returns_400(self, app_client):
        response = app_client.post("/typecheck", json={"source": "(fg (app true"})

        assert response.status_code == 400

    def test_empty_source_rejected(self, app_client):
        response = app_client.post("/typecheck", json={"source": "   "})

        assert response.status_code == 422

    def test_oversized_source_rejected(self, app_client):
        with patch("app.api.app.AppConfig.MAX_SOURCE_CHARS", 10):
            response = app_client.post("/typecheck", json={"source": "(fg (not (not true)))"})

        assert response.status_code == 422


class TestEvalEndpoint:
    """Tests for the /eval endpoint."""

    def test_fg_value(self, app_client):
        response = app_client.post("/eval", json={"source": "(fg (let (r (new false)) (let (u (assign r true)) (deref r))))"})

        assert response.status_code == 200
        data = response.json()
        assert data["value"] == "true"
        assert data["heap_size"] == 1
        assert data["steps"] > 0

    @pytest.mark.parametrize("force,value", [(False, "<computation>"), (True, "false")])
    def test_cg_forcing(self, app_client, force, value):
        response = app_client.post("/eval", json={"source": "(cg (bind (ret true) (a (ret (not a)))))", "force": force})

        assert response.status_code == 200
        assert response.json()["value"] == value

    def test_timeout_returns_408(self, app_client):
        source = (
            "(fg (let (r (new (unit ->[L] bool@L) (lam (u unit) [L] true)))"
            " (let (k (assign r (lam (u unit) [L] (app (deref r) ())))) (app (deref r) ()))))"
        )

        response = app_client.post("/eval", json={"source": source, "fuel": 500})

        assert response.status_code == 408

    def test_fuel_must_be_positive(self, app_client):
        response = app_client.post("/eval", json={"source": "(fg true)", "fuel": 0})

        assert response.status_code == 422


class TestTranslateEndpoint:
    """Tests for the /translate endpoint."""

    def test_fg_to_cg(self, app_client):
        response = app_client.post("/translate", json={"source": "(fg true)", "check": True})

        assert response.status_code == 200
        data = response.json()
        assert data["direction"] == "fg2cg"
        assert data["checked"] is True
        assert "(ret (label L true))" in data["target"]
        assert data["target_type"] == "(SLIO L L (Labeled L bool))"

    def test_cg_to_fg(self, app_client):
        response = app_client.post("/translate", json={"source": "(cg (label H true))"})

        assert response.status_code == 200
        assert response.json()["target_type"] == "(bool@L + unit@L)@H"

    def test_mismatched_direction_returns_400(self, app_client):
        response = app_client.post("/translate", json={"source": "(fg true)", "direction": "cg2fg"})

        assert response.status_code == 400

    def test_unknown_direction_rejected(self, app_client):
        response = app_client.post("/translate", json={"source": "(fg true)", "direction": "sideways"})

        assert response.status_code == 422

    def test_failed_check_returns_500(self, app_client):
        from app.ifc.core.errors import TranslationInvariantError

        with patch("app.ifc.service.fg2cg_check", side_effect=TranslationInvariantError("bad target")):
            response = app_client.post("/translate", json={"source": "(fg true)", "check": True})

        assert response.status_code == 500


class TestNICheckEndpoint:
    """Tests for the /ni-check endpoint."""

    def test_secure_program_passes(self, app_client):
        source = "(fg (ctx (x bool@H)) (let (y (if x true false)) true))"

        response = app_client.post("/ni-check", json={"source": source, "samples": 10, "seed": 1})

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "pass"
        assert data["oracle"] == "ni-fg"

    def test_leak_returns_422_with_rule(self, app_client):
        response = app_client.post("/ni-check", json={"source": "(cg (ctx (x (Labeled H bool))) (unlabel x))"})

        assert response.status_code == 422
        assert response.json()["detail"]["rule"] == "CG-sub"

    def test_precondition_returns_422(self, app_client):
        response = app_client.post("/ni-check", json={"source": "(fg true)"})

        assert response.status_code == 422
        assert response.json()["detail"]["rule"] == "precondition"

"""Conformance against the shared wire-protocol fixture suite."""
from __future__ import annotations

from ner_service import BUILTIN_MODEL, ServiceConfig, TermMatcherBackend, create_app
from fastapi.testclient import TestClient


WIRE_LABELS = {"problem", "test", "treatment", "drug", "dose", "frequency", "duration", "reason"}


def _check_entities_shape(payload: dict, text: str) -> None:
    assert set(payload) == {"entities"}
    assert isinstance(payload["entities"], list)
    for item in payload["entities"]:
        assert set(item) == {"start", "end", "label"}
        assert isinstance(item["start"], int) and isinstance(item["end"], int)
        assert 0 <= item["start"] < item["end"] <= len(text)
        assert item["label"] in WIRE_LABELS


def test_shared_fixture_cases(client, protocol_cases):
    for case in protocol_cases:
        if case["method"] == "GET":
            response = client.get(case["path"])
        elif "raw_body" in case:
            response = client.post(
                case["path"],
                content=case["raw_body"],
                headers={"Content-Type": "application/json"},
            )
        else:
            response = client.post(case["path"], json=case["body"])
        assert response.status_code == case["expect_status"], case["name"]
        payload = response.json()
        if case["expect_shape"] == "entities":
            _check_entities_shape(payload, case["body"]["text"])
        elif case["expect_shape"] == "error":
            assert "error" in payload, case["name"]
        elif case["expect_shape"] == "health":
            assert payload == {"status": "ok"}


def test_empty_text_returns_empty_entities(client):
    response = client.post("/v1/entities", json={"text": ""})
    assert response.status_code == 200
    assert response.json() == {"entities": []}


def test_known_problem_has_consistent_offsets(client):
    text = "History of epilepsy."
    response = client.post("/v1/entities", json={"text": text})
    assert response.status_code == 200
    entities = response.json()["entities"]
    assert entities, "builtin backend must know 'epilepsy'"
    surfaces = {text[e["start"] : e["end"]].lower() for e in entities}
    assert "epilepsy" in surfaces
    assert all(e["label"] == "problem" for e in entities)


def test_unknown_path_is_404(client):
    assert client.post("/v1/tag", json={"text": "x"}).status_code == 404


def test_wrong_method_is_405(client):
    assert client.get("/v1/entities").status_code == 405


def test_health_gates_on_model_load():
    backend = TermMatcherBackend()  # not loaded yet
    app = create_app(ServiceConfig(model=BUILTIN_MODEL), backend)
    client = TestClient(app)
    assert client.get("/v1/health").status_code == 503
    assert client.post("/v1/entities", json={"text": "x"}).status_code == 503
    backend.load()
    response = client.get("/v1/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}

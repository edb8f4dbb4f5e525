from __future__ import annotations

import json

import pytest

from score_extract.errors import ConfigError, ProtocolError, TransportError
from score_extract.model import EntityKind, EntitySource, Report
from score_extract.ner import (
    TaggerConfig,
    TaggerMode,
    check_health,
    default_lexicons,
    gazetteer_tag,
    remote_tag,
    tag_report,
)
from score_extract.segmenter import segment

from support import PROTOCOL_FIXTURES, StubTaggerServer, load_recorded_corpus_responses


def _remote_config(endpoint: str, mode=TaggerMode.REMOTE_ONLY, retries=3, timeout=2.0):
    return TaggerConfig(
        mode=mode, remote_endpoint=endpoint, timeout=timeout, max_retries=retries
    )


def test_remote_modes_require_endpoint():
    with pytest.raises(ConfigError):
        TaggerConfig(mode=TaggerMode.REMOTE_ONLY)


def test_remote_tag_maps_wire_labels():
    text = "CLINICAL HISTORY: History of epilepsy."
    start = text.index("epilepsy")
    responses = {text: [{"start": start, "end": start + 8, "label": "problem"}]}
    with StubTaggerServer(responses) as server:
        entities = remote_tag(text, _remote_config(server.endpoint))
    assert len(entities) == 1
    entity = entities[0]
    assert entity.kind is EntityKind.PROBLEM
    assert entity.surface == "epilepsy"
    assert entity.section.display_name == "CLINICAL HISTORY"
    assert entity.negated is False
    assert entity.source is EntitySource.REMOTE


def test_remote_tag_empty_entities():
    with StubTaggerServer({}) as server:
        assert remote_tag("anything", _remote_config(server.endpoint)) == []


def test_remote_entity_inside_header_gets_that_section():
    # Model taggers may tag header words; those lie outside any sentence.
    text = "CLINICAL HISTORY: Stable.\nIMPRESSION: Normal EEG."
    responses = {text: [{"start": 0, "end": 16, "label": "test"}]}
    with StubTaggerServer(responses) as server:
        entities = remote_tag(text, _remote_config(server.endpoint))
    assert len(entities) == 1
    assert entities[0].section.display_name == "CLINICAL HISTORY"
    assert entities[0].negated is False


def test_remote_tag_computes_negation_locally():
    text = "CLINICAL HISTORY: No history of epilepsy."
    start = text.index("epilepsy")
    responses = {text: [{"start": start, "end": start + 8, "label": "problem"}]}
    with StubTaggerServer(responses) as server:
        entities = remote_tag(text, _remote_config(server.endpoint))
    assert entities[0].negated is True


def test_health_check():
    with StubTaggerServer({}) as server:
        assert check_health(_remote_config(server.endpoint)) is True
    assert check_health(_remote_config("http://127.0.0.1:1")) is False


class TestProtocolErrors:
    def test_non_200_status(self):
        with StubTaggerServer({}) as server:
            server.override_response(500, {"error": "boom"})
            with pytest.raises(ProtocolError):
                remote_tag("text", _remote_config(server.endpoint))

    def test_non_json_body(self):
        with StubTaggerServer({}) as server:
            server.override_response(200, "not json at all")
            with pytest.raises(ProtocolError):
                remote_tag("text", _remote_config(server.endpoint))

    def test_missing_entities_key(self):
        with StubTaggerServer({}) as server:
            server.override_response(200, {"spans": []})
            with pytest.raises(ProtocolError):
                remote_tag("text", _remote_config(server.endpoint))

    def test_unknown_label(self):
        with StubTaggerServer({}) as server:
            server.override_response(200, {"entities": [{"start": 0, "end": 4, "label": "diagnosis"}]})
            with pytest.raises(ProtocolError):
                remote_tag("text", _remote_config(server.endpoint))

    def test_out_of_range_offsets(self):
        with StubTaggerServer({}) as server:
            server.override_response(200, {"entities": [{"start": 0, "end": 999, "label": "problem"}]})
            with pytest.raises(ProtocolError):
                remote_tag("text", _remote_config(server.endpoint))


def test_timeout_raises_transport_error_after_exact_attempts():
    import socket
    import threading

    attempts = []
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.bind(("127.0.0.1", 0))
    listener.listen(8)
    port = listener.getsockname()[1]
    stop = threading.Event()
    held: list[socket.socket] = []

    def accept_loop():
        # Accept and hold connections open without ever replying.
        while not stop.is_set():
            try:
                listener.settimeout(0.1)
                conn, _ = listener.accept()
            except socket.timeout:
                continue
            attempts.append(1)
            held.append(conn)

    thread = threading.Thread(target=accept_loop, daemon=True)
    thread.start()
    try:
        config = _remote_config(f"http://127.0.0.1:{port}", retries=3, timeout=0.3)
        with pytest.raises(TransportError):
            remote_tag("text", config)
    finally:
        stop.set()
        thread.join(timeout=2)
        for conn in held:
            conn.close()
        listener.close()
    assert len(attempts) == 3


def test_connection_refused_raises_transport_error():
    config = _remote_config("http://127.0.0.1:1", retries=2, timeout=0.3)
    with pytest.raises(TransportError):
        remote_tag("text", config)


def test_fallback_mode_degrades_to_gazetteer(caplog):
    text = "CLINICAL HISTORY: History of epilepsy."
    seg = segment(Report("r", text))
    lexicons = default_lexicons()
    config = TaggerConfig(
        mode=TaggerMode.REMOTE_PREFERRED_WITH_FALLBACK,
        remote_endpoint="http://127.0.0.1:1",
        timeout=0.2,
        max_retries=1,
    )
    with caplog.at_level("WARNING"):
        entities = tag_report(seg, config, lexicons)
    assert entities == gazetteer_tag(seg, lexicons)
    assert any("falling back" in r.message for r in caplog.records)


def test_remote_reproduces_gazetteer_on_recorded_fixtures(corpus_dir):
    """Replaying the recorded wire fixtures yields gazetteer-equivalent
    entities (same spans/kinds/sections/negation, source aside)."""
    recorded = load_recorded_corpus_responses()
    responses = {item["text"]: item["entities"] for item in recorded.values()}
    lexicons = default_lexicons()
    with StubTaggerServer(responses) as server:
        config = _remote_config(server.endpoint)
        for record_id, item in sorted(recorded.items()):
            text = item["text"]
            assert (corpus_dir / f"{record_id}.txt").read_text(encoding="utf-8") == text
            remote_entities = remote_tag(text, config)
            gazetteer_entities = gazetteer_tag(segment(Report(record_id, text)), lexicons)
            assert len(remote_entities) == len(gazetteer_entities)
            for remote_entity, local_entity in zip(remote_entities, gazetteer_entities):
                assert remote_entity.span == local_entity.span
                assert remote_entity.kind is local_entity.kind
                assert remote_entity.surface == local_entity.surface
                assert remote_entity.section == local_entity.section
                assert remote_entity.negated == local_entity.negated
                assert remote_entity.source is EntitySource.REMOTE


def test_shared_request_fixtures_accepted_by_client_for_200_cases():
    cases = json.loads((PROTOCOL_FIXTURES / "requests.json").read_text(encoding="utf-8"))["cases"]
    ok_cases = [c for c in cases if c["expect_status"] == 200 and c["path"] == "/v1/entities"]
    assert ok_cases, "fixture file must carry 200 tagging cases"
    with StubTaggerServer({}) as server:
        for case in ok_cases:
            entities = remote_tag(case["body"]["text"], _remote_config(server.endpoint))
            assert entities == []

"""Shared test helpers: fixture paths, a stub wire-protocol server."""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from score_extract.model import Report
from score_extract.segmenter import segment

FIXTURES = Path(__file__).parent / "fixtures"
PROTOCOL_FIXTURES = Path(__file__).parent.parent / "protocol" / "fixtures"


def make_seg(text: str, record_id: str = "t"):
    return segment(Report(record_id, text))


class _StubHandler(BaseHTTPRequestHandler):
    """Replays recorded responses keyed by exact request text."""

    server_version = "stub/0"

    def log_message(self, *args):  # keep test output clean
        pass

    def do_GET(self):
        if self.path == "/v1/health":
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        self.server.request_count += 1
        if self.path != "/v1/entities":
            self._reply(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
            text = body["text"]
        except (ValueError, KeyError, TypeError):
            self._reply(400, {"error": "invalid request body"})
            return
        override = self.server.response_override
        if override is not None:
            status, payload = override
            self._reply(status, payload, raw_ok=True)
            return
        entities = self.server.responses.get(text)
        if entities is None:
            self._reply(200, {"entities": []})
        else:
            self._reply(200, {"entities": entities})

    def _reply(self, status, payload, raw_ok=False):
        body = payload if raw_ok and isinstance(payload, (bytes, str)) else json.dumps(payload)
        if isinstance(body, str):
            body = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class StubTaggerServer:
    """In-process stub implementing the tagging wire protocol."""

    def __init__(self, responses: dict[str, list] | None = None):
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self._server.responses = responses or {}
        self._server.response_override = None
        self._server.request_count = 0
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    @property
    def request_count(self) -> int:
        return self._server.request_count

    def override_response(self, status: int, payload) -> None:
        self._server.response_override = (status, payload)


def load_recorded_corpus_responses() -> dict:
    return json.loads((PROTOCOL_FIXTURES / "corpus_entities.json").read_text(encoding="utf-8"))

"""FastAPI application implementing the entity tagging wire protocol.

See protocol/PROTOCOL.md at the repository root for the contract; the
recorded fixtures there are replayed by this package's tests.
"""
from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .backends import Backend, RawEntity, make_backend
from .chunking import chunk_windows
from .config import ServiceConfig

logger = logging.getLogger(__name__)


def _tag(text: str, backend: Backend, config: ServiceConfig, app: FastAPI) -> list[dict]:
    spans: list[RawEntity] = []
    for start, end in chunk_windows(len(text), text, config.max_input_chars, config.chunk_overlap):
        for raw in backend.predict(text[start:end]):
            spans.append(RawEntity(raw.start + start, raw.end + start, raw.label))

    mapped: list[tuple[int, int, str]] = []
    for raw in spans:
        wire_label = config.label_map.get(raw.label)
        if wire_label is None:
            app.state.dropped_label_count += 1
            logger.warning("dropping entity with unmapped model label %r", raw.label)
            continue
        if not 0 <= raw.start < raw.end <= len(text):
            app.state.dropped_offset_count += 1
            logger.warning("dropping entity with invalid offsets %s", raw)
            continue
        mapped.append((raw.start, raw.end, wire_label))

    # Overlapping windows can report the same mention twice; keep the
    # longest span for any overlapping group.
    mapped.sort(key=lambda e: (e[0] - e[1], e[0]))
    kept: list[tuple[int, int, str]] = []
    for candidate in mapped:
        if not any(candidate[0] < e and s < candidate[1] for s, e, _ in kept):
            kept.append(candidate)
    kept.sort(key=lambda e: (e[0], e[1]))
    return [{"start": s, "end": e, "label": label} for s, e, label in kept]


def create_app(config: ServiceConfig | None = None, backend: Backend | None = None) -> FastAPI:
    """Build the service; pass a preloaded backend to skip model loading."""
    config = config or ServiceConfig()
    backend = backend or make_backend(config.model)
    app = FastAPI(title="eeg-ner-service")
    app.state.config = config
    app.state.backend = backend
    app.state.dropped_label_count = 0
    app.state.dropped_offset_count = 0

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "invalid request body"})

    @app.get("/v1/health")
    async def health():
        if not backend.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok"}

    @app.post("/v1/entities")
    async def entities(request: Request):
        if not backend.ready:
            return JSONResponse(status_code=503, content={"error": "model not loaded"})
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"error": "invalid request body"})
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            return JSONResponse(status_code=400, content={"error": "body must be {\"text\": <string>}"})
        text = body["text"]
        if len(text) > config.max_input_chars and not config.chunking_enabled:
            return JSONResponse(
                status_code=413,
                content={"error": f"input exceeds {config.max_input_chars} characters"},
            )
        try:
            return {"entities": _tag(text, backend, config, app)}
        except Exception as exc:  # inference failure -> 500 per protocol
            logger.exception("inference failure")
            return JSONResponse(status_code=500, content={"error": str(exc)})

    return app


def serve(config: ServiceConfig) -> None:
    """Load the model and run the service until interrupted."""
    import uvicorn

    backend = make_backend(config.model)
    logger.info("loading model %s", config.model)
    backend.load()
    app = create_app(config, backend)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")

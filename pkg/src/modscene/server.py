"""HTTP face of the engine.

Every route delegates to one engine call; engine errors map to JSON
bodies with stable machine codes. Generation runs on a worker thread by
default (202 plus a generation-complete/-failed event) and inline when
the caller passes ?wait=true.
"""

from __future__ import annotations

import mimetypes
import tempfile
import threading
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, RedirectResponse, Response, StreamingResponse
from pydantic import BaseModel

from .engine import Engine
from .errors import EngineError, http_status
from .events import event_json
from .store import write_bundle_dir

HEARTBEAT_SECONDS = 15.0


class PromptBody(BaseModel):
    text: str


class TransformBody(BaseModel):
    x: float
    y: float
    rotation: float
    scale: float


class ProxyBody(BaseModel):
    kind: str
    geometry: list[tuple[float, float]]


class SliderBody(BaseModel):
    element: str
    name: str
    value: float


def _error_response(exc: EngineError) -> JSONResponse:
    return JSONResponse(status_code=http_status(exc.code), content={"error": exc.to_dict()})


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="scene engine", docs_url=None, redoc_url=None)
    # the browser client may be served from a different origin than the engine
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    preview_lock = threading.Lock()
    preview_state: dict = {"tick": None, "dir": None}

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return _error_response(exc)

    @app.get("/project")
    def project():
        return engine.project_info()

    @app.post("/elements", status_code=201)
    def create_element(
        name: str = Form(...),
        kind: str = Form(...),
        asset: UploadFile | None = File(None),
    ):
        asset_bytes = None
        filename = None
        media_type = None
        if asset is not None:
            asset_bytes = asset.file.read()
            filename = asset.filename
            media_type = asset.content_type
        element = engine.create_element(
            name, kind, asset_bytes=asset_bytes, asset_filename=filename, media_type=media_type
        )
        return element.to_dict()

    @app.delete("/elements/{element_id}")
    def delete_element(element_id: str):
        element = engine.delete_element(element_id)
        return {"deleted": element_id, "name": element.name}

    @app.patch("/elements/{element_id}/transform")
    def patch_transform(element_id: str, body: TransformBody):
        element = engine.set_transform(element_id, body.x, body.y, body.rotation, body.scale)
        return element.to_dict()

    @app.post("/proxies", status_code=201)
    def add_proxy(body: ProxyBody):
        return engine.add_proxy(body.kind, [tuple(p) for p in body.geometry]).to_dict()

    @app.delete("/proxies/{label}")
    def delete_proxy(label: str):
        engine.delete_proxy(label)
        return {"deleted": label}

    @app.post("/modules/{module}/prompt", status_code=202)
    def prompt(module: str, body: PromptBody, wait: bool = False):
        if wait:
            result = engine.generate(module, body.text)
            return JSONResponse(status_code=200, content=asdict(result))

        def run():
            try:
                engine.generate(module, body.text)
            except EngineError as exc:
                engine.events.emit("generation-failed", {"module": module, "error": exc.to_dict()})
            except Exception as exc:  # noqa: BLE001 - surfaced to the stream, never swallowed silently
                engine.events.emit(
                    "generation-failed",
                    {"module": module, "error": {"code": "internal", "message": str(exc)}},
                )

        engine._resolve_module(module)  # fail fast with 404 before accepting
        threading.Thread(target=run, daemon=True).start()
        return {"accepted": True, "module": module}

    @app.get("/modules/{module}/session")
    def session(module: str):
        return {"module": module, "records": engine.session_records(module)}

    @app.get("/context")
    def context():
        return PlainTextResponse(engine.compile_context())

    @app.get("/sliders/{element_id}")
    def sliders(element_id: str):
        return {"element": element_id, "sliders": engine.slider_manifest(element_id)}

    @app.patch("/sliders")
    def patch_slider(body: SliderBody):
        rows = engine.apply_slider(body.element, body.name, body.value)
        return {"element": body.element, "sliders": rows}

    @app.get("/bundle")
    def bundle():
        data = engine.export_zip()
        headers = {"Content-Disposition": f'attachment; filename="{engine.name}.zip"'}
        return Response(content=data, media_type="application/zip", headers=headers)

    def _preview_dir() -> Path:
        with preview_lock:
            if preview_state["tick"] != engine.tick or preview_state["dir"] is None:
                target = Path(tempfile.mkdtemp(prefix="scene-preview-"))
                write_bundle_dir(target, engine.export_files())
                preview_state["tick"] = engine.tick
                preview_state["dir"] = target
            return preview_state["dir"]

    @app.get("/preview")
    def preview_root():
        return RedirectResponse(url="/preview/index.html")

    @app.get("/preview/{rel:path}")
    def preview(rel: str):
        base = _preview_dir().resolve()
        target = (base / rel).resolve()
        if base not in target.parents and target != base:
            raise EngineError("io-failure", "preview path escapes the bundle")
        if not target.is_file():
            return JSONResponse(status_code=404, content={"error": {"code": "unknown-file", "message": rel}})
        media_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        return Response(content=target.read_bytes(), media_type=media_type)

    @app.get("/events")
    def events(limit: int = 0, replay: int = 0):
        """Server-sent event stream; ``replay`` resends that many recent
        events first, ``limit`` closes the stream after N events (tests)."""

        def stream():
            subscription = engine.events.subscribe()
            sent = 0
            try:
                if replay:
                    for event in engine.events.history[-replay:]:
                        yield f"event: {event['type']}\ndata: {event_json(event)}\n\n"
                        sent += 1
                        if limit and sent >= limit:
                            return
                while True:
                    event = subscription.get(timeout=HEARTBEAT_SECONDS)
                    if event is None:
                        if subscription.closed:
                            return
                        yield ": keep-alive\n\n"
                        continue
                    yield f"event: {event['type']}\ndata: {event_json(event)}\n\n"
                    sent += 1
                    if limit and sent >= limit:
                        return
            finally:
                subscription.close()

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app

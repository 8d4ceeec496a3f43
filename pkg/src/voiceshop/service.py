"""HTTP and WebSocket front end over the session engine.

The service is a thin transport: every behavior lives in the engine so the
offline replay path and the network path cannot drift apart. Domain errors
map onto status codes with machine-readable bodies:

    NOT_FOUND -> 404, ORDERING -> 409, CONFLICT -> 409, SCHEMA -> 422
"""

from __future__ import annotations

import json
from dataclasses import asdict

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .engine import SessionEngine
from .errors import NotFoundError, SchemaError, VoiceShopError
from .textnorm import normalize

STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "ORDERING": 409,
    "CONFLICT": 409,
    "SCHEMA": 422,
}


def error_body(exc: VoiceShopError) -> dict:
    return {"error": {"code": exc.code, "message": str(exc)}}


def create_app(engine: SessionEngine) -> FastAPI:
    app = FastAPI(title="voiceshop", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(VoiceShopError)
    async def domain_error(request: Request, exc: VoiceShopError):
        return JSONResponse(
            status_code=STATUS_BY_CODE.get(exc.code, 500), content=error_body(exc)
        )

    async def read_json(request: Request):
        try:
            return await request.json()
        except Exception as exc:
            raise SchemaError(f"request body must be JSON: {exc}") from exc

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "sessions": engine.session_count(),
            "vocab_class": engine.grammar.vocab_class,
            "mode": engine.grammar.mode,
        }

    @app.post("/api/sessions", status_code=201)
    async def create_session():
        return {"session_id": engine.create_session()}

    @app.post("/api/sessions/{session_id}/events")
    async def post_event(session_id: str, request: Request):
        payload = await read_json(request)
        return engine.ingest_event(session_id, payload)

    @app.get("/api/sessions/{session_id}/state")
    async def get_state(session_id: str):
        return engine.get_state(session_id)

    @app.get("/api/products")
    async def list_products(q: str = "", page: int = 0):
        if page < 0:
            raise SchemaError("page must be nonnegative")
        tokens = normalize(q)
        results = engine.catalog.search(tokens)
        start = page * engine.page_size
        shown = results[start:start + engine.page_size]
        return {
            "query": q,
            "page": page,
            "page_size": engine.page_size,
            "total": len(results),
            "products": [asdict(p) for p in shown],
        }

    @app.get("/api/products/{product_id}")
    async def get_product(product_id: str):
        product = engine.catalog.get(product_id)
        if product is None:
            raise NotFoundError(f"no product {product_id!r}")
        return asdict(product)

    @app.websocket("/api/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    payload = json.loads(raw)
                except json.JSONDecodeError as exc:
                    await websocket.send_json(
                        error_body(SchemaError(f"frame must be JSON: {exc}"))
                    )
                    continue
                try:
                    outcome = engine.ingest_event(session_id, payload)
                except NotFoundError as exc:
                    await websocket.send_json(error_body(exc))
                    await websocket.close()
                    return
                except VoiceShopError as exc:
                    await websocket.send_json(error_body(exc))
                    continue
                await websocket.send_json(outcome)
        except WebSocketDisconnect:
            return

    return app

"""HTTP face of the search index: bulk indexing, querying, health.

Endpoints (JSON bodies, documented in the README):

    GET  /health          -> {"status": "ok", "pages": N}
    POST /index           -> {"pages": [PageRecord, ...]} -> {"indexed", "total"}
    POST /search          -> Query -> SearchResult
    errors                -> {"code", "message"} with a 400 status

Writers are serialized behind a lock and work on a copy that is swapped in
atomically, so readers never observe a partially updated index.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .search import PageRecord, Query, QueryError, SearchError, SearchIndex


def create_app(index: Optional[SearchIndex] = None, index_dir=None) -> FastAPI:
    app = FastAPI(title="greylit search", version="0.1.0")
    # the query UI is served from its own origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    app.state.index = index if index is not None else SearchIndex()
    app.state.index_dir = index_dir
    write_lock = threading.Lock()

    @app.exception_handler(QueryError)
    async def handle_query_error(_request: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(SearchError)
    async def handle_search_error(_request: Request, exc: SearchError):
        return JSONResponse(status_code=400, content={"code": "invalid_record", "message": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "pages": len(app.state.index)}

    @app.post("/index")
    async def index_pages(request: Request):
        payload = await _json_body(request)
        if not isinstance(payload, dict) or not isinstance(payload.get("pages"), list):
            raise SearchError('body must be {"pages": [...]}')
        records = [PageRecord.from_json(item) for item in payload["pages"]]
        with write_lock:
            fresh = app.state.index.copy()
            indexed = fresh.index_pages(records)
            if app.state.index_dir is not None:
                fresh.save(app.state.index_dir)
            app.state.index = fresh  # atomic swap for readers
        return {"indexed": indexed, "total": len(app.state.index)}

    @app.post("/search")
    async def search(request: Request):
        payload = await _json_body(request)
        query = Query.from_json(payload)
        return app.state.index.execute(query).to_json()

    async def _json_body(request: Request):
        try:
            return await request.json()
        except Exception:
            raise QueryError("request body is not valid JSON", code="invalid_json") from None

    return app

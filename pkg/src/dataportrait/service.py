"""HTTP API over one or more loaded portraits.

Portraits are immutable after load and shared read-only across request
handlers, so any number of concurrent checks is safe and every response
depends only on the request body and the mounted portraits (elapsed_ms
aside).  /v1/check bodies are produced by the same serializer as the CLI's
--json output, byte-for-byte.
"""

from __future__ import annotations

import os
import time

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .query import check_document, payload_json, report_payload
from .sketch import BloomFilter, plan_parameters

DEFAULT_MAX_DOC_BYTES = 1 << 20

_CANARY = "portrait self-check canary "


class CheckRequest(BaseModel):
    document: str
    portrait: str | None = None
    include_flags: bool = False


def self_check(portraits: dict[str, BloomFilter]) -> None:
    """Verify the query machinery end to end; raises RuntimeError on failure.

    Runs insert/contains on a scratch filter (never on a served portrait —
    those stay byte-identical to their files) and a structural probe query
    through every mounted portrait.
    """
    scratch = BloomFilter(plan_parameters(16, 1e-3, ngram_width=4))
    scratch.insert(b"canary-present")
    if not scratch.contains(b"canary-present"):
        raise RuntimeError("self-check failed: inserted canary not found")
    if scratch.contains(b"canary-absent!"):
        raise RuntimeError("self-check failed: phantom membership on scratch filter")
    for name, filt in portraits.items():
        width = filt.params.ngram_width
        doc = (_CANARY * (3 * width // len(_CANARY) + 1))[: 3 * width]
        first = check_document(filt, doc)
        if len(first.flags) != max(0, first.doc_norm_length - width + 1):
            raise RuntimeError(f"self-check failed: flag count law broken on {name!r}")
        again = check_document(filt, doc)
        if (first.flags, first.overlap_ratio) != (again.flags, again.overlap_ratio):
            raise RuntimeError(f"self-check failed: nondeterministic query on {name!r}")


def create_app(
    portraits: dict[str, BloomFilter] | None = None,
    max_doc_bytes: int | None = None,
) -> FastAPI:
    """Build the service; call mark_ready(app) once portraits are mounted."""
    if max_doc_bytes is None:
        max_doc_bytes = int(os.environ.get("DP_MAX_DOC_BYTES", DEFAULT_MAX_DOC_BYTES))
    app = FastAPI(title="dataportrait", version="1")
    app.state.portraits = dict(portraits or {})
    app.state.max_doc_bytes = max_doc_bytes
    app.state.ready = False

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/v1/check")
    def check(request: CheckRequest) -> Response:
        if not app.state.ready:
            return JSONResponse(
                status_code=503, content={"detail": "portraits still loading"}
            )
        portraits_by_name: dict[str, BloomFilter] = app.state.portraits
        name = request.portrait
        if name is None:
            if len(portraits_by_name) == 1:
                name = next(iter(portraits_by_name))
            elif not portraits_by_name:
                return JSONResponse(
                    status_code=404, content={"detail": "no portraits mounted"}
                )
            else:
                return JSONResponse(
                    status_code=400,
                    content={
                        "detail": "multiple portraits mounted; name one of "
                        + ", ".join(sorted(portraits_by_name))
                    },
                )
        filt = portraits_by_name.get(name)
        if filt is None:
            return JSONResponse(
                status_code=404, content={"detail": f"unknown portrait {name!r}"}
            )
        if len(request.document.encode("utf-8")) > app.state.max_doc_bytes:
            return JSONResponse(
                status_code=400,
                content={
                    "detail": f"document exceeds {app.state.max_doc_bytes} bytes"
                },
            )
        started = time.perf_counter()
        report = check_document(filt, request.document)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        payload = report_payload(
            report,
            portrait_name=name,
            ngram_width=filt.params.ngram_width,
            include_flags=request.include_flags,
            elapsed_ms=round(elapsed_ms, 3),
        )
        return Response(content=payload_json(payload), media_type="application/json")

    @app.get("/v1/portraits")
    def list_portraits() -> list[dict]:
        return [
            {
                "name": name,
                "ngram_width": filt.params.ngram_width,
                "stride": filt.params.stride,
                "m_bits": filt.params.m_bits,
                "k_hashes": filt.params.k_hashes,
                "inserted": filt.inserted,
                "saturation": filt.saturation(),
            }
            for name, filt in sorted(app.state.portraits.items())
        ]

    @app.get("/healthz")
    def healthz() -> Response:
        if not app.state.ready:
            return JSONResponse(
                status_code=503, content={"status": "loading"}
            )
        try:
            self_check(app.state.portraits)
        except RuntimeError as exc:
            return JSONResponse(status_code=503, content={"status": str(exc)})
        return JSONResponse(status_code=200, content={"status": "ok"})

    return app


def mark_ready(app: FastAPI) -> None:
    """Run the startup self-check and open the service for queries."""
    self_check(app.state.portraits)
    app.state.ready = True


__all__ = [
    "CheckRequest",
    "create_app",
    "mark_ready",
    "self_check",
    "DEFAULT_MAX_DOC_BYTES",
]

"""FastAPI application exposing the index computations.

Domain errors map to HTTP statuses: malformed inputs to 422, computation
preconditions that fail (degenerate forms, no orbit convergence) to 409,
everything else bubbles as 500.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import MalformedInputError, SymindexError
from . import handlers
from .schemas import (
    ChebRequest,
    ChebResponse,
    HealthResponse,
    IndexRequest,
    IndexResponse,
    OrbitRequest,
    OrbitResponse,
    VerifyRequest,
    VerifyResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="symindex",
        version=__version__,
        description=(
            "Indices of symmetric periodic orbits: closed formula, "
            "quadratic-form and path-based oracles, Chebyshev tables, and a "
            "Hamiltonian orbit pipeline."
        ),
    )

    def run(handler, request):
        try:
            return handler(request)
        except MalformedInputError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except SymindexError as exc:
            raise HTTPException(
                status_code=409,
                detail=f"{type(exc).__name__.removesuffix('Error')}: {exc}",
            ) from exc

    @app.get("/v1/health", response_model=HealthResponse)
    def health():
        return HealthResponse()

    @app.post("/v1/index", response_model=IndexResponse)
    def index(request: IndexRequest):
        return run(handlers.handle_index, request)

    @app.post("/v1/cheb", response_model=ChebResponse)
    def cheb(request: ChebRequest):
        return run(handlers.handle_cheb, request)

    @app.post("/v1/verify", response_model=VerifyResponse)
    def verify(request: VerifyRequest):
        return run(handlers.handle_verify, request)

    @app.post("/v1/orbit", response_model=OrbitResponse)
    def orbit(request: OrbitRequest):
        return run(handlers.handle_orbit, request)

    return app

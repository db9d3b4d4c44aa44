"""HTTP service exposing the reconstruction operations.

Every endpoint delegates to the shared handlers, so responses match what the
CLI produces in-process.  Domain errors surface as a structured 422 payload
carrying the stable error code used for CLI exit statuses.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import handlers
from .datasets import list_datasets, load_dataset
from .errors import HolotetError
from .schemas import (
    ClassifyResponse,
    ErrorResponse,
    FlatCheckRequest,
    FlatCheckResponse,
    ForwardRequest,
    ForwardResponse,
    GramRequest,
    HolonomyRequest,
    ReconstructionResponse,
    RoundtripResponse,
    VerifyPaperResponse,
)

app = FastAPI(
    title="holotet",
    description="Reconstruction of convex constant-curvature Lorentzian "
                "tetrahedra from SO+(1,2)/SL(2,R) face holonomies.",
    version="0.1.0",
)


@app.exception_handler(HolotetError)
async def _domain_error(_: Request, exc: HolotetError) -> JSONResponse:
    payload = ErrorResponse(
        error=type(exc).__name__,
        code=exc.code,
        message=str(exc),
        data={k: v for k, v in exc.data.items()
              if isinstance(v, (int, float, str, bool, list))},
    )
    return JSONResponse(status_code=422, content=payload.model_dump())


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/reconstruct", response_model=ReconstructionResponse)
def reconstruct_endpoint(req: HolonomyRequest) -> ReconstructionResponse:
    return handlers.run_reconstruct(req)


@app.post("/forward", response_model=ForwardResponse)
def forward_endpoint(req: ForwardRequest) -> ForwardResponse:
    return handlers.run_forward(req)


@app.post("/classify", response_model=ClassifyResponse)
def classify_endpoint(req: GramRequest) -> ClassifyResponse:
    return handlers.run_classify(req)


@app.post("/roundtrip", response_model=RoundtripResponse)
def roundtrip_endpoint(req: GramRequest) -> RoundtripResponse:
    return handlers.run_roundtrip(req)


@app.post("/flatcheck", response_model=FlatCheckResponse)
def flatcheck_endpoint(req: FlatCheckRequest) -> FlatCheckResponse:
    return handlers.run_flatcheck(req)


@app.get("/verify-paper", response_model=VerifyPaperResponse)
def verify_paper_endpoint() -> VerifyPaperResponse:
    return handlers.run_verify_paper()


@app.get("/datasets")
def datasets_endpoint() -> dict:
    return {"datasets": list_datasets()}


@app.get("/datasets/{name}")
def dataset_endpoint(name: str) -> dict:
    return load_dataset(name)

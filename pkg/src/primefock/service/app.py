"""FastAPI application exposing the package over HTTP."""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import (
    DivergenceError,
    NumericalFailure,
    QuadratureUnderResolved,
    ResourceCapExceeded,
    TruncationViolation,
)
from . import handlers
from . import schemas as sc

app = FastAPI(
    title="primefock",
    description=(
        "Coherent states of a boson array with prime-labeled sites: "
        "verification suites, state amplitudes and expectations, and exact "
        "finite-array spectra."
    ),
)


@app.exception_handler(DivergenceError)
@app.exception_handler(QuadratureUnderResolved)
@app.exception_handler(ValueError)
async def _domain_error(request: Request, exc: Exception):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ResourceCapExceeded)
async def _cap_error(request: Request, exc: Exception):
    return JSONResponse(status_code=413, content={"detail": str(exc)})


@app.exception_handler(NumericalFailure)
@app.exception_handler(TruncationViolation)
async def _numeric_error(request: Request, exc: Exception):
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health", response_model=sc.HealthResponse)
def health() -> sc.HealthResponse:
    return handlers.handle_health()


@app.post("/verify", response_model=sc.VerifyResponse)
def verify(req: sc.VerifyRequest) -> sc.VerifyResponse:
    return handlers.handle_verify(req)


@app.post("/ncs/amplitudes", response_model=sc.AmplitudesResponse)
def amplitudes(req: sc.AmplitudesRequest) -> sc.AmplitudesResponse:
    return handlers.handle_amplitudes(req)


@app.post("/ncs/expect", response_model=sc.ExpectResponse)
def expect(req: sc.ExpectRequest) -> sc.ExpectResponse:
    return handlers.handle_expect(req)


@app.post("/ncs/pmf", response_model=sc.PmfResponse)
def pmf(req: sc.PmfRequest) -> sc.PmfResponse:
    return handlers.handle_pmf(req)


@app.post("/spectrum/sweep", response_model=sc.SpectrumResponse)
def spectrum_sweep(req: sc.SpectrumRequest) -> sc.SpectrumResponse:
    return handlers.handle_spectrum(req)


@app.post("/spectrum/transitions", response_model=sc.TransitionsResponse)
def spectrum_transitions(req: sc.SpectrumRequest) -> sc.TransitionsResponse:
    return handlers.handle_transitions(req)

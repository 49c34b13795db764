"""HTTP wrapper around the simulator.

The service returns the exact CSV text the CLI would write, so a client
saving the `csv` field gets byte-identical output to an in-process run.
Domain errors map to stable JSON bodies: config problems are 400 with
kind "config", a refused integration step is 409 with kind "numerical".
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .config import RunConfig, build_config, config_to_dict, scan_spec_from_dict
from .errors import ConfigError, NumericalRefusal
from .runner import run_darkcheck, run_scan_spec, run_simulate
from .schemas import (
    DarkcheckRequest,
    DarkcheckResponse,
    ErrorResponse,
    HealthResponse,
    ScanRequest,
    ScanResponse,
    SimulateRequest,
    SimulateResponse,
)

_ERROR_RESPONSES = {
    400: {"model": ErrorResponse},
    409: {"model": ErrorResponse},
}


def _validation_summary(exc: RequestValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ()) if p != "body")
        parts.append(f"{loc or 'body'}: {err.get('msg', 'invalid')}")
    return "; ".join(parts)


def create_app() -> FastAPI:
    app = FastAPI(title="stirapsim", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"kind": "config", "message": str(exc)})

    @app.exception_handler(NumericalRefusal)
    async def _numerical_error(request: Request, exc: NumericalRefusal):
        return JSONResponse(status_code=409, content={"kind": "numerical", "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"kind": "config", "message": _validation_summary(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    async def health():
        return HealthResponse(status="ok", version=__version__)

    @app.get("/defaults")
    async def defaults():
        return config_to_dict(RunConfig())

    @app.post("/simulate", response_model=SimulateResponse, responses=_ERROR_RESPONSES)
    def simulate(req: SimulateRequest):
        config = build_config(req.to_config_dict())
        result = run_simulate(config)
        return SimulateResponse(csv=result.csv_text, meta=result.meta)

    @app.post("/darkcheck", response_model=DarkcheckResponse, responses=_ERROR_RESPONSES)
    def darkcheck(req: DarkcheckRequest):
        config = build_config(req.to_config_dict())
        result = run_darkcheck(config, n_times=req.n_times, seed=req.seed)
        return DarkcheckResponse(csv=result.csv_text, meta=result.meta)

    @app.post("/scan", response_model=ScanResponse, responses=_ERROR_RESPONSES)
    def scan(req: ScanRequest):
        spec, objective = scan_spec_from_dict(req.to_spec_dict())
        result = run_scan_spec(spec, objective=objective)
        return ScanResponse(
            csv=result.csv_text,
            columns=result.columns,
            n_points=len(result.table),
            n_failed=sum(1 for row in result.table if row.get("error")),
            best=result.best,
        )

    return app


app = create_app()

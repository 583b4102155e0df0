import json
import logging
import time
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, field_validator

from app.ifc.core.config import AppConfig
from app.ifc.core.errors import (
    EvalTimeout, IFCError, LabelSyntaxError, ParseError, PreconditionError,
    TranslationInvariantError, TypeCheckError,
)
from app.ifc.service import (
    DIRECTIONS, eval_source, load_text, ni_check_source, translate_source, typecheck_source,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Request models
# ---------------------------------------------------------------------------

class SourceRequest(BaseModel):
    source: str
    lattice: Optional[str] = None

    @field_validator("source")
    @classmethod
    def bounded_source(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("Source must not be empty")
        if len(v) > AppConfig.MAX_SOURCE_CHARS:
            raise ValueError(f"Source exceeds maximum length of {AppConfig.MAX_SOURCE_CHARS} characters")
        return v


class TypecheckRequest(SourceRequest):
    pc: Optional[str] = None


class EvalRequest(SourceRequest):
    fuel: Optional[int] = Field(default=None, gt=0)
    force: bool = False
    seed: int = 0


class TranslateRequest(SourceRequest):
    direction: Optional[str] = None
    check: bool = False
    pc: Optional[str] = None

    @field_validator("direction")
    @classmethod
    def known_direction(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in DIRECTIONS:
            raise ValueError(f"direction must be one of {', '.join(DIRECTIONS)}")
        return v


class NICheckRequest(SourceRequest):
    secret_label: Optional[str] = None
    observer: Optional[str] = None
    samples: Optional[int] = Field(default=None, gt=0)
    seed: Optional[int] = None
    fuel: Optional[int] = Field(default=None, gt=0)


# ---------------------------------------------------------------------------
# Error mapping and request logging
# ---------------------------------------------------------------------------

def _http_error(exc: Exception) -> HTTPException:
    """Map library errors to HTTP status codes."""
    if isinstance(exc, (ParseError, LabelSyntaxError, ValueError)):
        return HTTPException(status_code=400, detail=str(exc))
    if isinstance(exc, TypeCheckError):
        return HTTPException(status_code=422, detail={"rule": exc.rule, "message": str(exc)})
    if isinstance(exc, PreconditionError):
        return HTTPException(status_code=422, detail={"rule": "precondition", "message": str(exc)})
    if isinstance(exc, EvalTimeout):
        return HTTPException(status_code=408, detail=str(exc))
    if isinstance(exc, TranslationInvariantError):
        return HTTPException(status_code=500, detail=str(exc))
    logger.error(f"Unexpected {type(exc).__name__}: {exc}")
    return HTTPException(status_code=500, detail=str(exc))


def _log_request(endpoint: str, status: str, started: float, **fields):
    """Emit a structured JSON log line for one request."""
    entry = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "endpoint": endpoint,
        "status": status,
        "latency_ms": round((time.perf_counter() - started) * 1000, 1),
        **fields,
    }
    logger.info(f"REQUEST_LOG {json.dumps(entry)}")


def _handle(endpoint: str, action):
    started = time.perf_counter()
    try:
        result = action()
    except (IFCError, ValueError) as e:
        _log_request(endpoint, type(e).__name__, started)
        raise _http_error(e)
    _log_request(endpoint, "ok", started)
    return result


# ---------------------------------------------------------------------------
# App setup
# ---------------------------------------------------------------------------

app = FastAPI(title="Granularity IFC API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=AppConfig.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/ping")
def ping():
    return {"message": "pong"}


@app.post("/typecheck")
def typecheck(req: TypecheckRequest):
    def action():
        report = typecheck_source(load_text(req.source, req.lattice), req.pc)
        return {"language": report.language, "type": report.type}

    return _handle("typecheck", action)


@app.post("/eval")
def evaluate(req: EvalRequest):
    def action():
        report = eval_source(load_text(req.source, req.lattice), req.fuel, req.force, req.seed)
        return {
            "language": report.language,
            "value": report.value,
            "heap_size": report.heap_size,
            "steps": report.steps,
        }

    return _handle("eval", action)


@app.post("/translate")
def translate(req: TranslateRequest):
    def action():
        report = translate_source(load_text(req.source, req.lattice), req.direction, req.check, req.pc)
        return {
            "direction": report.direction,
            "target": report.target,
            "source_type": report.source_type,
            "target_type": report.target_type,
            "checked": report.checked,
        }

    return _handle("translate", action)


@app.post("/ni-check")
def ni_check(req: NICheckRequest):
    def action():
        verdict = ni_check_source(
            load_text(req.source, req.lattice),
            req.secret_label, req.observer, req.samples, req.seed, req.fuel,
        )
        return verdict.model_dump()

    return _handle("ni-check", action)

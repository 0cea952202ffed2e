"""HTTP JSON API over a loaded checkpoint, for the interactive UI and
scripted clients.

The model is loaded once at startup, shared read-only across handlers, and
every response is deterministic per checkpoint, so repeated identical
requests return byte-identical bodies.  The latent map is computed lazily on
first request and cached per checkpoint hash (single computation, other
requests wait).
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import data as data_mod
from . import design, explain
from .elements import (
    CompositionError,
    UnknownElementError,
    format_standard,
    parse_formula,
    vocabulary,
)
from .dvae.checkpoint import checkpoint_sha256, load_model
from .dvae.model import DvaeModel

CHECKPOINT_ENV = "DVAE_CHECKPOINT"


class ApiError(Exception):
    """Error payload with a machine-readable code from a closed set."""

    CODES = ("bad_formula", "unknown_element", "model_not_loaded", "out_of_range", "internal")

    def __init__(self, code: str, message: str, status: int = 400, detail=None):
        assert code in self.CODES
        self.code = code
        self.message = message
        self.status = status
        self.detail = detail
        super().__init__(message)

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message}
        if self.detail is not None:
            body["detail"] = self.detail
        return JSONResponse(status_code=self.status, content=body)


class ClassifyRequest(BaseModel):
    formula: str


class EncodeRequest(BaseModel):
    formula: str
    phi: float | None = None


class GenerateRequest(BaseModel):
    z: list[float]
    target_p: float


class InvertRequest(BaseModel):
    formula: str
    cutoff: float | None = None
    max_iters: int = 10


class ShapRequest(BaseModel):
    formula: str


def _parse(formula: str):
    try:
        return parse_formula(formula)
    except UnknownElementError as exc:
        raise ApiError("unknown_element", str(exc)) from exc
    except CompositionError as exc:
        raise ApiError("bad_formula", str(exc)) from exc


def create_app(checkpoint_path: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    checkpoint_path = checkpoint_path or os.environ.get(CHECKPOINT_ENV)
    app = FastAPI(title="alloyvae", docs_url="/docs")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    state: dict = {"model": None, "hash": None, "latent_map": None}
    latent_lock = threading.Lock()
    if checkpoint_path:
        state["model"] = load_model(checkpoint_path)
        state["hash"] = checkpoint_sha256(checkpoint_path)
        if not isinstance(state["model"], DvaeModel):
            raise ValueError("service requires a full dvae checkpoint")

    def model() -> DvaeModel:
        m = state["model"]
        if m is None:
            raise ApiError("model_not_loaded", "no checkpoint loaded", status=500)
        return m

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        errors = [
            {"loc": [str(p) for p in err.get("loc", ())],
             "msg": str(err.get("msg", "")), "type": str(err.get("type", ""))}
            for err in exc.errors()
        ]
        fields = {loc for err in errors for loc in err["loc"]}
        code = "out_of_range" if fields & {"z", "target_p", "phi", "cutoff", "max_iters"} \
            else "bad_formula"
        return ApiError(code, "invalid request body", detail=errors).response()

    @app.exception_handler(Exception)
    async def _internal_error(_req: Request, exc: Exception):
        return ApiError("internal", f"{type(exc).__name__}: {exc}", status=500).response()

    @app.post("/api/classify")
    def api_classify(req: ClassifyRequest):
        m = model()
        comp = _parse(req.formula)
        from .featurize import engineered_features

        raw = engineered_features(comp).as_array()
        return {
            "probability": m.classify(comp),
            "features8_raw": raw.tolist(),
            "features8_std": m.scaler.transform(raw).tolist(),
        }

    @app.post("/api/encode")
    def api_encode(req: EncodeRequest):
        m = model()
        comp = _parse(req.formula)
        phi = req.phi
        if phi is not None and not 0.0 <= phi <= 1.0:
            raise ApiError("out_of_range", f"phi must lie in [0, 1], got {phi}")
        mu, sigma = m.encode(comp, phi)
        return {"mu": mu.tolist(), "sigma": sigma.tolist()}

    @app.post("/api/generate")
    def api_generate(req: GenerateRequest):
        m = model()
        l = m.config.latent_dim
        if len(req.z) != l:
            raise ApiError("out_of_range", f"z must have length {l}, got {len(req.z)}")
        if not all(abs(v) < 1e6 for v in req.z):
            raise ApiError("out_of_range", "z coordinates out of range")
        if not 0.0 <= req.target_p <= 1.0:
            raise ApiError("out_of_range", f"target_p must lie in [0, 1], got {req.target_p}")
        res = design.generate(m, req.z, req.target_p)
        return {
            "formula": format_standard(res.composition),
            "composition": res.composition.fractions,
            "recheck_p": res.recheck_p,
            "consistent": res.consistent,
        }

    @app.post("/api/invert")
    def api_invert(req: InvertRequest):
        m = model()
        comp = _parse(req.formula)
        cutoff = m.config.sp_cutoff if req.cutoff is None else req.cutoff
        if not 0.0 <= cutoff <= 1.0:
            raise ApiError("out_of_range", f"cutoff must lie in [0, 1], got {cutoff}")
        if not 1 <= req.max_iters <= 1000:
            raise ApiError("out_of_range", "max_iters must lie in [1, 1000]")
        trace = design.invert(m, comp, cutoff=cutoff, max_iters=req.max_iters)
        return {
            "steps": [
                {
                    "formula": format_standard(s.alloy),
                    "composition": s.alloy.fractions,
                    "probability": s.probability,
                    "z": s.latent.tolist(),
                }
                for s in trace.steps
            ],
            "converged": trace.converged,
            "cutoff": trace.cutoff,
        }

    @app.get("/api/latent-map")
    def api_latent_map():
        m = model()
        with latent_lock:
            if state["latent_map"] is None:
                records = data_mod.load_dataset(data_mod.bundled_dataset_path())
                lm = design.latent_map(m, records, groups=design.DEFAULT_GROUPS)
                state["latent_map"] = lm.to_jsonable()
        return state["latent_map"]

    @app.post("/api/shap")
    def api_shap(req: ShapRequest):
        m = model()
        comp = _parse(req.formula)
        if m.shap_background is None:
            raise ApiError("internal", "checkpoint carries no SHAP background", status=500)
        exp = explain.explain_alloy(m, comp, m.shap_background)
        return {
            "base_value": exp.base_value,
            "shap_values": exp.shap_values.tolist(),
            "feature_names": list(explain.FEATURE_NAMES),
            "feature_values": exp.instance.as_array().tolist(),
            "model_output": exp.model_output,
        }

    @app.get("/api/model")
    def api_model():
        m = model()
        return {
            "checkpoint_hash": state["hash"],
            "vocabulary": list(vocabulary()),
            "config": m.config.to_dict(),
            "metrics": m.metrics,
        }

    if static_dir:
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="ui")

    return app

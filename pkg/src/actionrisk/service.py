"""HTTP service for classification, reporting, and what-if risk queries.

The app serves an immutable model/report snapshot loaded at startup.
Responses are pure functions of (model, report, request body): classify
runs the network in inference mode, what-if recomputes risk and the
risk-adjusted flu probability per call. Malformed request bodies yield
status 400 with a machine-readable error payload.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import reasoning
from .data import N_KEYPOINTS, SkeletonSequence, sequence_features
from .restcn import ResTcnModel, load_model, predict


class ClassifyRequest(BaseModel):
    frames: list[list[list[float]]] = Field(description="T x 17 x 2 keypoint coordinates")


class WhatIfRequest(BaseModel):
    alpha: float = Field(ge=0)
    beta: float = Field(ge=0)
    pCough: float = Field(ge=0, le=1)
    pSneeze: float = Field(ge=0, le=1)
    sensitivity: float | None = Field(default=None, ge=0, le=1)
    specificity: float | None = Field(default=None, ge=0, le=1)
    cohort: str | None = None


def _cohort_metrics(report: dict, cohort: str) -> dict:
    """Resolve a cohort name ('baseline' or an attribute value) to metrics."""
    if cohort == "baseline":
        return report["baseline"]["metrics"]
    for values in report["cohorts"].values():
        if cohort in values:
            entry = values[cohort]
            if entry.get("absent"):
                raise HTTPException(
                    status_code=400,
                    detail={"error": f"cohort {cohort!r} has no samples in the report"},
                )
            return entry["metrics"]
    raise HTTPException(status_code=400, detail={"error": f"unknown cohort {cohort!r}"})


def create_app(
    model: ResTcnModel,
    report: dict,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="actionrisk service")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "invalid request body", "detail": exc.errors()},
        )

    class_names = list(model.class_names or report.get("class_names") or [])

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/report")
    def get_report():
        return report

    @app.post("/api/classify")
    def classify(body: ClassifyRequest):
        frames = body.frames
        if not frames:
            raise HTTPException(status_code=400, detail={"error": "frames must be non-empty"})
        for t, frame in enumerate(frames):
            if len(frame) != N_KEYPOINTS or any(len(pt) != 2 for pt in frame):
                raise HTTPException(
                    status_code=400,
                    detail={"error": f"frame {t} must hold {N_KEYPOINTS} [x, y] keypoints"},
                )
        try:
            sequence = SkeletonSequence(frames=np.asarray(frames, dtype=float))
            features = sequence_features(sequence, model.config.seq_len)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        result = predict(model, features.astype(np.float32))
        heads = {
            f"block_{m + 1}": probs[0].tolist()
            for m, probs in enumerate(result.block_probs)
        }
        heads["fusion"] = result.fusion_probs[0].tolist()
        rank1 = int(result.rank1[0])
        name = class_names[rank1] if rank1 < len(class_names) else str(rank1)
        return {"heads": heads, "rank1": name}

    @app.post("/api/whatif")
    def whatif(body: WhatIfRequest):
        cohort = body.cohort or "baseline"
        metrics = _cohort_metrics(report, cohort)
        baseline = report["baseline"]["metrics"]
        sensitivity = body.sensitivity if body.sensitivity is not None else metrics["sensitivity"]
        specificity = body.specificity if body.specificity is not None else metrics["specificity"]

        risk = reasoning.risk_value(body.alpha, body.beta, sensitivity, specificity)
        baseline_risk = reasoning.risk_value(
            body.alpha, body.beta, baseline["sensitivity"], baseline["specificity"]
        )
        assessment = reasoning.assess_flu(body.pCough, body.pSneeze, risk)
        return {
            "risk": risk,
            "pFluBase": assessment.p_flu_base,
            "pFluAdjusted": assessment.p_flu_adjusted,
            "biasVsBaseline": reasoning.bias_risk(baseline_risk, risk),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app


def create_app_from_paths(
    model_path: str | Path,
    report_path: str | Path,
    static_dir: str | Path | None = None,
) -> FastAPI:
    model = load_model(model_path)
    with open(report_path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    return create_app(model, report, static_dir=static_dir)

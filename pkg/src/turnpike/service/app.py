"""HTTP service exposing the document-level operations.

Thin wrappers: each endpoint validates its payload with the pydantic
schema, hands the plain dict to the shared operation, and returns the
resulting document.  Domain validation errors map to 422.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import api
from . import schemas

app = FastAPI(title="turnpike", version="1.0.0")


def _call(op, payload: dict) -> dict:
    try:
        return op(payload)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/gen")
def gen(req: schemas.GenRequest) -> dict:
    return _call(api.op_gen, req.model_dump())


@app.post("/partitions", response_model=schemas.PartitionsResponse)
def partitions(req: schemas.PartitionsRequest):
    return _call(api.op_partitions, req.model_dump())


@app.post("/build", response_model=schemas.BuildResponse)
def build(req: schemas.BuildRequest):
    return _call(api.op_build, req.model_dump())


@app.post("/solve", response_model=schemas.SolveResponse)
def solve(req: schemas.SolveRequest):
    return _call(api.op_solve, req.model_dump())


@app.post("/perturb", response_model=schemas.PerturbResponse)
def perturb(req: schemas.PerturbRequest):
    return _call(api.op_perturb, req.model_dump())


@app.post("/pipeline")
def pipeline(req: schemas.PipelineRequest) -> dict:
    return _call(api.op_pipeline, req.model_dump())


@app.post("/score", response_model=schemas.ScoreResponse)
def score(req: schemas.ScoreRequest):
    return _call(api.op_score, req.model_dump())

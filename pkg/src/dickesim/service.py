"""HTTP service wrapping the simulation runs.

The server holds the eigendecomposition cache, so repeated requests
against the same model parameters skip the expensive dense eigensolve.
Artifacts are returned inline (name + CSV text) together with the run
manifest; clients decide about persistence.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .config import RunConfig
from .runs import RUNNERS

app = FastAPI(title="dickesim", version=__version__)


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig
    threads: int = Field(default=0, ge=0)


class FileArtifact(BaseModel):
    name: str
    content: str


class RunResponse(BaseModel):
    kind: str
    files: list[FileArtifact]
    manifest: dict


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


def _run(kind: str, request: RunRequest) -> RunResponse:
    try:
        result = RUNNERS[kind](request.config, threads=request.threads)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return RunResponse(
        kind=result.kind,
        files=[FileArtifact(name=n, content=c) for n, c in sorted(result.files.items())],
        manifest=result.manifest,
    )


@app.post("/spectrum", response_model=RunResponse)
def spectrum(request: RunRequest) -> RunResponse:
    return _run("spectrum", request)


@app.post("/entropy", response_model=RunResponse)
def entropy(request: RunRequest) -> RunResponse:
    return _run("entropy", request)


@app.post("/wigner", response_model=RunResponse)
def wigner(request: RunRequest) -> RunResponse:
    return _run("wigner", request)


@app.post("/poincare", response_model=RunResponse)
def poincare(request: RunRequest) -> RunResponse:
    return _run("poincare", request)

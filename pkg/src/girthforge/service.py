"""HTTP surface over the designer for programmatic callers.

Thin wrapper: every endpoint validates its payload with pydantic, calls
the same library entry points as the command line, and returns the same
report shape the CLI writes to disk.  The alist text of the incumbent
rides along in the design response so callers need no second request.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from . import __version__
from .alist import AlistError, read_alist, write_alist
from .cli import report_payload
from .model import DesignSpec, ModelError
from .solver import MODES, SolveConfig, solve
from .structure import StructureError, min_n_bound
from .tanner import girth

app = FastAPI(title="girthforge", version=__version__)


class DesignRequest(BaseModel):
    m: int = Field(ge=1)
    n: int = Field(ge=1)
    J: int = Field(ge=1)
    K: int = Field(ge=1)
    T: int = Field(ge=4)
    mode: str = "BC4"
    time_limit: float = Field(default=60.0, gt=0.0)
    seed: Optional[int] = None


class GirthRequest(BaseModel):
    alist: str


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/design")
def design(req: DesignRequest):
    if req.mode not in MODES:
        raise HTTPException(400, f"unknown mode {req.mode!r}")
    try:
        spec = DesignSpec.regular(req.m, req.n, req.J, req.K, req.T)
        report = solve(spec, SolveConfig(mode=req.mode,
                                         time_limit=req.time_limit,
                                         seed=req.seed))
    except (ModelError, StructureError) as exc:
        raise HTTPException(400, str(exc))
    payload = report_payload(spec, report)
    payload["alist"] = (
        write_alist(report.incumbent) if report.incumbent is not None else None
    )
    return payload


@app.post("/girth")
def girth_of(req: GirthRequest):
    try:
        g = read_alist(req.alist)
    except AlistError as exc:
        raise HTTPException(400, str(exc))
    got = girth(g)
    return {"girth": got, "acyclic": got is None}


@app.get("/bounds")
def bounds(J: int = Query(ge=2), K: int = Query(ge=3),
           girth_target: int = Query(alias="girth", ge=4)):
    if K <= J:
        raise HTTPException(400, f"K={K} must exceed J={J}")
    if girth_target % 2:
        raise HTTPException(400, f"girth={girth_target} must be even")
    try:
        bound = min_n_bound(J, K, girth_target)
    except (ModelError, StructureError, ValueError) as exc:
        raise HTTPException(400, str(exc))
    return {"min_n": bound, "n_equals_2m": K == 2 * J}

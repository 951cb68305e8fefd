"""Request and response models for the HTTP service.

The payloads mirror the file formats: an instance document is the same
object the CLI reads from disk, an assignment document the same object the
solver writes.  Exact non-integer values survive HTTP only when the
instance declares a ``scale``; the loader snaps them back onto the grid.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

Num = Union[int, float]


class InstanceDoc(BaseModel):
    n: int
    values: List[Num]
    multiplicities: List[int]
    scale: Optional[Num] = None
    ground_truth: Optional[List[Num]] = None


class AssignmentDoc(BaseModel):
    n: int
    m_prime: int
    integral: bool
    entries: List[List[Num]]


class GenRequest(BaseModel):
    dist: str = "uniform01"
    n: int = 5
    seed: int = 0
    quantum: Union[str, Num] = "0.000001"
    genome_length: int = 500
    circular: bool = False


class PartitionsRequest(BaseModel):
    instance: InstanceDoc
    tau: Optional[float] = None
    gaps: bool = False


class PartitionsResponse(BaseModel):
    triples: List[List[int]]
    summary: Dict[str, Any]


class BuildRequest(BaseModel):
    instance: InstanceDoc
    form: str = "tri-ilp"
    basis: bool = False
    prune: bool = False
    tau: Optional[float] = None
    include_lp: bool = False


class BuildResponse(BaseModel):
    stats: Dict[str, Any]
    lp: Optional[str] = None


class SolveRequest(BaseModel):
    instance: InstanceDoc
    form: str = "tri-ilp"
    basis: bool = False
    prune: bool = False
    tau: Optional[float] = None
    exact: bool = False
    node_limit: int = 100_000
    time_limit: Optional[float] = None


class SolveResponse(BaseModel):
    status: str
    certified: bool
    iterations: int
    nodes: int
    assignment: Optional[AssignmentDoc] = None


class PerturbRequest(BaseModel):
    instance: InstanceDoc
    r: float = 0.0
    R: float = 0.0
    seed: int = 0
    mode: str = "per_value"
    dist: str = "uniform_pm_r"


class PerturbResponse(BaseModel):
    instance: InstanceDoc
    provenance: Dict[str, Any]


class PipelineRequest(BaseModel):
    instance: InstanceDoc
    form: str = "tri-ilp"
    basis: bool = False
    prune: bool = True
    tau: Optional[float] = None
    coords: bool = False
    verify: bool = False
    exact: bool = False
    node_limit: int = 100_000
    time_limit: Optional[float] = None
    timing: bool = False


class ScoreRequest(BaseModel):
    instance: InstanceDoc
    assignment: AssignmentDoc


class ScoreResponse(BaseModel):
    labeling_error: Optional[float] = None
    kendall_tau: Optional[float] = None
    mae: Optional[float] = None
    integrality: Optional[float] = None
    multiplicity_violation: bool = Field(default=False)

"""
Report schemas for comarr
Every report embeds the RunManifest that produced it
"""

import os
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from .. import __version__

SOURCE_DATE_ENV = "SOURCE_DATE_EPOCH"

# Parameters that only decide where or how a report is written
EXCLUDED_PARAMS = ("threads", "out", "csv", "complex_out", "config", "verbose", "quiet", "command")


def manifest_timestamp() -> Optional[int]:
    value = os.environ.get(SOURCE_DATE_ENV)
    if value is None or not value.strip().isdigit():
        return None
    return int(value)


class RunManifest(BaseModel):
    """Command, parameters and input hashes of a run"""

    command: str
    params: Dict[str, object] = Field(default_factory=dict)
    seed: Optional[int] = None
    input_hashes: Dict[str, str] = Field(default_factory=dict)
    version: str = __version__
    timestamp: Optional[int] = Field(default_factory=manifest_timestamp)

    @classmethod
    def from_args(cls, command: str, args: Dict[str, object], input_hashes: Optional[Dict[str, str]] = None):
        params = {k: v for k, v in sorted(args.items()) if k not in EXCLUDED_PARAMS}
        return cls(command=command, params=params, seed=args.get("seed"), input_hashes=input_hashes or {})


class Report(BaseModel):
    schema_id: str = Field(alias="schema")
    manifest: RunManifest

    model_config = {"populate_by_name": True}

    def to_json_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


class OrbitEntry(BaseModel):
    size: int
    representative: str


class OsSummary(BaseModel):
    betti: List[int]
    trivial: List[int]
    sign: List[int]
    braid_restriction_ranks: Optional[List[int]] = None


class InvariantsReport(Report):
    family: str
    t: int
    k: int
    hyperplanes: int
    rank: int
    lineality_dim: int
    rank_counts: List[int]
    charpoly: List[int]
    charpoly_deletion_restriction: List[int]
    charpoly_agreement: bool
    charpoly_factored: str
    poincare: List[int]
    regions: int
    orbits: List[OrbitEntry]
    orlik_solomon: Optional[OsSummary] = None


class HomologyDegree(BaseModel):
    degree: int
    rank: int
    torsion: List[int] = Field(default_factory=list)


class HomologyReport(Report):
    family: str
    k: int
    coeff: str
    p: Optional[int] = None
    twist: str
    quotient: bool
    cells: List[int]
    degrees: List[HomologyDegree]


class MapRowModel(BaseModel):
    degree: int
    dim_source: int
    dim_target: int
    rank: int
    surjective: bool
    injective: bool


class OracleRowModel(BaseModel):
    degree: int
    cellular_rank: int
    os_rank: int
    cellular_dims: List[int]
    os_dims: List[int]
    agrees: bool


class CompareReport(Report):
    family: str
    t: int
    k: int
    p: int
    twist: str
    identity: bool
    source_cells: List[int]
    target_cells: List[int]
    rows: List[MapRowModel]
    oracle: List[OracleRowModel]
    oracle_agreement: bool
    non_surjective_degrees: List[int]
    verdict: Optional[str] = None


class VerifyReport(Report):
    prop: str
    t: int
    k: int
    n: int
    checked: int
    passed: int
    failed: int
    failures: List[List[List[int]]]
    witness: Optional[List[List[int]]] = None


class SampleReport(Report):
    family: str
    t: int
    k: int
    box: int
    requested: int
    accepted: int
    trials: int
    acceptance_rate: float
    configurations: List[List[List[int]]]


class StabilizeReport(Report):
    t: int
    k: int
    constant: str
    input: List[List[int]]
    output: List[List[int]]
    inside_before: bool
    inside_after: bool
    dominates: bool

"""Pydantic request/response models shared by the HTTP service and the CLI.

Scalars on the wire are JSON numbers for floats and strings for exact values
("p/q" rationals or exact expressions such as "3*sqrt(11)/4").  Reports
serialize exact scalars back to strings so that exactness survives the wire.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

Scalar = Union[float, str]
Matrix = list[list[Scalar]]


class ToleranceOptions(BaseModel):
    tolerance: float = 1e-9
    class_tolerance: float = 1e-7
    closure_tolerance: float = 1e-9
    exceptional_tolerance: float = 1e-7
    exact: bool = False


class HolonomyRequest(BaseModel):
    """Four holonomy matrices (or three plus the derive-fourth flag)."""

    kind: Literal["so12", "sl2r"]
    matrices: list[Matrix]
    derive_fourth: bool = False
    options: ToleranceOptions = Field(default_factory=ToleranceOptions)

    @field_validator("matrices")
    @classmethod
    def _count(cls, v):
        if len(v) not in (3, 4):
            raise ValueError("provide four matrices, or three with derive_fourth")
        return v


class GramRequest(BaseModel):
    """Upper-triangular Gram entries (10 values, row-major) plus model sign."""

    upper: list[Scalar]
    sigma: Optional[int] = None
    options: ToleranceOptions = Field(default_factory=ToleranceOptions)

    @field_validator("upper")
    @classmethod
    def _count(cls, v):
        if len(v) != 10:
            raise ValueError("expected 10 upper-triangular entries")
        return v

    @field_validator("sigma")
    @classmethod
    def _sign(cls, v):
        if v is not None and v not in (-1, 1):
            raise ValueError("sigma must be -1 or +1")
        return v


class TetrahedronDocument(BaseModel):
    sigma: int
    normals: list[list[float]]
    vertices: list[list[float]]


class ForwardRequest(BaseModel):
    """Input for the forward map: a Gram document or an explicit tetrahedron."""

    gram: Optional[GramRequest] = None
    tetrahedron: Optional[TetrahedronDocument] = None
    options: ToleranceOptions = Field(default_factory=ToleranceOptions)


class FlatFaceModel(BaseModel):
    normal: list[float]
    area: float
    support: float = 0.0


class FlatCheckRequest(BaseModel):
    faces: list[FlatFaceModel]
    radii: list[float] = Field(default_factory=list)
    sigma: int = -1


# --- responses ---------------------------------------------------------------


class NormalModel(BaseModel):
    representative: list[Scalar]
    causal_sign: int
    theta: Optional[float] = None


class GramModel(BaseModel):
    entries: list[list[Scalar]]
    det: Scalar
    minors: list[Scalar]
    inertia: list[int]
    minor_inertias: list[list[int]]


class TetrahedronModel(BaseModel):
    sigma: int
    normals: list[list[float]]
    vertices: list[list[float]]
    supports: list[float]


class DiagnosticsModel(BaseModel):
    closure_residual: float
    exceptional_mismatch: float
    holonomy_match_residual: float
    minor_identity_residual: float


class ReconstructionResponse(BaseModel):
    sigma: int
    model: str
    normals: list[NormalModel]
    gram: GramModel
    chi: list[Scalar]
    branch_signs: list[int]
    tetrahedron: TetrahedronModel
    face_classes: list[str]
    diagnostics: DiagnosticsModel
    central_signs: Optional[list[int]] = None


class ForwardResponse(BaseModel):
    sigma: int
    representative_flips: list[int]
    closure_residual: float
    holonomies: list[list[list[float]]]
    traces: list[float]
    face_classes: list[str]
    lifts: list[list[list[float]]]
    lift_traces: list[float]
    spin_closure_sign: int


class RoundtripResponse(ForwardResponse):
    gram_in: GramModel
    gram_out: GramModel
    gram_deviation: float
    det_deviation: float
    minor_deviations: list[float]
    supports: list[float]


class ClassifyResponse(BaseModel):
    model: str
    sigma: Optional[int] = None
    det: float
    inertia: list[int]
    minor_inertias: list[list[int]]
    vertex_types: list[str]
    dual_vertex_types: list[str]
    face_causal_types: list[str]


class RadiusSample(BaseModel):
    radius: float
    gram: list[list[float]]
    gram_deviation_from_flat: float
    closure_defect: float
    expansion_defect: float


class FlatCheckResponse(BaseModel):
    closure_residual_vector: list[float]
    closure_residual_norm: float
    flat_gram: list[list[float]]
    samples: list[RadiusSample]
    gram_scaling_ratios: list[float]


class VerifyRow(BaseModel):
    dataset: str
    check: str
    status: Literal["pass", "fail"]
    measured: float
    detail: str = ""


class VerifyPaperResponse(BaseModel):
    rows: list[VerifyRow]
    passed: int
    failed: int
    all_passed: bool


class ErrorResponse(BaseModel):
    error: str
    code: int
    message: str
    data: dict = Field(default_factory=dict)

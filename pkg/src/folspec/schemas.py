"""Pydantic request/response models for the service (and the CLI client)."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import AliasChoices, BaseModel, Field, model_validator

from .engine import AdiabaticReport, EInfinityReport, PageTable
from .models import DifferentialTerm, GeneratorSpec, ModelSpec


class GeneratorModel(BaseModel):
    name: str
    bidegree: tuple[int, int]


class TermModel(BaseModel):
    coeff: str
    monomial: list[str]


class DifferentialModel(BaseModel):
    on: str
    value: list[TermModel]


class ModelSpecModel(BaseModel):
    """Wire form of a declarative model description."""

    scalar: Literal["rational", "float"]
    p: int
    q: int
    generators: list[GeneratorModel]
    differentials: list[DifferentialModel] = Field(default_factory=list)
    fourier_modes: Optional[int] = None

    def to_core(self) -> ModelSpec:
        spec = ModelSpec(
            scalar=self.scalar,
            p=self.p,
            q=self.q,
            generators=tuple(
                GeneratorSpec(g.name, (g.bidegree[0], g.bidegree[1])) for g in self.generators
            ),
            differentials={
                d.on: tuple(DifferentialTerm(t.coeff, tuple(t.monomial)) for t in d.value)
                for d in self.differentials
            },
            fourier_modes=self.fourier_modes,
        )
        spec.validate()
        return spec

    @classmethod
    def from_core(cls, spec: ModelSpec) -> "ModelSpecModel":
        return cls.model_validate(spec.to_json_dict())


class PageTableModel(BaseModel):
    page: int
    q: int
    p: int
    dims: list[tuple[int, int, int]]
    stabilized: bool

    @classmethod
    def from_core(cls, table: PageTable) -> "PageTableModel":
        return cls.model_validate(table.to_json_dict())

    def to_core(self) -> PageTable:
        return PageTable.from_json_dict(self.model_dump())


class ModelSourceMixin(BaseModel):
    """Exactly one of an inline model or a builtin name."""

    model: Optional[ModelSpecModel] = None
    builtin: Optional[Literal["kodaira", "suspension"]] = None
    n: int = 1
    modes: int = 2
    tolerance: Optional[float] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.model is None) == (self.builtin is None):
            raise ValueError("provide exactly one model source (inline model or builtin)")
        return self


class ValidateRequest(BaseModel):
    model: ModelSpecModel
    tolerance: Optional[float] = None


class RelationFailureModel(BaseModel):
    relation: str
    cell: tuple[int, int]
    shift: tuple[int, int]
    residual: float


class ValidateResponse(BaseModel):
    valid: bool
    failures: list[RelationFailureModel]
    max_residual: float
    total_dim: int


class PagesRequest(ModelSourceMixin):
    max_page: Optional[int] = None


class EulerEntryModel(BaseModel):
    page: int
    chi: int


class EInfinityModel(BaseModel):
    page: int
    einf_degree_sums: list[int]
    betti: list[int]
    ok: bool

    @classmethod
    def from_core(cls, report: EInfinityReport) -> "EInfinityModel":
        return cls(
            page=report.page,
            einf_degree_sums=list(report.einf_degree_sums),
            betti=list(report.betti),
            ok=report.ok,
        )


class PagesResponse(BaseModel):
    q: int
    p: int
    pages: list[PageTableModel]
    euler: list[EulerEntryModel]
    e_infinity: EInfinityModel
    direct_agreement: bool


class PredictRequest(BaseModel):
    n: int
    betti: list[int] = Field(validation_alias=AliasChoices("betti", "b"))
    quasi_regular: bool = False


class PredictResponse(BaseModel):
    n: int
    e: list[int]
    mode: str
    rows: dict[str, list[int]]
    warnings: list[str]
    table: PageTableModel


class ClauseModel(BaseModel):
    name: str
    cell: tuple[int, int]
    detail: str


class CheckRequest(ModelSourceMixin):
    table: Optional[PageTableModel] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = sum(x is not None for x in (self.model, self.builtin, self.table))
        if given != 1:
            raise ValueError("provide exactly one of: inline model, builtin, page table")
        return self


class CheckResponse(BaseModel):
    verdict: Literal["NotVaisman", "Inconclusive"]
    reason: str
    clauses: list[ClauseModel]
    table: PageTableModel


class AdiabaticRequest(ModelSourceMixin):
    h: list[float]
    degree: int


class AdiabaticEntryModel(BaseModel):
    h: float
    eigenvalues: list[float]
    small_count: int


class AdiabaticResponse(BaseModel):
    degree: int
    kernel_dim: int
    gap: Optional[float]
    e2_degree_sum: int
    entries: list[AdiabaticEntryModel]

    @classmethod
    def from_core(cls, report: AdiabaticReport) -> "AdiabaticResponse":
        return cls(
            degree=report.degree,
            kernel_dim=report.kernel_dim,
            gap=report.gap,
            e2_degree_sum=report.e2_degree_sum,
            entries=[
                AdiabaticEntryModel(
                    h=e.h, eigenvalues=list(e.eigenvalues), small_count=e.small_count
                )
                for e in report.entries
            ],
        )


class EmitRequest(BaseModel):
    builtin: Literal["kodaira", "suspension"]
    n: int = 1
    modes: int = 2
    tolerance: Optional[float] = None


class EmitResponse(BaseModel):
    model: ModelSpecModel


class DiophantineProbeModel(BaseModel):
    vector_index: int
    minima: dict[int, float]
    witnesses: dict[int, list[int]]


class MatrixARequest(BaseModel):
    n: int
    diophantine_height: Optional[int] = None


class MatrixAResponse(BaseModel):
    n: int
    diagonal: list[int]
    matrix: list[list[int]]
    det: int
    eigenvalues: list[float]
    log_eigenvalues: list[float]
    leafwise_product: float
    diophantine: Optional[list[DiophantineProbeModel]] = None

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .forms import AlternatingTrilinearForm, LinkingForm
from .magnus import AtLeast, MilnorDegree
from .manifold import ManifoldDescriptor
from .obstruct import DistinctionReport, ObstructionReport

SCHEMA_VERSION = "1.0"

Scalar = Union[int, str]


def _scalar(value) -> Scalar:
    value = Fraction(value)
    return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class CustomLinkModel(BaseModel):
    """Custom link input: linking matrix (framings on the diagonal) and longitude words."""

    model_config = ConfigDict(extra="ignore")

    name: str = Field(default="custom")
    linking_matrix: List[List[int]]
    longitudes: List[str]

    @model_validator(mode="after")
    def check_shape(self) -> "CustomLinkModel":
        n = len(self.longitudes)
        if len(self.linking_matrix) != n or any(len(row) != n for row in self.linking_matrix):
            raise ValueError(f"linking_matrix must be {n}x{n} for {n} longitudes")
        return self


class TrilinearFormModel(BaseModel):
    dimension: int = Field(ge=0)
    ring: Literal["Z", "Q", "Zp"]
    modulus: Optional[int] = None
    triples: List[Tuple[int, int, int, Scalar]] = Field(
        default_factory=list, description="1-based (i, j, k, value) with i < j < k"
    )

    @classmethod
    def from_form(cls, form: AlternatingTrilinearForm) -> "TrilinearFormModel":
        return cls(
            dimension=form.dimension,
            ring=form.ring,
            modulus=form.modulus,
            triples=[(i + 1, j + 1, k + 1, _scalar(c)) for i, j, k, c in form.triples()],
        )


class LinkingFormModel(BaseModel):
    torsion: List[int]
    gram: List[List[Tuple[int, int]]] = Field(description="entries as [numerator, denominator] in [0, 1)")

    @classmethod
    def from_form(cls, form: LinkingForm) -> "LinkingFormModel":
        return cls(
            torsion=list(form.orders),
            gram=[[(v.numerator, v.denominator) for v in row] for row in form.gram],
        )


class MilnorDegreeModel(BaseModel):
    value: int
    exact: bool

    @classmethod
    def from_degree(cls, degree: Optional[MilnorDegree]) -> Optional["MilnorDegreeModel"]:
        if degree is None:
            return None
        if isinstance(degree, AtLeast):
            return cls(value=degree.bound, exact=False)
        return cls(value=degree, exact=True)


class DescriptorModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    origin: str
    beta1: int = Field(ge=0)
    torsion: List[int]
    linking_form: Optional[LinkingFormModel] = None
    cup_form_q: Optional[TrilinearFormModel] = None
    cup_forms_mod_p: Dict[str, TrilinearFormModel] = Field(default_factory=dict)
    milnor_degree: Optional[MilnorDegreeModel] = None
    massey_degree: Optional[MilnorDegreeModel] = None
    ring_type: Optional[str] = None
    provenance: List[str] = Field(default_factory=list)

    @field_validator("torsion")
    @classmethod
    def divisor_chain(cls, value: List[int]) -> List[int]:
        for idx, d in enumerate(value):
            if d < 2 or (idx and d % value[idx - 1]):
                raise ValueError("torsion must be a divisor chain of integers >= 2")
        return value

    @classmethod
    def from_descriptor(cls, d: ManifoldDescriptor) -> "DescriptorModel":
        return cls(
            origin=d.origin,
            beta1=d.beta1,
            torsion=list(d.torsion.torsion),
            linking_form=LinkingFormModel.from_form(d.linking_form) if d.linking_form is not None else None,
            cup_form_q=TrilinearFormModel.from_form(d.cup_form_q) if d.cup_form_q is not None else None,
            cup_forms_mod_p={str(p): TrilinearFormModel.from_form(f) for p, f in sorted(d.cup_forms_mod_p.items())},
            milnor_degree=MilnorDegreeModel.from_degree(d.milnor_degree),
            massey_degree=MilnorDegreeModel.from_degree(d.massey_degree),
            ring_type=d.ring_type.describe() if d.ring_type is not None else None,
            provenance=list(d.provenance),
        )


class FiredRuleModel(BaseModel):
    tag: Literal["Thm1.1", "Cor1.2", "Thm1.3", "Prop4.2", "Prop4.4"]
    witness: str


class ObstructionReportModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    verdict: Literal["Obstructed", "ConsistentNecessaryChecksPassed", "Inapplicable"]
    fired_rules: List[FiredRuleModel] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    descriptor: Optional[DescriptorModel] = None

    @model_validator(mode="after")
    def obstructed_has_witness(self) -> "ObstructionReportModel":
        if self.verdict == "Obstructed" and not self.fired_rules:
            raise ValueError("Obstructed verdict requires a fired rule")
        return self

    @classmethod
    def from_report(
        cls, report: ObstructionReport, descriptor: Optional[ManifoldDescriptor] = None
    ) -> "ObstructionReportModel":
        return cls(
            verdict=report.verdict.value,
            fired_rules=[FiredRuleModel(tag=r.tag, witness=r.witness) for r in report.fired_rules],
            notes=list(report.notes),
            descriptor=DescriptorModel.from_descriptor(descriptor) if descriptor is not None else None,
        )


class EvidenceModel(BaseModel):
    invariant: str
    first: str
    second: str


class DistinctionReportModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    distinct: bool
    evidence: List[EvidenceModel] = Field(default_factory=list)
    caveats: List[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report: DistinctionReport) -> "DistinctionReportModel":
        return cls(
            distinct=report.distinct,
            evidence=[EvidenceModel(invariant=e.invariant, first=e.first, second=e.second) for e in report.evidence],
            caveats=list(report.caveats),
        )


class SeifertReportModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    notation: str
    presentation: str
    homology: str
    beta1: int
    torsion: List[int]
    fiber_order: Optional[int] = Field(description="null when the regular fiber has infinite order")
    two_torsion: bool
    euler_number: Optional[str] = None
    ring_type: str
    linking_form: Optional[LinkingFormModel] = None


class MuValueModel(BaseModel):
    index: List[int]
    value: int
    modulus: int


class LinkReportModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    name: str
    components: int
    linking_matrix: List[List[int]]
    longitudes: List[str]
    mu: List[MuValueModel] = Field(default_factory=list)
    milnor_degree: Optional[MilnorDegreeModel] = None


class ExampleRowModel(BaseModel):
    label: str
    beta1: int
    torsion: List[int]
    verdict: str
    rules: List[str]
    milnor_degree: Optional[MilnorDegreeModel] = None


class ExampleReportModel(BaseModel):
    schema_version: str = SCHEMA_VERSION
    example: str
    claim: str
    rows: List[ExampleRowModel]
    distinctions: List[DistinctionReportModel] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


SCHEMA_MODELS = {
    "descriptor": DescriptorModel,
    "obstruction": ObstructionReportModel,
    "distinction": DistinctionReportModel,
    "sfs": SeifertReportModel,
    "link": LinkReportModel,
    "example": ExampleReportModel,
    "custom-link": CustomLinkModel,
}

JSON_SCHEMA_DIALECT = "https://json-schema.org/draft/2020-12/schema"
SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas" / f"v{SCHEMA_VERSION}"


def schema_document(name: str) -> Dict[str, Any]:
    """The published JSON schema of a wire model, as committed under schemas/."""
    document: Dict[str, Any] = {
        "$schema": JSON_SCHEMA_DIALECT,
        "$comment": f"seifert-obstruct wire schema {SCHEMA_VERSION}",
    }
    document.update(SCHEMA_MODELS[name].model_json_schema())
    return document


def schema_path(name: str, directory: Path = SCHEMA_DIR) -> Path:
    return directory / f"{name}.json"


def write_schemas(directory: Path = SCHEMA_DIR) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(SCHEMA_MODELS):
        path = schema_path(name, directory)
        path.write_text(json.dumps(schema_document(name), indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written

"""Pydantic schemas for problem files and machine-readable reports."""
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = "1"


# Complex values: [re, im], {"rootOfUnity": [k, n]} for exp(2 pi i k / n), or a bare real
class RootOfUnity(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rootOfUnity: Tuple[int, int]

    @field_validator("rootOfUnity")
    @classmethod
    def denominator_positive(cls, value):
        if value[1] < 1:
            raise ValueError("root of unity denominator must be >= 1")
        return value


ComplexValue = Union[Tuple[float, float], RootOfUnity, float]
Matrix = List[List[ComplexValue]]


# Problem file sections
class GroupSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    table: List[List[int]] = Field(..., min_length=1)
    labels: Optional[List[str]] = None
    name: str = ""

    @model_validator(mode="after")
    def table_is_square(self):
        n = len(self.table)
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise ValueError(f"table row {i} has {len(row)} entries, expected {n}")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for a table of order {n}")
        return self


class FactorSystemSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mu: Matrix


class IrrepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=1)
    matrices: List[Matrix]


class RepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrices: List[Matrix] = Field(..., min_length=1)
    factorSystem: Optional[FactorSystemSection] = None


class GroupFormSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["groupForm"]
    rep: RepSection
    w: List[Matrix] = Field(..., min_length=1)


class ControlledSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["controlled"]
    projectors: List[Matrix] = Field(..., min_length=1)
    unitaries: List[Matrix] = Field(..., min_length=1)

    @model_validator(mode="after")
    def one_unitary_per_projector(self):
        if len(self.projectors) != len(self.unitaries):
            raise ValueError(f"{len(self.projectors)} projectors but {len(self.unitaries)} unitaries")
        return self


class DoubleSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["double"]
    coefficients: List[ComplexValue] = Field(..., min_length=1)
    repA: RepSection
    repB: RepSection


class QBlocksSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["qBlocks"]
    pattern: List[int] = Field(..., min_length=1)
    dB: int = Field(..., ge=1)
    blocks: List[Matrix] = Field(..., min_length=1)


class RBlocksSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["rBlocks"]
    blocks: List[Matrix] = Field(..., min_length=1)
    repA: RepSection
    repB: RepSection


FormSection = Annotated[
    Union[GroupFormSection, ControlledSection, DoubleSection, QBlocksSection, RBlocksSection],
    Field(discriminator="type"),
]


class OptionsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tolerance: Optional[float] = Field(None, gt=0)
    rankTol: Optional[float] = Field(None, gt=0, lt=1)
    seed: Optional[int] = None
    restarts: Optional[int] = Field(None, ge=1)


class ProblemFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: Literal["1"] = SCHEMA_VERSION
    name: str = ""
    group: GroupSection
    factorSystem: Optional[FactorSystemSection] = None
    # factor system of the irreps; defaults to factorSystem, or to the
    # product of the repA and repB factor systems for rBlocks
    irrepsFactorSystem: Optional[FactorSystemSection] = None
    irreps: Optional[List[IrrepSection]] = None
    form: FormSection
    options: OptionsSection = Field(default_factory=OptionsSection)

    @model_validator(mode="after")
    def sections_consistent(self):
        n = len(self.group.table)
        for label, section in (("factor system", self.factorSystem), ("irreps factor system", self.irrepsFactorSystem)):
            if section is not None and len(section.mu) != n:
                raise ValueError(f"{label} has {len(section.mu)} rows for a group of order {n}")
        if self.irreps is not None:
            for i, irrep in enumerate(self.irreps):
                if len(irrep.matrices) != n:
                    raise ValueError(f"irrep {i + 1} has {len(irrep.matrices)} matrices for a group of order {n}")
        form = self.form
        if isinstance(form, (QBlocksSection, RBlocksSection)) and not self.irreps:
            raise ValueError(f"form type '{form.type}' needs an irreps section")
        if isinstance(form, GroupFormSection) and (len(form.rep.matrices) != n or len(form.w) != n):
            raise ValueError(f"group form needs {n} rep matrices and {n} W matrices")
        if isinstance(form, DoubleSection) and len(form.coefficients) != n:
            raise ValueError(f"double form has {len(form.coefficients)} coefficients for a group of order {n}")
        return self


# Report schemas
ComplexPair = Tuple[float, float]
PairMatrix = List[List[ComplexPair]]


class ViolationSchema(BaseModel):
    kind: str
    elements: List[int]
    residual: float
    message: str


class ValidationReportSchema(BaseModel):
    schemaVersion: str = SCHEMA_VERSION
    name: str = ""
    ok: bool
    worstResidual: float
    worstAt: List[int] = []
    violations: List[ViolationSchema] = []


class SynthesisReportSchema(BaseModel):
    schemaVersion: str = SCHEMA_VERSION
    name: str = ""
    formType: str
    dA: int
    dB: int
    groupOrder: int
    schmidtRank: int
    spanDimension: Optional[int] = None
    unitarityResidual: float
    conditionResidual: float
    U: PairMatrix
    M: Optional[PairMatrix] = None
    C: Optional[PairMatrix] = None
    W: Optional[List[PairMatrix]] = None
    problem: Optional[ProblemFile] = None


class BranchSchema(BaseModel):
    outcomeA: int
    outcomeB: int
    residual: float
    phase: ComplexPair
    probability: Optional[float] = None


class SimulationReportSchema(BaseModel):
    schemaVersion: str = SCHEMA_VERSION
    name: str = ""
    variant: str
    branchCount: int
    passed: bool
    flaggedNonUnitary: bool
    worstResidual: float
    completenessResidual: float
    probabilitySpread: Optional[float] = None
    classicalBits: float
    branches: List[BranchSchema]


class ReproductionRowSchema(BaseModel):
    name: str
    dim: int
    expected: int
    computed: int
    match: bool


class ReproductionReportSchema(BaseModel):
    schemaVersion: str = SCHEMA_VERSION
    rows: List[ReproductionRowSchema]
    allMatch: bool

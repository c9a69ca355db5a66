from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from config.settings import REPORT_SCHEMA_VERSION

ComplexPair = Tuple[float, float]


# --------------------------
# Scenario spec files
# --------------------------

class _SpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SubsystemSpec(_SpecModel):
    label: str
    dim: int = Field(ge=1)


class BasisKetExpr(_SpecModel):
    kind: Literal["basis"]
    labels: List[str]
    index: List[int]


class MaxEntangledExpr(_SpecModel):
    kind: Literal["max_entangled"]
    labels: Tuple[str, str]


class AmplitudesExpr(_SpecModel):
    kind: Literal["amplitudes"]
    labels: List[str]
    amplitudes: List[ComplexPair]


StateExpr = Annotated[
    Union[BasisKetExpr, MaxEntangledExpr, AmplitudesExpr],
    Field(discriminator="kind"),
]


class IdentityFactor(_SpecModel):
    kind: Literal["identity"]


class DensitySpec(_SpecModel):
    """Product of |v><v| factors on disjoint labels, identity elsewhere."""

    factors: List[Annotated[
        Union[BasisKetExpr, MaxEntangledExpr, AmplitudesExpr, IdentityFactor],
        Field(discriminator="kind"),
    ]] = Field(default_factory=list)
    scale: float = Field(default=1.0, gt=0.0)


class StateProjectorExpr(_SpecModel):
    kind: Literal["state"]
    state: StateExpr
    label: Optional[str] = None


class IdentityProjectorExpr(_SpecModel):
    kind: Literal["identity"]
    label: Optional[str] = None


class ComplementProjectorExpr(_SpecModel):
    kind: Literal["complement"]
    of: "ProjectorExpr"
    label: Optional[str] = None


ProjectorExpr = Annotated[
    Union[StateProjectorExpr, IdentityProjectorExpr, ComplementProjectorExpr],
    Field(discriminator="kind"),
]
ComplementProjectorExpr.model_rebuild()


class ScenarioSpec(_SpecModel):
    name: str
    description: Optional[str] = None
    subsystems: List[SubsystemSpec]
    rho_i: DensitySpec
    rho_f: DensitySpec
    slots: List[List[ProjectorExpr]]
    chain_labels: Optional[List[str]] = None


class Diagnostic(BaseModel):
    code: str
    location: str
    message: str


# --------------------------
# Reports
# --------------------------

class ScenarioMeta(BaseModel):
    name: str
    source: Literal["builtin", "spec"]
    subsystems: List[Tuple[str, int]]
    total_dim: int
    params: Dict[str, Union[bool, int, float, str]] = Field(default_factory=dict)


class DecoherenceBlock(BaseModel):
    variant: Optional[str] = None
    labels: List[str]
    entries: List[List[ComplexPair]]
    norm_trace: ComplexPair


class VerdictBlock(BaseModel):
    condition: Literal["full", "real", "medium"]
    tol: float
    consistent: bool
    max_violation: float
    worst_pair: Optional[Tuple[str, str]] = None


class ChBlock(BaseModel):
    status: Literal["assigned", "not_consistent", "undefined"]
    condition: Literal["full", "real", "medium"]
    probabilities: Optional[Dict[str, float]] = None
    detail: Optional[str] = None


class Outcome(BaseModel):
    label: str
    probability: float


class AblBlock(BaseModel):
    variant: Optional[str] = None
    outcomes: List[Outcome]
    denominator: float


class ClosedFormBlock(BaseModel):
    d: int
    probabilities: List[float]
    probabilities_exact: List[str]
    offdiag_12: float
    offdiag_12_exact: str
    numeric_probabilities: List[float]
    numeric_offdiag_12: float
    max_abs_deviation: float
    agrees: bool


class TimingBlock(BaseModel):
    build_seconds: float
    analysis_seconds: float


class Report(BaseModel):
    schema_version: str = REPORT_SCHEMA_VERSION
    scenario: ScenarioMeta
    decoherence: Optional[DecoherenceBlock] = None
    consistency: List[VerdictBlock]
    ch: ChBlock
    abl: AblBlock
    closed_form: Optional[ClosedFormBlock] = None
    timing: Optional[TimingBlock] = None


class SweepRow(BaseModel):
    d: int
    dim: int
    p1: float
    p1_closed: float
    p2: float
    p2_closed: float
    offdiag_12: float
    offdiag_12_closed: float
    max_abs_deviation: float


class SweepReport(BaseModel):
    schema_version: str = REPORT_SCHEMA_VERSION
    rows: List[SweepRow]
    agrees: bool

"""Experiment configuration and result records (pydantic, JSON on disk)."""

from app.core.compat import StrEnum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.adversary import StrategyKind
from app.models.subspace import CodebookMode


class FieldBlock(BaseModel):
    p: int = 2
    e: int = 1
    poly: list[int] | None = None


class CodebookBlock(BaseModel):
    n: int = Field(ge=1)
    C: int | None = Field(default=None, ge=1)  # override of min_cut(topology)
    M: int | None = Field(default=None, ge=1)  # derived when secrecy is enabled
    mode: CodebookMode = CodebookMode.RANDOM
    load_path: str | None = None
    fixed: bool = False


class AssignmentBlock(BaseModel):
    read_only: list[int] = []
    write_only: list[int] = []
    read_write: list[int] = []


class AdversaryBlock(BaseModel):
    power: tuple[int, int, int] = (0, 0, 0)
    # None picks the first assignment over the min-cut edges; "sweep" is for run_sweep
    assignment: AssignmentBlock | Literal["sweep"] | None = None
    strategy: StrategyKind = StrategyKind.NO_ATTACK
    sweep_strategies: list[StrategyKind] = [StrategyKind.SYMMETRIZATION, StrategyKind.PUSH]
    knows_code: bool = True
    decode_radius: int | None = Field(default=None, ge=0)  # defaults to z_w


class SecrecyBlock(BaseModel):
    enabled: bool = False
    L: int = Field(default=1, ge=1)
    z_r: int = Field(default=0, ge=0)
    ell: int | None = None  # must equal codebook.n when set


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    field: FieldBlock = FieldBlock()
    topology: str = "parallel:2"
    coding: Literal["random", "identity"] = "random"
    codebook: CodebookBlock
    adversary: AdversaryBlock = AdversaryBlock()
    secrecy: SecrecyBlock = SecrecyBlock()
    trials: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
    out: str | None = None

    @model_validator(mode="after")
    def _codebook_size(self) -> "ExperimentConfig":
        if self.secrecy.enabled:
            if self.secrecy.z_r >= self.secrecy.L:
                raise ValueError("secrecy.z_r must be smaller than secrecy.L")
            if self.secrecy.ell is not None and self.secrecy.ell != self.codebook.n:
                raise ValueError("secrecy.ell must equal codebook.n in the composed pipeline")
        elif self.codebook.M is None and self.codebook.load_path is None:
            raise ValueError("codebook.M is required unless a codebook is loaded")
        return self


class TrialVerdict(StrEnum):
    CORRECT = "Correct"
    WRONG_MESSAGE = "WrongMessage"
    AMBIGUOUS = "Ambiguous"
    NONE_WITHIN_RADIUS = "NoneWithinRadius"
    RANK_DEFICIENT = "RankDeficient"


class TrialResult(BaseModel):
    trial: int
    message: int
    verdict: TrialVerdict
    decoded: int | None = None
    compatible_count: int
    dim_ro: int
    dim_u: int
    dim_jam: int
    transfer_rank: int

    @model_validator(mode="after")
    def _wrong_means_different(self) -> "TrialResult":
        if self.verdict is TrialVerdict.WRONG_MESSAGE and self.decoded == self.message:
            raise ValueError("WrongMessage needs a decoded index other than the message")
        return self


class SummaryStats(BaseModel):
    trials: int
    errors: int
    error_probability: float
    ci_low: float
    ci_high: float
    confidence_level: float
    histogram: dict[TrialVerdict, int]
    mean_compatible: float
    regime: str
    capacity: int
    secrecy_capacity: int
    C: int
    c_override: bool
    strategy: StrategyKind
    assignment: dict[str, list[int]]
    codebook_mode: Literal["fresh", "fixed"]
    rate: float


class SecrecySummary(BaseModel):
    L: int
    z_r: int
    ell: int
    leakage: list[dict]
    all_perfectly_secret: bool
    secure_symbols: int
    recovered: int


class ExperimentReport(BaseModel):
    version: str
    seed: int
    config: ExperimentConfig
    stats: SummaryStats
    secrecy: SecrecySummary | None = None
    results: list[TrialResult] = []


class SweepReport(BaseModel):
    label: str = "implemented-adversary worst case"
    entries: list[SummaryStats]
    worst_case: SummaryStats


class CapacityRow(BaseModel):
    C: int
    z_ro: int
    z_wo: int
    z_rw: int
    regime: str
    capacity: int
    secrecy_capacity: int


class CompatReport(BaseModel):
    n: int
    C: int
    z_r: int
    q: int
    M: int
    codebooks: int
    mean: float
    minimum: int
    maximum: int
    mean_containing: float
    exact_probability: str
    expected_count: float
    expected_count_m_times_p: float
    std_of_mean: float
    within_3_sigma: bool
    ratios: dict[str, str]

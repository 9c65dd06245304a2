from pydantic import BaseModel, Field

from app.models.experiment import ExperimentConfig, SecrecySummary, SummaryStats


class RunExperimentRequest(BaseModel):
    config: ExperimentConfig
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)


class RunExperimentResponse(BaseModel):
    seed: int
    version: str
    config: ExperimentConfig
    stats: SummaryStats
    secrecy: SecrecySummary | None = None


class CompatRequest(BaseModel):
    n: int = Field(ge=1)
    C: int = Field(ge=1)
    z_r: int = Field(ge=0)
    q: int = Field(ge=2)
    M: int = Field(ge=1)
    codebooks: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0)


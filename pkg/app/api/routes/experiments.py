from fastapi import APIRouter

from app.api.schemas.experiment import CompatRequest, RunExperimentRequest, RunExperimentResponse
from app.models.experiment import CompatReport
from app.services.experiment_service import (
    compatible_count_experiment,
    run_trials,
    with_overrides,
)

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.post("/run", response_model=RunExperimentResponse)
def run(body: RunExperimentRequest) -> RunExperimentResponse:
    """Run the trials in-process and return the summary; nothing is written to disk."""
    updates = {k: v for k, v in (("trials", body.trials), ("seed", body.seed)) if v is not None}
    cfg = with_overrides(body.config, **updates)
    report = run_trials(cfg)
    return RunExperimentResponse(
        seed=report.seed,
        version=report.version,
        config=report.config,
        stats=report.stats,
        secrecy=report.secrecy,
    )


@router.post("/compat", response_model=CompatReport)
def compat(body: CompatRequest) -> CompatReport:
    return compatible_count_experiment(
        body.n, body.C, body.z_r, body.q, body.M, body.codebooks, body.seed
    )

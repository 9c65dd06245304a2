from fastapi import APIRouter, Query

from app.models.experiment import CapacityRow
from app.services.experiment_service import capacity_table, parse_powers

router = APIRouter(prefix="/capacity", tags=["capacity"])


@router.get("", response_model=list[CapacityRow])
def table(
    c_min: int = Query(1, ge=1),
    c_max: int = Query(6, ge=1),
    powers: str = Query("0,1,0;0,0,1;1,0,1", description="z_ro,z_wo,z_rw triples, ';'-separated"),
) -> list[CapacityRow]:
    """Regime, capacity and secrecy capacity for every C in [c_min, c_max] and power triple."""
    return capacity_table(range(c_min, c_max + 1), parse_powers(powers))


@router.get("/regime", response_model=CapacityRow)
def regime(
    C: int = Query(..., ge=1),
    z_ro: int = Query(0, ge=0),
    z_wo: int = Query(0, ge=0),
    z_rw: int = Query(0, ge=0),
) -> CapacityRow:
    return capacity_table([C], [(z_ro, z_wo, z_rw)])[0]

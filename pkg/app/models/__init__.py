from app.models.adversary import (
    AdversaryPower,
    AdversaryView,
    AttackStrategy,
    EdgeAssignment,
    ReceivedDecomposition,
    Regime,
    StrategyKind,
)
from app.models.field import FieldElement, FieldSpec, get_field
from app.models.matrix import MatrixQ
from app.models.network import LinearNetworkCode, NetworkTopology, TransferMatrices, TransmitResult
from app.models.secrecy import CosetCode, LeakageReport
from app.models.subspace import Codebook, CodebookMode, DecodeResult, DecodeVerdict, Subspace

__all__ = [
    "AdversaryPower",
    "AdversaryView",
    "AttackStrategy",
    "Codebook",
    "CodebookMode",
    "CosetCode",
    "DecodeResult",
    "DecodeVerdict",
    "EdgeAssignment",
    "FieldElement",
    "FieldSpec",
    "LeakageReport",
    "LinearNetworkCode",
    "MatrixQ",
    "NetworkTopology",
    "ReceivedDecomposition",
    "Regime",
    "StrategyKind",
    "Subspace",
    "TransferMatrices",
    "TransmitResult",
    "get_field",
]

from __future__ import annotations

from dataclasses import dataclass
from app.core.compat import StrEnum

from app.core.errors import UsageError
from app.models.matrix import MatrixQ
from app.models.subspace import Codebook


class Regime(StrEnum):
    WEAK = "Weak"
    STRONG = "Strong"


@dataclass(frozen=True)
class AdversaryPower:
    z_ro: int = 0
    z_wo: int = 0
    z_rw: int = 0

    def __post_init__(self) -> None:
        if min(self.z_ro, self.z_wo, self.z_rw) < 0:
            raise UsageError(f"adversary powers must be nonnegative: {self}")

    @property
    def z_r(self) -> int:
        return self.z_ro + self.z_rw

    @property
    def z_w(self) -> int:
        return self.z_wo + self.z_rw

    @property
    def z(self) -> int:
        return self.z_ro + self.z_wo + self.z_rw

    def as_tuple(self) -> tuple[int, int, int]:
        return self.z_ro, self.z_wo, self.z_rw


@dataclass(frozen=True)
class EdgeAssignment:
    """Edges the adversary controls. Observation rows follow ``read_edges`` order and
    jamming rows follow ``write_edges`` order."""

    read_only: tuple[int, ...] = ()
    write_only: tuple[int, ...] = ()
    read_write: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for name in ("read_only", "write_only", "read_write"):
            object.__setattr__(self, name, tuple(int(e) for e in getattr(self, name)))
        every = self.read_only + self.write_only + self.read_write
        if len(set(every)) != len(every):
            raise UsageError(f"edge assignment lists must be pairwise disjoint: {self}")

    @property
    def read_edges(self) -> tuple[int, ...]:
        return self.read_only + self.read_write

    @property
    def write_edges(self) -> tuple[int, ...]:
        return self.write_only + self.read_write

    @property
    def power(self) -> AdversaryPower:
        return AdversaryPower(len(self.read_only), len(self.write_only), len(self.read_write))

    def to_dict(self) -> dict[str, list[int]]:
        return {
            "read_only": list(self.read_only),
            "write_only": list(self.write_only),
            "read_write": list(self.read_write),
        }


class StrategyKind(StrEnum):
    NO_ATTACK = "none"
    RANDOM_NOISE = "random_noise"
    SYMMETRIZATION = "symmetrization"
    PUSH = "push"


@dataclass(frozen=True, eq=False)
class AttackStrategy:
    kind: StrategyKind
    codebook: Codebook | None = None
    knows_code: bool = True

    def __post_init__(self) -> None:
        if self.kind in (StrategyKind.SYMMETRIZATION, StrategyKind.PUSH) and self.codebook is None:
            raise UsageError(f"{self.kind.value} attack needs the codebook")


@dataclass(frozen=True)
class AdversaryView:
    """What the adversary sees before choosing the jam: its observation and, with
    full knowledge of the network code, the transfer rows of its read and write edges."""

    Z: MatrixQ
    assignment: EdgeAssignment
    T_AJ: MatrixQ | None = None
    T_AW: MatrixQ | None = None

    @property
    def read_only_rows(self) -> list[int]:
        return list(range(len(self.assignment.read_only)))


@dataclass(frozen=True)
class ReceivedDecomposition:
    dim_ro: int
    dim_u: int
    dim_jam: int

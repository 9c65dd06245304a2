from __future__ import annotations

from dataclasses import dataclass

from app.models.field import FieldSpec
from app.models.matrix import MatrixQ


@dataclass(frozen=True, eq=False)
class CosetCode:
    """Coset code over GF(p^ell): the message is the coset label m = H s.

    ``kernel`` spans the MDS code {s : H s = 0}; ``left_inverse`` inverts the
    first L - z_r columns of H and yields a particular solution of H s = m.
    """

    symbol_field: FieldSpec
    L: int
    z_r: int
    H: MatrixQ
    kernel: MatrixQ
    left_inverse: MatrixQ
    points: tuple[int, ...]

    @property
    def message_length(self) -> int:
        return self.L - self.z_r

    @property
    def ell(self) -> int:
        return self.symbol_field.e


@dataclass(frozen=True)
class LeakageReport:
    """Entropies in base-|symbol field| units; ``perfectly_secret`` is the exact
    independence test on integer counts."""

    h_m: float
    h_m_given_z: float
    perfectly_secret: bool
    observation: tuple[int, ...] = ()

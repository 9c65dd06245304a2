from __future__ import annotations

import math
from dataclasses import dataclass, field
from app.core.compat import StrEnum

import numpy as np

from app.core.errors import UsageError
from app.models.field import FieldSpec
from app.models.matrix import MatrixQ


@dataclass(frozen=True)
class Subspace:
    """Subspace of F_q^n held by its canonical RREF basis (k rows, no zero rows).

    Build instances through ``subspace_service.span``; equality is equality of
    the canonical bases.
    """

    basis: MatrixQ

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @property
    def n(self) -> int:
        return self.basis.cols

    @property
    def dim(self) -> int:
        return self.basis.rows


class CodebookMode(StrEnum):
    RANDOM = "random"  # i.i.d. with replacement, collisions counted
    DISTINCT = "distinct"  # resample on collision


@dataclass(frozen=True, eq=False)
class Codebook:
    field: FieldSpec
    n: int
    C: int
    codewords: tuple[Subspace, ...]
    mode: CodebookMode = CodebookMode.RANDOM
    collisions: int = 0
    _stack: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.codewords:
            raise UsageError("a codebook needs at least one codeword")
        for i, cw in enumerate(self.codewords):
            if cw.dim != self.C or cw.n != self.n or cw.field != self.field:
                raise UsageError(
                    f"codeword {i} is a {cw.dim}-dim subspace of F^{cw.n} over {cw.field!r}, "
                    f"expected dim {self.C} in F^{self.n} over {self.field!r}"
                )
        stack = np.stack([cw.basis.data for cw in self.codewords]).reshape(
            len(self.codewords), self.C, self.n
        )
        stack.setflags(write=False)
        object.__setattr__(self, "_stack", stack)

    @property
    def M(self) -> int:
        return len(self.codewords)

    @property
    def rate(self) -> float:
        """Effective rate log_q(M)/n."""
        return math.log(self.M, self.field.q) / self.n if self.n else 0.0

    @property
    def stack(self) -> np.ndarray:
        """(M, C, n) array of canonical codeword bases."""
        return self._stack


class DecodeVerdict(StrEnum):
    UNIQUE = "Unique"
    AMBIGUOUS = "Ambiguous"
    NONE_WITHIN_RADIUS = "NoneWithinRadius"


@dataclass(frozen=True)
class DecodeResult:
    verdict: DecodeVerdict
    index: int | None = None
    candidates: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.verdict is DecodeVerdict.UNIQUE

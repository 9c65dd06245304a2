from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

import galois
import numpy as np

from app.core.errors import UsageError
from app.models.field import FieldElement, FieldSpec


@dataclass(frozen=True, eq=False)
class MatrixQ:
    """Dense matrix over GF(q), r and c possibly 0.

    Backed by a read-only galois FieldArray (``array``); ``data`` is the same
    buffer viewed as plain int64 representatives.
    """

    field: FieldSpec
    data: np.ndarray
    array: galois.FieldArray = dataclasses.field(init=False, repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise UsageError(f"matrix data must be 2-dimensional, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise UsageError(f"matrix entries outside [0, {self.field.q})")
        backing = self.field.array(arr)
        backing.setflags(write=False)
        object.__setattr__(self, "array", backing)
        object.__setattr__(self, "data", backing.view(np.ndarray))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Any, cols: int | None = None) -> MatrixQ:
        rows = list(rows)
        if not rows:
            if cols is None:
                raise UsageError("column count required for an empty matrix")
            return cls(field, np.zeros((0, cols), dtype=np.int64))
        return cls(field, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, r: int, c: int) -> MatrixQ:
        return cls(field, np.zeros((r, c), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> MatrixQ:
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.field, int(self.data[i, j]))

    def row(self, i: int) -> MatrixQ:
        return MatrixQ(self.field, self.data[i : i + 1])

    def select_rows(self, indices: list[int]) -> MatrixQ:
        return MatrixQ(self.field, self.data[list(indices)].reshape(len(indices), self.cols))

    def is_zero(self) -> bool:
        return not self.data.any()

    def to_lists(self) -> list[list[int]]:
        return self.data.tolist()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixQ)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixQ({self.field!r}, {self.to_lists()})"

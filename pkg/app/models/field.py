"""Finite fields GF(p^e) on top of ``galois``.

An element is stored as its canonical representative: the integer
sum(c_i * p**i) for the coefficient vector (c_0, ..., c_{e-1}) of its
polynomial over GF(p). This is the integer representation galois uses, so
plain int64 arrays convert to and from FieldArrays without a lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import galois
import numpy as np

from app.core.config import settings
from app.core.errors import FieldDomainError, UsageError

Poly = tuple[int, ...]  # coefficients c_0..c_deg over GF(p)


def is_prime(n: int) -> bool:
    return n >= 2 and galois.is_prime(n)


def _ascending(poly: galois.Poly) -> Poly:
    return tuple(int(c) for c in poly.coeffs[::-1])


def _as_poly(coeffs: Poly | list[int], p: int) -> galois.Poly:
    return galois.Poly([int(c) % p for c in coeffs], field=galois.GF(p), order="asc")


def is_irreducible(poly: Poly, p: int) -> bool:
    candidate = _as_poly(poly, p)
    return candidate.degree >= 1 and candidate.is_irreducible()


def default_poly(p: int, e: int) -> Poly:
    """Smallest (by representative) irreducible monic polynomial of degree e."""
    return _ascending(galois.irreducible_poly(p, e, method="min"))


def _reduction_poly(p: int, e: int, poly: Poly | list[int] | None) -> galois.Poly:
    if poly is None:
        return galois.irreducible_poly(p, e, method="min")
    chosen = tuple(int(c) % p for c in poly)
    if len(chosen) != e + 1 or chosen[-1] != 1:
        raise UsageError(f"reduction polynomial must be monic of degree {e}: {chosen}")
    if not is_irreducible(chosen, p):
        raise UsageError(f"reduction polynomial {chosen} is reducible over GF({p})")
    return _as_poly(chosen, p)


class FieldSpec:
    """GF(q), q = p**e. Arithmetic takes and returns int64 arrays of
    representatives; ``GF`` is the underlying galois FieldArray class."""

    __slots__ = ("p", "e", "q", "poly", "GF")

    def __init__(self, p: int, e: int = 1, poly: Poly | list[int] | None = None) -> None:
        if not is_prime(p):
            raise UsageError(f"characteristic {p} is not prime")
        if e < 1:
            raise UsageError(f"extension degree must be >= 1, got {e}")
        q = p**e
        if q > settings.max_field_size:
            raise UsageError(f"field size {q} exceeds the maximum {settings.max_field_size}")
        self.p = p
        self.e = e
        self.q = q
        if e == 1:
            self.poly: Poly = (0, 1)
            self.GF = galois.GF(p)
        else:
            reduction = _reduction_poly(p, e, poly)
            self.poly = _ascending(reduction)
            self.GF = galois.GF(q, irreducible_poly=reduction)

    # identity -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldSpec)
            and (self.p, self.e, self.poly) == (other.p, other.e, other.poly)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.poly))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.q})"
        return f"GF({self.p}^{self.e}, poly={list(self.poly)})"

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "e": self.e, "poly": list(self.poly)}

    # conversion -------------------------------------------------------------

    def array(self, a: Any) -> galois.FieldArray:
        """Representatives as a (fresh) FieldArray with int64 storage."""
        return self.GF(np.asarray(a, dtype=np.int64), dtype=np.int64)

    @staticmethod
    def ints(x: galois.FieldArray) -> np.ndarray:
        return np.asarray(x.view(np.ndarray), dtype=np.int64)

    # vectorised arithmetic --------------------------------------------------

    def add(self, a: Any, b: Any) -> np.ndarray:
        return self.ints(self.array(a) + self.array(b))

    def sub(self, a: Any, b: Any) -> np.ndarray:
        return self.ints(self.array(a) - self.array(b))

    def neg(self, a: Any) -> np.ndarray:
        return self.ints(-self.array(a))

    def mul(self, a: Any, b: Any) -> np.ndarray:
        return self.ints(self.array(a) * self.array(b))

    def inv(self, a: Any) -> np.ndarray:
        x = self.array(a)
        if np.any(x.view(np.ndarray) == 0):
            raise FieldDomainError(f"zero has no inverse in {self!r}")
        return self.ints(np.reciprocal(x))

    def power(self, a: Any, k: int) -> np.ndarray:
        x = self.array(a)
        if k == 0:
            return np.ones(x.shape, dtype=np.int64)
        return self.ints(x**k)

    def matmul(self, a: Any, b: Any) -> np.ndarray:
        """Matrix product over the field; broadcasts over leading batch axes."""
        A, B = self.array(a), self.array(b)
        batch = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
        shape = (*batch, A.shape[-2], B.shape[-1])
        if A.size == 0 or B.size == 0:
            return np.zeros(shape, dtype=np.int64)
        if A.ndim == 2 and B.ndim == 2:
            return self.ints(A @ B)
        # galois matmul is 2-D only
        return self.ints(np.add.reduce(A[..., :, :, None] * B[..., None, :, :], axis=-2))

    def random(self, shape: Any, rng: np.random.Generator) -> np.ndarray:
        return self.ints(self.GF.Random(shape, seed=rng, dtype=np.int64))

    def digits(self, a: Any) -> np.ndarray:
        """Coefficient vectors over GF(p), lowest degree first: shape a.shape + (e,)."""
        x = self.array(a)
        if self.e == 1:
            return self.ints(x)[..., None]
        return np.asarray(x.vector(dtype=np.int64)[..., ::-1].view(np.ndarray), dtype=np.int64)

    def from_digits(self, digits: Any) -> np.ndarray:
        d = np.asarray(digits, dtype=np.int64) % self.p
        if self.e == 1:
            return d[..., 0]
        return self.ints(self.GF.Vector(np.ascontiguousarray(d[..., ::-1]), dtype=np.int64))


_FIELDS: dict[tuple[int, int, Poly | None], FieldSpec] = {}


def get_field(p: int, e: int = 1, poly: Poly | list[int] | None = None) -> FieldSpec:
    """Cached FieldSpec lookup."""
    key = (p, e, tuple(poly) if poly is not None else None)
    if key not in _FIELDS:
        _FIELDS[key] = FieldSpec(p, e, poly)
    return _FIELDS[key]


def field_from_q(q: int) -> FieldSpec:
    """GF(q) with the default reduction polynomial, q a prime power."""
    if q < 2 or not galois.is_prime_power(q):
        raise UsageError(f"{q} is not a prime power")
    primes, exponents = galois.factors(q)
    return get_field(int(primes[0]), int(exponents[0]))


def field_from_dict(data: dict[str, Any]) -> FieldSpec:
    p, e = int(data["p"]), int(data.get("e", 1))
    poly = data.get("poly")
    if e == 1:
        poly = None
    return get_field(p, e, poly)


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.q:
            raise UsageError(f"representative {self.value} outside [0, {self.field.q})")

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement) or other.field != self.field:
            theirs = getattr(other, "field", other)
            raise UsageError(f"field mismatch: {self.field!r} vs {theirs!r}")

    def _wrap(self, value: Any) -> FieldElement:
        return FieldElement(self.field, int(value))

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self._wrap(self.field.add(self.value, other.value))

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self._wrap(self.field.sub(self.value, other.value))

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self._wrap(self.field.mul(self.value, other.value))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self * other.inv()

    def __neg__(self) -> FieldElement:
        return self._wrap(self.field.neg(self.value))

    def inv(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value}@{self.field!r}"

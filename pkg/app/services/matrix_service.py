"""Rank, echelon form and subspace arithmetic over GF(q).

Single matrices go through galois linear algebra (``row_reduce``,
``np.linalg.matrix_rank``/``inv``, ``null_space``). galois reduces one 2-D
matrix per call, so the decoder and the compatibility scans use ``eliminate``,
which reduces a whole (B, r, c) codebook stack in one pass with FieldArray
arithmetic. Both produce the unique RREF.
"""

import logging

import numpy as np

from app.core.config import settings
from app.core.errors import CapacityError, UsageError
from app.core.rng import SeededRandomSource
from app.models.field import FieldSpec
from app.models.matrix import MatrixQ

logger = logging.getLogger(__name__)


def _check_field(a: MatrixQ, b: MatrixQ) -> None:
    if a.field != b.field:
        raise UsageError(f"field mismatch: {a.field!r} vs {b.field!r}")


def eliminate(field: FieldSpec, stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce every matrix of a (B, r, c) stack to RREF.

    Returns the reduced stack (zero rows at the bottom) and the rank of each
    matrix.
    """
    a = field.array(stack)
    raw = a.view(np.ndarray)
    batch, r, c = a.shape
    rank = np.zeros(batch, dtype=np.int64)
    if r == 0 or c == 0 or batch == 0:
        return raw, rank
    rows = np.arange(r)
    for col in range(c):
        mask = (raw[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        idx = np.flatnonzero(mask.any(axis=1))
        if idx.size == 0:
            continue
        piv = mask[idx].argmax(axis=1)
        tgt = rank[idx]
        prow = a[idx, piv]
        a[idx, piv] = a[idx, tgt]
        prow = prow / prow[:, col][:, None]
        a[idx, tgt] = prow
        factors = a[idx, :, col]
        factors[np.arange(idx.size), tgt] = 0
        a[idx] = a[idx] - factors[:, :, None] * prow[:, None, :]
        rank[idx] += 1
    return raw, rank


def batch_rank(field: FieldSpec, stack: np.ndarray) -> np.ndarray:
    stack = np.asarray(stack, dtype=np.int64)
    if stack.shape[1] > stack.shape[2]:
        stack = np.swapaxes(stack, 1, 2)
    return eliminate(field, stack)[1]


def rref(m: MatrixQ) -> tuple[MatrixQ, int, list[int]]:
    """Canonical RREF with zero rows dropped, its rank and pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return MatrixQ.zeros(m.field, 0, m.cols), 0, []
    reduced = m.array.row_reduce().view(np.ndarray)
    basis = reduced[reduced.any(axis=1)]
    k = len(basis)
    pivots = [int(j) for j in np.argmax(basis != 0, axis=1)] if k else []
    return MatrixQ(m.field, basis.reshape(k, m.cols)), k, pivots


def rank(m: MatrixQ) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(np.linalg.matrix_rank(m.array))


def mat_mul(a: MatrixQ, b: MatrixQ) -> MatrixQ:
    _check_field(a, b)
    if a.cols != b.rows:
        raise UsageError(f"cannot multiply {a.shape} by {b.shape}")
    if a.cols == 0:
        return MatrixQ.zeros(a.field, a.rows, b.cols)
    return MatrixQ(a.field, a.field.matmul(a.data, b.data))


def mat_add(a: MatrixQ, b: MatrixQ) -> MatrixQ:
    _check_field(a, b)
    if a.shape != b.shape:
        raise UsageError(f"cannot add {a.shape} and {b.shape}")
    return MatrixQ(a.field, a.field.add(a.data, b.data))


def scale(m: MatrixQ, scalar: int) -> MatrixQ:
    return MatrixQ(m.field, m.field.mul(m.data, scalar))


def transpose(m: MatrixQ) -> MatrixQ:
    return MatrixQ(m.field, m.data.T)


def stack_rows(a: MatrixQ, b: MatrixQ) -> MatrixQ:
    _check_field(a, b)
    if a.cols != b.cols:
        raise UsageError(f"column mismatch: {a.cols} vs {b.cols}")
    return MatrixQ(a.field, np.vstack([a.data, b.data]))


def intersection_dim(a: MatrixQ, b: MatrixQ) -> int:
    """dim(rowspace(A) ∩ rowspace(B)) = rank A + rank B - rank [A; B]."""
    joint = stack_rows(a, b)
    return rank(a) + rank(b) - rank(joint)


def intersection_basis(a: MatrixQ, b: MatrixQ) -> MatrixQ:
    """RREF basis of rowspace(A) ∩ rowspace(B) (Zassenhaus)."""
    _check_field(a, b)
    if a.cols != b.cols:
        raise UsageError(f"column mismatch: {a.cols} vs {b.cols}")
    c = a.cols
    top = np.hstack([a.data, a.data])
    bottom = np.hstack([b.data, np.zeros_like(b.data)])
    reduced, _, _ = rref(MatrixQ(a.field, np.vstack([top, bottom]).reshape(-1, 2 * c)))
    left_zero = ~reduced.data[:, :c].any(axis=1)
    inter = reduced.data[left_zero, c:]
    return rref(MatrixQ(a.field, inter.reshape(-1, c)))[0]


def contains(space: MatrixQ, sub: MatrixQ) -> bool:
    """rowspace(sub) ⊆ rowspace(space)."""
    return rank(stack_rows(space, sub)) == rank(space)


def inverse(m: MatrixQ) -> MatrixQ:
    if m.rows != m.cols:
        raise UsageError(f"cannot invert non-square {m.shape}")
    if m.rows == 0:
        return m
    try:
        inv = np.linalg.inv(m.array)
    except np.linalg.LinAlgError as exc:
        raise UsageError("matrix is singular") from exc
    return MatrixQ(m.field, inv.view(np.ndarray))


def null_space(m: MatrixQ) -> MatrixQ:
    """Basis (as rows) of {s : M s = 0}."""
    if m.rows == 0 or rank(m) == 0:
        return MatrixQ.identity(m.field, m.cols)
    kernel = m.array.null_space().view(np.ndarray)
    return MatrixQ(m.field, kernel.reshape(-1, m.cols))


def random_matrix(spec: FieldSpec, r: int, c: int, rng: SeededRandomSource) -> MatrixQ:
    return MatrixQ(spec, spec.random((r, c), rng))


def random_full_rank(spec: FieldSpec, r: int, c: int, rng: SeededRandomSource) -> MatrixQ:
    """Uniform over rank-r r×c matrices by rejection."""
    if r > c:
        raise UsageError(f"full row rank impossible for {r}×{c}")
    for attempt in range(1, settings.full_rank_max_attempts + 1):
        m = random_matrix(spec, r, c, rng)
        if rank(m) == r:
            if attempt > 1:
                logger.debug("full-rank %dx%d over %r after %d draws", r, c, spec, attempt)
            return m
    raise CapacityError(f"no full-rank {r}×{c} matrix in {settings.full_rank_max_attempts} draws")


def batch_full_rank(
    spec: FieldSpec, count: int, r: int, c: int, rng: SeededRandomSource
) -> np.ndarray:
    """(count, r, c) stack of independent uniform full-rank matrices."""
    if r > c:
        raise UsageError(f"full row rank impossible for {r}×{c}")
    out = spec.random((count, r, c), rng)
    pending = np.flatnonzero(batch_rank(spec, out) < r)
    rounds = 0
    while pending.size:
        rounds += 1
        if rounds > settings.full_rank_max_attempts:
            raise CapacityError(f"could not sample {count} full-rank {r}×{c} matrices")
        redraw = spec.random((pending.size, r, c), rng)
        out[pending] = redraw
        pending = pending[batch_rank(spec, redraw) < r]
    return out

"""Grassmannian combinatorics, injection distance and random subspace codes.

The decoder is the brute-force minimum-injection-distance rule: it reduces
every codeword modulo the received space in one batched elimination and
accepts only a unique codeword within the decoding radius.
"""

import itertools
import json
import logging
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import numpy as np

from app.core.config import settings
from app.core.errors import CapacityError, ConfigError, UsageError
from app.core.rng import SeededRandomSource
from app.models.field import FieldSpec, field_from_dict
from app.models.matrix import MatrixQ
from app.models.subspace import Codebook, CodebookMode, DecodeResult, DecodeVerdict, Subspace
from app.services.matrix_service import batch_full_rank, eliminate, intersection_dim, rref

logger = logging.getLogger(__name__)


# Grassmannian ---------------------------------------------------------------


def gaussian_coeff(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n (exact)."""
    if k < 0 or k > n:
        raise UsageError(f"Gaussian coefficient undefined for k={k}, n={n}")
    if q < 2:
        raise UsageError(f"q must be >= 2, got {q}")
    num, den = 1, 1
    for i in range(k):
        num *= q**n - q**i
        den *= q**k - q**i
    return num // den


def gaussian_coeff_bounds_check(n: int, k: int, q: int) -> bool:
    """q^{k(n-k)} <= [n, k]_q <= 4 q^{k(n-k)}."""
    low = q ** (k * (n - k))
    return low <= gaussian_coeff(n, k, q) <= 4 * low


def span(m: MatrixQ) -> Subspace:
    return Subspace(rref(m)[0])


def zero_subspace(spec: FieldSpec, n: int) -> Subspace:
    return Subspace(MatrixQ.zeros(spec, 0, n))


def injection_distance(v: Subspace, w: Subspace) -> int:
    """max(dim V, dim W) - dim(V ∩ W)."""
    if v.n != w.n:
        raise UsageError(f"ambient mismatch: {v.n} vs {w.n}")
    return max(v.dim, w.dim) - intersection_dim(v.basis, w.basis)


def _check_enumeration(n: int, k: int, q: int) -> int:
    size = gaussian_coeff(n, k, q)
    if size > settings.enumeration_budget:
        raise CapacityError(
            f"G_{q}({n},{k}) has {size} elements, above the enumeration budget "
            f"{settings.enumeration_budget}"
        )
    return size


def grassmannian_stack(spec: FieldSpec, n: int, k: int) -> np.ndarray:
    """(|G_q(n,k)|, k, n) stack of every RREF basis, in pivot-pattern order."""
    _check_enumeration(n, k, spec.q)
    bases: list[np.ndarray] = []
    for pivots in itertools.combinations(range(n), k):
        free = [
            (i, j)
            for i, pc in enumerate(pivots)
            for j in range(pc + 1, n)
            if j not in pivots
        ]
        template = np.zeros((k, n), dtype=np.int64)
        for i, pc in enumerate(pivots):
            template[i, pc] = 1
        for values in itertools.product(range(spec.q), repeat=len(free)):
            basis = template.copy()
            for (i, j), v in zip(free, values, strict=True):
                basis[i, j] = v
            bases.append(basis)
    if not bases:
        return np.zeros((0, k, n), dtype=np.int64)
    return np.stack(bases)


def enumerate_grassmannian(spec: FieldSpec, n: int, k: int) -> Iterator[Subspace]:
    for basis in grassmannian_stack(spec, n, k):
        yield Subspace(MatrixQ(spec, basis))


def enumerate_all_subspaces(spec: FieldSpec, n: int) -> list[Subspace]:
    return [s for k in range(n + 1) for s in enumerate_grassmannian(spec, n, k)]


def sample_uniform_subspace(spec: FieldSpec, n: int, k: int, rng: SeededRandomSource) -> Subspace:
    """Row space of a uniform full-rank k×n matrix; uniform over G_q(n,k)."""
    if k < 0 or k > n:
        raise UsageError(f"no {k}-dimensional subspaces of F^{n}")
    return sample_subspaces(spec, n, k, 1, rng)[0]


def _canonical_stack(spec: FieldSpec, n: int, k: int, count: int, rng: SeededRandomSource):
    if k == 0:
        return np.zeros((count, 0, n), dtype=np.int64)
    reduced, _ = eliminate(spec, batch_full_rank(spec, count, k, n, rng))
    return reduced


def sample_subspaces(
    spec: FieldSpec, n: int, k: int, count: int, rng: SeededRandomSource
) -> list[Subspace]:
    stack = _canonical_stack(spec, n, k, count, rng)
    return [Subspace(MatrixQ(spec, basis)) for basis in stack]


# Codebooks -------------------------------------------------------------------


def build_random_code(
    spec: FieldSpec,
    n: int,
    C: int,
    M: int,
    rng: SeededRandomSource,
    mode: CodebookMode = CodebookMode.RANDOM,
) -> Codebook:
    """M codewords drawn i.i.d. uniform from G_q(n, C)."""
    if M < 1:
        raise UsageError("codebook size M must be >= 1")
    if C > n or C < 0:
        raise UsageError(f"codeword dimension {C} must lie in [0, {n}]")
    if mode is CodebookMode.DISTINCT:
        available = gaussian_coeff(n, C, spec.q)
        if M > available:
            raise UsageError(f"distinct mode needs M <= |G_{spec.q}({n},{C})| = {available}")
        return _build_distinct(spec, n, C, M, rng)

    stack = _canonical_stack(spec, n, C, M, rng)
    distinct = len({basis.tobytes() for basis in stack})
    collisions = M - distinct
    if collisions:
        logger.warning("random codebook has %d colliding codeword(s) out of M=%d", collisions, M)
    codewords = tuple(Subspace(MatrixQ(spec, basis)) for basis in stack)
    return Codebook(spec, n, C, codewords, mode, collisions)


def _build_distinct(
    spec: FieldSpec, n: int, C: int, M: int, rng: SeededRandomSource
) -> Codebook:
    seen: dict[bytes, np.ndarray] = {}
    draws = 0
    while len(seen) < M:
        batch = _canonical_stack(spec, n, C, M - len(seen), rng)
        draws += len(batch)
        for basis in batch:
            seen.setdefault(basis.tobytes(), basis)
            if len(seen) == M:
                break
    logger.debug("distinct codebook M=%d needed %d draws", M, draws)
    codewords = tuple(Subspace(MatrixQ(spec, basis)) for basis in seen.values())
    return Codebook(spec, n, C, codewords, CodebookMode.DISTINCT, 0)


def encode(cb: Codebook, m: int) -> MatrixQ:
    if not 0 <= m < cb.M:
        raise UsageError(f"message {m} outside [0, {cb.M})")
    return cb.codewords[m].basis


def _check_budget(count: int) -> None:
    if count > settings.decode_budget:
        raise CapacityError(
            f"decoding scans {count} codewords, above the budget {settings.decode_budget}"
        )


def stack_distances(spec: FieldSpec, stack: np.ndarray, y: Subspace) -> np.ndarray:
    """Injection distance from rowspace(Y) to every C-dim basis in a (M, C, n) stack.

    Each codeword is reduced modulo rowspace(Y): zeroing its entries in the
    pivot columns of Y's RREF leaves a residual R with
    rank [Y; X] = dim Y + rank R, hence dim(X ∩ Y) = C - rank R.
    """
    count, C, n = stack.shape
    if y.n != n:
        raise UsageError(f"ambient mismatch: received {y.n}, codewords {n}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    if y.dim:
        pivots = np.argmax(y.basis.data != 0, axis=1)
        residual = spec.sub(stack, spec.matmul(stack[:, :, pivots], y.basis.data))
    else:
        residual = stack
    _, residual_rank = eliminate(spec, residual)
    return max(y.dim, C) - C + residual_rank


def distance_profile(cb: Codebook, y: Subspace) -> np.ndarray:
    _check_budget(cb.M)
    return stack_distances(cb.field, cb.stack, y)


def list_decode(cb: Codebook, y: Subspace, radius: int) -> list[int]:
    """All codeword indices within injection distance ``radius`` of Y, ascending."""
    return [int(i) for i in np.flatnonzero(distance_profile(cb, y) <= radius)]


def decode(cb: Codebook, y: Subspace, z_w: int) -> DecodeResult:
    """Unique codeword within distance z_w, else Ambiguous / NoneWithinRadius."""
    candidates = list_decode(cb, y, z_w)
    if len(candidates) == 1:
        return DecodeResult(DecodeVerdict.UNIQUE, candidates[0], tuple(candidates))
    if candidates:
        return DecodeResult(DecodeVerdict.AMBIGUOUS, None, tuple(candidates))
    return DecodeResult(DecodeVerdict.NONE_WITHIN_RADIUS)


# Decoding-region accounting ----------------------------------------------------


def decoding_region_bound(C: int, n: int, z_w: int, q: int) -> int:
    """sum_{i=1}^{z_w} [C, i]_q [n, i]_q."""
    if z_w < 1:
        raise UsageError("decoding radius must be >= 1")
    if C > n:
        raise UsageError(f"C={C} exceeds n={n}")
    return sum(
        gaussian_coeff(C, i, q) * gaussian_coeff(n, i, q) for i in range(1, min(z_w, C) + 1)
    )


def closed_form_region_bound(C: int, n: int, z_w: int, q: int) -> int:
    """16 z_w q^{C z_w - z_w^2} q^{n z_w - z_w^2}."""
    return 16 * z_w * q ** (C * z_w - z_w * z_w) * q ** (n * z_w - z_w * z_w)


def decoding_region_count(spec: FieldSpec, C: int, n: int, z_w: int, y: Subspace) -> int:
    """Exact |{V : dim V = C, d(V, Y) <= z_w}| by enumerating G_q(n, C)."""
    distances = stack_distances(spec, grassmannian_stack(spec, n, C), y)
    return int((distances <= z_w).sum())


# Persistence ------------------------------------------------------------------


def codebook_to_dict(cb: Codebook) -> dict[str, Any]:
    return {
        **cb.field.to_dict(),
        "n": cb.n,
        "C": cb.C,
        "mode": cb.mode.value,
        "collisions": cb.collisions,
        "codewords": [cw.basis.to_lists() for cw in cb.codewords],
    }


def codebook_from_dict(data: dict[str, Any]) -> Codebook:
    try:
        spec = field_from_dict(data)
        n, C = int(data["n"]), int(data["C"])
        codewords = tuple(
            span(MatrixQ.from_rows(spec, rows, cols=n)) for rows in data["codewords"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed codebook: {type(e).__name__}: {e}") from e
    mode = CodebookMode(data.get("mode", CodebookMode.RANDOM.value))
    return Codebook(spec, n, C, codewords, mode, int(data.get("collisions", 0)))


def save_codebook(cb: Codebook, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(codebook_to_dict(cb)))
    return path


def load_codebook(path: str | Path) -> Codebook:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read codebook {path}: {e}") from e
    return codebook_from_dict(data)

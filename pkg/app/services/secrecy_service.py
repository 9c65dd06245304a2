"""Coset-code secrecy layer.

The sender transmits s drawn uniformly from the coset {s : H s = m} of an MDS
code of length L and dimension z_r. Any z_r coordinates of s are then uniform
and independent of m, so an eavesdropper learns nothing from z_r observed links.
"""

import itertools
import logging
import math
from collections.abc import Callable

import numpy as np

from app.core.config import settings
from app.core.errors import CapacityError, UsageError
from app.core.rng import SeededRandomSource
from app.models.field import FieldSpec, get_field
from app.models.matrix import MatrixQ
from app.models.secrecy import CosetCode, LeakageReport
from app.services.matrix_service import intersection_dim, inverse, null_space, rank

logger = logging.getLogger(__name__)


def symbol_field_for(base: FieldSpec, ell: int) -> FieldSpec:
    """GF(p^ell) over a prime base field."""
    if base.e != 1:
        raise UsageError(f"the secrecy layer needs a prime base field, got {base!r}")
    return get_field(base.p, ell)


def build_mds_parity(symbol_field: FieldSpec, L: int, z_r: int) -> CosetCode:
    """Vandermonde parity-check H[i][j] = a_j^i on the first L field elements."""
    if not 0 <= z_r < L:
        raise UsageError(f"need 0 <= z_r < L, got z_r={z_r}, L={L}")
    if symbol_field.q < L:
        raise CapacityError(f"{symbol_field!r} has fewer than L={L} evaluation points")
    points = tuple(range(L))
    rows = L - z_r
    # GF.Vandermonde only evaluates at powers of one element, which excludes 0
    x = symbol_field.array(points)
    H = symbol_field.GF.Ones((rows, L), dtype=np.int64)
    for i in range(1, rows):
        H[i] = H[i - 1] * x
    parity = MatrixQ(symbol_field, H.view(np.ndarray))
    left = inverse(MatrixQ(symbol_field, parity.data[:, :rows]))
    code = CosetCode(symbol_field, L, z_r, parity, null_space(parity), left, points)
    logger.debug("coset code L=%d z_r=%d over %r", L, z_r, symbol_field)
    return code


def is_mds_parity(H: MatrixQ) -> bool:
    """Every square column-minor of full size is invertible."""
    r, c = H.shape
    return all(
        rank(MatrixQ(H.field, H.data[:, list(cols)])) == r
        for cols in itertools.combinations(range(c), r)
    )


def _as_vector(code: CosetCode, values, length: int, what: str) -> np.ndarray:
    vec = np.asarray(values, dtype=np.int64).reshape(-1)
    if vec.shape != (length,):
        raise UsageError(f"{what} must have {length} symbols, got {vec.size}")
    if vec.size and (vec.min() < 0 or vec.max() >= code.symbol_field.q):
        raise UsageError(f"{what} has symbols outside {code.symbol_field!r}")
    return vec


def secret_encode(code: CosetCode, m, rng: SeededRandomSource) -> np.ndarray:
    """Uniform s with H s = m."""
    spec = code.symbol_field
    msg = _as_vector(code, m, code.message_length, "message")
    s = np.zeros(code.L, dtype=np.int64)
    s[: code.message_length] = spec.matmul(code.left_inverse.data, msg[:, None])[:, 0]
    if code.z_r:
        u = spec.random((1, code.z_r), rng)
        s = spec.add(s, spec.matmul(u, code.kernel.data)[0])
    return s


def secret_decode(code: CosetCode, s) -> np.ndarray:
    vec = _as_vector(code, s, code.L, "coset vector")
    return code.symbol_field.matmul(code.H.data, vec[:, None])[:, 0]


def flatten(code: CosetCode, s) -> MatrixQ:
    """L symbols of GF(p^ell) as an L×ell matrix over GF(p): row i = digits of s_i."""
    vec = _as_vector(code, s, code.L, "coset vector")
    base = get_field(code.symbol_field.p)
    return MatrixQ(base, code.symbol_field.digits(vec).reshape(code.L, code.ell))


def unflatten(code: CosetCode, matrix: MatrixQ) -> np.ndarray:
    if matrix.shape != (code.L, code.ell) or matrix.field.q != code.symbol_field.p:
        raise UsageError(
            f"expected an {code.L}×{code.ell} matrix over GF({code.symbol_field.p}), "
            f"got {matrix.shape} over {matrix.field!r}"
        )
    return code.symbol_field.from_digits(matrix.data)


def flat_index(matrix: MatrixQ) -> int:
    """Row-major base-p digits of a matrix as a message index."""
    p = matrix.field.q
    return sum(int(d) * p**i for i, d in enumerate(matrix.data.reshape(-1)))


def flat_from_index(base: FieldSpec, index: int, rows: int, cols: int) -> MatrixQ:
    digits = [(index // base.q**i) % base.q for i in range(rows * cols)]
    return MatrixQ(base, np.array(digits, dtype=np.int64).reshape(rows, cols))


# Leakage ---------------------------------------------------------------------------


def _all_vectors(code: CosetCode) -> np.ndarray:
    Q = code.symbol_field.q
    states = Q**code.L
    if states > settings.leakage_state_budget:
        raise CapacityError(
            f"{states} coset vectors exceed the leakage budget {settings.leakage_state_budget}"
        )
    idx = np.arange(states, dtype=np.int64)
    return np.stack([(idx // Q**j) % Q for j in range(code.L)], axis=1)


def _keys(values: np.ndarray, Q: int) -> np.ndarray:
    weights = Q ** np.arange(values.shape[1], dtype=np.int64)
    return (values * weights).sum(axis=1) if values.shape[1] else np.zeros(len(values), np.int64)


def _entropy(counts: np.ndarray, total: int, Q: int) -> float:
    probs = counts / total
    return float(-(probs * np.log(probs)).sum() / math.log(Q))


def _leakage(
    code: CosetCode, observed: Callable[[np.ndarray], np.ndarray], label: tuple[int, ...]
) -> LeakageReport:
    """Exact H(m) and H(m | Z) with s uniform over GF(Q)^L.

    Uniform m with uniform coset sampling is the same as uniform s, because
    all cosets have equal size.
    """
    Q = code.symbol_field.q
    s = _all_vectors(code)
    total = len(s)
    m = code.symbol_field.matmul(s, code.H.data.T)
    m_key = _keys(m, Q)
    z_key = _keys(observed(s), Q)
    span = int(z_key.max()) + 1 if total else 1
    m_values, m_counts = np.unique(m_key, return_counts=True)
    z_values, z_counts = np.unique(z_key, return_counts=True)
    pairs, pair_counts = np.unique(m_key * span + z_key, return_counts=True)
    h_m = _entropy(m_counts, total, Q)
    h_joint = _entropy(pair_counts, total, Q)
    h_z = _entropy(z_counts, total, Q)

    m_count_of = dict(zip(m_values, m_counts, strict=True))
    z_count_of = dict(zip(z_values, z_counts, strict=True))
    independent = len(pairs) == len(m_counts) * len(z_values) and all(
        int(c) * total == int(m_count_of[k // span]) * int(z_count_of[k % span])
        for k, c in zip(pairs, pair_counts, strict=True)
    )
    return LeakageReport(h_m, h_joint - h_z, independent, label)


def leakage_entropy(code: CosetCode, observation) -> LeakageReport:
    """Leakage when the adversary reads the coordinates of s listed in ``observation``."""
    coords = tuple(sorted(int(i) for i in observation))
    if any(not 0 <= i < code.L for i in coords):
        raise UsageError(f"observation {coords} outside the {code.L} coordinates")
    return _leakage(code, lambda s: s[:, list(coords)], coords)


def linear_leakage(code: CosetCode, T: MatrixQ) -> LeakageReport:
    """Leakage when the adversary reads T·s (network mixing of the coordinates)."""
    if T.cols != code.L or T.field != code.symbol_field:
        raise UsageError(f"observation transform must be k×{code.L} over {code.symbol_field!r}")
    return _leakage(code, lambda s: code.symbol_field.matmul(s, T.data.T), ())


def check_transfer_condition(H: MatrixQ, candidate_transfer_rows: MatrixQ) -> bool:
    """True iff no nonzero vector of rowspace(T) lies in rowspace(H)."""
    if candidate_transfer_rows.rows == 0:
        return True
    return intersection_dim(H, candidate_transfer_rows) == 0

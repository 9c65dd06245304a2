"""The (z_ro, z_wo, z_rw) adversary: regimes, capacities, Z-compatible
codewords and the jamming strategies.

Symmetrization and push pick their substitute codeword among the codewords
compatible with the READ-ONLY part of the observation: a codeword that also
matched the read-write observations would carry exactly the true content on
those edges, and overwriting with it would change nothing.
"""

import itertools
import logging
from collections.abc import Iterator
from fractions import Fraction

import numpy as np

from app.core.errors import InternalError, UsageError
from app.core.rng import SeededRandomSource
from app.models.adversary import (
    AdversaryPower,
    AdversaryView,
    AttackStrategy,
    EdgeAssignment,
    ReceivedDecomposition,
    Regime,
    StrategyKind,
)
from app.models.field import field_from_q
from app.models.matrix import MatrixQ
from app.models.network import NetworkTopology, TransferMatrices
from app.models.subspace import Codebook, Subspace
from app.services.matrix_service import batch_rank, intersection_basis, intersection_dim
from app.services.network_service import min_cut_edges
from app.services.subspace_service import gaussian_coeff, grassmannian_stack, stack_distances

logger = logging.getLogger(__name__)


# Regimes and capacities ---------------------------------------------------------


def classify_regime(C: int, p: AdversaryPower) -> Regime:
    """Weak iff C > z_ro + 2 z_w."""
    if C < 1:
        raise UsageError("min-cut C must be >= 1")
    return Regime.WEAK if C > p.z_ro + 2 * p.z_w else Regime.STRONG


def capacity(C: int, p: AdversaryPower) -> Fraction:
    if classify_regime(C, p) is Regime.WEAK:
        return Fraction(C - p.z_w)
    return Fraction(max(C - 2 * p.z_w, 0))


def secrecy_capacity(C: int, p: AdversaryPower) -> Fraction:
    if classify_regime(C, p) is Regime.WEAK:
        return Fraction(C - p.z_w - p.z_r)
    return Fraction(0)


# Compatibility ---------------------------------------------------------------------


def _observations(cb: Codebook, T: np.ndarray) -> np.ndarray:
    """(M, rows(T), n) stack of T·X over the codebook."""
    return cb.field.matmul(T, cb.stack)


def enumerate_compatible(cb: Codebook, T_AJ: MatrixQ, Z: MatrixQ) -> list[int]:
    """Indices m with T_AJ · encode(m) = Z exactly."""
    if T_AJ.cols != cb.C or Z.cols != cb.n or Z.rows != T_AJ.rows:
        raise UsageError(
            f"observation shapes T_AJ {T_AJ.shape}, Z {Z.shape} do not fit C={cb.C}, n={cb.n}"
        )
    if Z.rows == 0:
        return list(range(cb.M))
    match = (_observations(cb, T_AJ.data) == Z.data[None]).all(axis=(1, 2))
    return [int(i) for i in np.flatnonzero(match)]


def enumerate_containing(cb: Codebook, Z: MatrixQ) -> list[int]:
    """Indices whose subspace contains rowspace(Z): subspace-level compatibility."""
    if Z.cols != cb.n:
        raise UsageError(f"observation has {Z.cols} columns, codewords {cb.n}")
    if Z.rows == 0:
        return list(range(cb.M))
    observed = np.broadcast_to(Z.data, (cb.M, *Z.shape))
    joint = np.concatenate([cb.stack, observed], axis=1)
    return [int(i) for i in np.flatnonzero(batch_rank(cb.field, joint) == cb.C)]


def default_observation_transform(C: int, z_r: int) -> np.ndarray:
    """[I_{z_r} | 0]: the adversary sees the first z_r rows of the canonical basis."""
    return np.eye(z_r, C, dtype=np.int64)


def observation_class_sizes(
    n: int, C: int, z_r: int, q: int, T: MatrixQ | None = None
) -> tuple[np.ndarray, int]:
    """Group G_q(n, C) by the observation T·X of each canonical basis.

    Returns the class sizes c_z and the Grassmannian size N.
    """
    if not 0 <= z_r <= C <= n:
        raise UsageError(f"need 0 <= z_r <= C <= n, got z_r={z_r}, C={C}, n={n}")
    spec = field_from_q(q)
    transform = default_observation_transform(C, z_r) if T is None else T.data
    if transform.shape != (z_r, C):
        raise UsageError(f"observation transform must be {z_r}×{C}")
    stack = grassmannian_stack(spec, n, C)
    if z_r == 0:
        return np.array([len(stack)], dtype=np.int64), len(stack)
    obs = spec.matmul(transform, stack).reshape(len(stack), -1)
    _, counts = np.unique(obs, axis=0, return_counts=True)
    return counts, len(stack)


def compatible_probability(
    n: int, C: int, z_r: int, q: int, T: MatrixQ | None = None
) -> Fraction:
    """Pr[T·X' = T·X] for X, X' independent uniform codewords of G_q(n, C).

    Exact: with N subspaces and c_z of them producing observation z, the
    probability is sum_z c_z^2 / N^2.
    """
    if z_r == 0 and 0 <= C <= n:
        return Fraction(1)
    counts, total = observation_class_sizes(n, C, z_r, q, T)
    return Fraction(int((counts.astype(object) ** 2).sum()), total * total)


def compatible_ratio_forms(n: int, C: int, z_r: int, q: int) -> dict[str, Fraction]:
    """Both closed forms for the compatible fraction, recorded side by side."""
    total = gaussian_coeff(n, C, q)
    return {
        "n_over_C_minus_zr": Fraction(gaussian_coeff(n, C - z_r, q), total),
        "n_minus_zr_over_C_minus_zr": Fraction(gaussian_coeff(n - z_r, C - z_r, q), total),
    }


# Assignments --------------------------------------------------------------------------


def enumerate_assignments(
    t: NetworkTopology, power: AdversaryPower, edges: tuple[int, ...] | None = None
) -> Iterator[EdgeAssignment]:
    """Every disjoint (read_only, write_only, read_write) choice over ``edges``
    (default: the edges of a minimum cut)."""
    candidates = tuple(edges) if edges is not None else min_cut_edges(t)
    for ro in itertools.combinations(candidates, power.z_ro):
        rest = [e for e in candidates if e not in ro]
        for wo in itertools.combinations(rest, power.z_wo):
            rest2 = [e for e in rest if e not in wo]
            for rw in itertools.combinations(rest2, power.z_rw):
                yield EdgeAssignment(ro, wo, rw)


def build_view(
    Z: MatrixQ, assignment: EdgeAssignment, transfer: TransferMatrices, knows_code: bool = True
) -> AdversaryView:
    if knows_code:
        return AdversaryView(Z, assignment, transfer.T_AJ, transfer.T_AW)
    return AdversaryView(Z, assignment)


# Jamming ------------------------------------------------------------------------------


def _read_only_compatible(cb: Codebook, view: AdversaryView) -> list[int]:
    if view.T_AJ is None:
        return list(range(cb.M))
    rows = view.read_only_rows
    return enumerate_compatible(cb, view.T_AJ.select_rows(rows), view.Z.select_rows(rows))


def _consistent_content(cb: Codebook, index: int, view: AdversaryView) -> MatrixQ:
    """What codeword ``index`` would have put on the write edges."""
    X = cb.codewords[index].basis
    if view.T_AW is not None:
        return MatrixQ(cb.field, cb.field.matmul(view.T_AW.data, X.data))
    writes = len(view.assignment.write_edges)
    rows = [j % cb.C for j in range(writes)]
    return X.select_rows(rows)


def _push_target(cb: Codebook, view: AdversaryView, compatible: list[int]) -> int:
    """Compatible codeword closest to the codewords matching the full observation."""
    if view.T_AJ is None:
        return compatible[0]
    same = enumerate_compatible(cb, view.T_AJ, view.Z)
    matched = set(same)
    others = [m for m in compatible if m not in matched]
    if not others or not same:
        return compatible[0]
    stack = cb.stack[others]
    best = np.full(len(others), np.iinfo(np.int64).max)
    for m in same:
        best = np.minimum(best, stack_distances(cb.field, stack, cb.codewords[m]))
    return others[int(np.argmin(best))]  # argmin keeps the lowest index on ties


def jam(strategy: AttackStrategy, view: AdversaryView, rng: SeededRandomSource) -> MatrixQ | None:
    """Jam rows for the write edges, or None for no attack."""
    writes = len(view.assignment.write_edges)
    if strategy.kind is StrategyKind.NO_ATTACK or writes == 0:
        return None
    if strategy.kind is StrategyKind.RANDOM_NOISE:
        spec = view.Z.field
        return MatrixQ(spec, spec.random((writes, view.Z.cols), rng))
    cb = strategy.codebook
    compatible = _read_only_compatible(cb, view)
    if not compatible:
        raise InternalError("no codeword is compatible with the adversary's observation")
    if strategy.kind is StrategyKind.SYMMETRIZATION:
        target = compatible[int(rng.integers(len(compatible)))]
    else:
        target = _push_target(cb, view, compatible)
    logger.debug("%s: %d compatible, substituting %d", strategy.kind, len(compatible), target)
    return _consistent_content(cb, target, view)


# Diagnostics ----------------------------------------------------------------------------


def decompose_received(
    X: Subspace, Y: Subspace, Z_span: Subspace, jam_span: Subspace
) -> ReceivedDecomposition:
    """Split dim V(Y) into observed-codeword, unobserved and jammed parts."""
    dim_jam = intersection_dim(Y.basis, jam_span.basis)
    observed = intersection_basis(Y.basis, Z_span.basis)
    dim_ro = intersection_dim(observed, X.basis)
    return ReceivedDecomposition(dim_ro, Y.dim - dim_ro - dim_jam, dim_jam)

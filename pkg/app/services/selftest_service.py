"""Exhaustive small-instance oracles, run by ``netcode selftest``.

Each suite recomputes a quantity two independent ways (closed form against
enumeration, max-flow against cut enumeration) and reports a pass/fail line.
"""

import itertools
import logging
import time
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.stats import chisquare

from app.core.errors import UsageError
from app.core.rng import derive_rng
from app.models.field import get_field, is_prime
from app.models.matrix import MatrixQ
from app.models.network import NetworkTopology
from app.services.matrix_service import eliminate
from app.services.network_service import (
    butterfly_network,
    diamond_network,
    min_cut,
    parallel_edge_network,
)
from app.services.secrecy_service import build_mds_parity, leakage_entropy
from app.services.subspace_service import (
    closed_form_region_bound,
    decoding_region_bound,
    decoding_region_count,
    enumerate_all_subspaces,
    gaussian_coeff,
    gaussian_coeff_bounds_check,
    grassmannian_stack,
    injection_distance,
    sample_subspaces,
    span,
)

logger = logging.getLogger(__name__)

REGION_INSTANCES = ((2, 3, 1, 2), (2, 4, 1, 2), (3, 4, 1, 2))


class OracleMismatch(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise OracleMismatch(message)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# Oracles -----------------------------------------------------------------------------


def count_subspaces_by_extension(q: int, n: int) -> dict[int, int]:
    """Count subspaces of F_q^n per dimension by growing every subspace with
    every vector and de-duplicating canonical bases. Independent of the
    pivot-pattern enumeration."""
    if not is_prime(q):
        raise UsageError(f"extension counting needs a prime q, got {q}")
    spec = get_field(q)
    vectors = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    level = {np.zeros((0, n), dtype=np.int64).tobytes(): np.zeros((0, n), dtype=np.int64)}
    counts = {0: 1}
    for k in range(1, n + 1):
        nxt: dict[bytes, np.ndarray] = {}
        for basis in level.values():
            grown = np.concatenate(
                [np.broadcast_to(basis, (len(vectors), *basis.shape)), vectors[:, None, :]], axis=1
            )
            reduced, ranks = eliminate(spec, grown)
            for cand in reduced[ranks == k]:
                key = cand[:k].tobytes()
                nxt.setdefault(key, cand[:k])
        counts[k] = len(nxt)
        level = nxt
    return counts


def brute_force_min_cut(t: NetworkTopology) -> int:
    """Smallest edge set whose removal disconnects the sink."""
    for size in range(len(t.edges) + 1):
        for removed in itertools.combinations(range(len(t.edges)), size):
            gone = set(removed)
            seen, stack = {t.source}, [t.source]
            while stack:
                u = stack.pop()
                for e in t.out_edges[u]:
                    v = t.edges[e][1]
                    if e not in gone and v not in seen:
                        seen.add(v)
                        stack.append(v)
            if t.sink not in seen:
                return size
    return len(t.edges)


# Suites ---------------------------------------------------------------------------------


def metric_axioms() -> str:
    spaces = enumerate_all_subspaces(get_field(2), 4)
    size = len(spaces)
    _expect(size == 67, f"expected 67 subspaces of F_2^4, found {size}")
    D = np.array([[injection_distance(a, b) for b in spaces] for a in spaces])
    _expect(bool((np.diag(D) == 0).all()), "d(V, V) != 0")
    off = ~np.eye(size, dtype=bool)
    _expect(bool((D[off] > 0).all()), "distinct subspaces at distance 0")
    _expect(bool((D == D.T).all()), "asymmetric distance")
    triangle = D[:, None, :] <= D[:, :, None] + D[None, :, :]
    _expect(bool(triangle.all()), "triangle inequality violated")
    return f"{size} subspaces, {size**3} triples"


def gaussian_counts() -> str:
    checked = 0
    for q in (2, 3):
        for n in range(1, 6):
            counts = count_subspaces_by_extension(q, n)
            for k in range(n + 1):
                _expect(gaussian_coeff(n, k, q) == counts[k], f"[{n},{k}]_{q} != {counts[k]}")
                checked += 1
    return f"{checked} coefficients match extension counts"


def gaussian_bounds() -> str:
    checked = 0
    for q in (2, 3, 4):
        for n in range(1, 9):
            for k in range(n + 1):
                _expect(gaussian_coeff_bounds_check(n, k, q), f"bounds fail at ({n},{k},{q})")
                checked += 1
    return f"{checked} (n, k, q) triples within [q^(k(n-k)), 4 q^(k(n-k))]"


def grassmannian_uniformity(seed: int = 0, samples: int = 35_000) -> str:
    spec = get_field(2)
    cells = {basis.tobytes(): 0 for basis in grassmannian_stack(spec, 4, 2)}
    sampled = sample_subspaces(spec, 4, 2, samples, derive_rng(seed, 9))
    drawn = Counter(s.basis.data.tobytes() for s in sampled)
    _expect(set(drawn) <= set(cells), "sample outside G_2(4,2)")
    observed = [drawn.get(key, 0) for key in cells]
    p_value = float(chisquare(observed).pvalue)
    _expect(p_value > 1e-3, f"chi-square p={p_value:.2e}")
    return f"{len(cells)} cells, p={p_value:.3f}"


def min_cut_oracle() -> str:
    nets = [parallel_edge_network(c) for c in range(1, 7)]
    nets += [butterfly_network(), diamond_network()]
    for t in nets:
        _expect(min_cut(t) == brute_force_min_cut(t), f"min-cut mismatch on {t.name}")
    _expect(min_cut(butterfly_network()) == 2, "butterfly min-cut is not 2")
    return f"{len(nets)} topologies"


def decoding_regions() -> str:
    rows = []
    for C, n, z_w, q in REGION_INSTANCES:
        spec = get_field(q)
        Y = span(MatrixQ(spec, np.eye(C, n, dtype=np.int64)))
        count = decoding_region_count(spec, C, n, z_w, Y)
        bound = decoding_region_bound(C, n, z_w, q)
        _expect(count <= bound + 1, f"region {count} > bound {bound} + 1 at {(C, n, z_w, q)}")
        closed = closed_form_region_bound(C, n, z_w, q)
        _expect(count <= closed, f"region {count} above the closed-form bound {closed}")
        rows.append(f"{(C, n, z_w, q)}: {count} <= {bound}+1")
    return "; ".join(rows)


def coset_secrecy() -> str:
    code = build_mds_parity(get_field(2, 2), 3, 1)
    for i in range(code.L):
        report = leakage_entropy(code, [i])
        _expect(report.perfectly_secret, f"coordinate {i} leaks")
    leaks = [
        subset
        for subset in itertools.combinations(range(code.L), 2)
        if leakage_entropy(code, subset).h_m_given_z < leakage_entropy(code, ()).h_m - 1e-12
    ]
    _expect(bool(leaks), "no 2-coordinate observation leaks")
    return f"all 1-subsets secret, {len(leaks)} leaking 2-subsets"


SUITES: dict[str, Callable[[], str]] = {
    "metric-axioms": metric_axioms,
    "gaussian-counts": gaussian_counts,
    "gaussian-bounds": gaussian_bounds,
    "grassmannian-uniformity": grassmannian_uniformity,
    "min-cut": min_cut_oracle,
    "decoding-region": decoding_regions,
    "coset-secrecy": coset_secrecy,
}


def run_selftest(names: list[str] | None = None) -> list[SuiteResult]:
    results = []
    for name in names or list(SUITES):
        start = time.perf_counter()
        try:
            detail, passed = SUITES[name](), True
        except OracleMismatch as e:
            detail, passed = str(e), False
        elapsed = time.perf_counter() - start
        log = logger.info if passed else logger.error
        log("selftest %s: %s (%.2fs) %s", name, "ok" if passed else "FAIL", elapsed, detail)
        results.append(SuiteResult(name, passed, detail, elapsed))
    return results

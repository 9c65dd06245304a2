from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from app.core.errors import InternalError, UsageError
from app.models.adversary import (
    AdversaryPower,
    AdversaryView,
    AttackStrategy,
    EdgeAssignment,
    Regime,
    StrategyKind,
)
from app.models.field import get_field
from app.models.matrix import MatrixQ
from app.models.subspace import Codebook, CodebookMode
from app.services.adversary_service import (
    build_view,
    capacity,
    classify_regime,
    compatible_probability,
    compatible_ratio_forms,
    decompose_received,
    enumerate_assignments,
    enumerate_compatible,
    enumerate_containing,
    jam,
    observation_class_sizes,
    secrecy_capacity,
)
from app.services.matrix_service import intersection_dim
from app.services.network_service import (
    butterfly_network,
    identity_code,
    parallel_edge_network,
    transfer_matrices,
    transmit,
)
from app.services.subspace_service import build_random_code, encode, enumerate_grassmannian, span


def _span(spec, rows):
    return span(MatrixQ.from_rows(spec, rows))


@pytest.fixture
def three_lines(gf2) -> Codebook:
    """Planes e1e2, e1e3, e2e3 of F_2^3."""
    planes = [
        [[1, 0, 0], [0, 1, 0]],
        [[1, 0, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 0, 1]],
    ]
    return Codebook(gf2, 3, 2, tuple(_span(gf2, p) for p in planes), CodebookMode.DISTINCT)


@pytest.mark.parametrize(
    ("C", "power", "regime", "cap", "secret"),
    [
        (5, (0, 1, 0), Regime.WEAK, 4, 4),
        (2, (0, 0, 1), Regime.STRONG, 0, 0),
        (6, (1, 0, 1), Regime.WEAK, 5, 3),
        (3, (1, 0, 1), Regime.STRONG, 1, 0),
        (4, (1, 0, 1), Regime.WEAK, 3, 1),
        (3, (0, 2, 0), Regime.STRONG, 0, 0),
    ],
)
def test_regimes_and_capacities(C, power, regime, cap, secret) -> None:
    p = AdversaryPower(*power)
    assert classify_regime(C, p) is regime
    assert capacity(C, p) == Fraction(cap)
    assert secrecy_capacity(C, p) == Fraction(secret)


def test_power_validation() -> None:
    with pytest.raises(UsageError):
        AdversaryPower(-1, 0, 0)
    with pytest.raises(UsageError):
        classify_regime(0, AdversaryPower())
    with pytest.raises(UsageError):
        EdgeAssignment(read_only=(0,), read_write=(0,))


def test_compatible_probability_matches_pair_count() -> None:
    spec = get_field(2)
    firsts = [cw.basis.data[0].tobytes() for cw in enumerate_grassmannian(spec, 3, 2)]
    counts = Counter(firsts)
    total = len(firsts)
    pairs = sum(c * c for c in counts.values())
    assert compatible_probability(3, 2, 1, 2) == Fraction(pairs, total * total)

    sizes, size = observation_class_sizes(3, 2, 1, 2)
    assert size == 7
    assert int(sizes.sum()) == 7
    assert compatible_probability(5, 3, 0, 2) == 1


def test_observation_class_errors() -> None:
    with pytest.raises(UsageError):
        observation_class_sizes(3, 2, 3, 2)
    with pytest.raises(UsageError):
        observation_class_sizes(3, 2, 1, 2, MatrixQ.identity(get_field(2), 2))


def test_compatible_ratio_forms() -> None:
    ratios = compatible_ratio_forms(4, 2, 1, 2)
    assert ratios["n_over_C_minus_zr"] == Fraction(15, 35)
    assert ratios["n_minus_zr_over_C_minus_zr"] == Fraction(7, 35)


def test_enumerate_assignments() -> None:
    t = parallel_edge_network(4)
    found = list(enumerate_assignments(t, AdversaryPower(1, 1, 0)))
    assert len(found) == 12
    assert len(set(found)) == 12
    assert all(a.power == AdversaryPower(1, 1, 0) for a in found)
    on_butterfly = list(enumerate_assignments(butterfly_network(), AdversaryPower(0, 0, 1)))
    assert [a.read_write for a in on_butterfly] == [(0,), (1,)]


def test_compatible_sets(gf2, three_lines) -> None:
    T = MatrixQ.from_rows(gf2, [[1, 0]])
    Z = MatrixQ.from_rows(gf2, [[1, 0, 0]])
    assert enumerate_compatible(three_lines, T, Z) == [0, 1]
    assert enumerate_containing(three_lines, Z) == [0, 1]
    empty = MatrixQ.zeros(gf2, 0, 3)
    assert enumerate_compatible(three_lines, MatrixQ.zeros(gf2, 0, 2), empty) == [0, 1, 2]
    with pytest.raises(UsageError):
        enumerate_compatible(three_lines, MatrixQ.from_rows(gf2, [[1, 0, 0]]), Z)


def test_true_message_is_always_compatible(rng) -> None:
    spec = get_field(3)
    cb = build_random_code(spec, 5, 3, 40, rng)
    T = MatrixQ(spec, spec.random((2, 3), rng))
    for m in range(cb.M):
        Z = MatrixQ(spec, spec.matmul(T.data, encode(cb, m).data))
        assert m in enumerate_compatible(cb, T, Z)


def _view(gf2, Z, assignment, C=2):
    code = identity_code(parallel_edge_network(C), gf2)
    return build_view(Z, assignment, transfer_matrices(code, assignment))


def test_no_attack_and_nothing_to_write(gf2, three_lines, rng) -> None:
    Z = MatrixQ.from_rows(gf2, [[1, 0, 0]])
    reader = _view(gf2, Z, EdgeAssignment(read_only=(0,)))
    sym = AttackStrategy(StrategyKind.SYMMETRIZATION, three_lines)
    assert jam(sym, reader, rng) is None
    writer = _view(gf2, Z, EdgeAssignment(read_only=(0,), write_only=(1,)))
    assert jam(AttackStrategy(StrategyKind.NO_ATTACK), writer, rng) is None


def test_random_noise_shape(gf2, rng) -> None:
    view = _view(gf2, MatrixQ.zeros(gf2, 0, 3), EdgeAssignment(write_only=(0, 1)))
    rows = jam(AttackStrategy(StrategyKind.RANDOM_NOISE), view, rng)
    assert rows.shape == (2, 3)
    assert rows.field == gf2


def test_symmetrization_substitutes_compatible_codeword(gf2, three_lines) -> None:
    view = _view(gf2, MatrixQ.from_rows(gf2, [[1, 0, 0]]), EdgeAssignment((0,), (1,)))
    seen = set()
    for seed in range(20):
        rows = jam(
            AttackStrategy(StrategyKind.SYMMETRIZATION, three_lines),
            view,
            np.random.default_rng(seed),
        )
        seen.add(tuple(rows.to_lists()[0]))
    assert seen == {(0, 1, 0), (0, 0, 1)}


def test_push_moves_away_from_the_observed_codeword(gf2, three_lines, rng) -> None:
    # edge 0 read-only, edge 1 read-write; the true codeword is e1e2
    Z = MatrixQ.from_rows(gf2, [[1, 0, 0], [0, 1, 0]])
    view = _view(gf2, Z, EdgeAssignment(read_only=(0,), read_write=(1,)))
    rows = jam(AttackStrategy(StrategyKind.PUSH, three_lines), view, rng)
    assert rows.to_lists() == [[0, 0, 1]]
    ro_only = _view(gf2, MatrixQ.from_rows(gf2, [[1, 0, 0]]), EdgeAssignment((0,), (1,)))
    rows = jam(AttackStrategy(StrategyKind.PUSH, three_lines), ro_only, rng)
    assert rows.to_lists() == [[0, 1, 0]]


def test_partial_knowledge_uses_basis_rows(gf2, three_lines, rng) -> None:
    view = AdversaryView(MatrixQ.from_rows(gf2, [[1, 0, 0]]), EdgeAssignment((0,), (1, 2)))
    rows = jam(AttackStrategy(StrategyKind.PUSH, three_lines, knows_code=False), view, rng)
    assert rows.to_lists() == [[1, 0, 0], [0, 1, 0]]


def test_inconsistent_observation(gf2, three_lines, rng) -> None:
    view = _view(gf2, MatrixQ.from_rows(gf2, [[1, 1, 1]]), EdgeAssignment((0,), (1,)))
    with pytest.raises(InternalError):
        jam(AttackStrategy(StrategyKind.SYMMETRIZATION, three_lines), view, rng)


def test_codebook_attacks_need_a_codebook() -> None:
    for kind in (StrategyKind.SYMMETRIZATION, StrategyKind.PUSH):
        with pytest.raises(UsageError):
            AttackStrategy(kind)
    AttackStrategy(StrategyKind.RANDOM_NOISE)


def test_decompose_received(gf2) -> None:
    X = _span(gf2, [[1, 0, 0, 0], [0, 1, 0, 0]])
    Z = _span(gf2, [[1, 0, 0, 0]])
    jammed = _span(gf2, [[0, 0, 0, 1]])
    parts = decompose_received(X, _span(gf2, [[1, 0, 0, 0], [0, 0, 0, 1]]), Z, jammed)
    assert (parts.dim_ro, parts.dim_u, parts.dim_jam) == (1, 0, 1)
    parts = decompose_received(
        X, _span(gf2, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]]), Z, jammed
    )
    assert (parts.dim_ro, parts.dim_u, parts.dim_jam) == (1, 1, 1)


@hyp_settings(max_examples=200)
@given(
    C=st.integers(1, 8),
    power=st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
    bump=st.integers(0, 2),
)
def test_regime_is_monotone(C: int, power: tuple[int, int, int], bump: int) -> None:
    p = AdversaryPower(*power)
    if classify_regime(C, p) is Regime.WEAK:
        assert classify_regime(C + 1, p) is Regime.WEAK
    for i in range(3):
        stronger = AdversaryPower(*(v + (1 if j == i else 0) for j, v in enumerate(power)))
        if classify_regime(C, p) is Regime.STRONG:
            assert classify_regime(C, stronger) is Regime.STRONG
        assert capacity(C, stronger) <= capacity(C, p)
    assert capacity(C + bump, p) >= capacity(C, p)
    assert capacity(C, p) <= C - p.z_w or capacity(C, p) == 0


@hyp_settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), which=st.integers(0, 11))
def test_symmetrization_keeps_most_of_the_codeword(seed: int, which: int) -> None:
    spec = get_field(2)
    rng = np.random.default_rng(seed)
    t = parallel_edge_network(4)
    power = AdversaryPower(1, 1, 0)
    assignment = list(enumerate_assignments(t, power))[which]
    code = identity_code(t, spec)
    cb = build_random_code(spec, 6, 4, 16, rng)
    X = encode(cb, int(rng.integers(cb.M)))

    observed = transmit(code, X, assignment)
    view = build_view(observed.Z, assignment, observed.transfer)
    rows = jam(AttackStrategy(StrategyKind.SYMMETRIZATION, cb), view, rng)
    received = transmit(code, X, assignment, rows)
    assert intersection_dim(received.Y, X) >= 4 - power.z_w

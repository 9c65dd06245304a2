import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from app.core.errors import ConfigError, UsageError
from app.models.adversary import EdgeAssignment
from app.models.field import get_field
from app.models.matrix import MatrixQ
from app.models.network import NetworkTopology
from app.services.matrix_service import contains, mat_add, random_matrix, rank, scale, stack_rows
from app.services.network_service import (
    butterfly_network,
    diamond_network,
    identity_code,
    load_topology,
    min_cut,
    min_cut_edges,
    parallel_edge_network,
    sample_rlnc,
    transfer_matrices,
    transmit,
)


def test_min_cuts() -> None:
    for c in range(1, 6):
        assert min_cut(parallel_edge_network(c)) == c
        assert min_cut_edges(parallel_edge_network(c)) == tuple(range(c))
    assert min_cut(butterfly_network()) == 2
    assert min_cut_edges(butterfly_network()) == (0, 1)
    assert min_cut(diamond_network()) == 2


@pytest.mark.parametrize(
    ("nodes", "edges", "source", "sink"),
    [
        (2, ((0, 1),), 0, 0),
        (2, ((0, 2),), 0, 1),
        (3, ((0, 1), (1, 1), (1, 2)), 0, 2),
        (4, ((0, 1), (1, 2), (2, 1), (2, 3)), 0, 3),
        (3, ((0, 1), (1, 2), (2, 0)), 0, 2),
    ],
)
def test_invalid_topologies(nodes, edges, source, sink) -> None:
    with pytest.raises(ConfigError):
        NetworkTopology(nodes, edges, source, sink)


def test_inert_edges() -> None:
    t = NetworkTopology(4, ((0, 1), (1, 3), (0, 2)), 0, 3)
    assert t.inert_edges == (2,)
    assert butterfly_network().inert_edges == ()


def test_load_topology(tmp_path) -> None:
    assert load_topology("parallel:3").name == "parallel:3"
    assert load_topology("butterfly").edges == butterfly_network().edges
    path = tmp_path / "line.json"
    line_graph = {"nodes": 3, "edges": [[0, 1], [1, 2], [1, 2]], "source": 0, "sink": 2}
    path.write_text(json.dumps(line_graph))
    line = load_topology(str(path))
    assert line.name == "line"
    assert min_cut(line) == 1
    for bad in ("parallel:x", str(tmp_path / "missing.json")):
        with pytest.raises(ConfigError):
            load_topology(bad)
    path.write_text(json.dumps({"nodes": 3}))
    with pytest.raises(ConfigError):
        load_topology(str(path))


def test_identity_code_forwards_codeword(gf2, rng) -> None:
    code = identity_code(parallel_edge_network(3), gf2)
    X = random_matrix(gf2, 3, 5, rng)
    result = transmit(code, X)
    assert result.Y == X
    assert result.transfer.T_AB == MatrixQ.identity(gf2, 3)


def test_random_code_is_linear(rng) -> None:
    spec = get_field(2, 4)
    code = sample_rlnc(butterfly_network(), spec, rng)
    assignment = EdgeAssignment(read_only=(2,), read_write=(4,))
    X = random_matrix(spec, 2, 4, rng)
    result = transmit(code, X, assignment)
    T = result.transfer
    assert T.T_AB.shape == (2, 2)
    assert T.T_AJ.shape == (2, 2)
    assert T.T_AW.shape == (1, 2)
    assert np.array_equal(result.Y.data, spec.matmul(T.T_AB.data, X.data))
    assert np.array_equal(result.Z.data, spec.matmul(T.T_AJ.data, X.data))


def test_jam_overwrites_write_edges(gf2) -> None:
    code = identity_code(parallel_edge_network(2), gf2)
    X = MatrixQ.from_rows(gf2, [[1, 0, 0], [0, 1, 0]])
    jam = MatrixQ.from_rows(gf2, [[1, 1, 1]])
    result = transmit(code, X, EdgeAssignment(read_write=(0,)), jam)
    assert result.Z.to_lists() == [[1, 0, 0]]
    assert result.Y.to_lists() == [[1, 1, 1], [0, 1, 0]]
    assert rank(result.Y) == 2


def test_jam_propagates_downstream(gf2) -> None:
    code = identity_code(butterfly_network(), gf2)
    X = MatrixQ.from_rows(gf2, [[1, 0], [0, 1]])
    jam = MatrixQ.from_rows(gf2, [[1, 1]])
    result = transmit(code, X, EdgeAssignment(write_only=(0,)), jam)
    # edge 0 feeds node 1, which forwards it straight to the sink
    assert result.Y.to_lists() == [[1, 1], [1, 1]]


def test_transmit_errors(gf2, rng) -> None:
    code = identity_code(parallel_edge_network(2), gf2)
    with pytest.raises(UsageError):
        transmit(code, random_matrix(gf2, 3, 4, rng))
    with pytest.raises(UsageError):
        transmit(
            code,
            random_matrix(gf2, 2, 4, rng),
            EdgeAssignment(write_only=(1,)),
            random_matrix(gf2, 2, 4, rng),
        )
    with pytest.raises(ConfigError):
        transfer_matrices(code, EdgeAssignment(read_only=(5,)))
    with pytest.raises(UsageError):
        transmit(code, random_matrix(get_field(3), 2, 4, rng))


def test_read_edge_downstream_of_a_write_edge_sees_the_jam(gf2) -> None:
    # 0 -> 1 -> 3 carries X row 0; 0 -> 2 -> 3 carries row 1
    t = NetworkTopology(4, ((0, 1), (0, 2), (1, 3), (2, 3)), 0, 3)
    code = identity_code(t, gf2)
    X = MatrixQ.from_rows(gf2, [[1, 0, 0], [0, 1, 0]])
    jam = MatrixQ.from_rows(gf2, [[1, 1, 1]])
    result = transmit(code, X, EdgeAssignment(read_only=(2,), write_only=(0,)), jam)
    assert result.Z.to_lists() == [[1, 1, 1]]
    assert result.Y.to_lists() == [[1, 1, 1], [0, 1, 0]]
    clean = transmit(code, X, EdgeAssignment(read_only=(2,), write_only=(0,)))
    assert clean.Z.to_lists() == [[1, 0, 0]]


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scalar=st.integers(0, 15))
def test_transmit_is_linear_in_the_codeword(seed: int, scalar: int) -> None:
    spec = get_field(2, 4)
    rng = np.random.default_rng(seed)
    code = sample_rlnc(butterfly_network(), spec, rng)
    assignment = EdgeAssignment(read_only=(2, 5))
    X1 = random_matrix(spec, 2, 4, rng)
    X2 = random_matrix(spec, 2, 4, rng)
    r1, r2 = transmit(code, X1, assignment), transmit(code, X2, assignment)
    both = transmit(code, mat_add(X1, X2), assignment)
    assert both.Y == mat_add(r1.Y, r2.Y)
    assert both.Z == mat_add(r1.Z, r2.Z)
    assert transmit(code, scale(X1, scalar), assignment).Y == scale(r1.Y, scalar)


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), write=st.sampled_from([(0,), (4,), (1, 6), (2, 3)]))
def test_received_space_lies_in_codeword_plus_jam(seed: int, write: tuple[int, ...]) -> None:
    spec = get_field(3)
    rng = np.random.default_rng(seed)
    code = sample_rlnc(butterfly_network(), spec, rng)
    X = random_matrix(spec, 2, 5, rng)
    jam = random_matrix(spec, len(write), 5, rng)
    result = transmit(code, X, EdgeAssignment(write_only=write), jam)
    assert contains(stack_rows(X, jam), result.Y)


def _cut_by_enumeration(t: NetworkTopology) -> int:
    inner = [v for v in range(t.num_nodes) if v not in (t.source, t.sink)]
    best = len(t.edges)
    for size in range(len(inner) + 1):
        for side in itertools.combinations(inner, size):
            s = {t.source, *side}
            best = min(best, sum(1 for u, v in t.edges if u in s and v not in s))
    return best


@st.composite
def _small_dags(draw) -> NetworkTopology:
    nodes = draw(st.integers(2, 6))
    pairs = [(u, v) for u in range(nodes) for v in range(u + 1, nodes)]
    edges = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=8))
    return NetworkTopology(nodes, tuple(edges), 0, nodes - 1)


@hyp_settings(max_examples=150, deadline=None)
@given(t=_small_dags())
def test_min_cut_matches_cut_enumeration(t: NetworkTopology) -> None:
    assert min_cut(t) == _cut_by_enumeration(t)
    cut = min_cut_edges(t)
    assert len(cut) == min_cut(t)


def test_random_transfer_is_usually_invertible() -> None:
    spec = get_field(2, 8)
    rng = np.random.default_rng(17)
    t = parallel_edge_network(2)
    invertible = sum(
        rank(transfer_matrices(sample_rlnc(t, spec, rng)).T_AB) == 2 for _ in range(1000)
    )
    assert invertible >= 990

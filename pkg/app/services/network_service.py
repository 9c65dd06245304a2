"""Unit-capacity DAG networks: min-cut, random linear network coding and
packet propagation with adversarial overwrites."""

import json
import logging
from collections import deque
from pathlib import Path

import numpy as np

from app.core.errors import ConfigError, UsageError
from app.core.rng import SeededRandomSource
from app.models.adversary import EdgeAssignment
from app.models.field import FieldSpec
from app.models.matrix import MatrixQ
from app.models.network import LinearNetworkCode, NetworkTopology, TransferMatrices, TransmitResult

logger = logging.getLogger(__name__)


# Topologies -------------------------------------------------------------------


def parallel_edge_network(C: int) -> NetworkTopology:
    if C < 1:
        raise UsageError("a parallel-edge network needs at least one edge")
    return NetworkTopology(2, tuple((0, 1) for _ in range(C)), 0, 1, name=f"parallel:{C}")


def butterfly_network() -> NetworkTopology:
    """Single-sink butterfly: two source branches, one merged through a bottleneck."""
    edges = ((0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 5), (4, 5))
    return NetworkTopology(6, edges, 0, 5, name="butterfly")


def diamond_network() -> NetworkTopology:
    edges = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))
    return NetworkTopology(4, edges, 0, 3, name="diamond")


BUILTIN_TOPOLOGIES = ("parallel:<C>", "butterfly", "diamond")


def topology_from_dict(data: dict, name: str = "custom") -> NetworkTopology:
    try:
        return NetworkTopology(
            int(data["nodes"]),
            tuple(tuple(e) for e in data["edges"]),
            int(data["source"]),
            int(data["sink"]),
            name=name,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed topology: {type(e).__name__}: {e}") from e


def load_topology(ref: str) -> NetworkTopology:
    """Built-in name ("parallel:<C>", "butterfly", "diamond") or a JSON file path."""
    if ref.startswith("parallel:"):
        try:
            return parallel_edge_network(int(ref.split(":", 1)[1]))
        except ValueError as e:
            raise ConfigError(f"bad parallel topology {ref!r}") from e
    if ref == "butterfly":
        return butterfly_network()
    if ref == "diamond":
        return diamond_network()
    path = Path(ref)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"unknown topology {ref!r}: {e}") from e
    return topology_from_dict(data, name=path.stem)


# Max-flow / min-cut -------------------------------------------------------------


def _residual_max_flow(t: NetworkTopology) -> tuple[int, np.ndarray]:
    """Edmonds-Karp on the capacity matrix (parallel edges add capacity)."""
    size = t.num_nodes
    residual = np.zeros((size, size), dtype=np.int64)
    for u, v in t.edges:
        residual[u, v] += 1
    flow = 0
    while True:
        parent = [-1] * size
        parent[t.source] = t.source
        queue = deque([t.source])
        while queue and parent[t.sink] == -1:
            u = queue.popleft()
            for v in np.flatnonzero(residual[u] > 0):
                if parent[v] == -1:
                    parent[v] = u
                    queue.append(int(v))
        if parent[t.sink] == -1:
            return flow, residual
        # unit capacities: every augmenting path carries one unit
        v = t.sink
        while v != t.source:
            u = parent[v]
            residual[u, v] -= 1
            residual[v, u] += 1
            v = u
        flow += 1


def min_cut(t: NetworkTopology) -> int:
    return _residual_max_flow(t)[0]


def min_cut_edges(t: NetworkTopology) -> tuple[int, ...]:
    """Edges from the source side to the sink side of a minimum cut."""
    _, residual = _residual_max_flow(t)
    reachable = {t.source}
    queue = deque([t.source])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(residual[u] > 0):
            if int(v) not in reachable:
                reachable.add(int(v))
                queue.append(int(v))
    return tuple(i for i, (u, v) in enumerate(t.edges) if u in reachable and v not in reachable)


# Network codes --------------------------------------------------------------------


def _local_width(t: NetworkTopology, C: int, edge: int) -> int:
    tail = t.edges[edge][0]
    return C if tail == t.source else len(t.in_edges[tail])


def sample_rlnc(
    t: NetworkTopology, spec: FieldSpec, rng: SeededRandomSource, C: int | None = None
) -> LinearNetworkCode:
    """Every local coefficient i.i.d. uniform over GF(q)."""
    C = min_cut(t) if C is None else C
    coeffs = tuple(spec.random(_local_width(t, C, e), rng) for e in range(len(t.edges)))
    return LinearNetworkCode(t, spec, C, coeffs)


def identity_code(t: NetworkTopology, spec: FieldSpec, C: int | None = None) -> LinearNetworkCode:
    """Routing code: the k-th out-edge of a node forwards input k (mod width)."""
    C = min_cut(t) if C is None else C
    coeffs: list[np.ndarray] = []
    for e, (u, _) in enumerate(t.edges):
        width = _local_width(t, C, e)
        vec = np.zeros(width, dtype=np.int64)
        if width:
            vec[t.out_edges[u].index(e) % width] = 1
        coeffs.append(vec)
    return LinearNetworkCode(t, spec, C, tuple(coeffs))


# Propagation ------------------------------------------------------------------------


def _propagate(
    code: LinearNetworkCode,
    X: np.ndarray,
    assignment: EdgeAssignment,
    jam: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Push X through the network in topological edge order.

    Read edges record their content before any overwrite on that edge; write
    edges then carry their jam row downstream. Returns (Y, Z) arrays.
    """
    t, spec = code.topology, code.field
    width = X.shape[1]
    read_pos = {e: i for i, e in enumerate(assignment.read_edges)}
    write_pos = {e: i for i, e in enumerate(assignment.write_edges)}
    packets = np.zeros((len(t.edges), width), dtype=np.int64)
    Z = np.zeros((len(read_pos), width), dtype=np.int64)
    for e in t.edge_order:
        tail = t.edges[e][0]
        inputs = X if tail == t.source else packets[list(t.in_edges[tail])]
        coeff = code.coefficients[e]
        if len(coeff):
            content = spec.matmul(coeff[None, :], inputs)[0]
        else:
            content = np.zeros(width, dtype=np.int64)
        if e in read_pos:
            Z[read_pos[e]] = content
        if jam is not None and e in write_pos:
            content = jam[write_pos[e]]
        packets[e] = content
    sink_edges = list(t.in_edges[t.sink])[: code.C]
    return packets[sink_edges], Z


def _check_assignment(t: NetworkTopology, assignment: EdgeAssignment) -> None:
    for e in assignment.read_edges + assignment.write_only:
        if not 0 <= e < len(t.edges):
            raise ConfigError(f"assigned edge {e} not in topology with {len(t.edges)} edges")


def transfer_matrices(
    code: LinearNetworkCode, assignment: EdgeAssignment | None = None
) -> TransferMatrices:
    """Global coding vectors, obtained by propagating X = I_C without attack."""
    assignment = assignment or EdgeAssignment()
    _check_assignment(code.topology, assignment)
    spec = code.field
    eye = np.eye(code.C, dtype=np.int64)
    T_AB, T_AJ = _propagate(code, eye, assignment, None)
    all_edges = EdgeAssignment(read_only=tuple(range(len(code.topology.edges))))
    _, every = _propagate(code, eye, all_edges, None)
    T_AW = every[list(assignment.write_edges)].reshape(len(assignment.write_edges), code.C)
    return TransferMatrices(MatrixQ(spec, T_AB), MatrixQ(spec, T_AJ), MatrixQ(spec, T_AW))


def transmit(
    code: LinearNetworkCode,
    X: MatrixQ,
    assignment: EdgeAssignment | None = None,
    jam_rows: MatrixQ | None = None,
) -> TransmitResult:
    assignment = assignment or EdgeAssignment()
    _check_assignment(code.topology, assignment)
    if X.field != code.field:
        raise UsageError(f"codeword over {X.field!r}, network code over {code.field!r}")
    if X.rows != code.C:
        raise UsageError(f"codeword has {X.rows} rows, the network carries C={code.C}")
    jam = None
    if jam_rows is not None:
        expected = (len(assignment.write_edges), X.cols)
        if jam_rows.shape != expected:
            raise UsageError(f"jam rows have shape {jam_rows.shape}, expected {expected}")
        jam = jam_rows.data
    Y, Z = _propagate(code, X.data, assignment, jam)
    return TransmitResult(
        MatrixQ(code.field, Y), MatrixQ(code.field, Z), transfer_matrices(code, assignment)
    )

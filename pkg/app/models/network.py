from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from app.core.errors import ConfigError
from app.models.field import FieldSpec
from app.models.matrix import MatrixQ


@dataclass(frozen=True)
class NetworkTopology:
    """Acyclic multigraph with unit-capacity edges; edges are indexed by position."""

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    source: int
    sink: int
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        nodes = range(self.num_nodes)
        if self.source not in nodes or self.sink not in nodes:
            raise ConfigError(f"source/sink outside the {self.num_nodes} nodes")
        if self.source == self.sink:
            raise ConfigError("source and sink must differ")
        for u, v in self.edges:
            if u not in nodes or v not in nodes:
                raise ConfigError(f"edge ({u}, {v}) references a missing node")
            if u == v:
                raise ConfigError(f"self-loop at node {u}")
        if self.in_edges[self.source]:
            raise ConfigError("the source must not have incoming edges")
        if self.out_edges[self.sink]:
            raise ConfigError("the sink must not have outgoing edges")
        if len(self.node_order) != self.num_nodes:
            raise ConfigError("topology contains a directed cycle")

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        acc: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, (_, v) in enumerate(self.edges):
            acc[v].append(i)
        return tuple(tuple(a) for a in acc)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        acc: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, (u, _) in enumerate(self.edges):
            acc[u].append(i)
        return tuple(tuple(a) for a in acc)

    @cached_property
    def node_order(self) -> tuple[int, ...]:
        """Kahn topological order (lowest index first among ready nodes)."""
        indeg = [len(e) for e in self.in_edges]
        ready = deque(v for v in range(self.num_nodes) if indeg[v] == 0)
        order: list[int] = []
        while ready:
            u = ready.popleft()
            order.append(u)
            for e in self.out_edges[u]:
                v = self.edges[e][1]
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        return tuple(order)

    @cached_property
    def edge_order(self) -> tuple[int, ...]:
        position = {v: i for i, v in enumerate(self.node_order)}
        return tuple(sorted(range(len(self.edges)), key=lambda e: (position[self.edges[e][0]], e)))

    @cached_property
    def inert_edges(self) -> tuple[int, ...]:
        """Edges lying on no source→sink path."""
        forward = self._reach(self.source, self.out_edges, 1)
        backward = self._reach(self.sink, self.in_edges, 0)
        return tuple(
            i for i, (u, v) in enumerate(self.edges) if u not in forward or v not in backward
        )

    def _reach(self, start: int, adjacency, end: int) -> set[int]:
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for e in adjacency[u]:
                w = self.edges[e][end]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def to_dict(self) -> dict:
        return {
            "nodes": self.num_nodes,
            "edges": [list(e) for e in self.edges],
            "source": self.source,
            "sink": self.sink,
        }


@dataclass(frozen=True, eq=False)
class LinearNetworkCode:
    """Local coding rows: for an edge out of the source, a length-C vector
    against the rows of X; otherwise a vector against the tail's in-edges."""

    topology: NetworkTopology
    field: FieldSpec
    C: int
    coefficients: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        t = self.topology
        if len(self.coefficients) != len(t.edges):
            raise ConfigError("one coefficient vector per edge is required")
        for i, (u, _) in enumerate(t.edges):
            expected = self.C if u == t.source else len(t.in_edges[u])
            if len(self.coefficients[i]) != expected:
                raise ConfigError(
                    f"edge {i} needs {expected} coefficients, got {len(self.coefficients[i])}"
                )
            self.coefficients[i].setflags(write=False)


@dataclass(frozen=True)
class TransferMatrices:
    T_AB: MatrixQ  # sink rows × C
    T_AJ: MatrixQ  # read edges × C
    T_AW: MatrixQ  # write edges × C


@dataclass(frozen=True)
class TransmitResult:
    Y: MatrixQ
    Z: MatrixQ
    transfer: TransferMatrices

"""
Data model for parallel-link networks.

A network on K nodes is a K x K matrix of link bandwidths: entry (i, j) is the
number of F_q symbols node i can push to node j in one network use. Everything
is directed; "uniform" topologies simply carry both directions.

Why this exists:
- Every other module (cut bound, tree packing LP, closed-form schemes, the
  protocol simulator) consumes the same immutable value, so validation happens
  exactly once, here.
- Entries are exact Python numbers (int, or Fraction after `combine`) so bound
  arithmetic never touches floating point.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, List, Sequence, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Matrix = Tuple[Tuple[Rational, ...], ...]


class NetworkError(ValueError):
    """Raised for an invalid network, generator parameter or edge list."""


def _normalize(value: Rational) -> Rational:
    # Keep integers as int so serialization and display stay clean.
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


@dataclass(frozen=True)
class Network:
    """
    Immutable network N(beta).

    Attributes:
        node_count: K >= 2.
        bandwidth: K x K tuple-of-tuples; diagonal is zero, entries are
                   nonnegative exact rationals (integers for file-backed networks).
    """
    node_count: int
    bandwidth: Matrix

    def __post_init__(self) -> None:
        K = self.node_count
        if not isinstance(K, int) or K < 2:
            raise NetworkError(f"Node count must be an integer >= 2, got {K!r}.")
        if len(self.bandwidth) != K or any(len(row) != K for row in self.bandwidth):
            raise NetworkError(f"Bandwidth matrix must be {K}x{K}.")
        rows = []
        for i, row in enumerate(self.bandwidth):
            clean = []
            for j, value in enumerate(row):
                if isinstance(value, bool) or not isinstance(value, Rational):
                    raise NetworkError(f"Bandwidth ({i},{j}) must be an exact rational, got {value!r}.")
                if value < 0:
                    raise NetworkError(f"Bandwidth ({i},{j}) is negative: {value}.")
                if i == j and value != 0:
                    raise NetworkError(f"Self-loop on node {i} is not allowed.")
                clean.append(_normalize(value))
            rows.append(tuple(clean))
        object.__setattr__(self, "bandwidth", tuple(rows))

    # --- Accessors ---

    def beta(self, i: int, j: int) -> Rational:
        return self.bandwidth[i][j]

    @property
    def nodes(self) -> range:
        return range(self.node_count)

    def support(self) -> List[Edge]:
        """All links with positive bandwidth, sorted by (from, to)."""
        K = self.node_count
        return [(i, j) for i in range(K) for j in range(K) if self.bandwidth[i][j] > 0]

    def total_bandwidth(self) -> Rational:
        return _normalize(sum((sum(row) for row in self.bandwidth), Fraction(0)))

    def out_degree(self, i: int) -> int:
        return sum(1 for j in self.nodes if self.bandwidth[i][j] > 0)

    def in_degree(self, j: int) -> int:
        return sum(1 for i in self.nodes if self.bandwidth[i][j] > 0)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for row in self.bandwidth for v in row)

    # --- Derived networks ---

    def reversed(self) -> "Network":
        """Transpose: every link i->j becomes j->i."""
        K = self.node_count
        return Network(K, tuple(tuple(self.bandwidth[j][i] for j in range(K)) for i in range(K)))

    def scaled(self, factor: Rational) -> "Network":
        if factor < 0:
            raise NetworkError(f"Scale factor must be nonnegative, got {factor}.")
        return Network(self.node_count, tuple(tuple(v * factor for v in row) for row in self.bandwidth))

    def to_digraph(self) -> nx.DiGraph:
        """networkx view of the support with a `capacity` attribute per link."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for i, j in self.support():
            graph.add_edge(i, j, capacity=self.bandwidth[i][j])
        return graph

    def is_strongly_connected(self) -> bool:
        return nx.is_strongly_connected(self.to_digraph())

    def describe(self) -> str:
        """
        Label N(b_12; b_13; ...) over 1-based ordered pairs,
        omitting zero links.
        """
        parts = [f"b{i + 1}{j + 1}={_format_number(self.bandwidth[i][j])}" for i, j in self.support()]
        return f"N[K={self.node_count}](" + "; ".join(parts) + ")"


def _format_number(value: Rational) -> str:
    value = _normalize(value)
    return str(value)


def node_label(node: int, bits: int = 0) -> str:
    """Display label: 1-based for generic networks, bit-string for hypercubes."""
    if bits:
        return format(node, f"0{bits}b")
    return str(node + 1)


def zero_matrix(K: int) -> List[List[Rational]]:
    return [[0] * K for _ in range(K)]


def make_network(K: int, edges: Iterable[Tuple[int, int, int]]) -> Network:
    """
    Builds a network from an explicit link list. Unlisted pairs get bandwidth 0.

    Raises:
        NetworkError: out-of-range node id, negative bandwidth, self-loop or
                      duplicate (i, j) entry.
    """
    if not isinstance(K, int) or K < 2:
        raise NetworkError(f"Node count must be an integer >= 2, got {K!r}.")
    matrix = zero_matrix(K)
    seen = set()
    for i, j, beta in edges:
        if not (0 <= i < K and 0 <= j < K):
            raise NetworkError(f"Node id out of range in edge ({i},{j}) for K={K}.")
        if i == j:
            raise NetworkError(f"Self-loop ({i},{i}) is not allowed.")
        if (i, j) in seen:
            raise NetworkError(f"Duplicate edge ({i},{j}).")
        if isinstance(beta, bool) or not isinstance(beta, int):
            raise NetworkError(f"Bandwidth of ({i},{j}) must be an integer, got {beta!r}.")
        if beta < 0:
            raise NetworkError(f"Bandwidth of ({i},{j}) is negative: {beta}.")
        seen.add((i, j))
        matrix[i][j] = beta
    return Network(K, tuple(tuple(row) for row in matrix))


def from_matrix(matrix: Sequence[Sequence[Rational]]) -> Network:
    return Network(len(matrix), tuple(tuple(row) for row in matrix))


def combine(networks: Sequence[Network], weights: Sequence[Rational]) -> Network:
    """
    Entrywise weighted sum sum_u w_u * beta^u.

    The result may carry rational entries; such networks are for analysis only
    (the file format stores integers).
    """
    if not networks:
        raise NetworkError("combine needs at least one network.")
    if len(networks) != len(weights):
        raise NetworkError(f"Got {len(networks)} networks but {len(weights)} weights.")
    K = networks[0].node_count
    if any(n.node_count != K for n in networks):
        raise NetworkError("All combined networks must have the same node count.")
    if any(w < 0 for w in weights):
        raise NetworkError("Combination weights must be nonnegative.")
    matrix = [[Fraction(0)] * K for _ in range(K)]
    for network, weight in zip(networks, weights):
        weight = Fraction(weight)
        for i, j in network.support():
            matrix[i][j] += weight * network.bandwidth[i][j]
    return from_matrix(matrix)

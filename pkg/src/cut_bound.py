"""
Cut-set upper bound on the All-Reduce computation rate.

For every nonempty proper subset S of nodes, the symbols crossing from S to
its complement per network use bound the rate, so

    R_bar = min over S of sum_{i in S, j not in S} beta_ij.

Two routes compute it: exhaustive subset enumeration (the reference oracle)
and 2(K-1) max-flow computations from / to node 0 (the scalable path).
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Optional, Sequence, Set, Tuple

from src.arborescence import EnumerationLimitError
from src.interfaces import BoundResult, IUpperBound
from src.network import Network

logger = logging.getLogger(__name__)

BRUTEFORCE_HARD_LIMIT = 20


@dataclass(frozen=True)
class Cut:
    """A nonempty proper node subset and the bandwidth leaving it."""
    subset: Tuple[int, ...]
    value: Rational

    def complement(self, node_count: int) -> Tuple[int, ...]:
        members = set(self.subset)
        return tuple(v for v in range(node_count) if v not in members)

    def label(self) -> str:
        return "{" + ",".join(str(v) for v in self.subset) + "}"


def cut_value(network: Network, subset: Sequence[int]) -> Rational:
    members = set(subset)
    outside = [j for j in network.nodes if j not in members]
    return sum((network.beta(i, j) for i in members for j in outside), 0)


def _validate_cut(network: Network, cut: Cut) -> None:
    assert 0 < len(cut.subset) < network.node_count, f"Cut {cut.label()} is not a nonempty proper subset"
    assert cut.value == cut_value(network, cut.subset), f"Cut {cut.label()} value mismatch"


def cutset_bound_bruteforce(network: Network, max_nodes: int = BRUTEFORCE_HARD_LIMIT) -> Cut:
    """
    Enumerates all 2^K - 2 subsets. Ties go to the lexicographically smallest
    sorted subset (subsets are visited by size, then lexicographically, and the
    lexicographic minimum is tracked explicitly).

    Raises:
        EnumerationLimitError: K exceeds `max_nodes`; use the max-flow route.
    """
    K = network.node_count
    limit = min(max_nodes, BRUTEFORCE_HARD_LIMIT)
    if K > limit:
        msg = f"Brute-force cut enumeration refused for K={K} (limit {limit}); use max-flow."
        logger.warning(msg)
        raise EnumerationLimitError(msg)
    best: Optional[Cut] = None
    for size in range(1, K):
        for subset in combinations(range(K), size):
            value = cut_value(network, subset)
            if best is None or value < best.value or (value == best.value and subset < best.subset):
                best = Cut(subset, value)
    assert best is not None
    _validate_cut(network, best)
    logger.info(f"Cut-set bound (brute force) = {best.value} at S={best.label()}")
    return best


def _max_flow_with_cut(network: Network, source: int, sink: int) -> Tuple[Rational, Set[int]]:
    """Edmonds-Karp on a dense residual matrix; returns (value, source side)."""
    K = network.node_count
    residual = [[Fraction(network.beta(i, j)) for j in range(K)] for i in range(K)]
    flow = Fraction(0)
    while True:
        parent = [-1] * K
        parent[source] = source
        queue = deque([source])
        while queue and parent[sink] == -1:
            u = queue.popleft()
            for v in range(K):
                if parent[v] == -1 and residual[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[sink] == -1:
            break
        bottleneck = None
        v = sink
        while v != source:
            u = parent[v]
            bottleneck = residual[u][v] if bottleneck is None else min(bottleneck, residual[u][v])
            v = u
        v = sink
        while v != source:
            u = parent[v]
            residual[u][v] -= bottleneck
            residual[v][u] += bottleneck
            v = u
        flow += bottleneck
    source_side = {v for v in range(K) if parent[v] != -1}
    value = int(flow) if flow.denominator == 1 else flow
    return value, source_side


def max_flow(network: Network, source: int, sink: int) -> Rational:
    """
    Maximum source -> sink flow with beta as capacities, by shortest
    augmenting paths.

    Raises:
        ValueError: source equals sink or either is out of range.
    """
    K = network.node_count
    if not (0 <= source < K and 0 <= sink < K):
        raise ValueError(f"Flow endpoints ({source},{sink}) out of range for K={K}.")
    if source == sink:
        raise ValueError(f"Source and sink must differ (both {source}).")
    value, _ = _max_flow_with_cut(network, source, sink)
    return value


def cutset_bound_maxflow(network: Network) -> Cut:
    """
    Every nonempty proper S either contains node 0 (then it separates 0 from
    some t outside S) or not (then it separates some t in S from 0), so the
    minimum over t of flow(0, t) and flow(t, 0) is the cut-set bound.
    """
    K = network.node_count
    best: Optional[Cut] = None
    for t in range(1, K):
        for source, sink in ((0, t), (t, 0)):
            value, side = _max_flow_with_cut(network, source, sink)
            candidate = Cut(tuple(sorted(side)), value)
            if best is None or value < best.value or (value == best.value and candidate.subset < best.subset):
                best = candidate
    assert best is not None
    _validate_cut(network, best)
    logger.info(f"Cut-set bound (max-flow) = {best.value} at S={best.label()}")
    return best


def cutset_bound(network: Network, bruteforce_max_k: int = 12) -> Cut:
    """Brute force up to `bruteforce_max_k` nodes, max-flow above."""
    if network.node_count <= bruteforce_max_k:
        return cutset_bound_bruteforce(network)
    return cutset_bound_maxflow(network)


class BruteForceCutBound(IUpperBound):
    """Cut-set bound by subset enumeration."""
    name = "cut-bruteforce"

    def compute(self, network: Network) -> BoundResult:
        cut = cutset_bound_bruteforce(network)
        return BoundResult(cut.value, self.name, cut)


class MaxFlowCutBound(IUpperBound):
    """Cut-set bound by pairwise max-flow."""
    name = "cut-maxflow"

    def compute(self, network: Network) -> BoundResult:
        cut = cutset_bound_maxflow(network)
        return BoundResult(cut.value, self.name, cut)

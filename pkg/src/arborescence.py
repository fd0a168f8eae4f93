"""
Spanning arborescences and rooted MAC-BC columns.

A rooted MAC tree (IN arborescence) aggregates partial sums toward a root; a
rooted BC tree (OUT arborescence) broadcasts the root's result back out. One of
each at a common root is a column of the tree-packing LP.

Why this exists:
- Exhaustive enumeration feeds the exact LP on small networks and doubles as
  the oracle for everything else.
- Matrix-tree counting checks the enumeration independently.
- Minimum-cost arborescences (Chu-Liu/Edmonds) price columns for column
  generation on networks where enumeration explodes.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.network import Edge, Network

logger = logging.getLogger(__name__)


class Orientation(Enum):
    """IN: edges point toward the root. OUT: edges leave the root."""
    IN = "in"
    OUT = "out"


class InfeasibleArborescence(Exception):
    """No spanning arborescence exists for the requested root and orientation."""


class EnumerationLimitError(ValueError):
    """The requested enumeration exceeds its configured cap."""


@dataclass(frozen=True)
class Arborescence:
    """
    A spanning in- or out-tree stored as a parent tuple.

    parent[v] is None exactly at the root. For IN the edge of v is v -> parent[v];
    for OUT it is parent[v] -> v.
    """
    root: int
    orientation: Orientation
    parent: Tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        K = len(self.parent)
        if not 0 <= self.root < K or self.parent[self.root] is not None:
            raise ValueError(f"Root {self.root} must be the only node without a parent.")
        for v, p in enumerate(self.parent):
            if v == self.root:
                continue
            if p is None or not 0 <= p < K or p == v:
                raise ValueError(f"Node {v} has invalid parent {p!r}.")
        for v in range(K):
            node, steps = v, 0
            while node != self.root:
                node = self.parent[node]
                steps += 1
                if steps > K:
                    raise ValueError(f"Parent pointers from node {v} never reach root {self.root}.")

    @property
    def node_count(self) -> int:
        return len(self.parent)

    def edges(self) -> List[Edge]:
        """The K-1 directed edges, sorted by (from, to)."""
        if self.orientation is Orientation.IN:
            pairs = [(v, p) for v, p in enumerate(self.parent) if p is not None]
        else:
            pairs = [(p, v) for v, p in enumerate(self.parent) if p is not None]
        return sorted(pairs)

    def parent_map(self) -> Dict[int, int]:
        return {v: p for v, p in enumerate(self.parent) if p is not None}

    def reversed(self) -> "Arborescence":
        """Dual tree: same parent pointers, every edge reversed."""
        flipped = Orientation.OUT if self.orientation is Orientation.IN else Orientation.IN
        return Arborescence(self.root, flipped, self.parent)

    def depths(self) -> Tuple[int, ...]:
        """Number of tree edges between each node and the root."""
        result = []
        for v in range(self.node_count):
            depth, node = 0, v
            while node != self.root:
                node = self.parent[node]  # type: ignore[assignment]
                depth += 1
            result.append(depth)
        return tuple(result)

    def fits(self, network: Network) -> bool:
        return all(network.beta(i, j) > 0 for i, j in self.edges())


@dataclass(frozen=True)
class MacBcColumn:
    """
    Rooted MAC-BC network: an IN tree and an OUT tree sharing a root.

    beta_z(i, j) = [i->j in mac] + [i->j in bc], so entries are in {0, 1, 2}
    and sum to 2(K-1).
    """
    root: int
    mac: Arborescence
    bc: Arborescence
    beta_z: Tuple[Tuple[int, ...], ...]

    @property
    def node_count(self) -> int:
        return len(self.beta_z)

    def support(self) -> List[Edge]:
        K = self.node_count
        return [(i, j) for i in range(K) for j in range(K) if self.beta_z[i][j] > 0]

    def as_network(self) -> Network:
        return Network(self.node_count, self.beta_z)

    def usage(self, i: int, j: int) -> int:
        return self.beta_z[i][j]


def make_column(mac: Arborescence, bc: Arborescence) -> MacBcColumn:
    if mac.orientation is not Orientation.IN or bc.orientation is not Orientation.OUT:
        raise ValueError("A column needs an IN (mac) tree and an OUT (bc) tree.")
    if mac.root != bc.root or mac.node_count != bc.node_count:
        raise ValueError(f"Trees disagree on root/size: mac root {mac.root}, bc root {bc.root}.")
    K = mac.node_count
    beta = [[0] * K for _ in range(K)]
    for i, j in mac.edges():
        beta[i][j] += 1
    for i, j in bc.edges():
        beta[i][j] += 1
    return MacBcColumn(mac.root, mac, bc, tuple(tuple(row) for row in beta))


# --- Enumeration ---

def _parent_candidates(network: Network, orientation: Orientation) -> List[List[int]]:
    K = network.node_count
    if orientation is Orientation.IN:
        return [[p for p in range(K) if network.beta(v, p) > 0] for v in range(K)]
    return [[p for p in range(K) if network.beta(p, v) > 0] for v in range(K)]


def iter_arborescences(network: Network, root: int, orientation: Orientation) -> Iterator[Arborescence]:
    """
    Every spanning arborescence on the support, each exactly once.

    Parents are assigned to non-root nodes in ascending node order, candidate
    parents in ascending order, pruning assignments that close a cycle; the
    stream is therefore lexicographic in the parent tuple.
    """
    K = network.node_count
    if not 0 <= root < K:
        raise ValueError(f"Root {root} out of range for K={K}.")
    candidates = _parent_candidates(network, orientation)
    order = [v for v in range(K) if v != root]
    if any(not candidates[v] for v in order):
        return
    parent: List[Optional[int]] = [None] * K

    def closes_cycle(v: int, p: int) -> bool:
        node: Optional[int] = p
        while node is not None and node != root:
            if node == v:
                return True
            node = parent[node]
        return False

    def grow(position: int) -> Iterator[Arborescence]:
        if position == len(order):
            yield Arborescence(root, orientation, tuple(parent))
            return
        v = order[position]
        for p in candidates[v]:
            if closes_cycle(v, p):
                continue
            parent[v] = p
            yield from grow(position + 1)
            parent[v] = None

    yield from grow(0)


def enumerate_in_arborescences(network: Network, root: int) -> List[Arborescence]:
    return list(iter_arborescences(network, root, Orientation.IN))


def enumerate_out_arborescences(network: Network, root: int) -> List[Arborescence]:
    return list(iter_arborescences(network, root, Orientation.OUT))


# --- Counting (directed matrix-tree theorem) ---

def _bareiss_determinant(matrix: List[List[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [row[:] for row in matrix]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def count_arborescences(network: Network, root: int, orientation: Orientation) -> int:
    """
    Number of spanning arborescences of the support digraph, via the reduced
    Laplacian determinant (out-degree Laplacian for IN trees, in-degree
    Laplacian for OUT trees).
    """
    K = network.node_count
    adjacency = [[1 if network.beta(i, j) > 0 else 0 for j in range(K)] for i in range(K)]
    laplacian = [[-adjacency[i][j] for j in range(K)] for i in range(K)]
    for v in range(K):
        if orientation is Orientation.IN:
            laplacian[v][v] = sum(adjacency[v])
        else:
            laplacian[v][v] = sum(adjacency[u][v] for u in range(K))
    keep = [v for v in range(K) if v != root]
    reduced = [[laplacian[i][j] for j in keep] for i in keep]
    return _bareiss_determinant(reduced)


def count_columns(network: Network, roots: Optional[Sequence[int]] = None) -> int:
    """Number of MAC-BC columns on the support: sum_r #IN(r) * #OUT(r)."""
    roots = range(network.node_count) if roots is None else roots
    return sum(count_arborescences(network, r, Orientation.IN) * count_arborescences(network, r, Orientation.OUT)
               for r in roots)


def enumerate_columns(network: Network, cap: Optional[int] = None,
                      roots: Optional[Sequence[int]] = None) -> Iterator[MacBcColumn]:
    """
    Streams every (root, in-tree, out-tree) column over the support, ordered by
    root, then mac, then bc enumeration order.

    Raises:
        EnumerationLimitError: if the column count exceeds `cap`.
    """
    roots = list(range(network.node_count)) if roots is None else sorted(roots)
    if cap is not None:
        total = count_columns(network, roots)
        if total > cap:
            msg = f"Column enumeration would produce {total} columns, above cap {cap}; use column generation."
            logger.warning(msg)
            raise EnumerationLimitError(msg)
    for root in roots:
        outs = enumerate_out_arborescences(network, root)
        if not outs:
            continue
        for mac in iter_arborescences(network, root, Orientation.IN):
            for bc in outs:
                yield make_column(mac, bc)


# --- Minimum-cost arborescence (Chu-Liu/Edmonds) ---

_WorkEdge = Tuple[int, int, Fraction, int]


def _find_cycle(nodes: Sequence[int], root: int, best: Mapping[int, _WorkEdge]) -> Optional[List[int]]:
    visited = set()
    for start in nodes:
        if start == root or start in visited:
            continue
        path: List[int] = []
        on_path = set()
        node = start
        while node != root and node not in visited:
            if node in on_path:
                return path[path.index(node):]
            path.append(node)
            on_path.add(node)
            node = best[node][0]
        visited.update(path)
    return None


def _edmonds(nodes: List[int], root: int, edges: List[_WorkEdge]) -> List[int]:
    """Keys of a minimum out-arborescence; ties go to the smaller key."""
    best: Dict[int, _WorkEdge] = {}
    for edge in edges:
        u, v, w, key = edge
        if u == v or v == root:
            continue
        current = best.get(v)
        if current is None or (w, key) < (current[2], current[3]):
            best[v] = edge
    missing = [v for v in nodes if v != root and v not in best]
    if missing:
        raise InfeasibleArborescence(f"No edge reaches node(s) {missing}.")

    cycle = _find_cycle(nodes, root, best)
    if cycle is None:
        return [best[v][3] for v in nodes if v != root]

    in_cycle = set(cycle)
    super_node = max(nodes) + 1
    entering: Dict[int, int] = {}
    contracted: List[_WorkEdge] = []
    for u, v, w, key in edges:
        if u in in_cycle and v in in_cycle:
            continue
        if v in in_cycle:
            entering[key] = v
            contracted.append((u, super_node, w - best[v][2], key))
        elif u in in_cycle:
            contracted.append((super_node, v, w, key))
        else:
            contracted.append((u, v, w, key))
    chosen = _edmonds([n for n in nodes if n not in in_cycle] + [super_node], root, contracted)
    entry = next(entering[key] for key in chosen if key in entering)
    return chosen + [best[v][3] for v in cycle if v != entry]


def min_cost_arborescence(network: Network, root: int, orientation: Orientation,
                          edge_costs: Mapping[Edge, Rational]) -> Tuple[Arborescence, Fraction]:
    """
    Cheapest spanning arborescence of the given root/orientation on the support.

    Exact rational arithmetic; ties are broken toward the smallest edge id
    (from * K + to).

    Raises:
        InfeasibleArborescence: no spanning arborescence exists.
        KeyError: a support edge has no cost.
    """
    K = network.node_count
    work: List[_WorkEdge] = []
    for i, j in network.support():
        cost = Fraction(edge_costs[(i, j)])
        if cost < 0:
            raise ValueError(f"Edge cost for ({i},{j}) must be nonnegative, got {cost}.")
        key = i * K + j
        # IN trees are OUT trees of the reversed graph.
        work.append((j, i, cost, key) if orientation is Orientation.IN else (i, j, cost, key))
    chosen = _edmonds(list(range(K)), root, work)
    parent: List[Optional[int]] = [None] * K
    total = Fraction(0)
    for key in chosen:
        i, j = divmod(key, K)
        total += Fraction(edge_costs[(i, j)])
        if orientation is Orientation.IN:
            parent[i] = j
        else:
            parent[j] = i
    tree = Arborescence(root, orientation, tuple(parent))
    assert tree.fits(network), f"Min-cost arborescence at root {root} leaves the support"
    logger.debug(f"Min-cost {orientation.value}-arborescence at root {root}: cost {total}")
    return tree, total

"""
Closed-form tree packings for the named topologies, and the cut-edge
machinery that characterizes the rate of 1-MAC-BC networks exactly.

Why this exists:
- Each construction is a certificate: feasible in its topology and with a rate
  equal to the total-bandwidth cap, so it is LP-optimal without running an LP.
- Hypercube packings are far too large for exhaustive LP and are the main
  regression target for column generation.
- Networks that are nonnegative combinations of 1-MAC-BC networks sharing a
  cut-edge have R* pinned down exactly; `cut_edge_combination_rate` builds
  and checks them.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from math import factorial
from numbers import Rational
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.arborescence import Arborescence, MacBcColumn, Orientation, enumerate_columns, make_column
from src.cut_bound import cutset_bound
from src.interfaces import BoundResult, ILowerBound
from src.network import Edge, Network, NetworkError, combine
from src.rate_lp import Packing
from src.topologies import gen_complete, gen_cycle, gen_hypercube, gen_ring, gen_three_cycle, hypercube_dimension
from src.verification import VerificationError, VerificationManager

logger = logging.getLogger(__name__)


# --- Uniform complete, cyclic and ring networks ---

def _star_column(K: int, root: int) -> MacBcColumn:
    parent = tuple(None if v == root else root for v in range(K))
    return make_column(Arborescence(root, Orientation.IN, parent), Arborescence(root, Orientation.OUT, parent))


def pack_complete(K: int) -> Packing:
    """K star columns (all i -> k, then k -> all j), each with weight 1/2; rate K/2."""
    if K < 2:
        raise NetworkError(f"Complete packing needs K >= 2, got {K}.")
    columns = tuple(_star_column(K, k) for k in range(K))
    return Packing(K, columns, tuple(Fraction(1, 2) for _ in columns))


def _cycle_column(K: int, root: int, step: int = 1) -> MacBcColumn:
    """
    Cycle-path column: the mac tree is every cycle edge except root -> root+step,
    the bc tree every cycle edge except root-step -> root.
    """
    mac = tuple(None if v == root else (v + step) % K for v in range(K))
    bc = tuple(None if v == root else (v - step) % K for v in range(K))
    return make_column(Arborescence(root, Orientation.IN, mac), Arborescence(root, Orientation.OUT, bc))


def pack_cycle(K: int) -> Packing:
    """K cycle-path columns with weight 1/(2(K-1)); rate K/(2(K-1))."""
    if K < 3:
        raise NetworkError(f"Cycle packing needs K >= 3, got {K}.")
    columns = tuple(_cycle_column(K, k) for k in range(K))
    return Packing(K, columns, tuple(Fraction(1, 2 * (K - 1)) for _ in columns))


def pack_ring(K: int) -> Packing:
    """The cycle packing on each orientation of the ring; rate K/(K-1)."""
    if K < 3:
        raise NetworkError(f"Ring packing needs K >= 3, got {K}.")
    columns = tuple(_cycle_column(K, k, 1) for k in range(K)) + tuple(_cycle_column(K, k, -1) for k in range(K))
    return Packing(K, columns, tuple(Fraction(1, 2 * (K - 1)) for _ in columns))


# --- Non-uniform 3-node cycle ---

def _three_cycle_columns() -> Tuple[MacBcColumn, ...]:
    # Column m doubles cycle edge m (0->1, 1->2, 2->0); that is the cycle
    # column rooted at (m + 2) mod 3.
    return tuple(_cycle_column(3, (m + 2) % 3) for m in range(3))


def three_cycle_bounds(a: Rational, b: Rational, c: Rational) -> Tuple[Fraction, Fraction, bool]:
    """(lower, upper, characterized) for N(a; b; c)."""
    smallest = Fraction(min(a, b, c))
    quarter = Fraction(a + b + c) / 4
    if smallest <= quarter:
        return smallest, smallest, True
    return quarter, smallest, False


def pack_three_cycle(a: Rational, b: Rational, c: Rational) -> Packing:
    """
    Packing over the three columns with edge usages (2;1;1), (1;2;1), (1;1;2).

    Weights are returned in that column order. When min(a,b,c) <= (a+b+c)/4 the
    labels are rotated so the smallest bandwidth sits on edge 0->1, solved, and
    rotated back; otherwise the symmetric solution is used.
    """
    bandwidths = [Fraction(x) for x in (a, b, c)]
    if any(x <= 0 for x in bandwidths):
        raise NetworkError(f"Three-cycle bandwidths must be positive, got {(a, b, c)}.")
    total = sum(bandwidths)
    if min(bandwidths) <= total / 4:
        shift = bandwidths.index(min(bandwidths))
        ra, rb, rc = bandwidths[shift:] + bandwidths[:shift]
        if rc >= 2 * ra:
            rotated = [Fraction(0), Fraction(0), ra]
        else:
            rotated = [Fraction(0), 2 * ra - rc, rc - ra]
        weights = [Fraction(0)] * 3
        for m in range(3):
            weights[(m + shift) % 3] = rotated[m]
        assert 2 * rotated[1] + rotated[2] <= rb
    else:
        x, y, z = bandwidths
        weights = [(3 * x - y - z) / 4, (3 * y - x - z) / 4, (3 * z - x - y) / 4]
    return Packing(3, _three_cycle_columns(), tuple(weights))


# --- Uniform hypercube ---

@dataclass(frozen=True)
class HypercubeTreeSpec:
    """
    Level sets of the hypercube tree for root r and bit order pi.

    Bits are 1-based with bit 1 the most significant, so a node's bit-string
    label reads (r_1, ..., r_U). Level u (u >= 1) flips bit pi_u of every node in
    levels 0..u-1.
    """
    U: int
    root: int
    pi: Tuple[int, ...]
    levels: Tuple[Tuple[int, ...], ...]

    def mask(self, bit: int) -> int:
        return 1 << (self.U - bit)

    def parent(self) -> Tuple[Optional[int], ...]:
        """Each node in level u hangs off its pi_u-neighbor in the earlier levels."""
        parents: List[Optional[int]] = [None] * (1 << self.U)
        for u in range(1, self.U + 1):
            for node in self.levels[u]:
                parents[node] = node ^ self.mask(self.pi[u - 1])
        return tuple(parents)

    def column(self) -> MacBcColumn:
        parents = self.parent()
        return make_column(Arborescence(self.root, Orientation.IN, parents),
                           Arborescence(self.root, Orientation.OUT, parents))


def hypercube_tree_spec(U: int, root: int, pi: Sequence[int]) -> HypercubeTreeSpec:
    if sorted(pi) != list(range(1, U + 1)):
        raise ValueError(f"pi must be a permutation of 1..{U}, got {tuple(pi)}.")
    if not 0 <= root < (1 << U):
        raise ValueError(f"Root {root} out of range for U={U}.")
    levels: List[Tuple[int, ...]] = [(root,)]
    seen = [root]
    for bit in pi:
        flipped = tuple(node ^ (1 << (U - bit)) for node in seen)
        levels.append(flipped)
        seen.extend(flipped)
    return HypercubeTreeSpec(U, root, tuple(pi), tuple(levels))


def _check_dimension(U: int) -> None:
    if isinstance(U, bool) or not isinstance(U, int) or U < 1:
        raise NetworkError(f"Hypercube dimension must be an integer >= 1, got {U!r}.")
    VerificationManager().check_size("hypercube", U)


def hypercube_columns(U: int) -> List[MacBcColumn]:
    """One column per (root, pi): 2^U * U! columns, roots ascending, pi lexicographic."""
    _check_dimension(U)
    return [hypercube_tree_spec(U, root, pi).column()
            for root in range(1 << U)
            for pi in permutations(range(1, U + 1))]


def pack_hypercube(U: int) -> Packing:
    """Every (root, pi) column with weight 1/(2(2^U - 1)(U-1)!); rate 2^(U-1) U / (2^U - 1)."""
    columns = hypercube_columns(U)
    weight = Fraction(1, 2 * ((1 << U) - 1) * factorial(U - 1))
    return Packing(1 << U, tuple(columns), tuple(weight for _ in columns))


def hypercube_edge_count(U: int, edge: Edge) -> int:
    """
    Total multiplicity of a directed hypercube link over all generated columns,
    by direct scan. Equals 2(2^U - 1)(U-1)! for every link.
    """
    _check_dimension(U)
    i, j = edge
    K = 1 << U
    diff = i ^ j
    if not (0 <= i < K and 0 <= j < K) or diff == 0 or diff & (diff - 1):
        raise ValueError(f"({i},{j}) is not a link of the {U}-dimensional hypercube.")
    return sum(column.beta_z[i][j] for column in hypercube_columns(U))


# --- Cut-edges and 1-MAC-BC networks ---

class CutEdgeKind(Enum):
    ONLY_IN = "only-in"    # sole edge entering its head
    ONLY_OUT = "only-out"  # sole edge leaving its tail


@dataclass(frozen=True)
class CutEdge:
    tail: int
    head: int
    kind: CutEdgeKind

    @property
    def edge(self) -> Edge:
        return (self.tail, self.head)


def _support_matrix(beta: Sequence[Sequence[Rational]]) -> List[List[bool]]:
    return [[value > 0 for value in row] for row in beta]


def is_cut_edge(beta: Sequence[Sequence[Rational]], edge: Edge, kind: CutEdgeKind) -> bool:
    """Degree condition of a cut-edge on the support of `beta`."""
    i, j = edge
    support = _support_matrix(beta)
    if not support[i][j]:
        return False
    if kind is CutEdgeKind.ONLY_IN:
        return sum(support[k][j] for k in range(len(support))) == 1
    return sum(support[i][k] for k in range(len(support))) == 1


def find_cut_edge(column: MacBcColumn) -> CutEdge:
    """
    A cut-edge with unit coefficient: the sole edge entering its head or the
    sole edge leaving its tail. Every mac leaf has such an incoming edge, so one
    always exists. Prefers the smallest head, then the smallest tail.
    """
    K = column.node_count
    beta = column.beta_z
    for head in range(K):
        tails = [i for i in range(K) if beta[i][head]]
        if len(tails) == 1 and beta[tails[0]][head] == 1:
            return CutEdge(tails[0], head, CutEdgeKind.ONLY_IN)
    for tail in range(K):
        heads = [j for j in range(K) if beta[tail][j]]
        if len(heads) == 1 and beta[tail][heads[0]] == 1:
            return CutEdge(tail, heads[0], CutEdgeKind.ONLY_OUT)
    msg = f"Column rooted at {column.root} has no cut-edge; its edge count is wrong."
    logger.critical(msg)
    raise AssertionError(msg)


def is_one_mac_bc(network: Network, cut_edge: Edge) -> Optional[MacBcColumn]:
    """
    Witness column T with the same support as the network, beta >= beta^T,
    unit bandwidth on `cut_edge`, and `cut_edge` a cut-edge of T; None if no
    such column exists.
    """
    i, j = cut_edge
    support = network.support()
    K = network.node_count
    if network.beta(i, j) != 1 or len(support) > 2 * (K - 1):
        return None
    wanted = set(support)
    for column in enumerate_columns(network):
        if set(column.support()) != wanted:
            continue
        if any(column.beta_z[a][b] > network.beta(a, b) for a, b in support):
            continue
        if is_cut_edge(column.beta_z, cut_edge, CutEdgeKind.ONLY_IN) or \
                is_cut_edge(column.beta_z, cut_edge, CutEdgeKind.ONLY_OUT):
            return column
    return None


@dataclass(frozen=True)
class CutEdgeCombination:
    network: Network
    rate: Fraction
    packing: Packing


def cut_edge_combination_rate(components: Sequence[Tuple[Network, Rational]],
                              cut_edge: Edge) -> CutEdgeCombination:
    """
    Combines 1-MAC-BC networks sharing a cut-edge; the rate of the combination
    is exactly the sum of the weights, certified by a feasible packing of the
    witnesses (lower bound) and the cut at the shared cut-edge (upper bound).

    Raises:
        VerificationError: a component has no witness for `cut_edge`, or a
                           certificate check fails.
    """
    if not components:
        raise ValueError("cut_edge_combination_rate needs at least one component.")
    verifier = VerificationManager()
    witnesses = []
    for index, (component, weight) in enumerate(components):
        if weight < 0:
            raise ValueError(f"Component {index} has negative weight {weight}.")
        witness = is_one_mac_bc(component, cut_edge)
        if witness is None:
            msg = f"Component {index} is not a 1-MAC-BC network with cut-edge {cut_edge[0]}->{cut_edge[1]}."
            logger.critical(msg)
            raise VerificationError(msg)
        witnesses.append(witness)
    weights = tuple(Fraction(w) for _, w in components)
    network = combine([c for c, _ in components], weights)
    rate = sum(weights, Fraction(0))
    packing = Packing(network.node_count, tuple(witnesses), weights)
    verifier.check_packing_feasible(network, packing)
    upper = cutset_bound(network).value
    if upper > rate:
        msg = f"Cut-set bound {upper} exceeds the combined weight {rate}; cut-edge is not critical."
        logger.critical(msg)
        raise VerificationError(msg)
    verifier.check_bounds_consistent(rate, upper)
    logger.info(f"Rate characterized exactly: R* = {rate} on {network.describe()}")
    return CutEdgeCombination(network, rate, packing)


# --- Closed-form registry ---

CLOSED_FORMS: Dict[str, Dict[str, object]] = {
    "complete": {"network": gen_complete, "packing": pack_complete, "params": ("k",)},
    "cycle": {"network": gen_cycle, "packing": pack_cycle, "params": ("k",)},
    "ring": {"network": gen_ring, "packing": pack_ring, "params": ("k",)},
    "cyc3": {"network": gen_three_cycle, "packing": pack_three_cycle, "params": ("a", "b", "c")},
    "hypercube": {"network": gen_hypercube, "packing": pack_hypercube, "params": ("dim",)},
}


def closed_form_packing(topology: str, **params: object) -> Tuple[Network, Packing]:
    """(network, packing) for a topology with a closed-form scheme."""
    if topology not in CLOSED_FORMS:
        raise NetworkError(f"No closed-form packing for '{topology}'. Available: {', '.join(CLOSED_FORMS)}")
    entry = CLOSED_FORMS[topology]
    names = entry["params"]
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise NetworkError(f"Topology '{topology}' requires parameter(s): {', '.join(missing)}")
    args = [params[name] for name in names]
    network_fn: Callable[..., Network] = entry["network"]  # type: ignore[assignment]
    packing_fn: Callable[..., Packing] = entry["packing"]  # type: ignore[assignment]
    return network_fn(*args), packing_fn(*args)


class ClosedFormBound(ILowerBound):
    """Lower bound from a closed-form packing, checked against the given network."""
    name = "closed-form"

    def __init__(self, topology: str, **params: object) -> None:
        self.topology = topology
        self.params = params

    def compute(self, network: Network) -> BoundResult:
        expected, packing = closed_form_packing(self.topology, **self.params)
        if expected != network:
            raise VerificationError(f"Network does not match closed-form topology '{self.topology}'.")
        VerificationManager().check_packing_feasible(network, packing)
        return BoundResult(packing.rate, self.name, packing)

    @classmethod
    def recognize(cls, network: Network) -> Optional["ClosedFormBound"]:
        """A bound for `network` if it is a closed-form topology, else None."""
        match = recognize_closed_form(network)
        if match is None:
            return None
        topology, params = match
        return cls(topology, **params)


def recognize_closed_form(network: Network) -> Optional[Tuple[str, Dict[str, object]]]:
    """
    (topology, params) when the network is exactly one of the closed-form
    topologies, else None. Hypercubes above the dimension limit are not matched.
    """
    K = network.node_count
    U = hypercube_dimension(network)
    if U is not None and U <= VerificationManager.MAX_HYPERCUBE_DIM:
        return "hypercube", {"dim": U}
    if network == gen_complete(K):
        return "complete", {"k": K}
    if K < 3:
        return None
    if network == gen_cycle(K):
        return "cycle", {"k": K}
    if network == gen_ring(K):
        return "ring", {"k": K}
    if K == 3 and network.support() == [(0, 1), (1, 2), (2, 0)]:
        a, b, c = network.beta(0, 1), network.beta(1, 2), network.beta(2, 0)
        if min(a, b, c) >= 1:
            return "cyc3", {"a": a, "b": b, "c": c}
    return None

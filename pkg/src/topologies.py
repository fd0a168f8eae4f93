"""
Topology generators for the network families whose bounds have closed forms,
plus seeded random networks for randomized checks and conjecture searches.

Generator outputs are reproducible bit-for-bit for the same parameters.
"""

import logging
from numbers import Rational
from typing import Callable, Dict, Mapping, Optional, Union

import numpy as np

from src.network import Network, NetworkError, from_matrix, make_network, zero_matrix

logger = logging.getLogger(__name__)


def gen_complete(K: int) -> Network:
    """Uniform complete network: beta_ij = 1 for all i != j."""
    _require_int(K, "K", minimum=2)
    return make_network(K, [(i, j, 1) for i in range(K) for j in range(K) if i != j])


def gen_cycle(K: int) -> Network:
    """Uniform cyclic network: node k sends one symbol to (k + 1) mod K."""
    _require_int(K, "K", minimum=3)
    return make_network(K, [(k, (k + 1) % K, 1) for k in range(K)])


def gen_ring(K: int) -> Network:
    """Uniform ring: the cycle in both orientations."""
    _require_int(K, "K", minimum=3)
    edges = [(k, (k + 1) % K, 1) for k in range(K)] + [((k + 1) % K, k, 1) for k in range(K)]
    return make_network(K, edges)


def gen_three_cycle(a: Rational, b: Rational, c: Rational) -> Network:
    """
    3-node cyclic network N(a; b; c): beta_01 = a, beta_12 = b, beta_20 = c.

    Rational bandwidths are accepted for analysis; files only hold integers.
    """
    for name, value in (("a", a), ("b", b), ("c", c)):
        if isinstance(value, bool) or not isinstance(value, Rational) or value < 1:
            raise NetworkError(f"Three-cycle bandwidth {name} must be >= 1, got {value!r}.")
    matrix = zero_matrix(3)
    matrix[0][1], matrix[1][2], matrix[2][0] = a, b, c
    return from_matrix(matrix)


def gen_hypercube(U: int) -> Network:
    """K = 2^U nodes; beta_ij = 1 iff the binary labels differ in exactly one bit."""
    _require_int(U, "U", minimum=1)
    K = 1 << U
    return make_network(K, [(i, i ^ (1 << bit), 1) for i in range(K) for bit in range(U)])


def gen_bidirected_tree(parent_map: Mapping[int, int],
                        bandwidths: Union[int, Mapping[int, int]] = 1) -> Network:
    """
    Bi-directed tree: for every tree edge child -- parent both directions carry
    the edge's bandwidth.

    Args:
        parent_map: parent of every non-root node; nodes are 0..len(parent_map)
                    and the single node that is not a key is the root.
        bandwidths: one bandwidth for all edges, or a map child -> bandwidth.
    """
    K = len(parent_map) + 1
    if K < 2:
        raise NetworkError("A tree needs at least one edge.")
    nodes = set(range(K))
    roots = nodes - set(parent_map)
    if len(roots) != 1 or set(parent_map) - nodes or set(parent_map.values()) - nodes:
        raise NetworkError(f"Parent map must cover nodes 0..{K - 1} except exactly one root.")
    root = roots.pop()
    for start in parent_map:
        seen = {start}
        node = start
        while node != root:
            node = parent_map[node]
            if node in seen:
                raise NetworkError(f"Parent map has a cycle through node {node}.")
            seen.add(node)
    edges = []
    for child, parent in sorted(parent_map.items()):
        beta = bandwidths if isinstance(bandwidths, int) else bandwidths[child]
        if beta < 1:
            raise NetworkError(f"Tree edge {child}-{parent} needs positive bandwidth, got {beta}.")
        edges.append((child, parent, beta))
        edges.append((parent, child, beta))
    return make_network(K, edges)


def gen_random(K: int, max_bandwidth: int, rng: np.random.Generator,
               strongly_connected: bool = False, max_attempts: int = 1000) -> Network:
    """
    Random network with i.i.d. bandwidths uniform on {0..max_bandwidth}.

    With `strongly_connected`, draws are rejected until the support is strongly
    connected.
    """
    _require_int(K, "K", minimum=2)
    _require_int(max_bandwidth, "max_bandwidth", minimum=1)
    for _ in range(max_attempts):
        draw = rng.integers(0, max_bandwidth + 1, size=(K, K))
        np.fill_diagonal(draw, 0)
        network = from_matrix([[int(v) for v in row] for row in draw])
        if not strongly_connected or network.is_strongly_connected():
            return network
    raise NetworkError(f"No strongly connected network drawn in {max_attempts} attempts (K={K}).")


def random_parent_map(K: int, rng: np.random.Generator) -> Dict[int, int]:
    """Uniform random recursive tree on 0..K-1 rooted at 0."""
    _require_int(K, "K", minimum=2)
    return {node: int(rng.integers(0, node)) for node in range(1, K)}


def _require_int(value: int, name: str, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise NetworkError(f"{name} must be an integer >= {minimum}, got {value!r}.")


# --- Topology Registry ---
# Maps CLI topology names to (generator, parameter names).
TOPOLOGY_GENERATORS: Dict[str, Dict[str, object]] = {
    "complete": {"generator": gen_complete, "params": ("k",)},
    "cycle": {"generator": gen_cycle, "params": ("k",)},
    "ring": {"generator": gen_ring, "params": ("k",)},
    "cyc3": {"generator": gen_three_cycle, "params": ("a", "b", "c")},
    "hypercube": {"generator": gen_hypercube, "params": ("dim",)},
    "tree": {"generator": gen_bidirected_tree, "params": ("parents", "bandwidth")},
}


def generate(topology: str, **params: object) -> Network:
    """Looks up a generator by name and calls it with the named parameters."""
    if topology not in TOPOLOGY_GENERATORS:
        raise NetworkError(f"Unknown topology: {topology}. Available: {', '.join(TOPOLOGY_GENERATORS)}")
    entry = TOPOLOGY_GENERATORS[topology]
    generator: Callable[..., Network] = entry["generator"]  # type: ignore[assignment]
    names = entry["params"]
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise NetworkError(f"Topology '{topology}' requires parameter(s): {', '.join(missing)}")
    args = [params[name] for name in names]
    logger.info(f"Generating {topology} network with {dict(zip(names, args))}")
    return generator(*args)


def hypercube_dimension(network: Network) -> Optional[int]:
    """Returns U if the network equals gen_hypercube(U), else None."""
    K = network.node_count
    if K & (K - 1):
        return None
    U = K.bit_length() - 1
    return U if network == gen_hypercube(U) else None

"""
The Reduce-Broadcast linear program: pack rooted MAC-BC columns into the link
bandwidths,

    maximize  sum_z lambda_z   s.t.  sum_z lambda_z * beta^z <= beta,  lambda >= 0,

whose optimum is an achievable rate (time/bandwidth sharing over the
columns). Solved exactly, either over every column (small K) or by column
generation with min-cost arborescence pricing.

Why this exists:
- The LP value is the lower bound reported next to the cut-set bound.
- Its optimal packing is an executable scheme for the simulator.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, List, Optional, Sequence, Tuple

from src.arborescence import (EnumerationLimitError, InfeasibleArborescence, MacBcColumn, Orientation,
                              enumerate_columns, make_column, min_cost_arborescence)
from src.config import get_settings
from src.cut_bound import Cut, cutset_bound
from src.interfaces import BoundResult, ILowerBound
from src.network import Edge, Network
from src.simplex import solve_packing_lp

logger = logging.getLogger(__name__)


class ColumnGenerationError(RuntimeError):
    """Column generation did not converge within its iteration cap."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE_SUPPORT = "infeasible-support"  # no column fits the support


@dataclass(frozen=True)
class Packing:
    """Weighted MAC-BC columns; its rate is the sum of the weights."""
    node_count: int
    columns: Tuple[MacBcColumn, ...] = ()
    weights: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if len(self.columns) != len(self.weights):
            raise ValueError(f"{len(self.columns)} columns but {len(self.weights)} weights.")
        weights = tuple(Fraction(w) for w in self.weights)
        if any(w < 0 for w in weights):
            raise ValueError("Packing weights must be nonnegative.")
        if any(col.node_count != self.node_count for col in self.columns):
            raise ValueError(f"All columns must have {self.node_count} nodes.")
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "weights", weights)

    @property
    def rate(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def usage(self) -> List[List[Fraction]]:
        """sum_z lambda_z * beta^z, entrywise."""
        K = self.node_count
        total = [[Fraction(0)] * K for _ in range(K)]
        for column, weight in zip(self.columns, self.weights):
            if not weight:
                continue
            for i, j in column.support():
                total[i][j] += weight * column.beta_z[i][j]
        return total

    def is_feasible(self, network: Network) -> bool:
        if network.node_count != self.node_count:
            return False
        usage = self.usage()
        return all(usage[i][j] <= network.beta(i, j) for i in network.nodes for j in network.nodes)

    def nonzero(self) -> "Packing":
        kept = [(c, w) for c, w in zip(self.columns, self.weights) if w]
        return Packing(self.node_count, tuple(c for c, _ in kept), tuple(w for _, w in kept))

    def __len__(self) -> int:
        return len(self.columns)


def packing_usage(packing: Packing) -> List[List[Fraction]]:
    return packing.usage()


@dataclass(frozen=True)
class LpSolution:
    value: Fraction
    primal: Packing
    duals: Dict[Edge, Fraction]
    status: LpStatus
    method: str
    columns_considered: int = 0
    iterations: int = 0
    history: Tuple[Fraction, ...] = field(default=())


def bandwidth_cap(network: Network) -> Fraction:
    """Sum of all bandwidths over 2(K-1): every column spends 2(K-1) symbols."""
    return Fraction(network.total_bandwidth()) / (2 * (network.node_count - 1))


def _column_vector(column: MacBcColumn, rows: Sequence[Edge]) -> List[int]:
    return [column.beta_z[i][j] for i, j in rows]


def _solve_master(network: Network, rows: Sequence[Edge], columns: Sequence[MacBcColumn],
                  method: str, considered: int, iterations: int = 0,
                  history: Tuple[Fraction, ...] = ()) -> LpSolution:
    result = solve_packing_lp([_column_vector(c, rows) for c in columns], [network.beta(i, j) for i, j in rows])
    assert result.status == "optimal", "Packing LP cannot be unbounded: every column uses some link"
    packing = Packing(network.node_count, tuple(columns), result.primal).nonzero()
    duals = {edge: y for edge, y in zip(rows, result.duals)}
    assert packing.rate == result.value
    return LpSolution(result.value, packing, duals, LpStatus.OPTIMAL, method, considered, iterations, history)


def _empty_solution(network: Network, method: str) -> LpSolution:
    logger.warning(f"No MAC-BC column fits {network.describe()}: network is not strongly connected.")
    duals = {edge: Fraction(0) for edge in network.support()}
    return LpSolution(Fraction(0), Packing(network.node_count), duals, LpStatus.INFEASIBLE_SUPPORT, method)


def _dedupe(columns: Sequence[MacBcColumn]) -> List[MacBcColumn]:
    seen = set()
    unique = []
    for column in columns:
        if column.beta_z not in seen:
            seen.add(column.beta_z)
            unique.append(column)
    return unique


def lp_exhaustive(network: Network, force: bool = False, max_nodes: Optional[int] = None,
                  cap: Optional[int] = None) -> LpSolution:
    """
    Solves the LP over every column on the support (deduplicated by beta^z).

    Raises:
        EnumerationLimitError: K above the exhaustive limit without `force`,
                               or more columns than `cap`.
    """
    settings = get_settings()
    max_nodes = settings.exhaustive_max_k if max_nodes is None else max_nodes
    if network.node_count > max_nodes and not force:
        msg = f"Exhaustive LP refused for K={network.node_count} (limit {max_nodes}); use column generation."
        logger.warning(msg)
        raise EnumerationLimitError(msg)
    cap = settings.column_cap if cap is None else cap
    considered = 0
    unique: Dict[Tuple[Tuple[int, ...], ...], MacBcColumn] = {}
    for column in enumerate_columns(network, cap=None if force else cap):
        considered += 1
        unique.setdefault(column.beta_z, column)
    if not unique:
        return _empty_solution(network, "lp-exhaustive")
    solution = _solve_master(network, network.support(), list(unique.values()), "lp-exhaustive", considered)
    logger.info(f"Exhaustive LP: value {solution.value} over {len(unique)} distinct of {considered} columns")
    return solution


def _price(network: Network, duals: Dict[Edge, Fraction]) -> Tuple[Fraction, MacBcColumn]:
    """Cheapest column under dual costs: min over roots of in-tree + out-tree cost."""
    best: Optional[Tuple[Fraction, MacBcColumn]] = None
    for root in network.nodes:
        mac, mac_cost = min_cost_arborescence(network, root, Orientation.IN, duals)
        bc, bc_cost = min_cost_arborescence(network, root, Orientation.OUT, duals)
        cost = mac_cost + bc_cost
        if best is None or cost < best[0]:
            best = (cost, make_column(mac, bc))
    assert best is not None
    return best


def initial_columns(network: Network) -> List[MacBcColumn]:
    """One column per root from unit-cost arborescences, skipping infeasible roots."""
    unit = {edge: Fraction(1) for edge in network.support()}
    columns = []
    for root in network.nodes:
        try:
            mac, _ = min_cost_arborescence(network, root, Orientation.IN, unit)
            bc, _ = min_cost_arborescence(network, root, Orientation.OUT, unit)
        except InfeasibleArborescence:
            continue
        columns.append(make_column(mac, bc))
    return _dedupe(columns)


def lp_colgen(network: Network, max_iterations: Optional[int] = None) -> LpSolution:
    """
    Column generation: solve the restricted master, price with its duals, add
    the cheapest column while its reduced cost 1 - y.beta^z is positive.

    Raises:
        ColumnGenerationError: iteration cap (default 10 * K * |support|) exceeded.
    """
    if not network.is_strongly_connected():
        return _empty_solution(network, "lp-colgen")
    rows = network.support()
    cap = max_iterations if max_iterations is not None else 10 * network.node_count * len(rows)
    columns = initial_columns(network)
    known = {c.beta_z for c in columns}
    history: List[Fraction] = []
    for iteration in range(1, cap + 1):
        solution = _solve_master(network, rows, columns, "lp-colgen", len(columns), iteration, tuple(history))
        history.append(solution.value)
        cost, column = _price(network, solution.duals)
        logger.debug(f"Colgen iteration {iteration}: master {solution.value}, best column cost {cost}")
        if cost >= 1:
            logger.info(f"Column generation converged: value {solution.value} "
                        f"after {iteration} iterations with {len(columns)} columns")
            return LpSolution(solution.value, solution.primal, solution.duals, LpStatus.OPTIMAL,
                              "lp-colgen", len(columns), iteration, tuple(history))
        if column.beta_z in known:
            msg = f"Pricing returned an existing column with reduced cost {1 - cost} > 0."
            logger.critical(msg)
            raise ColumnGenerationError(msg)
        known.add(column.beta_z)
        columns.append(column)
    msg = f"Column generation did not converge within {cap} iterations on {network.describe()}."
    logger.critical(msg)
    raise ColumnGenerationError(msg)


def lp_solve(network: Network, method: str = "auto", force: bool = False) -> LpSolution:
    """Dispatch: 'exhaustive', 'colgen', or 'auto' (exhaustive for K <= 3)."""
    if method == "exhaustive":
        return lp_exhaustive(network, force=force)
    if method == "colgen":
        return lp_colgen(network)
    if method == "auto":
        return lp_exhaustive(network) if network.node_count <= 3 else lp_colgen(network)
    raise ValueError(f"Unknown LP method: {method}")


@dataclass(frozen=True)
class BoundsReport:
    lower: Fraction
    upper: Rational
    gap_ratio: Optional[Fraction]  # None when both bounds are 0
    cut: Cut
    lp: LpSolution


def bounds_report(network: Network) -> BoundsReport:
    """Column-generation lower bound, cut-set upper bound, and their ratio."""
    lp = lp_colgen(network)
    cut = cutset_bound(network, get_settings().bruteforce_max_k)
    lower, upper = lp.value, cut.value
    assert lower <= upper, f"LP lower bound {lower} exceeds cut-set bound {upper}"
    if lower == 0:
        # R_bar > 0 iff strongly connected iff a column exists.
        assert upper == 0, f"Cut-set bound {upper} is positive but no column fits"
        gap = None
    else:
        gap = Fraction(upper) / lower
    return BoundsReport(lower, upper, gap, cut, lp)


class ExhaustiveLpBound(ILowerBound):
    """LP lower bound over every column."""
    name = "lp-exhaustive"

    def __init__(self, force: bool = False) -> None:
        self.force = force

    def compute(self, network: Network) -> BoundResult:
        solution = lp_exhaustive(network, force=self.force)
        return BoundResult(solution.value, self.name, solution.primal)


class ColumnGenerationLpBound(ILowerBound):
    """LP lower bound by column generation."""
    name = "lp-colgen"

    def compute(self, network: Network) -> BoundResult:
        solution = lp_colgen(network)
        return BoundResult(solution.value, self.name, solution.primal)

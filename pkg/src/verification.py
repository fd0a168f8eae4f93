import logging
from fractions import Fraction
from numbers import Rational
from typing import Any

from src.arborescence import EnumerationLimitError
from src.network import Network
from src.rate_lp import Packing, bandwidth_cap, packing_usage

logger = logging.getLogger(__name__)


class VerificationError(ValueError):
    """A packing or oracle cross-check failed."""


class BoundsInvariantError(AssertionError):
    """A lower bound exceeded an upper bound. Always a defect in this package."""


class VerificationManager:
    """
    Exact consistency checks applied before any bound or scheme is reported.
    Every check either returns True or logs at critical and raises
    VerificationError (BoundsInvariantError for lower > upper), so a broken
    result can never reach a report silently.
    """

    # Hard limits - strictly enforced
    MAX_BRUTEFORCE_NODES = 20
    MAX_EXHAUSTIVE_NODES = 5
    MAX_HYPERCUBE_DIM = 4
    MAX_FIELD_MODULUS = 2**31 - 1

    def __init__(self) -> None:
        pass

    def _fail(self, msg: str) -> None:
        logger.critical(msg)
        raise VerificationError(msg)

    def check_packing_feasible(self, network: Network, packing: Packing) -> bool:
        """sum_z lambda_z * beta^z <= beta on every link, in exact arithmetic."""
        if packing.node_count != network.node_count:
            self._fail(f"VERIFICATION FAILED: packing has {packing.node_count} nodes, network has {network.node_count}.")
        usage = packing_usage(packing)
        for i in network.nodes:
            for j in network.nodes:
                if usage[i][j] > network.beta(i, j):
                    self._fail(f"VERIFICATION FAILED: link {i}->{j} carries {usage[i][j]} "
                               f"but has bandwidth {network.beta(i, j)}.")
        logger.info(f"Packing verified feasible: {len(packing)} columns, rate {packing.rate}")
        return True

    def check_cap_tight(self, network: Network, packing: Packing) -> bool:
        """Rate equals sum(beta) / 2(K-1), which certifies LP optimality."""
        cap = bandwidth_cap(network)
        if packing.rate != cap:
            self._fail(f"VERIFICATION FAILED: packing rate {packing.rate} differs from cap {cap}.")
        return True

    def check_bounds_consistent(self, lower: Rational, upper: Rational) -> bool:
        if lower > upper:
            msg = f"INVARIANT BREACH: lower bound {lower} exceeds upper bound {upper}."
            logger.critical(msg)
            raise BoundsInvariantError(msg)
        return True

    def check_oracle_match(self, name: str, first: Any, second: Any) -> bool:
        if first != second:
            self._fail(f"VERIFICATION FAILED: {name} oracles disagree: {first} != {second}.")
        return True

    def check_size(self, kind: str, size: int) -> bool:
        """Hard size limits per enumeration kind ('bruteforce', 'exhaustive', 'hypercube', 'modulus')."""
        limits = {
            "bruteforce": self.MAX_BRUTEFORCE_NODES,
            "exhaustive": self.MAX_EXHAUSTIVE_NODES,
            "hypercube": self.MAX_HYPERCUBE_DIM,
            "modulus": self.MAX_FIELD_MODULUS,
        }
        if kind not in limits:
            raise ValueError(f"Unknown size kind: {kind}")
        if size > limits[kind]:
            msg = f"SIZE BLOCK: {kind} size {size} exceeds limit of {limits[kind]}."
            logger.critical(msg)
            raise EnumerationLimitError(msg)
        return True


def gap_within_two(lower: Fraction, upper: Rational) -> bool:
    """The open conjecture upper <= 2 * lower; recorded, never asserted."""
    return upper <= 2 * lower

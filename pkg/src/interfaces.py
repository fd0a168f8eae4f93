# src/interfaces.py

from abc import ABC, abstractmethod
from dataclasses import dataclass
from numbers import Rational
from typing import Any, Optional

from src.network import Network


@dataclass(frozen=True)
class BoundResult:
    """
    A computed bound on the All-Reduce computation rate.

    Attributes:
        value: exact bound value.
        provenance: how it was obtained ('cut-bruteforce', 'cut-maxflow',
                    'lp-exhaustive', 'lp-colgen', 'closed-form').
        witness: the minimizing Cut for upper bounds, the Packing for lower bounds.
    """
    value: Rational
    provenance: str
    witness: Optional[Any] = None


class IUpperBound(ABC):
    """
    Abstract base class for converse bounds. Every implementation must return a
    value no smaller than the true maximum computation rate R*.
    """
    name: str = "upper"

    @abstractmethod
    def compute(self, network: Network) -> BoundResult:
        """Evaluate the bound on a network."""
        pass


class ILowerBound(ABC):
    """
    Abstract base class for achievability bounds. The witness must be a scheme
    (a feasible packing) that the simulator can execute.
    """
    name: str = "lower"

    @abstractmethod
    def compute(self, network: Network) -> BoundResult:
        """Evaluate the bound on a network."""
        pass

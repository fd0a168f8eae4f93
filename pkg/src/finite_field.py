"""Prime-field arithmetic on numpy int64 vectors."""

import logging

import numpy as np
from sympy import isprime

from src.verification import VerificationManager

logger = logging.getLogger(__name__)


class FieldError(ValueError):
    """Invalid modulus or a vector outside the field."""


def is_prime(q: int) -> bool:
    return not isinstance(q, bool) and isinstance(q, int) and q >= 2 and bool(isprime(q))


class PrimeField:
    """F_q for prime q; elements are integers in [0, q-1]."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise FieldError(f"q must be prime, got {q!r}.")
        try:
            VerificationManager().check_size("modulus", q)
        except ValueError as e:
            raise FieldError(str(e)) from e
        self.q = q

    def __repr__(self) -> str:
        return f"PrimeField(q={self.q})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(self.q)

    def zeros(self, length: int) -> np.ndarray:
        return np.zeros(length, dtype=np.int64)

    def vector(self, values) -> np.ndarray:
        """Reduces arbitrary integers into the field."""
        return np.mod(np.asarray(values, dtype=np.int64), self.q)

    def check(self, vector: np.ndarray) -> np.ndarray:
        if np.any(vector < 0) or np.any(vector >= self.q):
            raise FieldError(f"Vector has entries outside F_{self.q}.")
        return vector

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a + b, self.q)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a - b, self.q)

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        # Entries stay below 2^31, so products fit in int64.
        return np.mod((c % self.q) * a, self.q)

    def sum(self, vectors) -> np.ndarray:
        vectors = list(vectors)
        if not vectors:
            raise FieldError("Cannot sum an empty list of vectors.")
        total = self.zeros(len(vectors[0]))
        for v in vectors:
            total = self.add(total, v)
        return total

    def random(self, length: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform symbols from F_q."""
        return rng.integers(0, self.q, size=length, dtype=np.int64)

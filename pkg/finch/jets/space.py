"""
Monomial bookkeeping for truncated Taylor jets

A JetSpace is the set of monomials x^alpha y^beta in the 2n variables of the
tangent bundle with |alpha| <= max_x, |beta| <= max_y and
|alpha| + |beta| <= max_total. The set is downward closed, so dropping the
monomials outside it is a ring homomorphism and jets on a space multiply
exactly up to truncation.

Spaces are immutable and shared through get_space(); the index tables they
build on first use (products, derivatives, projections) depend only on the
orders, never on jet values.
"""
from functools import cached_property, lru_cache
from typing import Dict, List, Tuple

import numpy as np

from ..errors import CapabilityError


def _exponents(nvars: int, max_degree: int) -> List[Tuple[int, ...]]:
    """All exponent tuples of length nvars with total degree <= max_degree"""
    if nvars == 0:
        return [()]
    out = []
    for first in range(max_degree + 1):
        for rest in _exponents(nvars - 1, max_degree - first):
            out.append((first,) + rest)
    return out


class JetSpace:
    """Truncation pattern of a jet over n base and n fibre variables"""

    def __init__(self, n: int, max_x: int, max_y: int, max_total: int):
        if min(max_x, max_y, max_total) < 0:
            raise CapabilityError(
                f"jet orders exhausted (x={max_x}, y={max_y}, total={max_total}); "
                f"raise the evaluation orders"
            )
        self.n = n
        self.max_total = max_total
        self.max_x = min(max_x, max_total)
        self.max_y = min(max_y, max_total)

        monomials = []
        for alpha in _exponents(n, self.max_x):
            for beta in _exponents(n, self.max_y):
                if sum(alpha) + sum(beta) <= max_total:
                    monomials.append(alpha + beta)
        # Constant term first, then by total degree
        monomials.sort(key=lambda e: (sum(e), tuple(-v for v in e)))

        self.exponents = np.array(monomials, dtype=np.int64).reshape(len(monomials), 2 * n)
        self.degree = self.exponents.sum(axis=1)
        self.x_degree = self.exponents[:, :n].sum(axis=1)
        self.y_degree = self.exponents[:, n:].sum(axis=1)
        self.size = len(monomials)

        self._radix = max_total + 1
        self._weights = self._radix ** np.arange(2 * n, dtype=np.int64)
        keys = self.exponents @ self._weights
        self._key_order = np.argsort(keys)
        self._sorted_keys = keys[self._key_order]

    @property
    def orders(self) -> Tuple[int, int, int]:
        return (self.max_x, self.max_y, self.max_total)

    def __repr__(self) -> str:
        return f"JetSpace(n={self.n}, x<={self.max_x}, y<={self.max_y}, total<={self.max_total})"

    # ── lookups ──────────────────────────────────────────────────────────

    def contains(self, exponents: np.ndarray) -> np.ndarray:
        exponents = np.atleast_2d(exponents)
        x = exponents[:, : self.n].sum(axis=1)
        y = exponents[:, self.n :].sum(axis=1)
        return (
            (exponents.min(axis=1) >= 0)
            & (x <= self.max_x)
            & (y <= self.max_y)
            & (x + y <= self.max_total)
        )

    def index_of(self, exponents: np.ndarray) -> np.ndarray:
        """Indices of monomials (rows of exponents) that are known to lie in the space"""
        keys = np.atleast_2d(exponents) @ self._weights
        return self._key_order[np.searchsorted(self._sorted_keys, keys)]

    def index(self, exponent: Tuple[int, ...]) -> int:
        exponent = np.asarray(exponent, dtype=np.int64)
        if exponent.shape != (2 * self.n,) or not self.contains(exponent)[0]:
            raise CapabilityError(f"monomial {tuple(exponent)} is outside {self!r}")
        return int(self.index_of(exponent)[0])

    # ── tables ───────────────────────────────────────────────────────────

    @cached_property
    def product(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Pair table for multiplication.

        Returns:
            (ia, ib, starts): all pairs (ia[k], ib[k]) whose product lies in the
            space, grouped by the product's index; group c starts at starts[c].
        """
        lhs, rhs, target = [], [], []
        for a in range(self.size):
            limit = self.max_total - self.degree[a]
            b = np.nonzero(self.degree <= limit)[0]
            sums = self.exponents[a] + self.exponents[b]
            ok = self.contains(sums)
            b = b[ok]
            lhs.append(np.full(len(b), a, dtype=np.int64))
            rhs.append(b)
            target.append(self.index_of(sums[ok]))
        ia = np.concatenate(lhs)
        ib = np.concatenate(rhs)
        ic = np.concatenate(target)
        order = np.argsort(ic, kind="stable")
        starts = np.searchsorted(ic[order], np.arange(self.size))
        return ia[order], ib[order], starts

    def reduced(self, block: str) -> "JetSpace":
        """The space left after one derivative in the x or y block"""
        if block == "x":
            return get_space(self.n, self.max_x - 1, self.max_y, self.max_total - 1)
        return get_space(self.n, self.max_x, self.max_y - 1, self.max_total - 1)

    @cached_property
    def _derivative_tables(self) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
        return {}

    def derivative(self, block: str) -> Tuple["JetSpace", np.ndarray, np.ndarray]:
        """
        Gather tables for d/dx^v (block "x") or d/dy^v (block "y").

        Returns:
            (target, src, factor) with src/factor of shape (n, target.size):
            coefficient c of the derivative along variable v is
            factor[v, c] * coeffs[src[v, c]].
        """
        target = self.reduced(block)
        tables = self._derivative_tables
        if block not in tables:
            offset = 0 if block == "x" else self.n
            src = np.empty((self.n, target.size), dtype=np.int64)
            factor = np.empty((self.n, target.size))
            for v in range(self.n):
                shifted = target.exponents.copy()
                shifted[:, offset + v] += 1
                src[v] = self.index_of(shifted)
                factor[v] = shifted[:, offset + v]
            tables[block] = (src, factor)
        src, factor = tables[block]
        return target, src, factor

    @cached_property
    def _projections(self) -> Dict[Tuple[int, int, int], np.ndarray]:
        return {}

    def projection(self, target: "JetSpace") -> np.ndarray:
        """Indices in this space of every monomial of a sub-space"""
        key = target.orders
        if key not in self._projections:
            self._projections[key] = self.index_of(target.exponents)
        return self._projections[key]

    def meet(self, other: "JetSpace") -> "JetSpace":
        if other is self:
            return self
        if other.n != self.n:
            raise ValueError(f"cannot combine jets of dimension {self.n} and {other.n}")
        return get_space(
            self.n,
            min(self.max_x, other.max_x),
            min(self.max_y, other.max_y),
            min(self.max_total, other.max_total),
        )


@lru_cache(maxsize=None)
def _cached_space(n: int, max_x: int, max_y: int, max_total: int) -> JetSpace:
    return JetSpace(n, max_x, max_y, max_total)


def get_space(n: int, max_x: int, max_y: int, max_total: int) -> JetSpace:
    """Shared JetSpace for the given orders (x and y orders are clipped to the total)"""
    if min(max_x, max_y, max_total) < 0:
        # Raise without caching the failure
        return JetSpace(n, max_x, max_y, max_total)
    return _cached_space(n, min(max_x, max_total), min(max_y, max_total), max_total)

"""
Truncated multivariate Taylor jets

A Jet stores the Taylor coefficients of a (tensor of) smooth function(s) of
(x, y) about a base point, truncated to a JetSpace. The trailing axis of
``coeffs`` runs over the monomials of the space; any leading axes are tensor
indices, so a single Jet can hold a vector of spray coefficients or the
whole metric tensor.

Elementary functions are applied by composing their scalar Taylor series
with the nilpotent part h = u - u(p): f(u) = sum_k f^(k)(u0)/k! h^k, where
h^(T+1) vanishes on a space of total order T.
"""
import math
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError
from .space import JetSpace

Number = Union[int, float, np.floating, np.ndarray]


class Jet:
    """Tensor of truncated Taylor polynomials on a JetSpace"""

    __slots__ = ("space", "coeffs")
    # Make numpy defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, space: JetSpace, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1:] != (space.size,):
            raise ValueError(f"coefficient axis {coeffs.shape} does not match {space!r}")
        self.space = space
        self.coeffs = coeffs

    # ── construction ─────────────────────────────────────────────────────

    @classmethod
    def constant(cls, space: JetSpace, value: Number) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (space.size,))
        coeffs[..., 0] = value
        return cls(space, coeffs)

    @classmethod
    def variable(cls, space: JetSpace, index: int, value: float) -> "Jet":
        """The coordinate function number ``index`` (x^1..x^n, then y^1..y^n) at ``value``"""
        coeffs = np.zeros(space.size)
        coeffs[0] = value
        unit = np.zeros(2 * space.n, dtype=np.int64)
        unit[index] = 1
        # On a space without x (or y) derivatives the coordinate is constant
        if space.contains(unit)[0]:
            coeffs[space.index(tuple(unit))] = 1.0
        return cls(space, coeffs)

    @classmethod
    def coordinates(cls, space: JetSpace, x: Sequence[float], y: Sequence[float]) -> Tuple["Jet", "Jet"]:
        """Base and fibre coordinate vectors as jets of shape (n,)"""
        n = space.n
        xs = stack([cls.variable(space, i, x[i]) for i in range(n)])
        ys = stack([cls.variable(space, n + i, y[i]) for i in range(n)])
        return xs, ys

    # ── tensor plumbing ──────────────────────────────────────────────────

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        """The jet evaluated at the base point"""
        value = self.coeffs[..., 0]
        return float(value) if value.ndim == 0 else value.copy()

    def __len__(self) -> int:
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        if any(k is Ellipsis for k in key):
            # Ellipsis addresses the tensor axes, never the monomial axis
            key = key + (slice(None),)
        return Jet(self.space, self.coeffs[key])

    def transpose(self, *axes: int) -> "Jet":
        return Jet(self.space, self.coeffs.transpose(*axes, len(self.shape)))

    def restrict(self, space: JetSpace) -> "Jet":
        if space is self.space:
            return self
        return Jet(space, self.coeffs[..., self.space.projection(space)])

    def coefficient(self, exponent: Tuple[int, ...]) -> np.ndarray:
        return self.coeffs[..., self.space.index(exponent)]

    def derivative(self, exponent: Tuple[int, ...]) -> Number:
        """The partial derivative with the given (alpha + beta) exponent at the base point"""
        scale = math.prod(math.factorial(int(e)) for e in exponent)
        value = self.coefficient(exponent) * scale
        return float(value) if np.ndim(value) == 0 else value

    # ── arithmetic ───────────────────────────────────────────────────────

    def _align(self, other: "Jet") -> Tuple[JetSpace, np.ndarray, np.ndarray]:
        space = self.space.meet(other.space)
        return space, self.restrict(space).coeffs, other.restrict(space).coeffs

    def _shift(self, constant: Number) -> "Jet":
        constant = np.asarray(constant, dtype=float)
        shape = np.broadcast_shapes(self.shape, constant.shape) + (self.space.size,)
        coeffs = np.broadcast_to(self.coeffs, shape).copy()
        coeffs[..., 0] += constant
        return Jet(self.space, coeffs)

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            space, a, b = self._align(other)
            return Jet(space, a + b)
        return self._shift(other)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(self.space, -self.coeffs)

    def __pos__(self) -> "Jet":
        return self

    def __sub__(self, other) -> "Jet":
        if isinstance(other, Jet):
            space, a, b = self._align(other)
            return Jet(space, a - b)
        return self._shift(-np.asarray(other, dtype=float))

    def __rsub__(self, other) -> "Jet":
        return (-self)._shift(other)

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            space, a, b = self._align(other)
            ia, ib, starts = space.product
            return Jet(space, np.add.reduceat(a[..., ia] * b[..., ib], starts, axis=-1))
        return Jet(self.space, self.coeffs * np.asarray(other, dtype=float)[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.space, self.coeffs / np.asarray(other, dtype=float)[..., None])

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, exponent) -> "Jet":
        if isinstance(exponent, (int, np.integer)):
            return self._integer_power(int(exponent))
        exponent = Fraction(exponent) if not isinstance(exponent, Fraction) else exponent
        if exponent.denominator == 1:
            return self._integer_power(int(exponent))
        return self.power(float(exponent))

    def _integer_power(self, exponent: int) -> "Jet":
        if exponent < 0:
            return self.reciprocal()._integer_power(-exponent)
        result = Jet.constant(self.space, np.ones(self.shape))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # ── elementary functions ─────────────────────────────────────────────

    def _compose(self, series: Iterable[np.ndarray]) -> "Jet":
        """Apply a scalar function given its Taylor coefficients c_0..c_T at the base value"""
        series = list(series)
        h = self._shift(-self.coeffs[..., 0])
        result = Jet.constant(self.space, series[0])
        term = h
        for k in range(1, len(series)):
            result = result + term * series[k]
            if k + 1 < len(series):
                term = term * h
        return result

    def _base(self) -> np.ndarray:
        return self.coeffs[..., 0]

    def power(self, exponent: float) -> "Jet":
        """u**p for real p, defined where the base value is positive"""
        u0 = self._base()
        if np.any(u0 <= 0):
            raise DomainError(f"power {exponent} of a non-positive value {np.min(u0)!r}")
        series = [u0 ** exponent]
        for k in range(1, self.space.max_total + 1):
            series.append(series[-1] * (exponent - k + 1) / (k * u0))
        return self._compose(series)

    def reciprocal(self) -> "Jet":
        u0 = self._base()
        if np.any(u0 == 0):
            raise DomainError("division by a jet with zero value")
        series = [1.0 / u0]
        for _ in range(self.space.max_total):
            series.append(-series[-1] / u0)
        return self._compose(series)

    def sqrt(self) -> "Jet":
        u0 = self._base()
        if np.any(u0 <= 0):
            raise DomainError(f"sqrt of a non-positive value {np.min(u0)!r}")
        return self.power(0.5)

    def exp(self) -> "Jet":
        base = np.exp(self._base())
        return self._compose(base / math.factorial(k) for k in range(self.space.max_total + 1))

    def log(self) -> "Jet":
        u0 = self._base()
        if np.any(u0 <= 0):
            raise DomainError(f"log of a non-positive value {np.min(u0)!r}")
        series = [np.log(u0)]
        for k in range(1, self.space.max_total + 1):
            series.append((-1) ** (k + 1) / (k * u0 ** k))
        return self._compose(series)

    # ── differentiation ──────────────────────────────────────────────────

    def _grad(self, block: str) -> "Jet":
        target, src, factor = self.space.derivative(block)
        return Jet(target, self.coeffs[..., src] * factor)

    def grad_x(self) -> "Jet":
        """Base derivatives; a new trailing tensor axis runs over x^1..x^n"""
        return self._grad("x")

    def grad_y(self) -> "Jet":
        """Fibre derivatives; a new trailing tensor axis runs over y^1..y^n"""
        return self._grad("y")

    def diff(self, index: int) -> "Jet":
        """Derivative along coordinate ``index`` (0..n-1 base, n..2n-1 fibre)"""
        n = self.space.n
        if index < n:
            return self.grad_x()[(Ellipsis, index)]
        return self.grad_y()[(Ellipsis, index - n)]

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, {self.space!r})"


# ── module level helpers ─────────────────────────────────────────────────────


def stack(jets: Sequence[Jet], axis: int = 0) -> Jet:
    """Stack jets of equal shape along a new leading tensor axis"""
    space = jets[0].space
    for jet in jets[1:]:
        space = space.meet(jet.space)
    return Jet(space, np.stack([jet.restrict(space).coeffs for jet in jets], axis=axis))


def _split(subscripts: str) -> Tuple[str, str, str, str]:
    inputs, output = subscripts.replace(" ", "").split("->")
    left, right = inputs.split(",")
    spare = next(c for c in "zwvutsrqp" if c not in subscripts)
    return left, right, output, spare


def contract(subscripts: str, a, b) -> Jet:
    """
    Einstein contraction of two tensors of which at least one is a Jet.

    Subscripts name the tensor axes only, e.g. "ik,kj->ij"; plain arrays are
    treated as constants.
    """
    left, right, output, p = _split(subscripts)
    if isinstance(a, Jet) and isinstance(b, Jet):
        space, ca, cb = a._align(b)
        ia, ib, starts = space.product
        values = np.einsum(f"{left}{p},{right}{p}->{output}{p}", ca[..., ia], cb[..., ib])
        return Jet(space, np.add.reduceat(values, starts, axis=-1))
    if isinstance(a, Jet):
        return Jet(a.space, np.einsum(f"{left}{p},{right}->{output}{p}", a.coeffs, np.asarray(b, dtype=float)))
    return Jet(b.space, np.einsum(f"{left},{right}{p}->{output}{p}", np.asarray(a, dtype=float), b.coeffs))


def trace(matrix: Jet) -> Jet:
    return Jet(matrix.space, np.einsum("ii...->...", matrix.coeffs))


def inv(matrix: Jet) -> Jet:
    """
    Inverse of a jet-valued square matrix.

    With M = M0 + H (H vanishing at the base point) the Neumann series
    sum_k (-M0^-1 H)^k M0^-1 terminates after max_total terms.
    """
    m0 = matrix.value
    a0 = np.linalg.inv(m0)
    step = contract("ik,kj->ij", -a0, matrix - m0)
    term = Jet.constant(matrix.space, a0)
    result = term
    for _ in range(matrix.space.max_total):
        term = contract("ik,kj->ij", step, term)
        result = result + term
    return result


def logabsdet(matrix: Jet) -> Tuple[float, Jet]:
    """
    Sign and log|det| of a jet-valued square matrix.

    log det(M0 + H) = log det M0 + tr log(1 + M0^-1 H), the logarithm
    expanded as its (terminating) Mercator series.
    """
    m0 = matrix.value
    sign, base = np.linalg.slogdet(m0)
    step = contract("ik,kj->ij", np.linalg.inv(m0), matrix - m0)
    power = step
    result = trace(step) + base
    for k in range(2, matrix.space.max_total + 1):
        power = contract("ik,kj->ij", power, step)
        result = result + trace(power) * ((-1) ** (k + 1) / k)
    return float(sign), result


# ── scalar dispatch used by metric evaluators ────────────────────────────────


def sqrt(value):
    if isinstance(value, Jet):
        return value.sqrt()
    if value <= 0:
        raise DomainError(f"sqrt of a non-positive value {value!r}")
    return math.sqrt(value)


def exp(value):
    if isinstance(value, Jet):
        return value.exp()
    return math.exp(value)


def log(value):
    if isinstance(value, Jet):
        return value.log()
    if value <= 0:
        raise DomainError(f"log of a non-positive value {value!r}")
    return math.log(value)


def power(value, exponent: Fraction):
    """value**exponent; integer exponents accept any sign of the base"""
    if exponent.denominator == 1:
        return value ** int(exponent)
    if isinstance(value, Jet):
        return value.power(float(exponent))
    if value <= 0:
        raise DomainError(f"power {exponent} of a non-positive value {value!r}")
    return value ** float(exponent)

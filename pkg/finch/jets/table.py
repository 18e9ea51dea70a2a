"""
Derivative tables of scalar kernels, the finite-difference oracle and the
homogeneity check
"""
import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from ..errors import CapabilityError, DomainError, ParamError
from ..models.geometry import FiberPoint
from .jet import Jet
from .space import get_space

logger = logging.getLogger(__name__)

# (max x order, max y order, max total order)
DEFAULT_ORDERS = (2, 5, 6)
DEFAULT_CAPABILITY = (2, 5, 6)
FD_MAX_ORDER = 4

# Central difference stencils: offsets (in units of h) and weights, accurate to O(h^2)
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _check_domain(kernel, point: FiberPoint):
    domain = getattr(kernel, "domain", None)
    if domain is not None and not domain.contains(point.x):
        raise DomainError(f"x = {point.x.tolist()} is outside the domain {domain.describe()}")


def kernel_jet(kernel, point: FiberPoint, orders: Tuple[int, int, int]) -> Jet:
    """Jet of a scalar kernel at a point (no domain or capability checks)"""
    space = get_space(point.n, *orders)
    xs, ys = Jet.coordinates(space, point.x, point.y)
    value = kernel.evaluate(list(xs), list(ys))
    if not isinstance(value, Jet):
        value = Jet.constant(space, value)
    return value


def _as_exponent(index: Sequence[int], n: int) -> Tuple[int, ...]:
    exponent = tuple(int(v) for v in index)
    if len(exponent) != n or min(exponent, default=0) < 0:
        raise CapabilityError(f"multi-index {exponent} is not an exponent tuple of length {n}")
    return exponent


def _from_indices(indices: Sequence[int], n: int) -> Tuple[int, ...]:
    counts = Counter(int(i) for i in indices)
    if any(i < 0 or i >= n for i in counts):
        raise CapabilityError(f"variable indices {list(indices)} out of range for n = {n}")
    return tuple(counts.get(i, 0) for i in range(n))


@dataclass(frozen=True)
class JetTable:
    """All mixed partials of a scalar kernel at one fibre point, up to the given orders"""

    point: FiberPoint
    max_x_order: int
    max_y_order: int
    max_total: int
    jet: Jet

    @property
    def n(self) -> int:
        return self.point.n

    @property
    def value(self) -> float:
        return self.jet.value

    def entry(self, alpha: Sequence[int], beta: Sequence[int]) -> float:
        """d^alpha/dx d^beta/dy of the kernel, multi-indices given as exponent tuples"""
        alpha = _as_exponent(alpha, self.n)
        beta = _as_exponent(beta, self.n)
        return self.jet.derivative(alpha + beta)

    def entry_indices(self, x_indices: Sequence[int] = (), y_indices: Sequence[int] = ()) -> float:
        """Same as entry() with the derivative written as variable index lists, e.g. y_indices=[0, 0, 1]"""
        return self.entry(_from_indices(x_indices, self.n), _from_indices(y_indices, self.n))

    def items(self) -> Iterator[Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], float]]:
        space = self.jet.space
        for row, exponent in enumerate(space.exponents):
            exponent = tuple(int(e) for e in exponent)
            scale = math.prod(math.factorial(e) for e in exponent)
            yield (exponent[: self.n], exponent[self.n :]), float(self.jet.coeffs[row]) * scale

    @property
    def coeffs(self) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], float]:
        return dict(self.items())

    def __len__(self) -> int:
        return self.jet.space.size


def eval_jet(
    kernel,
    point: FiberPoint,
    orders: Tuple[int, int, int] = DEFAULT_ORDERS,
    capability: Tuple[int, int, int] = DEFAULT_CAPABILITY,
) -> JetTable:
    """
    Mixed partial derivatives of a kernel at a fibre point.

    Args:
        kernel: MetricKernel or any scalar kernel with ``evaluate(xs, ys)``
        point: the fibre point (x, y)
        orders: (max x order, max y order, max total order)
        capability: the largest orders the caller allows

    Raises:
        DomainError: point outside the kernel domain
        CapabilityError: orders above the capability
    """
    if any(o > c for o, c in zip(orders, capability)) or min(orders) < 0:
        raise CapabilityError(f"jet orders {tuple(orders)} exceed the capability {tuple(capability)}")
    _check_domain(kernel, point)
    jet = kernel_jet(kernel, point, tuple(orders))
    space = jet.space
    return JetTable(point, space.max_x, space.max_y, space.max_total, jet)


def _stencil_estimate(kernel, point: FiberPoint, alpha, beta, h: float) -> float:
    n = point.n
    orders = list(alpha) + list(beta)
    active = [(v, _STENCILS[k]) for v, k in enumerate(orders) if k]
    base = np.concatenate([point.x, point.y])
    total = 0.0
    for combo in itertools.product(*(zip(*stencil) for _, stencil in active)):
        shifted = base.copy()
        weight = 1.0
        for (v, _), (offset, w) in zip(active, combo):
            shifted[v] += offset * h
            weight *= w
        total += weight * kernel(shifted[:n], shifted[n:])
    return total / h ** sum(orders)


def fd_derivative_with_error(
    kernel,
    point: FiberPoint,
    alpha: Sequence[int],
    beta: Sequence[int],
    step: Optional[float] = None,
) -> Tuple[float, float]:
    """
    Central finite-difference estimate of a mixed partial with one Richardson level.

    The estimate D(h) has error O(h^2); R = (4 D(h/2) - D(h)) / 3 removes the
    leading term. The returned error estimate is |R - D(h/2)|, which bounds
    the error of R up to the (smaller) O(h^4) remainder and round-off.

    Returns:
        (value, error_estimate)

    Raises:
        CapabilityError: more than four derivatives requested
        DomainError: a stencil point leaves the kernel domain
    """
    alpha = _as_exponent(alpha, point.n)
    beta = _as_exponent(beta, point.n)
    order = sum(alpha) + sum(beta)
    if order > FD_MAX_ORDER:
        raise CapabilityError(f"finite-difference oracle supports at most {FD_MAX_ORDER} derivatives, got {order}")
    if step is None:
        step = 1e-3 * (1.0 + point.norm())
    if not step > 0:
        raise ParamError(f"finite-difference step must be positive, got {step}")
    reach = 2 * step * math.sqrt(sum(alpha))  # stencil radius in x
    domain = getattr(kernel, "domain", None)
    if domain is not None and (not domain.contains(point.x) or domain.distance_to_boundary(point.x) <= reach):
        raise DomainError(f"finite-difference stencil around x = {point.x.tolist()} leaves {domain.describe()}")

    coarse = _stencil_estimate(kernel, point, alpha, beta, step)
    fine = _stencil_estimate(kernel, point, alpha, beta, step / 2)
    value = (4.0 * fine - coarse) / 3.0
    return value, abs(value - fine)


def fd_derivative(kernel, point: FiberPoint, alpha, beta, step: Optional[float] = None) -> float:
    """Finite-difference oracle value; see fd_derivative_with_error"""
    return fd_derivative_with_error(kernel, point, alpha, beta, step)[0]


def check_homogeneity(kernel, point: FiberPoint, degree: float = 1.0, scale: float = 2.0) -> float:
    """Relative residual |K(x, s y) - s^d K(x, y)| / |K(x, y)|"""
    if not scale > 0:
        raise ParamError(f"homogeneity scale must be positive, got {scale}")
    base = kernel(point.x, point.y)
    scaled = kernel(point.x, scale * point.y)
    return abs(scaled - scale ** degree * base) / abs(base)

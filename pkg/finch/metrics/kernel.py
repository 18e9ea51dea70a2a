"""
Metric kernels, volume densities and their domains
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ArityError, DomainError, ParamError

logger = logging.getLogger(__name__)

DOMAIN_KINDS = ("ball", "all")


@dataclass(frozen=True)
class Domain:
    """Base region of a kernel: an open centred ball or the whole space"""

    kind: str = "all"
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ParamError(f"unknown domain type {self.kind!r}; use one of {', '.join(DOMAIN_KINDS)}")
        if not self.radius > 0:
            raise ParamError(f"domain radius must be positive, got {self.radius}")

    @classmethod
    def ball(cls, radius: float = 1.0) -> "Domain":
        return cls("ball", float(radius))

    @classmethod
    def everywhere(cls) -> "Domain":
        return cls("all")

    @property
    def bounded(self) -> bool:
        return self.kind == "ball"

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            return False
        return self.kind == "all" or float(np.linalg.norm(x)) < self.radius

    def distance_to_boundary(self, x) -> float:
        if self.kind == "all":
            return float("inf")
        return self.radius - float(np.linalg.norm(x))

    @property
    def sample_half_width(self) -> float:
        return 0.6 * (self.radius if self.bounded else 1.0)

    def describe(self) -> str:
        if self.kind == "all":
            return "x in R^n"
        return f"|x| < {self.radius!r}"

    def to_dict(self) -> dict:
        return {"type": self.kind, "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "Domain":
        if not isinstance(data, dict):
            raise ParamError(f"domain must be an object, got {data!r}")
        unknown = set(data) - {"type", "radius"}
        if unknown:
            raise ParamError(f"unknown domain keys: {', '.join(sorted(unknown))}")
        try:
            radius = float(data.get("radius", 1.0))
        except (TypeError, ValueError):
            raise ParamError(f"domain radius must be a number, got {data.get('radius')!r}")
        return cls(data.get("type", "all"), radius)


def _check_length(values, dim: int, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float).reshape(-1)
    if len(values) != dim:
        raise ArityError(f"{what} has {len(values)} components, the kernel has dimension {dim}")
    return values


@dataclass(frozen=True)
class MetricKernel:
    """
    A Finsler function F(x, y) given by an evaluator over floats or jets.

    The evaluator takes the coordinate lists ``xs`` and ``ys`` and must use
    only arithmetic and the dispatching functions of ``finch.jets.jet`` so
    that the same code produces values and derivative tables.
    """

    dim: int
    evaluator: Callable
    domain: Domain
    label: str
    expression: Optional[str] = None

    def __call__(self, x, y) -> float:
        x = _check_length(x, self.dim, "x")
        y = _check_length(y, self.dim, "y")
        if not self.domain.contains(x):
            raise DomainError(f"x = {x.tolist()} is outside the domain {self.domain.describe()}")
        return float(self.evaluator(list(x), list(y)))

    def evaluate(self, xs: Sequence, ys: Sequence):
        """Evaluate on floats or jets, without the domain check"""
        return self.evaluator(xs, ys)

    def scaled(self, factor: float) -> "MetricKernel":
        """The kernel factor * F"""
        factor = float(factor)
        if not factor > 0:
            raise ParamError(f"scale factor must be positive, got {factor}")
        base = self.evaluator
        expression = f"({factor!r}) * ({self.expression})" if self.expression else None
        return MetricKernel(self.dim, lambda xs, ys: base(xs, ys) * factor, self.domain,
                            f"{factor!r}*{self.label}", expression)

    def squared(self) -> "MetricKernel":
        """The (2-homogeneous) kernel F^2"""
        base = self.evaluator

        def evaluator(xs, ys):
            value = base(xs, ys)
            return value * value

        expression = f"({self.expression})^2" if self.expression else None
        return MetricKernel(self.dim, evaluator, self.domain, f"({self.label})^2", expression)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "label": self.label,
            "domain": self.domain.to_dict(),
            "expression": self.expression,
        }


def squared(kernel: MetricKernel) -> MetricKernel:
    return kernel.squared()


@dataclass(frozen=True)
class VolumeDensity:
    """A positive density sigma(x) on the base"""

    dim: int
    evaluator: Callable
    label: str = "1"

    @classmethod
    def unit(cls, dim: int) -> "VolumeDensity":
        return cls(dim, lambda xs: 1.0, "1")

    @property
    def is_unit(self) -> bool:
        return self.label == "1"

    def __call__(self, x) -> float:
        x = _check_length(x, self.dim, "x")
        value = float(self.evaluator(list(x)))
        if not value > 0:
            raise DomainError(f"volume density {self.label} is not positive at x = {x.tolist()}")
        return value

    def evaluate(self, xs: Sequence):
        return self.evaluator(xs)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "label": self.label}

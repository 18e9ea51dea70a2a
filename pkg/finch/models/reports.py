"""
Geodesic trajectories, drift statistics and theorem verdicts
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..errors import ParamError
from .geometry import FiberPoint, _plain


class TrajectoryStatus(str, Enum):
    """How an integration ended"""
    COMPLETED = "completed"
    DOMAIN_EXIT = "domain_exit"     # stopped within 1e-3 of the domain boundary
    STEP_FAILURE = "step_failure"


class Verdict(str, Enum):
    HYPOTHESES_FAIL = "hypotheses_fail"
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class FixedRK4:
    """Classical fourth order Runge-Kutta with a fixed step"""

    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ParamError(f"rk4 step must be positive, got {self.dt}")

    def describe(self) -> str:
        return f"rk4:{self.dt!r}"


@dataclass(frozen=True)
class Adaptive:
    """Embedded 4(5) pair with error control"""

    rtol: float = 1e-10
    atol: float = 1e-12

    def describe(self) -> str:
        return f"adaptive:{self.rtol!r}:{self.atol!r}"


Controller = Union[FixedRK4, Adaptive]


def parse_controller(text: str) -> Controller:
    """Parse ``rk4:<dt>`` or ``adaptive[:<rtol>[:<atol>]]``"""
    name, *values = text.strip().split(":")
    try:
        numbers = [float(v) for v in values]
    except ValueError:
        raise ParamError(f"invalid controller {text!r}")
    if name == "rk4" and len(numbers) == 1:
        return FixedRK4(numbers[0])
    if name == "adaptive" and len(numbers) <= 2:
        return Adaptive(*numbers)
    raise ParamError(f"invalid controller {text!r}; use rk4:<dt> or adaptive[:<rtol>[:<atol>]]")


@dataclass
class Trajectory:
    """Time-stamped geodesic samples with the first-integral values tracked along them"""

    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    status: TrajectoryStatus = TrajectoryStatus.COMPLETED
    tracked: Dict[str, np.ndarray] = field(default_factory=dict)
    steps: int = 0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def state(self, index: int) -> FiberPoint:
        return FiberPoint(self.xs[index], self.ys[index])

    def to_dict(self) -> dict:
        return {
            "times": _plain(self.times),
            "xs": _plain(self.xs),
            "ys": _plain(self.ys),
            "status": self.status.value,
            "tracked": {name: _plain(values) for name, values in self.tracked.items()},
            "steps": self.steps,
        }


@dataclass
class QuantityDrift:
    """Drift of one tracked quantity: max |v(t) - v(0)| / max(1, |v(0)|)"""

    name: str
    initial: float
    max_drift: float
    at_time: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial,
            "max_drift": self.max_drift,
            "at_time": self.at_time,
        }


@dataclass
class DriftReport:
    quantities: Dict[str, QuantityDrift] = field(default_factory=dict)

    def __getitem__(self, name: str) -> QuantityDrift:
        return self.quantities[name]

    def __contains__(self, name: str) -> bool:
        return name in self.quantities

    @property
    def max_drift(self) -> float:
        return max((q.max_drift for q in self.quantities.values()), default=0.0)

    def merge(self, other: "DriftReport") -> "DriftReport":
        """Keep, per quantity, the worse of two reports"""
        merged = dict(self.quantities)
        for name, drift in other.quantities.items():
            if name not in merged or drift.max_drift > merged[name].max_drift:
                merged[name] = drift
        return DriftReport(merged)

    def summary(self) -> str:
        parts = [f"{q.name}: drift {q.max_drift:.3e} at t={q.at_time:.6g}" for q in self.quantities.values()]
        return "drift " + ("; ".join(parts) if parts else "(nothing tracked)")

    def to_dict(self) -> dict:
        return {name: drift.to_dict() for name, drift in self.quantities.items()}


@dataclass(frozen=True)
class Tolerances:
    """Verdict tolerances and integration settings"""

    chi: float = 1e-6          # scaled by 1 + |y|^2
    rank: float = 1e-8         # relative singular value threshold
    drift: float = 1e-6
    scalar: float = 1e-5       # scalar mean Berwald decomposition residual
    t_end: float = 3.0
    rtol: float = 1e-10
    atol: float = 1e-12
    max_states: int = 40       # states per trajectory at which integrals are evaluated

    def to_dict(self) -> dict:
        return {
            "chi": self.chi,
            "rank": self.rank,
            "drift": self.drift,
            "scalar": self.scalar,
            "t_end": self.t_end,
            "rtol": self.rtol,
            "atol": self.atol,
            "max_states": self.max_states,
        }


@dataclass
class HypothesisResults:
    chi_max_norm: float
    rank_E_modal: int
    rank_E_range: Tuple[int, int]
    scalar_residual: Optional[float] = None
    fiber_gradient_max: Optional[float] = None
    spatial_spread: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "chi_max_norm": self.chi_max_norm,
            "rank_E_modal": self.rank_E_modal,
            "rank_E_range": list(self.rank_E_range),
            "scalar_residual": self.scalar_residual,
            "fiber_gradient_max": self.fiber_gradient_max,
            "spatial_spread": self.spatial_spread,
        }


@dataclass
class TheoremVerdict:
    """Outcome of checking one theorem on a sampled region"""

    theorem: int
    metric: str
    hypothesis_results: HypothesisResults
    integral_drift: DriftReport
    verdict: Verdict
    samples: int
    seed: int
    region: Dict[str, float] = field(default_factory=dict)
    integral_range: Optional[Tuple[float, float]] = None
    f_constant: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "metric": self.metric,
            "verdict": self.verdict.value,
            "seed": self.seed,
            "samples": self.samples,
            "region": dict(self.region),
            "hypotheses": self.hypothesis_results.to_dict(),
            "integral_range": list(self.integral_range) if self.integral_range else None,
            "f_constant": self.f_constant,
            "drift": self.integral_drift.to_dict(),
            "notes": list(self.notes),
        }

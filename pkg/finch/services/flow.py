"""
Geodesic flow and first-integral drift

Geodesics are integrated in the first order form x' = y, y' = -2 G(x, y),
either with a fixed-step classical Runge-Kutta scheme or with the
Dormand-Prince 4(5) pair of scipy under error control.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import RK45

from ..errors import DomainError, ParamError, StepFailure
from ..metrics.kernel import MetricKernel, VolumeDensity
from ..metrics.validation import sample_fiber_points
from ..models.geometry import FiberPoint
from ..models.reports import (
    Adaptive,
    Controller,
    DriftReport,
    FixedRK4,
    QuantityDrift,
    Trajectory,
    TrajectoryStatus,
)
from .curvature import PointGeometry, spray_coefficients
from .integrals import _fit_scalar_mean_berwald, _lambda, painleve_I0

logger = logging.getLogger(__name__)

BOUNDARY_MARGIN = 1e-3
TRACKABLE = ("F", "lambda", "I0", "f")


def _rhs(kernel: MetricKernel):
    n = kernel.dim

    def rhs(t, state):
        x, y = state[:n], state[n:]
        return np.concatenate([y, -2.0 * spray_coefficients(kernel, x, y)])

    return rhs


def _near_boundary(kernel: MetricKernel, x) -> bool:
    return kernel.domain.distance_to_boundary(x) < BOUNDARY_MARGIN


def _trajectory(times: List[float], states: List[np.ndarray], n: int, status: TrajectoryStatus,
                steps: int) -> Trajectory:
    states = np.array(states)
    return Trajectory(np.array(times), states[:, :n].copy(), states[:, n:].copy(), status, steps=steps)


def _integrate_rk4(kernel: MetricKernel, state: np.ndarray, t_end: float, dt: float):
    rhs = _rhs(kernel)
    n = kernel.dim
    steps = max(1, math.ceil(abs(t_end) / dt - 1e-9))
    h = t_end / steps
    times, states = [0.0], [state]
    for k in range(steps):
        t = times[-1]
        try:
            k1 = rhs(t, state)
            k2 = rhs(t + h / 2, state + h / 2 * k1)
            k3 = rhs(t + h / 2, state + h / 2 * k2)
            k4 = rhs(t + h, state + h * k3)
        except DomainError as e:
            logger.warning("rk4 stage left the domain at t=%.6g: %s", t, e)
            return times, states, TrajectoryStatus.DOMAIN_EXIT, k
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not kernel.domain.contains(state[:n]):
            return times, states, TrajectoryStatus.DOMAIN_EXIT, k + 1
        times.append((k + 1) * h)
        states.append(state)
        if _near_boundary(kernel, state[:n]):
            return times, states, TrajectoryStatus.DOMAIN_EXIT, k + 1
    return times, states, TrajectoryStatus.COMPLETED, steps


def _integrate_adaptive(kernel: MetricKernel, state: np.ndarray, t_end: float, controller: Adaptive):
    n = kernel.dim
    solver = RK45(_rhs(kernel), 0.0, state, t_end, rtol=controller.rtol, atol=controller.atol)
    times, states = [0.0], [state]
    steps = 0
    while solver.status == "running":
        try:
            message = solver.step()
        except DomainError as e:
            logger.warning("adaptive stage left the domain at t=%.6g: %s", times[-1], e)
            return times, states, TrajectoryStatus.DOMAIN_EXIT, steps
        if solver.status == "failed":
            partial = _trajectory(times, states, n, TrajectoryStatus.STEP_FAILURE, steps)
            raise StepFailure(f"adaptive integration failed at t={solver.t:.6g}: {message}", partial)
        steps += 1
        x = solver.y[:n]
        if not kernel.domain.contains(x):
            return times, states, TrajectoryStatus.DOMAIN_EXIT, steps
        times.append(float(solver.t))
        states.append(solver.y.copy())
        if _near_boundary(kernel, x):
            return times, states, TrajectoryStatus.DOMAIN_EXIT, steps
    return times, states, TrajectoryStatus.COMPLETED, steps


def integrate_geodesic(
    kernel: MetricKernel,
    x0: Sequence[float],
    y0: Sequence[float],
    t_end: float,
    controller: Optional[Controller] = None,
) -> Trajectory:
    """
    Integrate the geodesic through (x0, y0) up to time t_end.

    A negative t_end integrates backwards; times are then decreasing. The
    run stops early with status ``domain_exit`` once x comes within 1e-3
    of the domain boundary.

    Raises:
        DomainError: the start is outside the domain or y0 = 0
        StepFailure: the adaptive controller gave up; ``partial`` holds the
            trajectory integrated so far
    """
    controller = controller or Adaptive()
    start = FiberPoint(x0, y0)
    if start.n != kernel.dim:
        raise ParamError(f"start point has dimension {start.n}, the kernel {kernel.dim}")
    if not kernel.domain.contains(start.x):
        raise DomainError(f"x0 = {start.x.tolist()} is outside the domain {kernel.domain.describe()}")
    if t_end == 0:
        raise ParamError("t_end must be non-zero")
    state = np.concatenate([start.x, start.y])

    if isinstance(controller, FixedRK4):
        times, states, status, steps = _integrate_rk4(kernel, state, t_end, controller.dt)
    else:
        times, states, status, steps = _integrate_adaptive(kernel, state, t_end, controller)

    if status is TrajectoryStatus.DOMAIN_EXIT:
        logger.warning("%s geodesic stopped near the domain boundary at t=%.6g", kernel.label, times[-1])
    logger.debug("%s geodesic: %d steps with %s, status %s", kernel.label, steps, controller.describe(), status.value)
    return _trajectory(times, states, kernel.dim, status, steps)


def _tracked_indices(length: int, max_states: Optional[int]) -> np.ndarray:
    if not max_states or length <= max_states:
        return np.arange(length)
    return np.unique(np.linspace(0, length - 1, max(max_states, 2)).round().astype(int))


def _state_values(kernel: MetricKernel, point: FiberPoint, which: Sequence[str],
                  aux_kernel: Optional[MetricKernel], volume: Optional[VolumeDensity]) -> Dict[str, float]:
    values = {}
    if "lambda" in which or "f" in which:
        geometry = PointGeometry(kernel, point, volume, "berwald")
        if "lambda" in which:
            values["lambda"] = _lambda(geometry)
        if "f" in which:
            values["f"] = _fit_scalar_mean_berwald(geometry).f
        if "F" in which:
            values["F"] = geometry.F.value
    elif "F" in which:
        values["F"] = kernel(point.x, point.y)
    if "I0" in which:
        values["I0"] = painleve_I0(kernel, aux_kernel, point)
    return values


def track_first_integrals(
    kernel: MetricKernel,
    traj: Trajectory,
    which: Iterable[str],
    aux_kernel: Optional[MetricKernel] = None,
    volume: Optional[VolumeDensity] = None,
    max_states: Optional[int] = None,
) -> DriftReport:
    """
    Evaluate first-integral candidates along a trajectory and report their drift.

    The value sequences are stored on ``traj.tracked`` (NaN at states that
    were skipped when ``max_states`` thins the evaluation).

    Raises:
        ParamError: unknown quantity, or I0 without an auxiliary metric
        SingularMetricError: propagated from the evaluations
    """
    which = list(dict.fromkeys(which))
    unknown = [name for name in which if name not in TRACKABLE]
    if unknown:
        raise ParamError(f"cannot track {', '.join(unknown)}; choose from {', '.join(TRACKABLE)}")
    if "I0" in which and aux_kernel is None:
        raise ParamError("tracking I0 needs an auxiliary metric")

    indices = _tracked_indices(len(traj), max_states)
    series = {name: np.full(len(traj), np.nan) for name in which}
    for index in indices:
        values = _state_values(kernel, traj.state(index), which, aux_kernel, volume)
        for name, value in values.items():
            series[name][index] = value

    report = DriftReport()
    for name in which:
        traj.tracked[name] = series[name]
        evaluated = series[name][indices]
        initial = float(evaluated[0])
        drift = np.abs(evaluated - initial) / max(1.0, abs(initial))
        worst = int(np.argmax(drift))
        report.quantities[name] = QuantityDrift(
            name=name,
            initial=initial,
            max_drift=float(drift[worst]),
            at_time=float(traj.times[indices[worst]]),
        )
    logger.debug("tracked %s at %d of %d states: %s", ",".join(which), len(indices), len(traj), report.summary())
    return report


def sample_initial_conditions(kernel: MetricKernel, count: int, rng: np.random.Generator) -> List[FiberPoint]:
    """Starting points from the validation box, normalised to F(x0, y0) = 1"""
    return sample_fiber_points(kernel, count, rng, normalize=True)

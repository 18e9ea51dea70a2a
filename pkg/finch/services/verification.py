"""
Theorem verification

Both checks sample a region of the tangent bundle, test the curvature
hypotheses pointwise and, when they hold, follow the candidate first
integral along integrated geodesics. Hypothesis failures, drift failures and
skipped points are all encoded in the returned verdict; nothing is raised
for a metric that simply does not satisfy a theorem.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import DomainError, ParamError, SingularMetricError, StepFailure
from ..metrics.kernel import MetricKernel, VolumeDensity
from ..metrics.validation import Y_COMPONENT_BOUND, Y_MIN_NORM, sample_fiber_points
from ..models.geometry import FiberPoint
from ..models.reports import (
    Adaptive,
    DriftReport,
    HypothesisResults,
    TheoremVerdict,
    Tolerances,
    TrajectoryStatus,
    Verdict,
)
from .curvature import PointGeometry, rank_E
from .flow import integrate_geodesic, sample_initial_conditions, track_first_integrals
from .integrals import _fit_scalar_mean_berwald, _lambda

logger = logging.getLogger(__name__)

# Points at which the fibre gradient of f is estimated by central differences
FIBRE_SAMPLES = 20
FIBRE_STEP = 1e-4


@dataclass
class _Sample:
    point: FiberPoint
    chi: float
    rank: int
    lambda_: float
    f: float
    residual: float


def _sample(geometry: PointGeometry, tolerances: Tolerances) -> _Sample:
    y = geometry.point.y
    fit = _fit_scalar_mean_berwald(geometry)
    return _Sample(
        point=geometry.point,
        chi=float(np.linalg.norm(geometry.chi)) / (1.0 + float(y @ y)),
        rank=rank_E(geometry.E, tolerances.rank),
        lambda_=_lambda(geometry),
        f=fit.f,
        residual=fit.residual,
    )


def _survey(kernel: MetricKernel, volume: Optional[VolumeDensity], points: List[FiberPoint],
            tolerances: Tolerances, notes: List[str]) -> List[_Sample]:
    samples = []
    skipped = 0
    for point in points:
        try:
            samples.append(_sample(PointGeometry(kernel, point, volume, "full"), tolerances))
        except (SingularMetricError, DomainError) as e:
            skipped += 1
            logger.debug("skipping sample %s: %s", point.to_dict(), e)
    if skipped:
        logger.warning("%d of %d sample points skipped", skipped, len(points))
        notes.append(f"{skipped} of {len(points)} sample points skipped (singular metric or outside the domain)")
    return samples


def _region(kernel: MetricKernel) -> dict:
    return {
        "x_half_width": kernel.domain.sample_half_width,
        "y_component_bound": Y_COMPONENT_BOUND,
        "y_min_norm": Y_MIN_NORM,
    }


def _hypotheses(samples: List[_Sample]) -> HypothesisResults:
    ranks = Counter(sample.rank for sample in samples)
    return HypothesisResults(
        chi_max_norm=max((s.chi for s in samples), default=0.0),
        rank_E_modal=ranks.most_common(1)[0][0] if ranks else 0,
        rank_E_range=(min(ranks), max(ranks)) if ranks else (0, 0),
    )


def _follow(kernel: MetricKernel, volume: Optional[VolumeDensity], which: List[str], trajectory_count: int,
            rng: np.random.Generator, tolerances: Tolerances, notes: List[str]) -> DriftReport:
    controller = Adaptive(tolerances.rtol, tolerances.atol)
    report = DriftReport()
    for start in sample_initial_conditions(kernel, trajectory_count, rng):
        try:
            traj = integrate_geodesic(kernel, start.x, start.y, tolerances.t_end, controller)
        except StepFailure as e:
            notes.append(f"integration from {start.to_dict()} failed: {e}")
            traj = e.partial
            if traj is None or len(traj) < 2:
                continue
        if traj.status is not TrajectoryStatus.COMPLETED:
            notes.append(f"geodesic from x0={start.x.tolist()} ended at t={traj.times[-1]:.6g} ({traj.status.value})")
        try:
            tracked = track_first_integrals(kernel, traj, which, volume=volume, max_states=tolerances.max_states)
        except (SingularMetricError, DomainError) as e:
            logger.warning("dropping geodesic from x0=%s: %s", start.x.tolist(), e)
            notes.append(f"geodesic from x0={start.x.tolist()} dropped: {e}")
            continue
        report = report.merge(tracked)
    return report


def _check_counts(sample_count: int, trajectory_count: int):
    if sample_count < 1:
        raise ParamError(f"sample_count must be at least 1, got {sample_count}")
    if trajectory_count < 0:
        raise ParamError(f"trajectory_count must be non-negative, got {trajectory_count}")


def verify_theorem1(
    kernel: MetricKernel,
    volume: Optional[VolumeDensity] = None,
    sample_count: int = 100,
    trajectory_count: int = 10,
    seed: int = 42,
    tolerances: Optional[Tolerances] = None,
) -> TheoremVerdict:
    """
    chi = 0 and rank E = n - 1 imply that lambda is a first integral.

    The hypotheses are checked at ``sample_count`` seeded points; the drift
    of lambda is then measured along ``trajectory_count`` geodesics. The
    verdict holds for the sampled region only.
    """
    _check_counts(sample_count, trajectory_count)
    tolerances = tolerances or Tolerances()
    rng = np.random.default_rng(seed)
    n = kernel.dim
    notes = []

    samples = _survey(kernel, volume, sample_fiber_points(kernel, sample_count, rng), tolerances, notes)
    hypotheses = _hypotheses(samples)
    lambdas = [s.lambda_ for s in samples]
    verdict = TheoremVerdict(
        theorem=1,
        metric=kernel.label,
        hypothesis_results=hypotheses,
        integral_drift=DriftReport(),
        verdict=Verdict.HYPOTHESES_FAIL,
        samples=len(samples),
        seed=seed,
        region=_region(kernel),
        integral_range=(min(lambdas), max(lambdas)) if lambdas else None,
        notes=notes,
    )
    logger.debug("theorem 1 on %s: chi max %.3e, rank E %s", kernel.label, hypotheses.chi_max_norm,
                 hypotheses.rank_E_range)

    if not samples:
        notes.append("no usable sample points")
        return verdict
    failed = False
    if hypotheses.chi_max_norm > tolerances.chi:
        notes.append(f"chi does not vanish: max |chi| / (1 + |y|^2) = {hypotheses.chi_max_norm:.3e}")
        failed = True
    if hypotheses.rank_E_range != (n - 1, n - 1):
        low, high = hypotheses.rank_E_range
        notes.append(f"rank E ranges over [{low}, {high}], expected {n - 1} everywhere")
        if high == 0:
            notes.append("E vanishes, so lambda is identically 0")
        failed = True
    if failed:
        return verdict

    verdict.integral_drift = _follow(kernel, volume, ["lambda", "F"], trajectory_count, rng, tolerances, notes)
    drift = verdict.integral_drift["lambda"].max_drift if "lambda" in verdict.integral_drift else 0.0
    verdict.verdict = Verdict.PASS if drift <= tolerances.drift else Verdict.FAIL
    return verdict


def _f_fibre_gradient(kernel: MetricKernel, volume: Optional[VolumeDensity], point: FiberPoint) -> float:
    """|y| |df/dy| by central differences of the fitted f"""
    y = point.y
    scale = float(np.linalg.norm(y))
    step = FIBRE_STEP * scale
    gradient = np.zeros(point.n)
    for i in range(point.n):
        shift = np.zeros(point.n)
        shift[i] = step
        values = [
            _fit_scalar_mean_berwald(PointGeometry(kernel, point.with_y(y + sign * shift), volume, "berwald")).f
            for sign in (1.0, -1.0)
        ]
        gradient[i] = (values[0] - values[1]) / (2.0 * step)
    return scale * float(np.linalg.norm(gradient))


def verify_theorem2(
    kernel: MetricKernel,
    volume: Optional[VolumeDensity] = None,
    sample_count: int = 100,
    trajectory_count: int = 10,
    seed: int = 42,
    tolerances: Optional[Tolerances] = None,
) -> TheoremVerdict:
    """
    For chi = 0 and scalar mean Berwald curvature 2E = f F_yy, f is a first
    integral, and for n > 2 it is constant along the fibres and on the region.
    """
    _check_counts(sample_count, trajectory_count)
    tolerances = tolerances or Tolerances()
    rng = np.random.default_rng(seed)
    n = kernel.dim
    notes = []

    samples = _survey(kernel, volume, sample_fiber_points(kernel, sample_count, rng), tolerances, notes)
    hypotheses = _hypotheses(samples)
    hypotheses.scalar_residual = max((s.residual for s in samples), default=0.0)
    fs = [s.f for s in samples]
    verdict = TheoremVerdict(
        theorem=2,
        metric=kernel.label,
        hypothesis_results=hypotheses,
        integral_drift=DriftReport(),
        verdict=Verdict.HYPOTHESES_FAIL,
        samples=len(samples),
        seed=seed,
        region=_region(kernel),
        integral_range=(min(fs), max(fs)) if fs else None,
        notes=notes,
    )

    if not samples:
        notes.append("no usable sample points")
        return verdict
    failed = False
    if hypotheses.chi_max_norm > tolerances.chi:
        notes.append(f"chi does not vanish: max |chi| / (1 + |y|^2) = {hypotheses.chi_max_norm:.3e}")
        failed = True
    if hypotheses.scalar_residual > tolerances.scalar:
        notes.append(f"mean Berwald curvature is not scalar: residual {hypotheses.scalar_residual:.3e}")
        failed = True
    if failed:
        return verdict
    if hypotheses.rank_E_range[1] == 0:
        notes.append("E vanishes: f = 0 with decomposition residual 0")

    verdict.integral_drift = _follow(kernel, volume, ["f", "F"], trajectory_count, rng, tolerances, notes)
    drift = verdict.integral_drift["f"].max_drift if "f" in verdict.integral_drift else 0.0
    passed = drift <= tolerances.drift

    if n > 2:
        gradients = [_f_fibre_gradient(kernel, volume, s.point) for s in samples[:FIBRE_SAMPLES]]
        hypotheses.fiber_gradient_max = max(gradients)
        hypotheses.spatial_spread = max(fs) - min(fs)
        verdict.f_constant = (
            hypotheses.fiber_gradient_max <= tolerances.drift and hypotheses.spatial_spread <= tolerances.drift
        )
        passed = passed and verdict.f_constant
        logger.debug("theorem 2 on %s: fibre gradient %.3e, spread %.3e", kernel.label,
                     hypotheses.fiber_gradient_max, hypotheses.spatial_spread)
    else:
        notes.append("n = 2: constancy of f is not asserted, only its conservation")

    verdict.verdict = Verdict.PASS if passed else Verdict.FAIL
    return verdict


def verdict_exit_code(verdict: TheoremVerdict) -> int:
    """0 on pass, 1 on fail, 4 when the hypotheses do not hold"""
    return {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.HYPOTHESES_FAIL: 4}[verdict.verdict]


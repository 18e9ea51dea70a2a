"""
Numerical check of the Finsler axioms over seeded sample points
"""
import logging
from collections import Counter
from typing import List

import numpy as np

from ..errors import FinchError, ParamError
from ..jets import check_homogeneity, kernel_jet
from ..models.geometry import FiberPoint, ValidationReport
from .kernel import MetricKernel

logger = logging.getLogger(__name__)

Y_COMPONENT_BOUND = 2.0
Y_MIN_NORM = 0.1
HOMOGENEITY_SCALE = 2.5
RANK_THRESHOLD = 1e-8
DEGENERACY_THRESHOLD = 1e-12
MAX_ATTEMPTS_PER_SAMPLE = 1000


def sample_fiber_points(kernel: MetricKernel, count: int, rng: np.random.Generator,
                        normalize: bool = False) -> List[FiberPoint]:
    """
    Draw fibre points from the validation box.

    x is uniform in the centred box of half-width 0.6 * radius (radius 1 for
    unbounded domains), kept only inside the domain; y has components in
    [-2, 2] and norm at least 0.1. With ``normalize`` y is rescaled to F = 1.
    """
    dim = kernel.dim
    width = kernel.domain.sample_half_width
    points = []
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_SAMPLE * max(count, 1):
            raise ParamError(f"could not sample {count} points inside {kernel.domain.describe()}")
        x = rng.uniform(-width, width, dim)
        if not kernel.domain.contains(x):
            continue
        y = rng.uniform(-Y_COMPONENT_BOUND, Y_COMPONENT_BOUND, dim)
        if np.linalg.norm(y) < Y_MIN_NORM:
            continue
        if normalize:
            value = kernel(x, y)
            if not value > 0:
                continue
            y = y / value
        points.append(FiberPoint(x, y))
    return points


def _metric_data(kernel: MetricKernel, point: FiberPoint):
    """F, g = 1/2 (F^2)_yy and F_yy at a point"""
    F = kernel_jet(kernel, point, (0, 2, 2))
    hessian = F.grad_y().grad_y().value
    g = 0.5 * (F * F).grad_y().grad_y().value
    return F.value, g, hessian


def _rank(matrix: np.ndarray, threshold: float = RANK_THRESHOLD) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.sum(singular > threshold * singular[0]))


def validate_metric(kernel: MetricKernel, sample_count: int = 100, seed: int = 42) -> ValidationReport:
    """
    Sample the kernel and report homogeneity, determinant statistics, the
    modal rank of the angular metric and positivity violations.

    Violations are reported, never raised.
    """
    if sample_count < 1:
        raise ParamError(f"sample_count must be at least 1, got {sample_count}")
    rng = np.random.default_rng(seed)
    points = sample_fiber_points(kernel, sample_count, rng)
    n = kernel.dim

    homogeneity = 0.0
    determinants = []
    ranks = Counter()
    violations = 0
    degenerate = False
    notes = []
    for point in points:
        try:
            F, g, hessian = _metric_data(kernel, point)
        except FinchError as e:
            violations += 1
            notes.append(f"evaluation failed at x = {point.x.tolist()}: {e}")
            continue
        if not np.isfinite(F) or F <= 0 or not np.all(np.isfinite(g)):
            violations += 1
            continue
        homogeneity = max(homogeneity, check_homogeneity(kernel, point, 1.0, HOMOGENEITY_SCALE))
        det = abs(float(np.linalg.det(g)))
        determinants.append(det)
        if det < DEGENERACY_THRESHOLD * np.linalg.norm(g) ** n:
            degenerate = True
        elif np.linalg.eigvalsh(0.5 * (g + g.T)).min() <= 0:
            violations += 1
        ranks[_rank(F * hessian)] += 1

    if violations:
        logger.warning("%s: %d of %d samples violate positivity", kernel.label, violations, len(points))
    if degenerate:
        notes.append("metric tensor is degenerate at some samples")

    return ValidationReport(
        dim=n,
        homogeneity_residual=homogeneity,
        min_abs_det_g=min(determinants, default=0.0),
        max_abs_det_g=max(determinants, default=0.0),
        angular_rank=ranks.most_common(1)[0][0] if ranks else 0,
        positivity_violations=violations,
        samples_used=len(points),
        degenerate=degenerate,
        notes=notes[:10],
    )

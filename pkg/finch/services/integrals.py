"""
First integrals and identity checks

lambda and the scalar mean Berwald factor f come from one metric; the
Painleve integral I0, the projective factor and the Rapcsak residual
compare a metric with an auxiliary one.
"""
import logging
from typing import Optional

import numpy as np
import scipy.linalg

from ..errors import DeterminantSignError, ParamError, SingularMetricError
from ..jets import contract
from ..metrics.kernel import MetricKernel, VolumeDensity
from ..models.geometry import (
    AlphaForm,
    BorderedResiduals,
    FiberPoint,
    IntegralValues,
    ProjectiveFactors,
    ScalarMeanBerwald,
)
from .curvature import PointGeometry

logger = logging.getLogger(__name__)

SCALAR_TOLERANCE = 1e-5
ZERO_E_TOLERANCE = 1e-9


def _point(p) -> FiberPoint:
    return p if isinstance(p, FiberPoint) else FiberPoint(*p)


def _same_dimension(kernel: MetricKernel, aux_kernel: MetricKernel):
    if kernel.dim != aux_kernel.dim:
        raise ParamError(f"paired metrics differ in dimension ({kernel.dim} vs {aux_kernel.dim})")


def bordered_determinant(M: np.ndarray, v: np.ndarray) -> float:
    """det [[M, v], [v^T, 0]] by pivoted LU"""
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float).reshape(-1)
    n = M.shape[0]
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = M
    bordered[:n, n] = v
    bordered[n, :n] = v
    P, L, U = scipy.linalg.lu(bordered)
    return float(round(np.linalg.det(P)) * np.prod(np.diag(U)))


# ── lambda and f ─────────────────────────────────────────────────────────────


def _lambda(geometry: PointGeometry) -> float:
    F = geometry.F.value
    return -bordered_determinant(2.0 * F * geometry.E, geometry.F_y.value) / geometry.det_g


def lambda_integral(kernel: MetricKernel, p: FiberPoint) -> float:
    """
    lambda = -det [[2 F E, F_y], [F_y^T, 0]] / det g.

    A first integral of the geodesic flow when chi vanishes and E has rank n - 1.
    """
    return _lambda(PointGeometry(kernel, _point(p), level="berwald"))


def _fit_scalar_mean_berwald(geometry: PointGeometry) -> ScalarMeanBerwald:
    twice_E = 2.0 * geometry.E
    H = geometry.F_yy.value
    norm_E = float(np.linalg.norm(twice_E))
    norm_H = float(np.linalg.norm(H))
    if norm_E <= ZERO_E_TOLERANCE * max(norm_H, 1.0):
        return ScalarMeanBerwald(f=0.0, residual=0.0)
    f = float(np.sum(twice_E * H) / np.sum(H * H))
    scale = max(norm_E, abs(f) * norm_H)
    return ScalarMeanBerwald(f=f, residual=float(np.linalg.norm(twice_E - f * H)) / scale)


def scalar_mean_berwald(kernel: MetricKernel, p: FiberPoint,
                        tol: float = SCALAR_TOLERANCE) -> Optional[ScalarMeanBerwald]:
    """
    Least-squares factor f with 2E = f F_yy = (f / F) h.

    Returns None when the relative residual of the fit exceeds ``tol``, i.e.
    the metric is not of scalar mean Berwald type at p.
    """
    fit = _fit_scalar_mean_berwald(PointGeometry(kernel, _point(p), level="berwald"))
    return fit if fit.residual <= tol else None


def _lambda_painleve(geometry: PointGeometry) -> float:
    S = geometry.S.value
    F = geometry.F.value
    if abs(S) < 1e-12 * F:
        raise SingularMetricError("S vanishes, so it cannot serve as a metric")
    S_y = geometry.S_y.value
    s = np.outer(S_y, S_y) + 2.0 * S * geometry.E
    return (F / S) ** (geometry.n + 1) * float(np.linalg.det(s)) / geometry.det_g


def lambda_painleve(kernel: MetricKernel, volume: Optional[VolumeDensity], p: FiberPoint) -> float:
    """
    lambda through the S-function viewed as a metric:
    (F / S)^(n+1) det s / det g with s_ij = S_i S_j + 2 S E_ij.
    """
    return _lambda_painleve(PointGeometry(kernel, _point(p), volume, "berwald"))


# ── pairs of metrics ─────────────────────────────────────────────────────────


def painleve_I0(kernel: MetricKernel, aux_kernel: MetricKernel, p: FiberPoint) -> float:
    """
    I0 = (F~ / F) (det g / det g~)^(1 / (n + 1)).

    Raises:
        SingularMetricError: either metric degenerate at p
        DeterminantSignError: det g and det g~ of opposite sign
    """
    _same_dimension(kernel, aux_kernel)
    p = _point(p)
    base = PointGeometry(kernel, p, level="metric")
    aux = PointGeometry(aux_kernel, p, level="metric")
    ratio = base.det_g / aux.det_g
    if ratio < 0:
        raise DeterminantSignError(f"det g = {base.det_g:.6g} and det g~ = {aux.det_g:.6g} differ in sign")
    return aux.F.value / base.F.value * ratio ** (1.0 / (p.n + 1))


def projective_factor(kernel: MetricKernel, aux_kernel: MetricKernel, p: FiberPoint) -> ProjectiveFactors:
    """
    Projective factor of (F, F~), computed three ways:
    trace (N~^i_i - N^i_i) / (n + 1), logarithmic G(F~) / (2 F~), and
    determinant G(ln(det g~ / det g)) / (2 (n + 1)), G the spray of F.
    """
    _same_dimension(kernel, aux_kernel)
    p = _point(p)
    base = PointGeometry(kernel, p, level="connection")
    aux = PointGeometry(aux_kernel, p, level="connection")
    n = p.n
    P_trace = (np.trace(aux.N.value) - np.trace(base.N.value)) / (n + 1)
    P_log = base.along_spray(aux.F).value / (2.0 * aux.F.value)
    P_det = base.along_spray(aux.log_det_g - base.log_det_g).value / (2.0 * (n + 1))
    return ProjectiveFactors(P_trace=float(P_trace), P_log=float(P_log), P_det=float(P_det))


def rapcsak_residual(kernel: MetricKernel, aux_kernel: MetricKernel, p: FiberPoint) -> np.ndarray:
    """
    Components G(dF~/dy^i) - dF~/dx^i with G the spray of F; zero exactly
    when the two metrics are projectively related.
    """
    _same_dimension(kernel, aux_kernel)
    p = _point(p)
    base = PointGeometry(kernel, p, level="spray")
    aux = PointGeometry(aux_kernel, p, level="spray")
    return (base.along_spray(aux.F_y) - aux.F.grad_x()).value


def bordered_det_checks(kernel: MetricKernel, aux_kernel: Optional[MetricKernel], p: FiberPoint) -> BorderedResiduals:
    """
    Relative residuals of det g = -F^(n-1) det [[F_yy, F_y], [F_y^T, 0]] and
    det g = -(F^(n+1) / F~^2) det [[F_yy, F~_y], [F~_y^T, 0]].
    """
    p = _point(p)
    aux_kernel = aux_kernel or kernel
    _same_dimension(kernel, aux_kernel)
    base = PointGeometry(kernel, p, level="metric")
    aux = PointGeometry(aux_kernel, p, level="metric")
    n = p.n
    F = base.F.value
    F_yy = base.F_yy.value
    det = base.det_g
    rund = -F ** (n - 1) * bordered_determinant(F_yy, base.F_y.value)
    F_aux = aux.F.value
    gg = -F ** (n + 1) / F_aux ** 2 * bordered_determinant(F_yy, aux.F_y.value)
    return BorderedResiduals(rund=abs(det - rund) / abs(det), gg=abs(det - gg) / abs(det))


# ── the alpha form ───────────────────────────────────────────────────────────


def _alpha_form(geometry: PointGeometry) -> AlphaForm:
    tau_y = geometry.tau.grad_y()
    horizontal = (geometry.S_y - geometry.horizontal(geometry.tau)).value
    nabla_I = (geometry.along_spray(tau_y) - _lower(tau_y, geometry)).value
    return AlphaForm(
        horizontal=horizontal,
        vertical=-tau_y.value,
        i_G_alpha=float(horizontal @ geometry.point.y),
        nabla_I=nabla_I,
    )


def _lower(I, geometry: PointGeometry):
    # I_m N^m_i
    return contract("m,mi->i", I, geometry.N)


def alpha_form(kernel: MetricKernel, volume: Optional[VolumeDensity], p: FiberPoint) -> AlphaForm:
    """
    alpha = d_J S - d tau in the adapted coframe: horizontal part
    dS/dy^i - delta tau / delta x^i, vertical part -I_i, and its contraction
    with the spray.
    """
    return _alpha_form(PointGeometry(kernel, _point(p), volume, "berwald"))


# ── bundle ───────────────────────────────────────────────────────────────────


def integral_values(
    kernel: MetricKernel,
    volume: Optional[VolumeDensity],
    p: FiberPoint,
    aux_kernel: Optional[MetricKernel] = None,
    tol: float = SCALAR_TOLERANCE,
) -> IntegralValues:
    """lambda, f and, with an auxiliary metric, I0, the projective factors and the Rapcsak residual"""
    p = _point(p)
    geometry = PointGeometry(kernel, p, volume, "berwald")
    fit = _fit_scalar_mean_berwald(geometry)
    values = IntegralValues(
        lambda_=_lambda(geometry),
        f=fit.f if fit.residual <= tol else None,
        f_residual=fit.residual,
    )
    if aux_kernel is not None:
        values.I0 = painleve_I0(kernel, aux_kernel, p)
        values.P = projective_factor(kernel, aux_kernel, p)
        values.rapcsak = rapcsak_residual(kernel, aux_kernel, p)
    return values

"""
Curvature service

Everything is computed from one jet of F per point: the metric tensor, the
spray, the nonlinear connection and the curvature tensors are jets derived
from it by exact arithmetic, and only their values at the base point are
reported. Each public operation picks the smallest jet orders that carry
the derivatives it needs.
"""
import logging
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from ..errors import CapabilityError, DomainError, SingularMetricError
from ..jets import DEFAULT_CAPABILITY, Jet, contract, get_space, inv, logabsdet
from ..jets import jet as jetmath
from ..metrics.kernel import MetricKernel, VolumeDensity
from ..models.geometry import CurvaturePack, FiberPoint, MetricJet, SprayData

logger = logging.getLogger(__name__)

# Jet orders (x, y, total) each level needs for its values at the base point
LEVELS = {
    "metric": (0, 3, 3),        # g, C, I, tau
    "spray": (1, 2, 2),         # G
    "connection": (1, 3, 3),    # N, first derivatives of ln det g
    "berwald": (1, 5, 5),       # B, E, S, E_alt, alpha, lambda
    "full": (2, 5, 5),          # R2, R3, chi, chi_alt
}

SINGULAR_THRESHOLD = 1e-12
RANK_ATOL = 1e-9


def _last_axis(tensor: Jet, vector) -> Jet:
    """Contract the trailing tensor axis of ``tensor`` with ``vector``"""
    axes = "abcdefgh"[: len(tensor.shape) - 1]
    return contract(f"{axes}k,k->{axes}", tensor, vector)


def check_singular(g: np.ndarray) -> float:
    """det g, or SingularMetricError when |det g| < 1e-12 * |g|^n"""
    det = float(np.linalg.det(g))
    scale = float(np.linalg.norm(g)) ** g.shape[0]
    if not np.isfinite(det) or abs(det) < SINGULAR_THRESHOLD * scale:
        raise SingularMetricError(f"metric tensor is singular (det g = {det:.3e}, |g|^n = {scale:.3e})")
    return det


class PointGeometry:
    """
    Jets of the geometric objects of one kernel at one fibre point.

    Attributes are computed on first use and kept for the lifetime of the
    object, so several quantities at the same point share the work.
    """

    def __init__(
        self,
        kernel: MetricKernel,
        point: FiberPoint,
        volume: Optional[VolumeDensity] = None,
        level: str = "full",
        capability: Tuple[int, int, int] = DEFAULT_CAPABILITY,
    ):
        if level not in LEVELS:
            raise CapabilityError(f"unknown geometry level {level!r}")
        orders = LEVELS[level]
        if any(o > c for o, c in zip(orders, capability)):
            raise CapabilityError(f"level {level} needs jet orders {orders}, capability is {tuple(capability)}")
        if point.n != kernel.dim:
            raise DomainError(f"point has dimension {point.n}, the kernel {kernel.dim}")
        if not kernel.domain.contains(point.x):
            raise DomainError(f"x = {point.x.tolist()} is outside the domain {kernel.domain.describe()}")
        self.kernel = kernel
        self.point = point
        self.volume = volume or VolumeDensity.unit(kernel.dim)
        self.level = level
        self.n = kernel.dim
        self.space = get_space(self.n, *orders)
        self.xs, self.ys = Jet.coordinates(self.space, point.x, point.y)

    # ── metric ───────────────────────────────────────────────────────────

    @cached_property
    def F(self) -> Jet:
        value = self.kernel.evaluate(list(self.xs), list(self.ys))
        if not isinstance(value, Jet):
            value = Jet.constant(self.space, value)
        if not value.value > 0:
            raise DomainError(f"F = {value.value!r} is not positive at {self.point.to_dict()}")
        return value

    @cached_property
    def F2(self) -> Jet:
        return self.F * self.F

    @cached_property
    def F2_y(self) -> Jet:
        return self.F2.grad_y()

    @cached_property
    def F_y(self) -> Jet:
        return self.F.grad_y()

    @cached_property
    def F_yy(self) -> Jet:
        return self.F_y.grad_y()

    @cached_property
    def g(self) -> Jet:
        return 0.5 * self.F2_y.grad_y()

    @cached_property
    def det_g(self) -> float:
        return check_singular(self.g.value)

    @cached_property
    def g_inv(self) -> Jet:
        self.det_g
        return inv(self.g)

    @cached_property
    def log_det_g(self) -> Jet:
        self.det_g
        return logabsdet(self.g)[1]

    @cached_property
    def tau(self) -> Jet:
        if self.volume.is_unit:
            return 0.5 * self.log_det_g
        sigma = self.volume.evaluate(list(self.xs))
        return 0.5 * (self.log_det_g - jetmath.log(sigma))

    # ── spray and connection ─────────────────────────────────────────────

    @cached_property
    def G(self) -> Jet:
        mixed = _last_axis(self.F2_y.grad_x(), self.ys)
        rhs = mixed - self.F2.grad_x()
        return 0.25 * contract("il,l->i", self.g_inv, rhs)

    @cached_property
    def N(self) -> Jet:
        return self.G.grad_y()

    def along_spray(self, jet: Jet) -> Jet:
        """The spray applied to a (tensor of) function(s): y^k d/dx^k - 2 G^k d/dy^k"""
        return _last_axis(jet.grad_x(), self.ys) - 2.0 * _last_axis(jet.grad_y(), self.G)

    def horizontal(self, jet: Jet) -> Jet:
        """delta/delta x^k = d/dx^k - N^m_k d/dy^m, as a new trailing axis"""
        axes = "abcdefgh"[: len(jet.shape)]
        return jet.grad_x() - contract(f"{axes}m,mk->{axes}k", jet.grad_y(), self.N)

    # ── curvature ────────────────────────────────────────────────────────

    @cached_property
    def B(self) -> Jet:
        return self.N.grad_y().grad_y()

    @cached_property
    def E(self) -> np.ndarray:
        return 0.5 * np.einsum("iijk->jk", self.B.value)

    @cached_property
    def R2(self) -> Jet:
        # R^i_jk = delta_k N^i_j - delta_j N^i_k
        D = self.horizontal(self.N)
        return D - D.transpose(0, 2, 1)

    @cached_property
    def R3(self) -> Jet:
        # R^i_jkl = d R^i_kl / dy^j
        return self.R2.grad_y().transpose(0, 3, 1, 2)

    @cached_property
    def chi(self) -> np.ndarray:
        # +1/2 so that chi equals 1/2 (G(S_y) - S_x), the S-function route
        return 0.5 * np.einsum("iijk,k->j", self.R3.value, self.point.y)

    @cached_property
    def S(self) -> Jet:
        return self.along_spray(self.tau)

    @cached_property
    def S_y(self) -> Jet:
        return self.S.grad_y()

    @cached_property
    def E_alt(self) -> np.ndarray:
        return 0.5 * self.S_y.grad_y().value

    @cached_property
    def chi_alt(self) -> np.ndarray:
        return 0.5 * (self.along_spray(self.S_y) - self.S.grad_x()).value

    # ── reports ──────────────────────────────────────────────────────────

    def metric_jet(self) -> MetricJet:
        g = self.g.value
        det = self.det_g
        g_inv = np.linalg.inv(g)
        C = 0.5 * self.g.grad_y().value
        F = self.F.value
        return MetricJet(
            F=F,
            F_y=self.F_y.value,
            g=g,
            g_inv=g_inv,
            det_g=det,
            h=F * self.F_yy.value,
            y_low=g @ self.point.y,
            C=C,
            I=np.einsum("ij,ijk->k", g_inv, C),
            tau=self.tau.value,
        )

    def spray_data(self) -> SprayData:
        return SprayData(G=self.G.value, N=self.N.value)

    def curvature_pack(self) -> CurvaturePack:
        return CurvaturePack(
            B=self.B.value,
            E=self.E,
            R2=self.R2.value,
            R3=self.R3.value,
            chi=self.chi,
            S=self.S.value,
            E_alt=self.E_alt,
            chi_alt=self.chi_alt,
        )


def _point(p) -> FiberPoint:
    return p if isinstance(p, FiberPoint) else FiberPoint(*p)


def metric_jet(kernel: MetricKernel, volume: Optional[VolumeDensity], p: FiberPoint) -> MetricJet:
    """
    Metric tensor, angular metric, Cartan torsion and distortion at p.

    Raises:
        DomainError: p outside the kernel domain
        SingularMetricError: |det g| < 1e-12 |g|^n
    """
    return PointGeometry(kernel, _point(p), volume, "metric").metric_jet()


def spray(kernel: MetricKernel, p: FiberPoint) -> SprayData:
    """Spray coefficients G^i and the nonlinear connection N^i_j = dG^i/dy^j at p"""
    return PointGeometry(kernel, _point(p), level="connection").spray_data()


def spray_coefficients(kernel: MetricKernel, x, y) -> np.ndarray:
    """G^i(x, y) alone; the right-hand side of the geodesic equation"""
    return PointGeometry(kernel, FiberPoint(x, y), level="spray").G.value


def spray_residual(kernel: MetricKernel, p: FiberPoint) -> np.ndarray:
    """Components G(dF^2/dy^i) - dF^2/dx^i, which vanish for the geodesic spray"""
    geometry = PointGeometry(kernel, _point(p), level="spray")
    return (geometry.along_spray(geometry.F2_y) - geometry.F2.grad_x()).value


def connection_trace_residual(kernel: MetricKernel, p: FiberPoint) -> float:
    """|N^i_i - 1/2 G(ln det g)|"""
    geometry = PointGeometry(kernel, _point(p), level="connection")
    trace = float(np.trace(geometry.N.value))
    return abs(trace - 0.5 * geometry.along_spray(geometry.log_det_g).value)


def curvature_pack(kernel: MetricKernel, volume: Optional[VolumeDensity], p: FiberPoint) -> CurvaturePack:
    """
    Berwald, mean Berwald, R- and chi-curvature and the S-function at p,
    with E and chi also computed through the S-function.
    """
    return PointGeometry(kernel, _point(p), volume, "full").curvature_pack()


def rank_E(E: np.ndarray, tol: float = 1e-8, atol: float = RANK_ATOL) -> int:
    """
    Number of singular values of E above tol times the largest one.

    E counts as zero (rank 0) when its largest singular value is at most atol.
    """
    singular = np.linalg.svd(np.asarray(E, dtype=float), compute_uv=False)
    if singular.size == 0 or singular[0] <= atol:
        return 0
    return int(np.sum(singular > tol * singular[0]))

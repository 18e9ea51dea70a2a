"""
Pointwise geometric data - the values finch computes at a point of T0M
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import DomainError


def _plain(value):
    """Arrays and numpy scalars as JSON-ready Python values"""
    if value is None:
        return None
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


@dataclass(frozen=True)
class FiberPoint:
    """A point (x, y) of the slit tangent bundle in canonical coordinates"""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise DomainError(f"base and fibre coordinates differ in length ({len(x)} vs {len(y)})")
        if len(x) < 2:
            raise DomainError(f"dimension must be at least 2, got {len(x)}")
        if not np.any(y):
            raise DomainError("y = 0 lies on the zero section, outside T0M")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.x)

    def with_y(self, y) -> "FiberPoint":
        return FiberPoint(self.x, y)

    def norm(self) -> float:
        return float(np.sqrt(self.x @ self.x + self.y @ self.y))

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FiberPoint":
        return cls(data["x"], data["y"])


@dataclass
class MetricJet:
    """Metric data at a point: g, its inverse, angular metric, Cartan torsion, distortion"""

    F: float
    F_y: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    det_g: float
    h: np.ndarray
    y_low: np.ndarray
    C: np.ndarray
    I: np.ndarray
    tau: float

    def to_dict(self) -> dict:
        return {
            "F": self.F,
            "F_y": _plain(self.F_y),
            "g": _plain(self.g),
            "g_inv": _plain(self.g_inv),
            "det_g": self.det_g,
            "h": _plain(self.h),
            "y_low": _plain(self.y_low),
            "C": _plain(self.C),
            "I": _plain(self.I),
            "tau": self.tau,
        }


@dataclass
class SprayData:
    """Geodesic spray coefficients G^i and the nonlinear connection N^i_j = dG^i/dy^j"""

    G: np.ndarray
    N: np.ndarray

    def to_dict(self) -> dict:
        return {"G": _plain(self.G), "N": _plain(self.N)}


@dataclass
class CurvaturePack:
    """Berwald, mean Berwald, R-curvature, chi-curvature and S-function at a point"""

    B: np.ndarray
    E: np.ndarray
    R2: np.ndarray
    R3: np.ndarray
    chi: np.ndarray
    S: float
    E_alt: np.ndarray
    chi_alt: np.ndarray

    def to_dict(self) -> dict:
        return {
            "B": _plain(self.B),
            "E": _plain(self.E),
            "E_alt": _plain(self.E_alt),
            "R2": _plain(self.R2),
            "R3": _plain(self.R3),
            "chi": _plain(self.chi),
            "chi_alt": _plain(self.chi_alt),
            "S": self.S,
        }


@dataclass
class ScalarMeanBerwald:
    """Least-squares factor f in 2E = (f/F) h and the relative residual of the fit"""

    f: float
    residual: float

    def to_dict(self) -> dict:
        return {"f": self.f, "residual": self.residual}


@dataclass
class ProjectiveFactors:
    """Projective factor P of a pair of metrics, computed along three routes"""

    P_trace: float
    P_log: float
    P_det: float

    @property
    def gap(self) -> float:
        return abs(self.P_trace - self.P_log)

    def to_dict(self) -> dict:
        return {"P_trace": self.P_trace, "P_log": self.P_log, "P_det": self.P_det}


@dataclass
class BorderedResiduals:
    """Relative residuals of the two bordered-determinant expressions of det g"""

    rund: float
    gg: float

    def to_dict(self) -> dict:
        return {"rund_residual": self.rund, "gg_residual": self.gg}


@dataclass
class IntegralValues:
    """First integrals and identity checks at one point"""

    lambda_: float
    I0: Optional[float] = None
    P: Optional[ProjectiveFactors] = None
    f: Optional[float] = None
    f_residual: Optional[float] = None
    rapcsak: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "I0": self.I0,
            "P": self.P.to_dict() if self.P else None,
            "f": self.f,
            "f_residual": self.f_residual,
            "rapcsak": _plain(self.rapcsak),
        }


@dataclass
class AlphaForm:
    """
    The 1-form alpha = d_J S - d tau split in the adapted coframe (dx^i, dy^i + N^i_j dx^j).

    nabla_I is the dynamical covariant derivative G(I_i) - I_m N^m_i, an
    independent evaluation of the horizontal part.
    """

    horizontal: np.ndarray
    vertical: np.ndarray
    i_G_alpha: float
    nabla_I: np.ndarray

    def to_dict(self) -> dict:
        return {
            "horizontal": _plain(self.horizontal),
            "vertical": _plain(self.vertical),
            "i_G_alpha": self.i_G_alpha,
            "nabla_I": _plain(self.nabla_I),
        }


@dataclass
class ValidationReport:
    """Numerical check of the Finsler axioms over sampled points"""

    dim: int
    homogeneity_residual: float
    min_abs_det_g: float
    max_abs_det_g: float
    angular_rank: int
    positivity_violations: int
    samples_used: int
    degenerate: bool
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.positivity_violations == 0
            and not self.degenerate
            and self.angular_rank == self.dim - 1
            and self.homogeneity_residual <= 1e-10
        )

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "homogeneity_residual": self.homogeneity_residual,
            "min_abs_det_g": self.min_abs_det_g,
            "max_abs_det_g": self.max_abs_det_g,
            "angular_rank": self.angular_rank,
            "positivity_violations": self.positivity_violations,
            "samples_used": self.samples_used,
            "degenerate": self.degenerate,
            "passed": self.passed,
            "notes": list(self.notes),
        }

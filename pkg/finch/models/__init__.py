"""Data models for finch"""
from .geometry import (
    AlphaForm,
    BorderedResiduals,
    CurvaturePack,
    FiberPoint,
    IntegralValues,
    MetricJet,
    ProjectiveFactors,
    ScalarMeanBerwald,
    SprayData,
    ValidationReport,
)
from .reports import (
    Adaptive,
    Controller,
    DriftReport,
    FixedRK4,
    HypothesisResults,
    QuantityDrift,
    TheoremVerdict,
    Tolerances,
    Trajectory,
    TrajectoryStatus,
    Verdict,
    parse_controller,
)

__all__ = [
    'AlphaForm', 'BorderedResiduals', 'CurvaturePack', 'FiberPoint', 'IntegralValues',
    'MetricJet', 'ProjectiveFactors', 'ScalarMeanBerwald', 'SprayData', 'ValidationReport',
    'Adaptive', 'Controller', 'DriftReport', 'FixedRK4', 'HypothesisResults', 'QuantityDrift',
    'TheoremVerdict', 'Tolerances', 'Trajectory', 'TrajectoryStatus', 'Verdict', 'parse_controller',
]

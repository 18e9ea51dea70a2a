"""
Services module for finch
"""
from .curvature import (
    PointGeometry,
    connection_trace_residual,
    curvature_pack,
    metric_jet,
    rank_E,
    spray,
    spray_coefficients,
    spray_residual,
)
from .flow import integrate_geodesic, sample_initial_conditions, track_first_integrals
from .integrals import (
    alpha_form,
    bordered_det_checks,
    bordered_determinant,
    integral_values,
    lambda_integral,
    lambda_painleve,
    painleve_I0,
    projective_factor,
    rapcsak_residual,
    scalar_mean_berwald,
)
from .verification import verdict_exit_code, verify_theorem1, verify_theorem2

__all__ = [
    'PointGeometry', 'connection_trace_residual', 'curvature_pack', 'metric_jet', 'rank_E', 'spray',
    'spray_coefficients', 'spray_residual',
    'integrate_geodesic', 'sample_initial_conditions', 'track_first_integrals',
    'alpha_form', 'bordered_det_checks', 'bordered_determinant', 'integral_values', 'lambda_integral',
    'lambda_painleve', 'painleve_I0', 'projective_factor', 'rapcsak_residual', 'scalar_mean_berwald',
    'verdict_exit_code', 'verify_theorem1', 'verify_theorem2',
]

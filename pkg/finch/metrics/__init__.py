"""Metric kernels: expression language, builtin families, validation and spec loading"""
from .builtins import BUILTIN_NAMES, builtin_metric
from .expression import format_expression, parse_expression
from .kernel import Domain, MetricKernel, VolumeDensity, squared
from .loader import MetricSpec, load_metric_spec, parse_metric_expression, parse_volume_expression
from .validation import sample_fiber_points, validate_metric

__all__ = [
    'BUILTIN_NAMES', 'builtin_metric', 'format_expression', 'parse_expression',
    'Domain', 'MetricKernel', 'VolumeDensity', 'squared',
    'MetricSpec', 'load_metric_spec', 'parse_metric_expression', 'parse_volume_expression',
    'sample_fiber_points', 'validate_metric',
]

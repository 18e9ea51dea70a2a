"""Truncated Taylor jets and derivative tables"""
from .jet import Jet, contract, inv, logabsdet, stack, trace
from .space import JetSpace, get_space
from .table import (
    DEFAULT_CAPABILITY,
    DEFAULT_ORDERS,
    JetTable,
    check_homogeneity,
    eval_jet,
    fd_derivative,
    fd_derivative_with_error,
    kernel_jet,
)

__all__ = [
    'Jet', 'JetSpace', 'JetTable', 'get_space', 'contract', 'inv', 'logabsdet', 'stack', 'trace',
    'DEFAULT_CAPABILITY', 'DEFAULT_ORDERS', 'check_homogeneity', 'eval_jet', 'fd_derivative',
    'fd_derivative_with_error', 'kernel_jet',
]

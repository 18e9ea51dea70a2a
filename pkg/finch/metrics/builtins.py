"""
Builtin metric families: euclidean, riemannian, randers, funk, klein
"""
import functools
import logging
import operator
from typing import Callable, Dict, List, Optional

import numpy as np

from ..errors import FinchError, ParamError
from ..jets import jet as jetmath
from .expression import Node, coefficient_node
from .kernel import Domain, MetricKernel

logger = logging.getLogger(__name__)

BUILTIN_NAMES = ("euclidean", "riemannian", "randers", "funk", "klein")

_ALLOWED_PARAMS = {
    "euclidean": set(),
    "riemannian": {"a"},
    "randers": {"a", "b"},
    "funk": set(),
    "klein": set(),
}

PARAM_CHECK_POINTS = 32


def _sum(terms):
    return functools.reduce(operator.add, terms)


def _dot(a, b):
    return _sum([ai * bi for ai, bi in zip(a, b)])


def _check_points(domain: Domain, dim: int) -> List[np.ndarray]:
    """The origin plus seeded points of the validation box that lie in the domain"""
    rng = np.random.default_rng(0)
    width = domain.sample_half_width
    points = [np.zeros(dim)]
    while len(points) < PARAM_CHECK_POINTS:
        x = rng.uniform(-width, width, dim)
        if domain.contains(x):
            points.append(x)
    return points


# ── closed forms ─────────────────────────────────────────────────────────────


def _euclidean(xs, ys):
    return jetmath.sqrt(_dot(ys, ys))


def _funk(xs, ys):
    xy = _dot(xs, ys)
    rest = 1.0 - _dot(xs, xs)
    return (xy + jetmath.sqrt(_dot(ys, ys) * rest + xy * xy)) / rest


def _klein(xs, ys):
    xy = _dot(xs, ys)
    rest = 1.0 - _dot(xs, xs)
    return jetmath.sqrt(_dot(ys, ys) * rest + xy * xy) / rest


# ── parametrised families ────────────────────────────────────────────────────


def default_riemannian_matrix(dim: int) -> List[List[str]]:
    """(1 + x1^2) times the identity"""
    return [["1 + x1^2" if i == j else 0 for j in range(dim)] for i in range(dim)]


def default_randers_form(dim: int) -> List[str]:
    """A non-closed one-form, small on the validation box"""
    form = []
    for i in range(dim):
        j = (i + 1) % dim
        form.append(f"0.1 + 0.2*x{i + 1}*x{j + 1} + 0.15*x{j + 1}^2")
    return form


def _matrix_nodes(value, dim: int) -> List[List[Node]]:
    if not isinstance(value, (list, tuple)) or len(value) != dim:
        raise ParamError(f"parameter a must be a {dim} x {dim} matrix")
    rows = []
    for row in value:
        if not isinstance(row, (list, tuple)) or len(row) != dim:
            raise ParamError(f"parameter a must be a {dim} x {dim} matrix")
        rows.append([_coefficient(entry, dim, "a") for entry in row])
    return rows


def _vector_nodes(value, dim: int) -> List[Node]:
    if not isinstance(value, (list, tuple)) or len(value) != dim:
        raise ParamError(f"parameter b must be a list of {dim} entries")
    return [_coefficient(entry, dim, "b") for entry in value]


def _coefficient(entry, dim: int, name: str) -> Node:
    try:
        return coefficient_node(entry, dim)
    except TypeError:
        raise ParamError(f"parameter {name} entries must be numbers or x-expressions, got {entry!r}")
    except FinchError as e:
        raise ParamError(f"invalid entry {entry!r} in parameter {name}: {e}")


def _matrix_at(nodes: List[List[Node]], x: np.ndarray) -> np.ndarray:
    xs = list(x)
    return np.array([[float(node.evaluate(xs, ())) for node in row] for row in nodes])


def _vector_at(nodes: List[Node], x: np.ndarray) -> np.ndarray:
    xs = list(x)
    return np.array([float(node.evaluate(xs, ())) for node in nodes])


def _check_riemannian(nodes, domain: Domain, dim: int):
    for x in _check_points(domain, dim):
        a = _matrix_at(nodes, x)
        if not np.allclose(a, a.T, rtol=1e-12, atol=1e-12):
            raise ParamError(f"parameter a is not symmetric at x = {x.tolist()}")
        if np.linalg.eigvalsh(a).min() <= 0:
            raise ParamError(f"parameter a is not positive definite at x = {x.tolist()}")


def _check_randers(a_nodes, b_nodes, domain: Domain, dim: int):
    for x in _check_points(domain, dim):
        a = _matrix_at(a_nodes, x)
        b = _vector_at(b_nodes, x)
        norm = float(b @ np.linalg.solve(a, b))
        if norm >= 1.0:
            raise ParamError(f"randers one-form has |b|_a = {np.sqrt(norm):.6g} >= 1 at x = {x.tolist()}")


def _quadratic(a_nodes: List[List[Node]]) -> Callable:
    dim = len(a_nodes)

    def quadratic(xs, ys):
        terms = []
        for i in range(dim):
            terms.append(a_nodes[i][i].evaluate(xs, ()) * ys[i] * ys[i])
            for j in range(i + 1, dim):
                terms.append(2.0 * a_nodes[i][j].evaluate(xs, ()) * ys[i] * ys[j])
        return _sum(terms)

    return quadratic


def _riemannian(params: Dict, dim: int, domain: Domain) -> Callable:
    nodes = _matrix_nodes(params.get("a", default_riemannian_matrix(dim)), dim)
    _check_riemannian(nodes, domain, dim)
    quadratic = _quadratic(nodes)

    def evaluator(xs, ys):
        return jetmath.sqrt(quadratic(xs, ys))

    return evaluator


def _randers(params: Dict, dim: int, domain: Domain) -> Callable:
    a_nodes = _matrix_nodes(params.get("a", np.eye(dim).tolist()), dim)
    b_nodes = _vector_nodes(params.get("b", default_randers_form(dim)), dim)
    _check_riemannian(a_nodes, domain, dim)
    _check_randers(a_nodes, b_nodes, domain, dim)
    quadratic = _quadratic(a_nodes)

    def evaluator(xs, ys):
        beta = _sum([node.evaluate(xs, ()) * y for node, y in zip(b_nodes, ys)])
        return jetmath.sqrt(quadratic(xs, ys)) + beta

    return evaluator


def builtin_metric(name: str, dim: int, params: Optional[Dict] = None,
                   domain: Optional[Domain] = None) -> MetricKernel:
    """
    Construct one of the builtin metric kernels.

    Args:
        name: euclidean, riemannian, randers, funk or klein
        dim: dimension n >= 2
        params: riemannian takes ``a`` (n x n numbers or x-expressions),
            randers takes ``a`` and ``b`` (n numbers or x-expressions)
        domain: base domain; funk and klein always live on the unit ball

    Raises:
        ParamError: unknown name, unknown or invalid parameters
    """
    if name not in BUILTIN_NAMES:
        raise ParamError(f"unknown builtin metric {name!r}; use one of {', '.join(BUILTIN_NAMES)}")
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 2:
        raise ParamError(f"dimension must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    params = dict(params or {})
    unknown = set(params) - _ALLOWED_PARAMS[name]
    if unknown:
        raise ParamError(f"builtin {name} does not take parameter(s) {', '.join(sorted(unknown))}")

    if name in ("funk", "klein"):
        if domain is not None and domain != Domain.ball(1.0):
            raise ParamError(f"builtin {name} is defined on the unit ball only, got {domain.describe()}")
        domain = Domain.ball(1.0)
        evaluator = _funk if name == "funk" else _klein
    else:
        domain = domain or Domain.everywhere()
        if name == "euclidean":
            evaluator = _euclidean
        elif name == "riemannian":
            evaluator = _riemannian(params, dim, domain)
        else:
            evaluator = _randers(params, dim, domain)

    logger.debug("builtin metric %s, dim %d, domain %s", name, dim, domain.describe())
    return MetricKernel(dim, evaluator, domain, name)

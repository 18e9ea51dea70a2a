"""Tests for first integrals, projective factors and identity checks"""
import numpy as np
import pytest

from finch.errors import ParamError, SingularMetricError
from finch.metrics import builtin_metric, parse_volume_expression, sample_fiber_points
from finch.models import FiberPoint
from finch.services import (
    alpha_form,
    bordered_determinant,
    integral_values,
    lambda_integral,
    lambda_painleve,
    painleve_I0,
    projective_factor,
    rapcsak_residual,
    scalar_mean_berwald,
)


def _points(kernel, count=4, seed=9):
    return sample_fiber_points(kernel, count, np.random.default_rng(seed))


class TestBorderedDeterminant:
    def test_euclidean_case(self):
        assert bordered_determinant(np.eye(2), [1.0, 0.0]) == pytest.approx(-1.0)
        assert bordered_determinant(np.eye(2), [3.0, 4.0]) == pytest.approx(-25.0)

    def test_matches_dense_determinant(self):
        M = np.array([[2.0, 0.0], [0.0, 3.0]])
        assert bordered_determinant(M, [1.0, 1.0]) == pytest.approx(-5.0)
        rng = np.random.default_rng(0)
        A = rng.normal(size=(4, 4))
        v = rng.normal(size=4)
        dense = np.block([[A, v[:, None]], [v[None, :], np.zeros((1, 1))]])
        assert bordered_determinant(A, v) == pytest.approx(np.linalg.det(dense), rel=1e-10)


class TestLambda:
    def test_funk_dimension_two(self, funk2):
        for point in _points(funk2):
            assert lambda_integral(funk2, point) == pytest.approx(1.5, abs=1e-6)

    def test_funk_dimension_three_is_f_squared(self, funk3):
        for point in _points(funk3, 3):
            fit = scalar_mean_berwald(funk3, point)
            assert fit.f == pytest.approx(2.0, abs=1e-7)
            assert lambda_integral(funk3, point) == pytest.approx(fit.f ** 2, abs=1e-6)

    @pytest.mark.parametrize("name", ["randers", "funk"])
    def test_zero_homogeneous(self, name):
        kernel = builtin_metric(name, 3)
        for point in _points(kernel, 10):
            stretched = FiberPoint(point.x, 3.0 * point.y)
            assert lambda_integral(kernel, stretched) == pytest.approx(lambda_integral(kernel, point), rel=1e-8, abs=1e-12)

    def test_euclidean_lambda_vanishes(self, euclidean2, point2):
        assert lambda_integral(euclidean2, point2) == pytest.approx(0.0, abs=1e-12)

    def test_painleve_route_agrees(self, funk2, point2):
        sigma = parse_volume_expression("exp(x1)", 2)
        expected = lambda_integral(funk2, point2)
        assert lambda_painleve(funk2, None, point2) == pytest.approx(expected, rel=1e-6)
        assert lambda_painleve(funk2, sigma, point2) == pytest.approx(expected, rel=1e-6)

    def test_painleve_route_needs_nonzero_S(self, euclidean2, point2):
        with pytest.raises(SingularMetricError):
            lambda_painleve(euclidean2, None, point2)


class TestScalarMeanBerwald:
    def test_funk(self, funk2, point2):
        fit = scalar_mean_berwald(funk2, point2)
        assert fit.f == pytest.approx(1.5, abs=1e-7)
        assert fit.residual < 1e-8

    def test_riemannian_is_degenerate(self, klein2, point2):
        fit = scalar_mean_berwald(klein2, point2)
        assert fit.f == 0.0
        assert fit.residual == 0.0


class TestPainleve:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_scaling(self, dim):
        kernel = builtin_metric("funk", dim)
        point = _points(kernel, 1)[0]
        expected = 2.0 ** ((1 - dim) / (dim + 1))
        assert painleve_I0(kernel, kernel.scaled(2.0), point) == pytest.approx(expected, rel=1e-10)

    def test_dimension_mismatch(self, funk2, funk3, point2):
        with pytest.raises(ParamError):
            painleve_I0(funk2, funk3, point2)


class TestProjectiveFactor:
    def test_klein_and_euclidean(self, klein2, euclidean2):
        for point in _points(klein2):
            factors = projective_factor(klein2, euclidean2, point)
            assert factors.P_log == pytest.approx(factors.P_trace, abs=1e-6)
            assert factors.P_det == pytest.approx(factors.P_trace, abs=1e-6)
            x, y = point.x, point.y
            assert factors.P_trace == pytest.approx(-float(x @ y) / (1.0 - float(x @ x)), abs=1e-8)

    def test_constant_multiple(self, funk2, point2):
        factors = projective_factor(funk2, funk2.scaled(2.0), point2)
        assert abs(factors.P_trace) < 1e-8
        assert abs(factors.P_log) < 1e-8
        assert abs(factors.P_det) < 1e-8


class TestRapcsak:
    def test_projectively_related(self, klein2, euclidean2):
        for point in _points(klein2, 5):
            assert np.linalg.norm(rapcsak_residual(klein2, euclidean2, point)) <= 1e-7

    def test_not_projectively_related(self, funk2, riemannian2):
        residuals = [np.linalg.norm(rapcsak_residual(funk2, riemannian2, p)) for p in _points(funk2, 5)]
        assert max(residuals) > 1e-2


class TestAlphaForm:
    def test_funk(self, funk2):
        point = FiberPoint([0.3, 0.2], [0.5, -1.0])
        alpha = alpha_form(funk2, None, point)
        assert abs(alpha.i_G_alpha) <= 1e-8 * (1.0 + np.linalg.norm(point.y))
        np.testing.assert_allclose(alpha.nabla_I, alpha.horizontal, atol=1e-7)
        assert np.linalg.norm(alpha.vertical) > 1e-3

    @pytest.mark.parametrize("name", ["euclidean", "riemannian", "klein"])
    def test_riemannian_vertical_part_vanishes(self, name, point2):
        alpha = alpha_form(builtin_metric(name, 2), None, point2)
        assert np.linalg.norm(alpha.vertical) <= 1e-8

    @pytest.mark.parametrize("dim", [2, 3])
    def test_funk_samples(self, dim):
        kernel = builtin_metric("funk", dim)
        vertical = []
        for point in _points(kernel, 100):
            alpha = alpha_form(kernel, None, point)
            assert abs(alpha.i_G_alpha) <= 1e-8 * (1.0 + np.linalg.norm(point.y))
            vertical.append(np.linalg.norm(alpha.vertical))
        assert max(vertical) > 1e-3

    @pytest.mark.parametrize("name", ["euclidean", "riemannian", "klein"])
    def test_riemannian_samples(self, name):
        kernel = builtin_metric(name, 2)
        for point in _points(kernel, 100):
            assert np.linalg.norm(alpha_form(kernel, None, point).vertical) <= 1e-8


class TestIntegralValues:
    def test_bundle(self, klein2, euclidean2, funk2, point2):
        values = integral_values(funk2, None, point2)
        assert values.lambda_ == pytest.approx(1.5, abs=1e-6)
        assert values.f == pytest.approx(1.5, abs=1e-7)
        assert values.I0 is None and values.P is None

        paired = integral_values(klein2, None, point2, aux_kernel=euclidean2)
        assert paired.I0 is not None and paired.I0 > 0
        assert paired.P.gap < 1e-6
        assert np.linalg.norm(paired.rapcsak) < 1e-7
        assert paired.to_dict()["lambda"] == pytest.approx(0.0, abs=1e-9)

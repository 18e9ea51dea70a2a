"""Tests for the metric tensor, spray, connection and curvature"""
import numpy as np
import pytest

from finch.errors import CapabilityError, DomainError, SingularMetricError
from finch.metrics import builtin_metric, parse_metric_expression, parse_volume_expression, sample_fiber_points
from finch.models import FiberPoint
from finch.services import (
    PointGeometry,
    connection_trace_residual,
    curvature_pack,
    metric_jet,
    rank_E,
    spray,
    spray_residual,
)
from finch.services.integrals import bordered_det_checks


def _points(kernel, count=4, seed=5):
    return sample_fiber_points(kernel, count, np.random.default_rng(seed))


class TestMetricJet:
    def test_euclidean(self, euclidean2):
        data = metric_jet(euclidean2, None, FiberPoint([0.0, 0.0], [3.0, 4.0]))
        assert data.F == pytest.approx(5.0)
        assert data.det_g == pytest.approx(1.0)
        np.testing.assert_allclose(data.g, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(data.C, 0.0, atol=1e-14)
        np.testing.assert_allclose(data.h @ np.array([3.0, 4.0]), 0.0, atol=1e-12)
        assert data.tau == pytest.approx(0.0)

    def test_lowered_vector_and_angular_metric(self, randers2, point2):
        data = metric_jet(randers2, None, point2)
        # y_i = g_ij y^j = F F_y
        np.testing.assert_allclose(data.y_low, data.F * data.F_y, rtol=1e-10)
        # h = g - F_y F_y^T... scaled by F
        np.testing.assert_allclose(data.h, data.g - np.outer(data.y_low, data.y_low) / data.F ** 2, atol=1e-10)
        np.testing.assert_allclose(data.g @ data.g_inv, np.eye(2), atol=1e-10)

    def test_singular_metric(self):
        kernel = parse_metric_expression("sqrt(y1^2)", 2)
        with pytest.raises(SingularMetricError):
            metric_jet(kernel, None, FiberPoint([0.0, 0.0], [1.0, 1.0]))

    def test_point_outside_domain(self, klein2):
        with pytest.raises(DomainError):
            metric_jet(klein2, None, FiberPoint([0.0, 1.5], [1.0, 0.0]))

    def test_plain_tuple_point(self):
        data = metric_jet(builtin_metric("euclidean", 3), None, ((0.0, 0.0, 0.0), (3.0, 4.0, 0.0)))
        assert data.F == pytest.approx(5.0)
        np.testing.assert_allclose(data.g, np.eye(3), atol=1e-14)

    def test_riemannian_tensor_is_the_matrix(self, riemannian2):
        for point in _points(riemannian2, 100):
            expected = (1.0 + point.x[0] ** 2) * np.eye(2)
            np.testing.assert_allclose(metric_jet(riemannian2, None, point).g, expected, atol=1e-10)
            stretched = FiberPoint(point.x, 3.0 * point.y)
            np.testing.assert_allclose(metric_jet(riemannian2, None, stretched).g, expected, atol=1e-10)


class TestSpray:
    def test_funk_spray_is_half_F_times_y(self, funk2, point2):
        data = spray(funk2, point2)
        F = funk2(point2.x, point2.y)
        np.testing.assert_allclose(data.G, 0.5 * F * point2.y, rtol=1e-10)

    def test_klein_spray(self, klein2, point2):
        x, y = point2.x, point2.y
        P = float(x @ y) / (1.0 - float(x @ x))
        np.testing.assert_allclose(spray(klein2, point2).G, P * y, rtol=1e-10, atol=1e-14)

    def test_euclidean_spray_vanishes(self, euclidean2, point2):
        data = spray(euclidean2, point2)
        np.testing.assert_allclose(data.G, 0.0, atol=1e-14)
        np.testing.assert_allclose(data.N, 0.0, atol=1e-14)

    @pytest.mark.parametrize("name", ["riemannian", "randers", "funk", "klein"])
    def test_geodesic_and_trace_identities(self, name):
        kernel = builtin_metric(name, 3)
        for point in _points(kernel, 3):
            assert np.linalg.norm(spray_residual(kernel, point)) < 1e-8
            assert connection_trace_residual(kernel, point) < 1e-8

    def test_connection_is_fibre_derivative(self, randers2, point2):
        G = spray(randers2, point2).G
        N = spray(randers2, point2).N
        # G is 2-homogeneous in y: N y = 2 G
        np.testing.assert_allclose(N @ point2.y, 2.0 * G, rtol=1e-10, atol=1e-14)


class TestCurvature:
    @pytest.mark.parametrize("name", ["euclidean", "riemannian", "randers", "funk", "klein"])
    def test_two_routes_agree(self, name):
        kernel = builtin_metric(name, 2)
        for point in _points(kernel, 100):
            pack = curvature_pack(kernel, None, point)
            np.testing.assert_allclose(pack.E, pack.E_alt, atol=1e-7)
            np.testing.assert_allclose(pack.chi, pack.chi_alt, atol=1e-6)

    def test_two_routes_agree_in_dimension_three(self):
        kernel = builtin_metric("randers", 3)
        for point in _points(kernel, 100):
            pack = curvature_pack(kernel, None, point)
            np.testing.assert_allclose(pack.E, pack.E_alt, atol=1e-7)
            np.testing.assert_allclose(pack.chi, pack.chi_alt, atol=1e-6)

    def test_volume_independence(self, randers2, point2):
        sigma = parse_volume_expression("exp(x1)", 2)
        plain = curvature_pack(randers2, None, point2)
        weighted = curvature_pack(randers2, sigma, point2)
        np.testing.assert_allclose(weighted.E, plain.E, atol=1e-7)
        np.testing.assert_allclose(weighted.chi, plain.chi, atol=1e-7)
        # tau shifts by -x1 / 2, so S shifts by -y1 / 2
        assert weighted.S - plain.S == pytest.approx(-0.5 * point2.y[0], abs=1e-10)

    def test_funk(self, funk3, point3):
        pack = curvature_pack(funk3, None, point3)
        assert np.linalg.norm(pack.chi) < 1e-8
        assert rank_E(pack.E) == 2

    def test_euclidean_is_flat(self, euclidean2, point2):
        pack = curvature_pack(euclidean2, None, point2)
        for tensor in (pack.B, pack.E, pack.R2, pack.R3, pack.chi):
            np.testing.assert_allclose(tensor, 0.0, atol=1e-12)
        assert pack.S == pytest.approx(0.0, abs=1e-12)
        assert rank_E(pack.E) == 0

    def test_riemannian_berwald_curvature_vanishes(self, riemannian2, point2):
        pack = curvature_pack(riemannian2, None, point2)
        np.testing.assert_allclose(pack.B, 0.0, atol=1e-9)
        assert np.linalg.norm(pack.R2) > 1e-3

    def test_R2_is_antisymmetric(self, randers2, point2):
        R2 = curvature_pack(randers2, None, point2).R2
        np.testing.assert_allclose(R2, -R2.transpose(0, 2, 1), atol=1e-12)


class TestRank:
    def test_thresholds(self):
        assert rank_E(np.zeros((3, 3))) == 0
        assert rank_E(np.diag([1.0, 1e-12, 0.0])) == 1
        assert rank_E(np.diag([1.0, 0.5, 0.2])) == 3
        assert rank_E(np.diag([1e-10, 1e-10])) == 0


class TestLevels:
    def test_capability_limits_levels(self, funk2, point2):
        with pytest.raises(CapabilityError):
            PointGeometry(funk2, point2, level="full", capability=(1, 5, 5))
        with pytest.raises(CapabilityError):
            PointGeometry(funk2, point2, level="ricci")

    def test_cached_quantities_shared(self, funk2, point2):
        geometry = PointGeometry(funk2, point2, level="berwald")
        assert geometry.G is geometry.G
        np.testing.assert_allclose(geometry.N.value, spray(funk2, point2).N, atol=1e-12)


class TestBorderedDeterminants:
    @pytest.mark.parametrize("name", ["randers", "funk", "klein"])
    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_identities(self, name, dim):
        kernel = builtin_metric(name, dim)
        aux = builtin_metric("euclidean", dim)
        for point in _points(kernel, 100):
            assert bordered_det_checks(kernel, None, point).rund <= 1e-8
            assert bordered_det_checks(kernel, aux, point).gg <= 1e-8


class TestHomogeneityDegrees:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_degrees_in_y(self, dim):
        kernel = builtin_metric("randers", dim)
        for point in _points(kernel, 5):
            base = PointGeometry(kernel, point, level="full")
            scaled = PointGeometry(kernel, FiberPoint(point.x, 2.0 * point.y), level="full")
            for name, degree in [("F", 1), ("g", 0), ("G", 2), ("N", 1), ("S", 1)]:
                np.testing.assert_allclose(
                    getattr(scaled, name).value, 2.0 ** degree * getattr(base, name).value, rtol=1e-9, atol=1e-12,
                    err_msg=name,
                )
            np.testing.assert_allclose(scaled.E, 0.5 * base.E, rtol=1e-8, atol=1e-12)
            np.testing.assert_allclose(scaled.chi, 2.0 * base.chi, rtol=1e-6, atol=1e-12)

    def test_chi_does_not_vanish_for_generic_randers(self):
        kernel = builtin_metric("randers", 3)
        assert max(np.linalg.norm(PointGeometry(kernel, p).chi) for p in _points(kernel, 5)) > 1e-4

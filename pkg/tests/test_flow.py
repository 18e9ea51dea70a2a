"""Tests for geodesic integration and first-integral tracking"""
import numpy as np
import pytest

from finch.errors import DomainError, ParamError
from finch.models import Adaptive, FixedRK4, TrajectoryStatus, parse_controller
from finch.services import integrate_geodesic, sample_initial_conditions, track_first_integrals


def _unit_start(kernel, x0, direction):
    y0 = np.asarray(direction, dtype=float)
    return x0, y0 / kernel(x0, y0)


class TestControllers:
    def test_parse(self):
        assert parse_controller("rk4:0.01") == FixedRK4(0.01)
        assert parse_controller("adaptive") == Adaptive()
        assert parse_controller("adaptive:1e-8") == Adaptive(1e-8)
        assert parse_controller("adaptive:1e-8:1e-9") == Adaptive(1e-8, 1e-9)

    @pytest.mark.parametrize("text", ["rk4", "rk4:-1", "euler:0.1", "adaptive:a", "adaptive:1:2:3"])
    def test_invalid(self, text):
        with pytest.raises(ParamError):
            parse_controller(text)


class TestIntegrateGeodesic:
    def test_euclidean_straight_line(self, euclidean2):
        traj = integrate_geodesic(euclidean2, [0.0, 0.0], [1.0, 2.0], 1.0)
        assert traj.status is TrajectoryStatus.COMPLETED
        assert traj.times[-1] == pytest.approx(1.0)
        np.testing.assert_allclose(traj.xs[-1], [1.0, 2.0], atol=1e-10)
        np.testing.assert_allclose(traj.ys[-1], [1.0, 2.0], atol=1e-10)
        assert np.all(np.diff(traj.times) > 0)

    def test_fixed_step_grid(self, euclidean2):
        traj = integrate_geodesic(euclidean2, [0.0, 0.0], [1.0, 0.0], 1.0, FixedRK4(0.3))
        np.testing.assert_allclose(traj.times, [0.0, 0.25, 0.5, 0.75, 1.0])
        assert traj.steps == 4

    @pytest.mark.parametrize("name", ["klein", "funk"])
    def test_ball_geodesics_are_chords(self, name):
        from finch.metrics import builtin_metric

        kernel = builtin_metric(name, 2)
        x0, y0 = _unit_start(kernel, np.array([0.2, -0.1]), [0.6, 0.8])
        traj = integrate_geodesic(kernel, x0, y0, 2.0)
        offsets = traj.xs - x0
        defect = np.abs(offsets[:, 0] * y0[1] - offsets[:, 1] * y0[0]) / np.linalg.norm(y0)
        assert defect.max() <= 1e-6

    def test_time_reversal(self, funk2):
        x0, y0 = _unit_start(funk2, np.array([0.1, 0.3]), [1.0, -0.5])
        forward = integrate_geodesic(funk2, x0, y0, 1.5)
        backward = integrate_geodesic(funk2, forward.xs[-1], forward.ys[-1], -1.5)
        assert np.all(np.diff(backward.times) < 0)
        np.testing.assert_allclose(backward.xs[-1], x0, atol=1e-7)
        np.testing.assert_allclose(backward.ys[-1], y0, atol=1e-7)

    def test_domain_exit(self, funk2):
        traj = integrate_geodesic(funk2, [0.9, 0.0], [1.0, 0.0], 50.0)
        assert traj.status is TrajectoryStatus.DOMAIN_EXIT
        assert traj.times[-1] < 50.0
        assert all(funk2.domain.contains(x) for x in traj.xs)

    def test_invalid_starts(self, funk2):
        with pytest.raises(DomainError):
            integrate_geodesic(funk2, [1.5, 0.0], [1.0, 0.0], 1.0)
        with pytest.raises(DomainError):
            integrate_geodesic(funk2, [0.0, 0.0], [0.0, 0.0], 1.0)
        with pytest.raises(ParamError):
            integrate_geodesic(funk2, [0.0, 0.0], [1.0, 0.0], 0.0)


class TestTracking:
    def test_energy_conservation(self, riemannian2):
        x0, y0 = _unit_start(riemannian2, np.array([0.1, 0.2]), [1.0, 0.3])
        traj = integrate_geodesic(riemannian2, x0, y0, 5.0)
        assert traj.status is TrajectoryStatus.COMPLETED
        report = track_first_integrals(riemannian2, traj, ["F"])
        assert report["F"].initial == pytest.approx(1.0)
        assert report["F"].max_drift <= 1e-8

    def test_rk4_convergence_order(self, klein2):
        x0, y0 = _unit_start(klein2, np.array([0.1, 0.2]), [1.0, 0.3])
        drifts = []
        for dt in (0.1, 0.05):
            traj = integrate_geodesic(klein2, x0, y0, 1.5, FixedRK4(dt))
            drifts.append(track_first_integrals(klein2, traj, ["F"])["F"].max_drift)
        assert drifts[0] >= 12.0 * drifts[1]

    def test_funk_lambda_is_conserved(self, funk2):
        x0, y0 = _unit_start(funk2, np.array([-0.2, 0.1]), [0.3, 1.0])
        traj = integrate_geodesic(funk2, x0, y0, 2.0)
        report = track_first_integrals(funk2, traj, ["lambda", "f"], max_states=6)
        assert report["lambda"].initial == pytest.approx(1.5, abs=1e-6)
        assert report["lambda"].max_drift <= 1e-6
        assert report["f"].max_drift <= 1e-6
        values = traj.tracked["lambda"]
        assert len(values) == len(traj)
        assert not np.isnan(values[0]) and not np.isnan(values[-1])
        assert np.count_nonzero(~np.isnan(values)) <= 6

    def test_painleve_integral_along_klein(self, klein2, euclidean2):
        x0, y0 = _unit_start(klein2, np.array([0.3, -0.1]), [-0.4, 1.0])
        traj = integrate_geodesic(klein2, x0, y0, 2.0)
        report = track_first_integrals(klein2, traj, ["I0"], aux_kernel=euclidean2, max_states=10)
        assert report["I0"].max_drift <= 1e-6

    def test_unknown_quantity(self, euclidean2):
        traj = integrate_geodesic(euclidean2, [0.0, 0.0], [1.0, 0.0], 1.0)
        with pytest.raises(ParamError):
            track_first_integrals(euclidean2, traj, ["energy"])

    def test_I0_needs_auxiliary_metric(self, euclidean2):
        traj = integrate_geodesic(euclidean2, [0.0, 0.0], [1.0, 0.0], 1.0)
        with pytest.raises(ParamError):
            track_first_integrals(euclidean2, traj, ["I0"])

    def test_initial_conditions_are_normalised(self, funk2, rng):
        for start in sample_initial_conditions(funk2, 4, rng):
            assert funk2(start.x, start.y) == pytest.approx(1.0)

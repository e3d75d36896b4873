import math

import numpy as np
import pytest

from systolab import revolution as rev

TWO_PI = 2.0 * math.pi
ROUND = rev.RevolutionMetric.round_sphere()
ODD = rev.RevolutionMetric.from_odd_coeffs([0.3])        # 0.3 (u - u^3)
EVEN_CONTROL = rev.RevolutionMetric.from_polynomial([0.3, 0.0, -0.3])  # 0.3 (1 - u^2)


class TestMetricValidation:
    def test_odd_basis_is_odd(self):
        u = np.linspace(-1, 1, 101)
        assert np.allclose(ODD.h(-u), -ODD.h(u), atol=1e-15)
        assert ODD.is_odd

    def test_even_control_flagged(self):
        assert not EVEN_CONTROL.is_odd

    def test_endpoint_vanish_required(self):
        with pytest.raises(ValueError):
            rev.RevolutionMetric.from_polynomial([0.1, 0.3])  # h(1) != 0

    def test_sup_bound_required(self):
        with pytest.raises(ValueError):
            rev.RevolutionMetric.from_odd_coeffs([3.0])


class TestIntegration:
    def test_round_equator_stays_put(self):
        state = rev.equator_state(ROUND, 1.0)
        traj = rev.integrate_geodesic(ROUND, state, TWO_PI + 0.5)
        assert np.max(np.abs(traj.states[:, 0] - math.pi / 2)) < 1e-9
        closed, defect = rev.closure_test(traj)
        assert closed and defect < 1e-9

    def test_round_great_circle_closes(self):
        traj = rev.integrate_geodesic(ROUND, rev.equator_state(ROUND, 0.5),
                                      TWO_PI + 0.5)
        assert rev.closure_defect(traj) < 1e-8

    def test_conservation_over_long_arc(self):
        tol = 1e-10
        length = 20.0 * math.pi
        traj = rev.integrate_geodesic(ODD, rev.equator_state(ODD, 0.7),
                                      length, tol=tol)
        assert traj.clairaut_drift() <= 1e-9
        assert traj.energy_drift() <= 10.0 * tol * length

    def test_time_reversal(self):
        tol = 1e-10
        length = 7.0
        state0 = rev.equator_state(ODD, 0.4)
        forward = rev.integrate_geodesic(ODD, state0, length, tol=tol)
        end = forward.state_at(length)
        flipped = rev.GeodesicState(end[0], end[1], -end[2], -end[3])
        back = rev.integrate_geodesic(ODD, flipped, length, tol=tol)
        final = back.state_at(length)
        recovered = np.array([final[0], final[1], -final[2], -final[3]])
        assert np.linalg.norm(recovered - state0.as_array()) <= 20.0 * tol * length

    def test_pole_start_rejected(self):
        with pytest.raises(ValueError):
            rev.integrate_geodesic(
                ROUND, rev.GeodesicState(0.01, 0.0, 0.0, 0.3), 1.0)

    def test_meridian_needs_closed_form(self):
        with pytest.raises(ValueError):
            rev.integrate_geodesic(ROUND, rev.GeodesicState(1.0, 0.0, 1.0, 0.0), 1.0)


class TestClosureBattery:
    def test_odd_profile_certifies(self):
        battery = rev.zoll_closure_battery(ODD)
        assert battery.certified
        assert battery.max_defect < 1e-6
        assert len(battery.p_phi_values) == 20

    def test_even_perturbation_fails(self):
        battery = rev.zoll_closure_battery(EVEN_CONTROL)
        assert not battery.certified
        assert battery.max_defect > 1e-2


class TestLengthAndArea:
    def test_meridian_round(self):
        assert rev.meridian_length(ROUND) == pytest.approx(TWO_PI, abs=1e-14)

    def test_meridian_odd_cancels(self):
        assert rev.meridian_length(ODD) == pytest.approx(TWO_PI, abs=1e-12)

    def test_meridian_even_closed_form(self):
        # 2 * int h(cos)/..: 0.3 * int sqrt(1-u^2) du doubles to 0.3 * pi
        expect = TWO_PI + 0.3 * math.pi
        assert rev.meridian_length(EVEN_CONTROL) == pytest.approx(expect, abs=1e-12)
        assert rev.meridian_length(EVEN_CONTROL) > TWO_PI

    def test_area_round(self):
        assert rev.surface_area(ROUND) == pytest.approx(4 * math.pi, abs=1e-14)

    @pytest.mark.parametrize("coeffs", [[0.3], [0.15], [0.1, 0.05]])
    def test_area_odd_cancels(self, coeffs):
        metric = rev.RevolutionMetric.from_odd_coeffs(coeffs)
        assert rev.surface_area(metric) == pytest.approx(4 * math.pi, abs=1e-12)

    def test_area_even_closed_form(self):
        # 4 pi + 2 pi * 0.3 * int (1 - u^2) du = 4 pi + 0.8 pi
        assert rev.surface_area(EVEN_CONTROL) == pytest.approx(
            4.8 * math.pi, abs=1e-12)


class TestWeinsteinRatio:
    def test_round(self):
        est = rev.weak_systolic_ratio_estimate(ROUND)
        assert est.zoll_certified
        assert est.ratio == pytest.approx(math.pi, abs=1e-5)

    @pytest.mark.parametrize("coeffs", [[0.3], [0.15]])
    def test_odd_profiles(self, coeffs):
        est = rev.weak_systolic_ratio_estimate(
            rev.RevolutionMetric.from_odd_coeffs(coeffs))
        assert est.zoll_certified
        assert est.ratio == pytest.approx(math.pi, abs=1e-5)
        assert est.area == pytest.approx(4 * math.pi, abs=1e-10)

    def test_control_refuses_zoll_label(self):
        est = rev.weak_systolic_ratio_estimate(EVEN_CONTROL)
        assert not est.zoll_certified
        assert est.max_defect > 1e-2

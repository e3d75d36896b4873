import math

import numpy as np
import pytest

from systolab import boothby_wang as bw
from systolab.quadrature import SphereGrid, real_sph_harm

# coefficient turning the (1,0) harmonic into plain cos(theta)
C10 = 1.0 / math.sqrt(3.0 / (4.0 * math.pi))


def tilted(eps=0.2):
    """psi = 1 + eps * cos(theta)."""
    return bw.DensityOnBase.from_harmonics(1.0, [(1, 0, eps * C10)])


class TestSphericalHarmonics:
    def test_orthonormal_on_grid(self):
        grid = SphereGrid(n_theta=48, n_phi=96)
        basis = [(0, 0), (1, -1), (1, 0), (1, 1), (2, 0), (2, 2), (3, -2)]
        for i, (l1, m1) in enumerate(basis):
            y1 = real_sph_harm(l1, m1, grid.theta_grid, grid.phi_grid)
            for l2, m2 in basis[i:]:
                y2 = real_sph_harm(l2, m2, grid.theta_grid, grid.phi_grid)
                expected = 1.0 if (l1, m1) == (l2, m2) else 0.0
                assert grid.integrate(y1 * y2) == pytest.approx(expected, abs=1e-12)


class TestMinOfDensity:
    def test_constant(self):
        value, _ = bw.min_of_density(bw.DensityOnBase.constant(2.5))
        assert value == pytest.approx(2.5, abs=1e-14)

    def test_tilted_minimum_at_south_pole(self):
        value, (theta, _) = bw.min_of_density(tilted(0.2))
        assert value == pytest.approx(0.8, abs=1e-9)
        assert theta == pytest.approx(math.pi, abs=1e-3)

    def test_random_against_dense_grid_scan(self):
        for k in range(5):
            rng = np.random.default_rng(50 + k)
            density = bw.random_positive_density(rng)
            refined, _ = bw.min_of_density(density)
            constant, terms = density.harmonics
            dense = bw.DensityOnBase.from_harmonics(constant, terms,
                                                    n_theta=128, n_phi=256)
            dense_min = float(np.min(dense.values))
            assert refined <= dense_min + 1e-12
            assert dense_min - refined <= 5e-4


class TestVolumeAndRatio:
    def test_unit_density_unit_euler(self):
        vol = bw.bw_contact_volume(bw.DensityOnBase.constant(1.0), bw.BWBundle(1))
        assert vol == pytest.approx(1.0, rel=1e-13)

    def test_constant_scaling(self):
        c, euler = 1.7, 3
        vol = bw.bw_contact_volume(bw.DensityOnBase.constant(c), bw.BWBundle(euler))
        assert vol == pytest.approx(c * c * euler, rel=1e-13)

    def test_tilted_closed_form(self):
        # mean of (1 + 0.2 cos)^2 over the round sphere is 1 + 0.04/3
        vol = bw.bw_contact_volume(tilted(0.2), bw.BWBundle(1))
        assert vol == pytest.approx(1.0 + 0.04 / 3.0, rel=1e-12)

    def test_round_anchor(self):
        rep = bw.bw_systolic_ratio(bw.DensityOnBase.constant(1.0), bw.BWBundle(2))
        assert rep.ratio == pytest.approx(0.5, abs=1e-14)
        assert rep.is_zoll_equality

    def test_tilted_ratio(self):
        rep = bw.bw_systolic_ratio(tilted(0.2), bw.BWBundle(1))
        assert rep.ratio == pytest.approx(0.64 / (1.0 + 0.04 / 3.0), rel=1e-8)
        assert rep.ratio < 1.0
        assert not rep.is_zoll_equality

    def test_scaling_invariance(self):
        rng = np.random.default_rng(60)
        density = bw.random_positive_density(rng)
        constant, terms = density.harmonics
        scaled = bw.DensityOnBase.from_harmonics(
            3.0 * constant, [(l, m, 3.0 * c) for l, m, c in terms])
        r1 = bw.bw_systolic_ratio(density, bw.BWBundle(2))
        r2 = bw.bw_systolic_ratio(scaled, bw.BWBundle(2))
        assert r2.ratio == pytest.approx(r1.ratio, rel=1e-12)

    def test_mean_inequality_battery(self):
        rng = np.random.default_rng(61)
        for k in range(30):
            euler = 1 + k % 3
            bundle = bw.BWBundle(euler)
            density = bw.random_positive_density(rng)
            rep = bw.bw_systolic_ratio(density, bundle)
            assert rep.ratio <= bundle.rho0 + 1e-9
            assert not rep.is_zoll_equality
            # the literal mean inequality behind the bound
            mean_sq = bw.bw_contact_volume(density, bundle) / euler
            assert rep.tmin ** 2 <= mean_sq + 1e-9

    def test_equality_flag_requires_constancy(self):
        assert bw.DensityOnBase.constant(0.3).is_constant()
        assert not tilted(1e-6).is_constant()

    def test_positive_required(self):
        with pytest.raises(ValueError):
            tilted(1.5)

    def test_euler_validation(self):
        with pytest.raises(ValueError):
            bw.BWBundle(0)


class TestCriticalFibers:
    def test_tilted_critical_fibers_near_poles(self):
        fibers = bw.grid_critical_fibers(tilted(0.2), rtol=1e-9)
        thetas = np.array([theta for theta, _ in fibers])
        assert np.all((thetas < 0.3) | (thetas > math.pi - 0.3))
        assert np.any(thetas < 0.3) and np.any(thetas > math.pi - 0.3)

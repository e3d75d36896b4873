import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from systolab import convex as cx


def shoelace(points):
    points = np.asarray(points, dtype=float)
    hull = ConvexHull(points)
    ordered = points[hull.vertices]
    x, y = ordered[:, 0], ordered[:, 1]
    return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def vertex_sets_close(a, b, tol=1e-10):
    a = np.asarray(a)
    b = np.asarray(b)
    d_ab = max(np.min(np.linalg.norm(b - v, axis=1)) for v in a)
    d_ba = max(np.min(np.linalg.norm(a - v, axis=1)) for v in b)
    return max(d_ab, d_ba) < tol


def regular_polygon(n_sides, radius=1.0, offset=0.0):
    angles = offset + 2.0 * np.pi * np.arange(n_sides) / n_sides
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


class TestPolar:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cube_polar_is_cross_polytope(self, n):
        pol = cx.polar(cx.PolytopeV.cube(n))
        assert vertex_sets_close(pol.vertices, cx.PolytopeV.cross_polytope(n).vertices)

    def test_hexagon_closed_form(self):
        hexagon = cx.PolytopeV(regular_polygon(6), symmetric=True)
        pol = cx.polar(hexagon)
        # polar of the regular hexagon: rotated by 30 degrees, radius 2/sqrt(3)
        expected = regular_polygon(6, radius=2.0 / math.sqrt(3.0),
                                   offset=math.pi / 6.0)
        assert vertex_sets_close(pol.vertices, expected)

    def test_bipolar_identity(self):
        rng = np.random.default_rng(41)
        for dim in (2, 3, 4):
            for _ in range(10):
                poly = cx.random_symmetric_polytope(rng, dim)
                hull_vertices = poly.vertices[ConvexHull(poly.vertices).vertices]
                double = cx.polar(cx.polar(poly))
                assert vertex_sets_close(double.vertices, hull_vertices, tol=1e-9)

    def test_origin_not_interior_rejected(self):
        shifted = cx.PolytopeV(regular_polygon(4) + np.array([2.0, 0.0]))
        with pytest.raises(ValueError, match="witness"):
            cx.polar(shifted)


class TestVolume:
    def test_square(self):
        assert cx.volume(cx.PolytopeV.cube(2)) == pytest.approx(4.0, abs=1e-14)

    def test_cross_polytope_3d(self):
        # closed form 2^n / n!
        assert cx.volume(cx.PolytopeV.cross_polytope(3)) == pytest.approx(
            4.0 / 3.0, rel=1e-14)

    def test_random_polygons_match_shoelace(self):
        rng = np.random.default_rng(43)
        for _ in range(25):
            pts = rng.normal(size=(12, 2))
            poly = cx.PolytopeV(pts)
            assert cx.volume(poly) == pytest.approx(shoelace(pts), rel=1e-12)

    def test_matches_qhull_in_3d(self):
        rng = np.random.default_rng(44)
        pts = rng.normal(size=(30, 3))
        assert cx.volume(cx.PolytopeV(pts)) == pytest.approx(
            ConvexHull(pts).volume, rel=1e-12)

    def test_degenerate_rejected(self):
        flat = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
        with pytest.raises(ValueError):
            cx.PolytopeV(flat)


class TestMahler:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_cube_value(self, n):
        expect = 4.0 ** n / math.factorial(n)
        assert cx.mahler_volume(cx.PolytopeV.cube(n)) == pytest.approx(
            expect, rel=1e-12)

    def test_polygon_approaches_disc_value_from_below(self):
        # regular N-gon: V = N^2 sin^2(pi/N) -> pi^2 from below
        n_sides = 64
        poly = cx.PolytopeV(regular_polygon(n_sides), symmetric=True)
        value = cx.mahler_volume(poly)
        closed_form = n_sides ** 2 * math.sin(math.pi / n_sides) ** 2
        assert value == pytest.approx(closed_form, rel=1e-10)
        assert value < math.pi ** 2
        assert value > 0.999 * math.pi ** 2

    def test_shear_invariance(self):
        square = cx.PolytopeV.cube(2)
        shear = np.array([[1.0, 0.7], [0.0, 1.0]])  # det 1
        sheared = cx.PolytopeV(square.vertices @ shear.T, symmetric=True)
        assert cx.mahler_volume(sheared) == pytest.approx(
            cx.mahler_volume(square), rel=1e-10)

    def test_linear_invariance_random(self):
        rng = np.random.default_rng(47)
        for dim in (2, 3):
            poly = cx.random_symmetric_polytope(rng, dim)
            base = cx.mahler_volume(poly)
            for _ in range(5):
                t = rng.normal(size=(dim, dim))
                if abs(np.linalg.det(t)) < 0.3:
                    continue
                mapped = cx.PolytopeV(poly.vertices @ t.T, symmetric=True)
                assert cx.mahler_volume(mapped) == pytest.approx(base, rel=1e-9)

    def test_octahedron_hanner_value(self):
        report = cx.santalo_mahler_check(cx.PolytopeV.cross_polytope(3))
        assert report.value == pytest.approx(32.0 / 3.0, rel=1e-12)
        assert report.value == pytest.approx(report.lower, rel=1e-12)
        assert report.passed

    def test_square_report(self):
        report = cx.santalo_mahler_check(cx.PolytopeV.cube(2))
        assert report.value == pytest.approx(8.0, abs=1e-12)
        assert report.lower == 8.0
        assert report.upper == pytest.approx(math.pi ** 2)
        assert report.passed

    def test_sandwich_battery(self):
        rng = np.random.default_rng(48)
        for dim in (2, 3):
            for _ in range(25):
                report = cx.santalo_mahler_check(
                    cx.random_symmetric_polytope(rng, dim))
                assert report.passed
                assert report.value <= report.upper


class TestMVEE:
    def test_cube_gives_circumscribed_ball(self):
        for n in (2, 3, 4):
            ell = cx.mvee(cx.PolytopeV.cube(n).vertices, tol=1e-9, symmetric=True)
            assert np.allclose(ell.shape, np.eye(n) / n, atol=1e-7)

    def test_recovers_generating_ellipsoid(self):
        rng = np.random.default_rng(51)
        a = np.array([[2.0, 0.4, 0.0], [0.4, 1.0, -0.2], [0.0, -0.2, 0.5]])
        chol = np.linalg.cholesky(np.linalg.inv(a))
        sphere = rng.normal(size=(400, 3))
        sphere /= np.linalg.norm(sphere, axis=1)[:, None]
        surface_points = sphere @ chol.T
        ell = cx.mvee(surface_points, tol=1e-9, symmetric=True)
        assert np.allclose(ell.shape, a, atol=1e-5)
        assert ell.volume() <= cx.EllipsoidBody(np.zeros(3), a).volume() * (1 + 1e-5)

    def test_containment_and_competitors(self):
        rng = np.random.default_rng(52)
        points = rng.normal(size=(60, 3))
        tol = 1e-7
        ell = cx.mvee(points, tol=tol)
        assert np.max(ell.level(points)) <= 1.0 + tol
        # no random containing ellipsoid is smaller than (1 + n tol) optimal
        for _ in range(100):
            raw = rng.normal(size=(3, 3))
            candidate_shape = raw @ raw.T + 0.05 * np.eye(3)
            center = rng.normal(scale=0.1, size=3)
            body = cx.EllipsoidBody(center, candidate_shape)
            worst = float(np.max(body.level(points)))
            competitor = cx.EllipsoidBody(center, candidate_shape / worst)
            assert competitor.contains(points, tol=1e-12)
            assert ell.volume() <= competitor.volume() * (1.0 + 3 * tol)

    def test_offcenter_cloud(self):
        rng = np.random.default_rng(53)
        points = rng.normal(size=(50, 2)) + np.array([5.0, -3.0])
        ell = cx.mvee(points, tol=1e-8)
        assert np.max(ell.level(points)) <= 1.0 + 1e-8
        assert np.linalg.norm(ell.center - np.array([5.0, -3.0])) < 2.0

    def test_rank_deficient_rejected(self):
        line = np.column_stack([np.linspace(-1, 1, 10), np.zeros(10)])
        with pytest.raises(ValueError):
            cx.mvee(line)


class TestCoarseViterbo:
    def test_discretized_ball(self):
        rng = np.random.default_rng(54)
        pts = rng.normal(size=(200, 4))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        poly = cx.PolytopeV.symmetric_hull(pts)
        report = cx.coarse_viterbo_bound(poly)
        assert report.capacity_upper == pytest.approx(math.pi, rel=0.05)
        assert report.ratio_upper <= 64.0
        assert report.volume_ratio >= 1.0

    def test_cube_4d_closed_form(self):
        report = cx.coarse_viterbo_bound(cx.PolytopeV.cube(4))
        # enclosing ellipsoid is the ball of radius 2: volume pi^2/2 * 16
        assert report.mvee_volume == pytest.approx(8.0 * math.pi ** 2, rel=1e-5)
        assert report.volume_ratio == pytest.approx(math.pi ** 2 / 2.0, rel=1e-5)
        assert report.volume_ratio <= 64.0
        assert report.passed

    def test_random_battery(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            poly = cx.random_symmetric_polytope(rng, 4)
            report = cx.coarse_viterbo_bound(poly)
            assert report.passed
            assert report.volume_ratio <= 64.0
            assert report.capacity_upper > 0.0

    def test_odd_dimension_rejected(self):
        with pytest.raises(ValueError):
            cx.coarse_viterbo_bound(cx.PolytopeV.cross_polytope(3))

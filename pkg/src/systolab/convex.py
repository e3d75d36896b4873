"""Polar duality, Mahler volumes and minimum-volume enclosing ellipsoids.

Vertex-represented convex bodies in dimensions 2 to 4.  Polars are computed
by facet-vertex duality through the convex hull's half-space representation,
volumes by fan triangulation from an interior point, and enclosing
ellipsoids by the Khachiyan first-order scheme with Wolfe-Atwood away steps.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .symplectic import capacity_of_shape_matrix

MAX_DIM = 4


def unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class PolytopeV:
    """Convex polytope given by vertices (one per row)."""

    vertices: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", vertices)
        if vertices.ndim != 2:
            raise ValueError("vertices must be a 2-D array")
        n = vertices.shape[1]
        if not 2 <= n <= MAX_DIM:
            raise ValueError("supported ambient dimensions are 2..%d" % MAX_DIM)
        if vertices.shape[0] < n + 1:
            raise ValueError("too few vertices to span the space")
        if np.linalg.matrix_rank(vertices - vertices.mean(axis=0)) < n:
            raise ValueError("vertices do not affinely span the space")
        if self.symmetric and not _set_closed_under_negation(vertices):
            raise ValueError("symmetric flag set but vertex set != its negation")

    @property
    def dim(self):
        return self.vertices.shape[1]

    @classmethod
    def cube(cls, n, radius=1.0):
        corners = np.array(
            [[(1.0 if (k >> i) & 1 else -1.0) for i in range(n)] for k in range(2 ** n)]
        )
        return cls(radius * corners, symmetric=True)

    @classmethod
    def cross_polytope(cls, n, radius=1.0):
        eye = np.eye(n)
        return cls(radius * np.vstack([eye, -eye]), symmetric=True)

    @classmethod
    def symmetric_hull(cls, points):
        points = np.asarray(points, dtype=float)
        return cls(np.vstack([points, -points]), symmetric=True)


def _set_closed_under_negation(vertices, tol=1e-12):
    for v in vertices:
        if np.min(np.linalg.norm(vertices + v, axis=1)) > tol:
            return False
    return True


def _facet_inequalities(polytope):
    """Rows (a, b) with a . x <= b for all x, deduplicated.

    Triangulated facets of a non-simplicial polytope repeat their plane;
    rounding is used only as a grouping key, the returned equations keep
    full precision.
    """
    hull = ConvexHull(polytope.vertices)
    _, index = np.unique(np.round(hull.equations, 9), axis=0, return_index=True)
    eqs = hull.equations[index]
    return eqs[:, :-1], -eqs[:, -1]


def polar(polytope, tol=1e-12):
    """Polar body via facet-vertex duality.

    Each facet {a . x = b} with b > 0 contributes the vertex a / b; the
    origin must be interior, otherwise the offending outward direction is
    reported.
    """
    normals, offsets = _facet_inequalities(polytope)
    scale = float(np.max(np.abs(polytope.vertices)))
    bad = offsets <= tol * scale
    if np.any(bad):
        raise ValueError(
            "origin is not interior; witness direction %s"
            % np.array2string(normals[np.argmax(bad)], precision=6)
        )
    return PolytopeV(normals / offsets[:, None], symmetric=polytope.symmetric)


def volume(polytope):
    """Exact volume by fan triangulation from the vertex centroid."""
    vertices = polytope.vertices
    n = polytope.dim
    center = vertices.mean(axis=0)
    hull = ConvexHull(vertices)
    total = 0.0
    for simplex in hull.simplices:
        total += abs(np.linalg.det(vertices[simplex] - center))
    return total / math.factorial(n)


def mahler_volume(polytope):
    """vol(P) * vol(polar(P)); linearly invariant for symmetric bodies."""
    if not polytope.symmetric:
        raise ValueError("Mahler volume is defined here for symmetric bodies")
    return volume(polytope) * volume(polar(polytope))


@dataclass(frozen=True)
class MahlerReport:
    value: float
    lower: float
    upper: float
    passed: bool


def santalo_mahler_check(polytope, tol=1e-9):
    """Sandwich 4^n/n! <= V <= vol(B^n)^2 for symmetric bodies in R^2, R^3.

    The lower bound is the cube value (proved in these dimensions); the
    upper is the round-body maximum, strict for polytopes.
    """
    n = polytope.dim
    if n not in (2, 3):
        raise ValueError("the proved sandwich is implemented for n in {2, 3}")
    value = mahler_volume(polytope)
    lower = 4.0 ** n / math.factorial(n)
    upper = unit_ball_volume(n) ** 2
    passed = value >= lower * (1.0 - tol) and value <= upper * (1.0 + tol)
    return MahlerReport(value=value, lower=lower, upper=upper, passed=passed)


@dataclass(frozen=True)
class EllipsoidBody:
    """{ x : (x - center)^T shape (x - center) <= 1 } with shape SPD."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        shape = np.asarray(self.shape, dtype=float)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", shape)
        if np.max(np.abs(shape - shape.T)) > 1e-10 * np.max(np.abs(shape)):
            raise ValueError("shape matrix must be symmetric")
        if np.any(np.linalg.eigvalsh(shape) <= 0.0):
            raise ValueError("shape matrix must be positive definite")

    def level(self, points):
        d = np.asarray(points, dtype=float) - self.center
        return np.einsum("...i,ij,...j->...", d, self.shape, d)

    def contains(self, points, tol=0.0):
        return np.all(self.level(points) <= 1.0 + tol)

    def volume(self):
        n = self.shape.shape[0]
        return unit_ball_volume(n) / math.sqrt(float(np.linalg.det(self.shape)))


def mvee(points, tol=1e-7, symmetric=False, max_iter=1_000_000):
    """Minimum-volume enclosing ellipsoid (John-Loewner ellipsoid).

    Khachiyan's barycentric-coordinate ascent with Wolfe-Atwood away steps;
    stops when the relative optimality gap is below ``tol``, so the volume
    is within (1 + n*tol) of optimal.  With ``symmetric`` the center is
    pinned at the origin (valid for centrally symmetric point sets).  The
    returned ellipsoid is post-scaled so every input point satisfies the
    ellipsoid inequality up to rounding.

    Parameters
    ----------
    points : (N, n) array
        Points to enclose; must affinely span R^n.
    tol : float
        Relative duality-gap target.
    """
    points = np.asarray(points, dtype=float)
    n_points, dim = points.shape
    if np.linalg.matrix_rank(points - (0.0 if symmetric else points.mean(axis=0))) < dim:
        raise ValueError("points do not span the space")
    lifted = points if symmetric else np.hstack([points, np.ones((n_points, 1))])
    d = lifted.shape[1]
    u = np.full(n_points, 1.0 / n_points)
    for _ in range(max_iter):
        v = lifted.T @ (u[:, None] * lifted)
        m = np.einsum("ij,jk,ik->i", lifted, np.linalg.inv(v), lifted)
        j_add = int(np.argmax(m))
        support = u > 1e-12
        j_away = int(np.argmin(np.where(support, m, np.inf)))
        gap_add = m[j_add] / d - 1.0
        gap_away = 1.0 - m[j_away] / d
        if max(gap_add, gap_away) <= tol:
            break
        if gap_add >= gap_away:
            j, kappa = j_add, m[j_add]
            step = (kappa - d) / (d * (kappa - 1.0))
        else:
            j, kappa = j_away, m[j_away]
            drop = -u[j] / max(1.0 - u[j], 1e-15)
            if kappa > 1.0:
                # optimal away step, clamped so u_j stays nonnegative
                step = max((kappa - d) / (d * (kappa - 1.0)), drop)
            else:
                step = drop
        u *= 1.0 - step
        u[j] += step
        u = np.maximum(u, 0.0)
    center = np.zeros(dim) if symmetric else points.T @ u
    cov = points.T @ (u[:, None] * points) - np.outer(center, center)
    shape = np.linalg.inv(cov) / dim
    # guarantee containment: inflate by the worst violation
    level = np.einsum("ij,jk,ik->i", points - center, shape, points - center)
    worst = float(np.max(level))
    if worst > 1.0:
        shape = shape / worst
    return EllipsoidBody(center=center, shape=shape)


@dataclass(frozen=True)
class CoarseViterboReport:
    """Capacity-volume chain through the enclosing ellipsoid."""

    capacity_upper: float
    ratio_upper: float
    mvee_volume: float
    body_volume: float
    volume_ratio: float
    volume_ratio_bound: float
    passed: bool


def coarse_viterbo_bound(polytope, tol=1e-7):
    """Bound the capacity-volume ratio of a symmetric body in R^{2m}.

    Encloses the body in its John-Loewner ellipsoid E, takes the ellipsoid
    capacity c_upper = pi * a_1(E) (via the symplectic normal form of E) as
    an upper proxy for any capacity of the body, and reports
    c_upper^m / (m! vol(P)) together with the volume ratio vol(E)/vol(P)
    tested against the (4m)^m bound.
    """
    if not polytope.symmetric:
        raise ValueError("the chain is stated for centrally symmetric bodies")
    n = polytope.dim
    if n % 2 or n > MAX_DIM:
        raise ValueError("even dimension 2m in {2, 4} required")
    m = n // 2
    ellipsoid = mvee(polytope.vertices, tol=tol, symmetric=True)
    c_upper = capacity_of_shape_matrix(ellipsoid.shape)
    vol_body = volume(polytope)
    vol_ell = ellipsoid.volume()
    bound = float((4 * m) ** m)
    volume_ratio = vol_ell / vol_body
    ratio_upper = c_upper ** m / (math.factorial(m) * vol_body)
    return CoarseViterboReport(
        capacity_upper=c_upper,
        ratio_upper=ratio_upper,
        mvee_volume=vol_ell,
        body_volume=vol_body,
        volume_ratio=volume_ratio,
        volume_ratio_bound=bound,
        passed=(volume_ratio <= bound * (1.0 + 1e-9)) and
               (ratio_upper <= bound * (1.0 + 1e-9)),
    )


def random_symmetric_polytope(rng, dim, n_pairs=None):
    """Symmetric hull of random unit vectors (and their negatives)."""
    if n_pairs is None:
        n_pairs = {2: 5, 3: 8, 4: 15}[dim]
    while True:
        raw = rng.normal(size=(n_pairs, dim))
        raw /= np.linalg.norm(raw, axis=1)[:, None]
        try:
            return PolytopeV.symmetric_hull(raw)
        except ValueError:
            continue

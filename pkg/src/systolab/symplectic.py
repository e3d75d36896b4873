"""Linear symplectic algebra, ellipsoid capacities and contact volumes.

Coordinates are ordered (q_1..q_m, p_1..p_m).  The symplectic form is
represented by the block matrix J = [[0, -I], [I, 0]], i.e.
omega(u, v) = <J u, v>, and Hamiltonian fields are X_H = J grad(H).  With
this convention the Reeb flow of the unit sphere rotates every (q_j, p_j)
pair with angular speed 2 in the counterclockwise direction, i.e.
z -> exp(2*i*t) * z in complex notation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .quadrature import HopfGridS3


def standard_j(m):
    """Block matrix of the standard symplectic form in (q, p) order."""
    j = np.zeros((2 * m, 2 * m))
    j[:m, m:] = -np.eye(m)
    j[m:, :m] = np.eye(m)
    return j


@dataclass(frozen=True)
class SymplecticSpace:
    """R^{2m} with coordinates (q_1..q_m, p_1..p_m) and the standard form."""

    m: int

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError("half-dimension must be a positive integer")

    @property
    def dim(self):
        return 2 * self.m

    @property
    def j(self):
        return standard_j(self.m)

    def form(self, u, v):
        """omega(u, v) = <Ju, v>."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return float(self.j @ u @ v)


def is_symplectic(matrix, tol=1e-9):
    """(flag, residual): residual is the max-norm of M^T J M - J."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise ValueError("matrix must be square of even dimension")
    j = standard_j(matrix.shape[0] // 2)
    residual = float(np.max(np.abs(matrix.T @ j @ matrix - j)))
    return residual <= tol, residual


@dataclass(frozen=True)
class EllipsoidSpec:
    """E(a_1, ..., a_m) = { sum (q_i^2 + p_i^2) / a_i <= 1 }, a sorted ascending."""

    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 1 or any(x <= 0.0 for x in a):
            raise ValueError("semi-axis parameters must be positive")
        if any(a[i] > a[i + 1] for i in range(len(a) - 1)):
            raise ValueError("semi-axis parameters must be sorted ascending")

    @property
    def m(self):
        return len(self.a)


def capacity_ellipsoid(spec):
    """Common value of all symplectic capacities on the ellipsoid: pi * a_1."""
    return math.pi * spec.a[0]


def volume_ellipsoid(spec):
    """Euclidean volume pi^m * prod(a_i) / m!."""
    m = spec.m
    return math.pi ** m * math.prod(spec.a) / math.factorial(m)


def viterbo_ratio_ellipsoid(spec):
    """capacity^m / (m! * volume) = a_1^m / prod(a_i), at most 1."""
    return spec.a[0] ** spec.m / math.prod(spec.a)


def oscillator_normal_form(spec):
    """Symplectic matrix mapping the oscillator sublevel onto the ellipsoid.

    The sublevel { |p|^2/2 + sum q_i^2 / (2 a_i^2) <= 1/2 } of the harmonic
    oscillator maps onto E(a_1, ..., a_m) under the block scaling
    (q_i, p_i) -> (q_i / sqrt(a_i), p_i * sqrt(a_i)).
    """
    a = np.asarray(spec.a)
    return np.diag(np.concatenate([1.0 / np.sqrt(a), np.sqrt(a)]))


def oscillator_level_value(spec, z):
    """Twice the oscillator energy |p|^2 + sum q_i^2 / a_i^2 at z = (q, p)."""
    m = spec.m
    z = np.asarray(z, dtype=float)
    q, p = z[..., :m], z[..., m:]
    return np.sum(p * p, axis=-1) + np.sum(q * q / np.asarray(spec.a) ** 2, axis=-1)


def ellipsoid_level_value(spec, z):
    """sum (q_i^2 + p_i^2) / a_i at z; the ellipsoid is the sublevel <= 1."""
    m = spec.m
    z = np.asarray(z, dtype=float)
    a = np.asarray(spec.a)
    return np.sum((z[..., :m] ** 2 + z[..., m:] ** 2) / a, axis=-1)


def hopf_flow(z, t):
    """Reeb flow of the round contact sphere: z -> exp(2it) z pairwise.

    Rotates every (q_j, p_j) plane by the angle 2t; every orbit has period
    pi.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] % 2:
        raise ValueError("points live in even-dimensional space")
    m = z.shape[-1] // 2
    q, p = z[..., :m], z[..., m:]
    c, s = math.cos(2.0 * t), math.sin(2.0 * t)
    return np.concatenate([c * q - s * p, s * q + c * p], axis=-1)


def integrate_reeb_sphere(z0, t_final, rtol=1e-12):
    """Numerically integrate the Reeb field 2 * X_H of H = |z|^2 / 2.

    Independent check of ``hopf_flow``: X_H = J grad(H) = J z.
    """
    z0 = np.asarray(z0, dtype=float)
    j = standard_j(len(z0) // 2)

    def rhs(_t, z):
        return 2.0 * (j @ z)

    sol = solve_ivp(rhs, (0.0, t_final), z0, method="DOP853",
                    rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise RuntimeError("Reeb integration failed: %s" % sol.message)
    return sol.y[:, -1]


def shadow_area_linear(matrix):
    """Exact area of the projection of M(B^{2m}) onto the (q_1, p_1) plane.

    The image of the unit ball is { x : x^T (M M^T)^{-1} x <= 1 }; its
    shadow is the ellipse whose quadratic form is the Schur complement of
    the complementary block.  For symplectic M the area is at least pi.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.ndim != 2 or matrix.shape[1] != n or n % 2:
        raise ValueError("matrix must be square of even dimension")
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values[-1] <= 1e-12 * singular_values[0]:
        raise ValueError("matrix is singular")
    m = n // 2
    q = np.linalg.inv(matrix @ matrix.T)
    keep = [0, m]
    rest = [i for i in range(n) if i not in keep]
    if rest:
        q_ii = q[np.ix_(keep, keep)]
        q_ib = q[np.ix_(keep, rest)]
        q_bb = q[np.ix_(rest, rest)]
        schur = q_ii - q_ib @ np.linalg.solve(q_bb, q_ib.T)
    else:
        schur = q
    det = float(np.linalg.det(schur))
    if det <= 0.0:
        raise ValueError("projection form is not positive definite")
    return math.pi / math.sqrt(det)


def random_symplectic(m, rng, n_factors=10, shear_scale=0.5):
    """Random element of Sp(2m) as a product of symplectic transvections.

    Each factor is x -> x + c * omega(x, v) v for a random unit vector v,
    which is exactly symplectic; products of a few factors mix all
    coordinate planes.
    """
    n = 2 * m
    j = standard_j(m)
    matrix = np.eye(n)
    for _ in range(n_factors):
        v = rng.normal(size=n)
        v /= np.linalg.norm(v)
        c = rng.normal(scale=shear_scale)
        matrix = (np.eye(n) + c * np.outer(v, v) @ j) @ matrix
    return matrix


def symplectic_spectrum(shape_matrix):
    """Williamson spectrum d_1 <= ... <= d_m of a positive definite matrix.

    The eigenvalues of J A come in pairs +- i d_k; a symplectic change of
    basis brings the ellipsoid {x^T A x <= 1} to E(1/d_m, ..., 1/d_1).
    """
    shape_matrix = np.asarray(shape_matrix, dtype=float)
    n = shape_matrix.shape[0]
    if n % 2:
        raise ValueError("even dimension required")
    eigs = np.linalg.eigvals(standard_j(n // 2) @ shape_matrix)
    if np.max(np.abs(eigs.real)) > 1e-8 * np.max(np.abs(eigs.imag)):
        raise ValueError("matrix is not positive definite enough for Williamson")
    d = np.sort(np.abs(eigs.imag))
    return d[::2]


def capacity_of_shape_matrix(shape_matrix):
    """Capacity pi * a_1 of the ellipsoid {x^T A x <= 1} via Williamson."""
    d = symplectic_spectrum(shape_matrix)
    return math.pi / float(d[-1])


@dataclass(frozen=True)
class RadialHypersurfaceS3:
    """Star-shaped hypersurface in R^4 given by a radial function on S^3.

    ``values`` samples psi on a Hopf-coordinate product grid; ``fn``, when
    given, evaluates psi at arbitrary unit 4-vectors (used by the
    Monte-Carlo volume oracle).
    """

    values: np.ndarray
    grid: HopfGridS3 = field(repr=False)
    fn: object = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.weights.shape:
            raise ValueError("psi grid does not match the quadrature grid")
        if not np.all(values > 0.0):
            raise ValueError("radial function must be positive")

    @classmethod
    def from_function(cls, fn, n_eta=32, n_xi=64):
        grid = HopfGridS3(n_eta=n_eta, n_xi=n_xi)
        values = np.apply_along_axis(fn, -1, grid.points()) \
            if not _vectorized(fn, grid) else fn(grid.points())
        return cls(values=np.asarray(values, dtype=float), grid=grid, fn=fn)

    @classmethod
    def constant(cls, value=1.0, n_eta=32, n_xi=64):
        grid = HopfGridS3(n_eta=n_eta, n_xi=n_xi)
        return cls(values=np.full(grid.weights.shape, float(value)), grid=grid,
                   fn=lambda z: np.full(np.asarray(z).shape[:-1], float(value)))


def _vectorized(fn, grid):
    try:
        out = fn(grid.points()[:2, :2, :2])
        return np.asarray(out).shape == (2, 2, 2)
    except Exception:
        return False


def contact_volume_radial_s3(surface):
    """Contact volume of S_psi: integral of psi^4 against the Reeb density.

    The density of the contact volume form on the unit S^3 is half the
    Euclidean surface measure (total mass pi^2), and scaling by the radial
    function multiplies it by psi^4.  By Stokes, the result equals
    2 * (Euclidean volume of the region enclosed by S_psi).
    """
    return 0.5 * surface.grid.integrate(surface.values ** 4)


def enclosed_volume_mc(surface, n_samples=1_000_000, seed=0, chunk=250_000):
    """Monte-Carlo Euclidean volume of { r * z : z in S^3, r <= psi(z) }.

    Samples uniformly in a bounding box; returns (estimate, standard_error).
    Requires the analytic form of psi.
    """
    if surface.fn is None:
        raise ValueError("Monte-Carlo oracle needs the analytic radial function")
    radius = float(np.max(surface.values)) * 1.05
    box = (2.0 * radius) ** 4
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        x = rng.uniform(-radius, radius, size=(k, 4))
        r = np.linalg.norm(x, axis=1)
        good = r > 1e-12
        psi = np.asarray(surface.fn(x[good] / r[good, None]))
        hits += int(np.sum(r[good] <= psi))
        done += k
    p = hits / n_samples
    est = box * p
    err = box * math.sqrt(max(p * (1.0 - p), 1e-300) / n_samples)
    return est, err

"""Systolic ratio of circle-invariant contact forms over the two-sphere.

A principal circle bundle over S^2 with Euler number e carries a connection
contact form alpha_0 whose Reeb orbits are the fibers, normalized to have
minimal period 1; its systolic ratio is 1/e.  Rescaling alpha_0 by a
positive function psi of the base keeps exactly the fibers over critical
points of psi as Reeb orbits, with period psi(q).  The module computes the
resulting period bound min(psi), the contact volume = integral of psi^2
against the curvature form, and certifies

    (min psi)^2 <= (1/e) * integral(psi^2 kappa_0),

with equality exactly for constant psi.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .quadrature import SphereGrid, real_sph_harm

CONSTANCY_RTOL = 1e-10


@dataclass(frozen=True)
class BWBundle:
    """Circle bundle over S^2 with positive Euler number.

    The curvature form is normalized to (euler / 4pi) times the round area
    form, so its total mass is the Euler number and the reference systolic
    ratio is rho0 = 1/euler.
    """

    euler: int

    def __post_init__(self):
        if not (isinstance(self.euler, (int, np.integer)) and self.euler >= 1):
            raise ValueError("Euler number must be a positive integer")

    @property
    def rho0(self):
        return 1.0 / self.euler


@dataclass(frozen=True)
class DensityOnBase:
    """Positive function psi on S^2, sampled on a quadrature grid.

    ``harmonics`` optionally keeps the analytic form as a constant offset
    plus real spherical-harmonic terms [(l, m, coefficient), ...]; it is
    used to refine the grid minimum.
    """

    values: np.ndarray
    grid: SphereGrid = field(repr=False)
    harmonics: tuple = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n_theta, self.grid.n_phi):
            raise ValueError("psi grid does not match the quadrature grid")
        if not np.all(values > 0.0):
            raise ValueError("density must be positive everywhere")

    @classmethod
    def from_harmonics(cls, constant, terms=(), n_theta=32, n_phi=64):
        """Build from a constant offset plus real spherical-harmonic terms."""
        grid = SphereGrid(n_theta=n_theta, n_phi=n_phi)
        values = np.full((grid.n_theta, grid.n_phi), float(constant))
        terms = tuple((int(l), int(m), float(c)) for (l, m, c) in terms)
        for l, m, c in terms:
            values += c * real_sph_harm(l, m, grid.theta_grid, grid.phi_grid)
        return cls(values=values, grid=grid, harmonics=(float(constant), terms))

    @classmethod
    def constant(cls, value=1.0, n_theta=32, n_phi=64):
        return cls.from_harmonics(value, (), n_theta=n_theta, n_phi=n_phi)

    def evaluate(self, theta, phi):
        """Analytic evaluation; only available with the harmonic form."""
        if self.harmonics is None:
            raise ValueError("no analytic form attached to this density")
        constant, terms = self.harmonics
        out = np.full(np.broadcast(theta, phi).shape, constant, dtype=float)
        for l, m, c in terms:
            out += c * real_sph_harm(l, m, theta, phi)
        return out

    def is_constant(self, rtol=CONSTANCY_RTOL):
        vmax = float(np.max(self.values))
        return float(np.max(self.values) - np.min(self.values)) < rtol * vmax


def min_of_density(density):
    """Minimum of psi and its location (theta, phi).

    Starts from the grid minimum; when the analytic form is available the
    location is refined by unconstrained minimization of psi(x/|x|) in
    ambient coordinates (robust at the poles, which the grid omits).
    """
    values = density.values
    i, j = np.unravel_index(np.argmin(values), values.shape)
    best_value = float(values[i, j])
    best_theta = float(density.grid.theta[i])
    best_phi = float(density.grid.phi[j])
    if density.harmonics is None:
        return best_value, (best_theta, best_phi)

    def ambient(x):
        r = np.linalg.norm(x)
        theta = math.acos(min(max(x[2] / r, -1.0), 1.0))
        phi = math.atan2(x[1], x[0])
        return float(density.evaluate(theta, phi))

    x0 = np.array([
        math.sin(best_theta) * math.cos(best_phi),
        math.sin(best_theta) * math.sin(best_phi),
        math.cos(best_theta),
    ])
    res = minimize(ambient, x0, method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-13, "maxiter": 600})
    if res.fun < best_value:
        x = res.x / np.linalg.norm(res.x)
        best_value = float(res.fun)
        best_theta = math.acos(min(max(x[2], -1.0), 1.0))
        best_phi = math.atan2(x[1], x[0]) % (2.0 * math.pi)
    return best_value, (best_theta, best_phi)


def tmin_upper_bound(density):
    """min(psi): the period of the Reeb orbit over a minimum of psi.

    Fibers persist as Reeb orbits exactly over critical points of psi, so
    the minimal period is bounded above by the smallest critical value.
    """
    return min_of_density(density)[0]


def bw_contact_volume(density, bundle):
    """Contact volume: integral of psi^2 against the curvature form."""
    scale = bundle.euler / (4.0 * math.pi)
    return scale * density.grid.integrate(density.values ** 2)


def grid_critical_fibers(density, rtol=1e-6):
    """Grid points where psi is locally extremal (candidate Reeb fibers).

    Compares each sample against its four grid neighbors (periodic in phi);
    degenerate critical sets are reported without classification.
    """
    v = density.values
    east = np.roll(v, 1, axis=1)
    west = np.roll(v, -1, axis=1)
    # clamp-pad across the polar edges: boundary rows use one-sided tests
    north = np.vstack([v[:1], v[:-1]])
    south = np.vstack([v[1:], v[-1:]])
    scale = rtol * float(np.max(np.abs(v)))
    is_min = (v <= north + scale) & (v <= south + scale) \
        & (v <= east + scale) & (v <= west + scale)
    is_max = (v >= north - scale) & (v >= south - scale) \
        & (v >= east - scale) & (v >= west - scale)
    idx = np.argwhere(is_min | is_max)
    return [(float(density.grid.theta[i]), float(density.grid.phi[j]))
            for i, j in idx]


@dataclass(frozen=True)
class BWRatioReport:
    ratio: float
    is_zoll_equality: bool
    tmin: float
    volume: float
    rho0: float


def bw_systolic_ratio(density, bundle):
    """(min psi)^2 / contact volume, certified against rho0 = 1/euler.

    The mean inequality forces the ratio to be at most rho0, with equality
    exactly when psi is constant (the rescaled form is then Zoll).
    """
    tmin = tmin_upper_bound(density)
    volume = bw_contact_volume(density, bundle)
    ratio = tmin ** 2 / volume
    return BWRatioReport(
        ratio=ratio,
        is_zoll_equality=density.is_constant(),
        tmin=tmin,
        volume=volume,
        rho0=bundle.rho0,
    )


def random_positive_density(rng, max_l=3, n_theta=32, n_phi=64, amplitude=0.5):
    """Random positive density: constant 1 plus bounded low-order harmonics."""
    terms = []
    total = 0.0
    for l in range(1, max_l + 1):
        for m in range(-l, l + 1):
            c = rng.normal()
            terms.append([l, m, c])
            total += abs(c) * 0.75  # sup |Y_lm| <= 0.75 for l <= 3
    scale = amplitude * rng.uniform(0.2, 1.0) / total
    terms = [(l, m, c * scale) for l, m, c in terms]
    return DensityOnBase.from_harmonics(1.0, terms, n_theta=n_theta, n_phi=n_phi)

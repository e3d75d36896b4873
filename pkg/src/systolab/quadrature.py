"""Quadrature grids shared by the sphere-based modules.

Product rules built from Gauss-Legendre nodes in the "cosine" variable and
uniform (periodic trapezoid) nodes in the angles.  For integrands that are
polynomials in the cosine variable these rules are exact up to rounding.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.special import lpmv


def gauss_legendre(n):
    """Nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def gauss_chebyshev(n):
    """Nodes and weights for integrals of the form int_-1^1 f(u)/sqrt(1-u^2) du.

    Exact for polynomials f of degree <= 2n - 1.
    """
    k = np.arange(1, n + 1)
    nodes = np.cos((2.0 * k - 1.0) * np.pi / (2.0 * n))
    weights = np.full(n, np.pi / n)
    return nodes, weights


class SphereGrid:
    """Quadrature grid on the unit two-sphere.

    Gauss-Legendre in cos(theta) (n_theta nodes) times uniform phi
    (n_phi nodes).  ``integrate(values)`` returns the integral against the
    round area form sin(theta) dtheta dphi, total mass 4*pi.
    """

    def __init__(self, n_theta=32, n_phi=64):
        if n_theta < 4 or n_phi < 4:
            raise ValueError("sphere grid too coarse")
        v, w = gauss_legendre(n_theta)
        self.cos_theta = v
        self.theta = np.arccos(v)
        self.phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
        self.n_theta = n_theta
        self.n_phi = n_phi
        # weight grid: GL weight in cos(theta) times 2*pi/n_phi
        self.weights = np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi))
        self.theta_grid, self.phi_grid = np.meshgrid(self.theta, self.phi, indexing="ij")

    def integrate(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_theta, self.n_phi):
            raise ValueError(
                "expected values of shape %s, got %s"
                % ((self.n_theta, self.n_phi), values.shape)
            )
        return float(np.sum(values * self.weights))

    def sample(self, fn):
        """Evaluate fn(theta, phi) on the grid."""
        return np.asarray(fn(self.theta_grid, self.phi_grid), dtype=float)


class HopfGridS3:
    """Quadrature grid on the unit three-sphere in Hopf coordinates.

    Points are z = (cos(eta) e^{i xi1}, sin(eta) e^{i xi2}) with
    eta in (0, pi/2), xi1, xi2 in [0, 2*pi).  Gauss-Legendre in cos(2*eta),
    uniform in both angles.  ``integrate`` is against the Euclidean surface
    measure (total mass 2*pi^2).
    """

    def __init__(self, n_eta=32, n_xi=64):
        if n_eta < 4 or n_xi < 8:
            raise ValueError("S3 grid too coarse")
        v, w = gauss_legendre(n_eta)  # v = cos(2*eta)
        self.cos_2eta = v
        self.eta = 0.5 * np.arccos(v)
        self.xi = np.arange(n_xi) * (2.0 * np.pi / n_xi)
        self.n_eta = n_eta
        self.n_xi = n_xi
        # dsigma = cos(eta) sin(eta) deta dxi1 dxi2 = -(1/4) dcos(2eta) dxi1 dxi2
        dxi = 2.0 * np.pi / n_xi
        self.weights = (w / 4.0)[:, None, None] * np.full((n_xi, n_xi), dxi * dxi)

    def points(self):
        """Grid points as real 4-vectors (q1, q2, p1, p2), shape (ne, nx, nx, 4)."""
        eta = self.eta[:, None, None]
        xi1 = self.xi[None, :, None]
        xi2 = self.xi[None, None, :]
        q1 = np.cos(eta) * np.cos(xi1) + 0.0 * xi2
        p1 = np.cos(eta) * np.sin(xi1) + 0.0 * xi2
        q2 = np.sin(eta) * np.cos(xi2) + 0.0 * xi1
        p2 = np.sin(eta) * np.sin(xi2) + 0.0 * xi1
        return np.stack([q1, q2, p1, p2], axis=-1)

    def integrate(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != self.weights.shape:
            raise ValueError(
                "expected values of shape %s, got %s" % (self.weights.shape, values.shape)
            )
        return float(np.sum(values * self.weights))


@lru_cache(maxsize=None)
def _sph_norm(l, am):
    # sqrt((2l+1)/(4pi) * (l-|m|)!/(l+|m|)!)
    log_ratio = math.lgamma(l - am + 1) - math.lgamma(l + am + 1)
    return math.exp(0.5 * (math.log(2.0 * l + 1.0) - math.log(4.0 * math.pi)
                           + log_ratio))


def real_sph_harm(l, m, theta, phi):
    """Real spherical harmonic Y_{l,m}, orthonormal for the round measure.

    m > 0 pairs with cos(m phi), m < 0 with sin(|m| phi).  Built from the
    associated Legendre functions, so it avoids any dependence on the
    complex-harmonic sign conventions.
    """
    if abs(m) > l:
        raise ValueError("need |m| <= l")
    am = abs(m)
    norm = _sph_norm(l, am)  # Condon-Shortley sign lives in lpmv
    p = lpmv(am, l, np.cos(theta))
    if m == 0:
        return norm * p
    if m > 0:
        return math.sqrt(2.0) * norm * p * np.cos(am * np.asarray(phi))
    return math.sqrt(2.0) * norm * p * np.sin(am * np.asarray(phi))

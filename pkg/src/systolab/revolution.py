"""Geodesic flow on metrics of revolution on the two-sphere.

The metrics are (1 + h(cos theta))^2 dtheta^2 + sin(theta)^2 dphi^2 with a
polynomial profile h vanishing at +-1.  Odd profiles give the classical
one-parameter families in which every geodesic closes after arc length
2*pi; the certification battery integrates the unit-speed Hamiltonian flow
for a fan of Clairaut constants and measures the closure defect at 2*pi.
Even profiles are accepted as negative controls and fail the battery.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .quadrature import gauss_chebyshev, gauss_legendre

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
DEFAULT_TOL_CLOSE = 1e-6


def default_clairaut_battery(n=20):
    """n Clairaut constants equispaced in (0, 1); the meridian is separate."""
    return np.arange(1, n + 1) / (n + 1.0)


@dataclass(frozen=True)
class RevolutionMetric:
    """Metric of revolution determined by a polynomial profile h.

    Use ``from_odd_coeffs`` for the structural odd basis
    b_k(u) = u - u^(2k+1) (vanishing at +-1 is then automatic), or
    ``from_polynomial`` for arbitrary profiles used as negative controls.
    """

    poly: Polynomial
    is_odd: bool = True
    _dpoly: Polynomial = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_dpoly", self.poly.deriv())
        for endpoint in (-1.0, 1.0):
            if abs(self.poly(endpoint)) > 1e-14:
                raise ValueError("profile must vanish at u = %g" % endpoint)
        u = np.linspace(-1.0, 1.0, 4001)
        sup = float(np.max(np.abs(self.poly(u))))
        if sup >= 1.0:
            raise ValueError("profile must satisfy sup|h| < 1, got %.6f" % sup)

    @classmethod
    def from_odd_coeffs(cls, coeffs):
        """Profile sum_k c_k * (u - u^(2k+1)), k = 1, 2, ... (structurally odd)."""
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        raw = np.zeros(2 * len(coeffs) + 2)
        for k, c in enumerate(coeffs, start=1):
            raw[1] += c
            raw[2 * k + 1] -= c
        return cls(poly=Polynomial(raw), is_odd=True)

    @classmethod
    def from_polynomial(cls, raw_coeffs):
        """Arbitrary polynomial profile (low-to-high coefficients).

        Must still vanish at +-1; oddness is detected, not required, so
        non-Zoll control metrics can be built.
        """
        raw = np.asarray(raw_coeffs, dtype=float)
        is_odd = bool(np.all(np.abs(raw[0::2]) < 1e-14))
        return cls(poly=Polynomial(raw), is_odd=is_odd)

    @classmethod
    def round_sphere(cls):
        return cls.from_odd_coeffs([0.0])

    def h(self, u):
        return self.poly(u)

    def dh(self, u):
        return self._dpoly(u)

    def radial_factor(self, theta):
        """1 + h(cos theta), the dtheta-coefficient square root."""
        return 1.0 + self.poly(np.cos(theta))


@dataclass(frozen=True)
class GeodesicState:
    """Phase-space point (theta, phi, p_theta, p_phi) of the unit-speed flow."""

    theta: float
    phi: float
    p_theta: float
    p_phi: float

    def as_array(self):
        return np.array([self.theta, self.phi, self.p_theta, self.p_phi])

    def energy(self, metric):
        """p_theta^2/E + p_phi^2/G; equals 1 on unit-speed geodesics."""
        w = 1.0 + metric.h(math.cos(self.theta))
        g = math.sin(self.theta) ** 2
        return self.p_theta ** 2 / w ** 2 + self.p_phi ** 2 / g


def equator_state(metric, p_phi, phi0=0.0, sign=1.0):
    """Unit-speed initial state on the equator with Clairaut constant p_phi."""
    if not abs(p_phi) <= 1.0:
        raise ValueError("need |p_phi| <= 1 on the equator")
    w = 1.0 + metric.h(0.0)
    p_theta = sign * w * math.sqrt(max(1.0 - p_phi * p_phi, 0.0))
    return GeodesicState(theta=0.5 * math.pi, phi=phi0, p_theta=p_theta, p_phi=p_phi)


def _rhs(metric):
    poly, dpoly = metric.poly, metric._dpoly

    def rhs(_s, y):
        theta, _phi, p_theta, p_phi = y
        sin_t = math.sin(theta)
        cos_t = math.cos(theta)
        w = 1.0 + poly(cos_t)
        e = w * w
        g = sin_t * sin_t
        de = -2.0 * w * dpoly(cos_t) * sin_t
        dg = 2.0 * sin_t * cos_t
        return (
            p_theta / e,
            p_phi / g,
            0.5 * (de * p_theta * p_theta / (e * e) + dg * p_phi * p_phi / (g * g)),
            0.0,
        )

    return rhs


@dataclass
class Trajectory:
    """Integrated geodesic with dense output over [0, length]."""

    metric: RevolutionMetric
    initial: GeodesicState
    length: float
    s: np.ndarray
    states: np.ndarray  # shape (n, 4)
    dense: object

    def state_at(self, s):
        return np.asarray(self.dense(s))

    def energy_drift(self):
        """Max deviation of the unit-speed energy along the samples."""
        theta, p_theta, p_phi = self.states[:, 0], self.states[:, 2], self.states[:, 3]
        w = 1.0 + self.metric.h(np.cos(theta))
        g = np.sin(theta) ** 2
        energy = p_theta ** 2 / w ** 2 + p_phi ** 2 / g
        return float(np.max(np.abs(energy - 1.0)))

    def clairaut_drift(self):
        return float(np.max(np.abs(self.states[:, 3] - self.initial.p_phi)))


def integrate_geodesic(metric, state0, length, tol=DEFAULT_TOL, n_samples=200):
    """Integrate the unit-speed geodesic flow for a given arc length.

    Uses an adaptive high-order embedded Runge-Kutta scheme (DOP853).  The
    Clairaut constant p_phi must be nonzero; meridians have a singular
    chart at the poles and are handled by the closed-form meridian length
    instead.
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-12, 1e-6]")
    if abs(state0.p_phi) < 1e-12:
        raise ValueError("p_phi = 0: integrate meridians via meridian_length")
    if math.sin(state0.theta) < 0.05 and abs(state0.p_phi) > 0.0:
        raise ValueError("initial point too close to a pole")
    s_eval = np.linspace(0.0, length, n_samples)
    sol = solve_ivp(
        _rhs(metric),
        (0.0, length),
        state0.as_array(),
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
        t_eval=s_eval,
    )
    if not sol.success:
        raise RuntimeError("geodesic integration failed: %s" % sol.message)
    return Trajectory(
        metric=metric,
        initial=state0,
        length=length,
        s=sol.t,
        states=sol.y.T,
        dense=sol.sol,
    )


def _wrap_angle(delta):
    return (delta + math.pi) % TWO_PI - math.pi


def closure_defect(traj, at_length=TWO_PI):
    """Phase-space distance between the state at the given arc length and s=0.

    The angle phi is compared modulo 2*pi.
    """
    if traj.length < at_length:
        raise ValueError("trajectory shorter than the candidate period")
    y = traj.state_at(at_length)
    y0 = traj.initial.as_array()
    d = y - y0
    d[1] = _wrap_angle(d[1])
    return float(np.linalg.norm(d))


def closure_test(traj, at_length=TWO_PI, tol_close=DEFAULT_TOL_CLOSE):
    """(closed, defect) at the candidate period."""
    defect = closure_defect(traj, at_length)
    return defect < tol_close, defect


def refine_closure_length(traj, around=TWO_PI, window=0.3):
    """Arc length near ``around`` minimizing the closure defect."""
    res = minimize_scalar(
        lambda s: closure_defect(traj, s),
        bounds=(around - window, around + window),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x), float(res.fun)


def meridian_length(metric, n_nodes=64):
    """Length of the closed meridian: 2 * int_0^pi (1 + h(cos theta)) dtheta.

    The substitution u = cos(theta) turns the h-term into
    int_-1^1 h(u)/sqrt(1-u^2) du, evaluated exactly (for polynomial h) by
    Gauss-Chebyshev; for odd h it cancels and the length is exactly 2*pi.
    """
    nodes, weights = gauss_chebyshev(max(n_nodes, metric.poly.degree() + 1))
    correction = float(np.sum(weights * metric.h(nodes)))
    return 2.0 * (math.pi + correction)


def surface_area(metric, n_nodes=64):
    """Total area 2*pi * int_0^pi (1 + h(cos theta)) sin(theta) dtheta.

    Equals 4*pi + 2*pi * int_-1^1 h(u) du (Gauss-Legendre, exact for
    polynomials); the correction vanishes for odd h.
    """
    nodes, weights = gauss_legendre(max(n_nodes, metric.poly.degree() + 1))
    correction = float(np.sum(weights * metric.h(nodes)))
    return 4.0 * math.pi + 2.0 * math.pi * correction


@dataclass
class ZollBattery:
    """Closure defects of the certification fan plus the meridian."""

    p_phi_values: np.ndarray
    defects: np.ndarray
    meridian_defect: float
    tol_close: float

    @property
    def max_defect(self):
        return float(max(np.max(self.defects), self.meridian_defect))

    @property
    def certified(self):
        return self.max_defect < self.tol_close


def zoll_closure_battery(metric, p_phi_values=None, tol=DEFAULT_TOL,
                         tol_close=DEFAULT_TOL_CLOSE, return_trajectories=False):
    """Run the closure fan: geodesics for each Clairaut constant, plus meridian.

    Every geodesic is launched from the equator and integrated slightly past
    2*pi; the meridian is checked through its closed-form length.
    """
    if p_phi_values is None:
        p_phi_values = default_clairaut_battery()
    p_phi_values = np.asarray(p_phi_values, dtype=float)
    defects = np.empty_like(p_phi_values)
    trajectories = []
    for i, p_phi in enumerate(p_phi_values):
        traj = integrate_geodesic(metric, equator_state(metric, p_phi),
                                  length=TWO_PI + 0.5, tol=tol)
        defects[i] = closure_defect(traj)
        if return_trajectories:
            trajectories.append(traj)
    meridian_defect = abs(meridian_length(metric) - TWO_PI)
    battery = ZollBattery(
        p_phi_values=p_phi_values,
        defects=defects,
        meridian_defect=meridian_defect,
        tol_close=tol_close,
    )
    if return_trajectories:
        return battery, trajectories
    return battery


@dataclass
class ZollRatioEstimate:
    ratio: float
    zoll_certified: bool
    min_closed_length: float
    area: float
    max_defect: float


def weak_systolic_ratio_estimate(metric, tol=DEFAULT_TOL,
                                 tol_close=DEFAULT_TOL_CLOSE):
    """(shortest detected closed geodesic length)^2 / area.

    Runs the closure battery, refines the closing length of each fan
    geodesic near 2*pi, and divides by the surface area.  For certified
    Zoll profiles the result is pi up to integration error; when the
    battery fails, the raw estimate is returned flagged non-Zoll.
    """
    battery, trajectories = zoll_closure_battery(
        metric, tol=tol, tol_close=tol_close, return_trajectories=True
    )
    lengths = [refine_closure_length(traj)[0] for traj in trajectories]
    lengths.append(meridian_length(metric))
    min_length = float(min(lengths))
    total_area = surface_area(metric)
    return ZollRatioEstimate(
        ratio=min_length ** 2 / total_area,
        zoll_certified=battery.certified,
        min_closed_length=min_length,
        area=total_area,
        max_defect=battery.max_defect,
    )

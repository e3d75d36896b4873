"""Quadrature certification of the Loewner bound for conformal flat tori.

A metric f^2 g* on the flat torus of modulus (x0, y0) is sampled on the
unit-parametrized fundamental parallelogram: the point of coordinates
(s, t) in [0,1)^2 is s*(1,0) + t*(x0,y0) in the plane.  In these
coordinates the horizontal flat systoles are exactly the grid rows, the
area element is y0 ds dt, and the three inequalities in the mean-value
proof of the 2/sqrt(3) bound become discrete inequalities between row
integrals, which we evaluate and report.
"""

from dataclasses import dataclass

import numpy as np

from .flat_moduli import TORUS_RATIO_MAX, TorusModulus

EPS_QUAD = 1e-9


@dataclass(frozen=True)
class ConformalTorusMetric:
    """Conformal factor grid on the unit-parametrized parallelogram.

    values[i, j] = f(s = j/n_s, t = i/n_t); doubly periodic, no duplicated
    seam row or column.  The modulus scale is ignored (the ratio is
    invariant under rescaling, so the parallelogram is normalized).
    """

    modulus: TorusModulus
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or min(values.shape) < 8:
            raise ValueError("f grid must be 2-D with both sizes >= 8")
        if not np.all(values > 0.0):
            raise ValueError("conformal factor must be positive everywhere")

    @classmethod
    def from_function(cls, modulus, fn, n_s=256, n_t=256):
        """Sample f(s, t) on the periodic grid."""
        s = np.arange(n_s) / n_s
        t = np.arange(n_t) / n_t
        tt, ss = np.meshgrid(t, s, indexing="ij")
        return cls(modulus, np.asarray(fn(ss, tt), dtype=float) + np.zeros_like(ss))

    def interpolate(self, s, t):
        """Periodic bilinear interpolation of f at arbitrary (s, t)."""
        n_t, n_s = self.values.shape
        s = np.asarray(s, dtype=float) % 1.0
        t = np.asarray(t, dtype=float) % 1.0
        x = s * n_s
        y = t * n_t
        j0 = np.floor(x).astype(int) % n_s
        i0 = np.floor(y).astype(int) % n_t
        j1 = (j0 + 1) % n_s
        i1 = (i0 + 1) % n_t
        fx = x - np.floor(x)
        fy = y - np.floor(y)
        v = self.values
        return (
            v[i0, j0] * (1 - fx) * (1 - fy)
            + v[i0, j1] * fx * (1 - fy)
            + v[i1, j0] * (1 - fx) * fy
            + v[i1, j1] * fx * fy
        )


@dataclass(frozen=True)
class LoewnerReport:
    """Certified quantities of the three-stage mean-inequality chain."""

    area_g: float
    mean_sq_bound: float
    min_horizontal_length: float
    sigma_upper: float
    stage_gaps: tuple

    def all_gaps_nonnegative(self, tol=EPS_QUAD):
        return all(g >= -tol for g in self.stage_gaps)


def area(metric):
    """Area of f^2 g*: periodic-trapezoid quadrature of f^2 * y0."""
    return metric.modulus.y0 * float(np.mean(metric.values ** 2))


def horizontal_lengths(metric):
    """g-lengths of the horizontal flat systoles, one per grid row."""
    return np.mean(metric.values, axis=1)


def loewner_chain_check(metric):
    """Evaluate the quadratic-mean / arithmetic-mean / minimum chain.

    Returns a LoewnerReport with

      stage_gaps[0] = area - y0 * mean_t(L_t^2)        (row-wise AM-QM),
      stage_gaps[1] = y0 * (mean_t(L_t^2) - min_t L_t^2)  (min vs mean),
      stage_gaps[2] = 1/y0 - sigma_upper,

    where L_t are the horizontal lengths and
    sigma_upper = min_t L_t^2 / area bounds the systolic ratio from above.
    """
    y0 = metric.modulus.y0
    area_g = area(metric)
    lengths = horizontal_lengths(metric)
    mean_sq = y0 * float(np.mean(lengths ** 2))
    min_len = float(np.min(lengths))
    sigma_upper = min_len ** 2 / area_g
    gaps = (
        area_g - mean_sq,
        mean_sq - y0 * min_len ** 2,
        1.0 / y0 - sigma_upper,
    )
    return LoewnerReport(
        area_g=area_g,
        mean_sq_bound=mean_sq,
        min_horizontal_length=min_len,
        sigma_upper=sigma_upper,
        stage_gaps=gaps,
    )


def monte_carlo_area(metric, fn=None, n_samples=1_000_000, seed=0):
    """Monte-Carlo check value for ``area``.

    Samples (s, t) uniformly; uses the analytic factor ``fn`` when given,
    otherwise bilinear interpolation of the grid.  Returns (estimate,
    standard_error).
    """
    rng = np.random.default_rng(seed)
    s = rng.random(n_samples)
    t = rng.random(n_samples)
    f = fn(s, t) if fn is not None else metric.interpolate(s, t)
    vals = metric.modulus.y0 * np.asarray(f, dtype=float) ** 2
    est = float(np.mean(vals))
    err = float(np.std(vals) / np.sqrt(n_samples))
    return est, err


def random_conformal_factor(rng, n_s=256, n_t=256, max_mode=2, amplitude=0.6):
    """Random positive doubly periodic factor: 1 + low-order Fourier series.

    Coefficient mass is bounded by ``amplitude`` < 1 so the factor stays
    positive.
    """
    s = np.arange(n_s) / n_s
    t = np.arange(n_t) / n_t
    tt, ss = np.meshgrid(t, s, indexing="ij")
    modes = [(k, l) for k in range(-max_mode, max_mode + 1)
             for l in range(0, max_mode + 1) if (k, l) != (0, 0) and (l > 0 or k > 0)]
    coeffs = rng.normal(size=(len(modes), 2))
    total = np.sum(np.abs(coeffs))
    coeffs *= amplitude * rng.uniform(0.2, 1.0) / total
    f = np.ones_like(ss)
    for (k, l), (a, b) in zip(modes, coeffs):
        phase = 2.0 * np.pi * (k * ss + l * tt)
        f += a * np.cos(phase) + b * np.sin(phase)
    return f

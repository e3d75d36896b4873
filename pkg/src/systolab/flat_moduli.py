"""Flat tori and flat Klein bottles: lattice reduction and systoles.

A flat torus is R^2 modulo a rank-2 lattice.  Up to isometry and rescaling
it is described by a single point (x0, y0) of the moduli domain

    GAMMA = { x^2 + y^2 >= 1,  0 <= x <= 1/2,  y > 0 },

obtained by normalizing a shortest lattice vector to (1, 0).  Flat Klein
bottles are R^2 modulo the group generated by a vertical translation and a
horizontal glide reflection; their systole has a closed form which we also
recover by enumerating deck transformations.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EPS_GEOM = 1e-12

# optimal flat-torus ratio, attained at the hexagonal point (1/2, sqrt(3)/2)
TORUS_RATIO_MAX = 2.0 / math.sqrt(3.0)
# Bavard's bound for Klein bottles; a strict ceiling for the flat ones
KLEIN_RATIO_CEILING = math.pi / (2.0 * math.sqrt(2.0))


class DegenerateLatticeError(ValueError):
    """Generators fail to span the plane."""


@dataclass(frozen=True)
class Lattice2:
    """Rank-2 lattice given by two generators, stored as given (not reduced)."""

    v1: tuple
    v2: tuple

    def __post_init__(self):
        v1 = (float(self.v1[0]), float(self.v1[1]))
        v2 = (float(self.v2[0]), float(self.v2[1]))
        cross = abs(v1[0] * v2[1] - v1[1] * v2[0])
        scale = math.hypot(*v1) * math.hypot(*v2)
        if not (cross > EPS_GEOM * scale):
            raise DegenerateLatticeError(
                "generators are linearly dependent: |v1 x v2| = %.3e" % cross
            )

    def gram(self):
        v1 = np.asarray(self.v1, dtype=float)
        v2 = np.asarray(self.v2, dtype=float)
        return np.array([[v1 @ v1, v1 @ v2], [v1 @ v2, v2 @ v2]])


@dataclass(frozen=True)
class TorusModulus:
    """Point of GAMMA plus the similarity (scale, rotation) that was removed."""

    x0: float
    y0: float
    scale: float = 1.0
    rotation: float = 0.0

    def __post_init__(self):
        if not (self.scale > 0.0 and self.y0 > 0.0):
            raise ValueError("need scale > 0 and y0 > 0")
        if not (-EPS_GEOM <= self.x0 <= 0.5 + EPS_GEOM):
            raise ValueError("x0 = %r outside [0, 1/2]" % (self.x0,))
        if self.x0 * self.x0 + self.y0 * self.y0 < 1.0 - EPS_GEOM:
            raise ValueError("(x0, y0) below the unit circle: not in GAMMA")

    def lattice(self):
        """Rebuild a lattice with this modulus (inverse of reduce_to_gamma)."""
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        rot = np.array([[c, -s], [s, c]])
        v1 = self.scale * rot @ np.array([1.0, 0.0])
        v2 = self.scale * rot @ np.array([self.x0, self.y0])
        return Lattice2(tuple(v1), tuple(v2))


@dataclass(frozen=True)
class KleinParams:
    """Flat Klein bottle: translation step h (vertical) and glide step w."""

    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0.0 and self.h > 0.0):
            raise ValueError("need w > 0 and h > 0")


def _lagrange_reduce(v1, v2):
    """Reduce a basis so |v1| <= |v2| and |v1 . v2| <= |v1|^2 / 2.

    Works verbatim for float and Fraction coordinates; all quantities used
    are rational in the inputs.  Returns the reduced pair.
    """
    u, v = list(v1), list(v2)

    def dot(a, b):
        return a[0] * b[0] + a[1] * b[1]

    if dot(u, u) > dot(v, v):
        u, v = v, u
    for _ in range(10000):
        mu = round(dot(u, v) / dot(u, u))
        v = [v[0] - mu * u[0], v[1] - mu * u[1]]
        if dot(v, v) >= dot(u, u):
            return u, v
        u, v = v, u
    raise RuntimeError("lattice reduction failed to converge")


def _exact_inputs(lat):
    return all(isinstance(c, (int, Fraction)) and not isinstance(c, bool)
               for c in (*lat.v1, *lat.v2))


def shortest_vector(lat):
    """Shortest nonzero lattice vector and its length.

    The search is exhaustive: after reducing the basis, every integer pair
    (m, n) that could reach a vector no longer than the current best is
    enumerated, with index bounds obtained from the dual basis.
    """
    u, v = _lagrange_reduce([float(c) for c in lat.v1], [float(c) for c in lat.v2])
    u = np.asarray(u)
    v = np.asarray(v)
    det = abs(u[0] * v[1] - u[1] * v[0])
    best = u.copy()
    best_norm2 = float(best @ best)
    radius = math.sqrt(best_norm2)
    # |m| <= R |v| / det and |n| <= R |u| / det cover every vector of norm <= R
    m_max = int(math.floor(radius * math.hypot(*v) / det + 1e-9))
    n_max = int(math.floor(radius * math.hypot(*u) / det + 1e-9))
    for m in range(-m_max, m_max + 1):
        for n in range(-n_max, n_max + 1):
            if m == 0 and n == 0:
                continue
            w = m * u + n * v
            norm2 = float(w @ w)
            if norm2 < best_norm2 - 1e-15 * best_norm2:
                best, best_norm2 = w, norm2
    # canonical sign: lexicographically positive
    if best[0] < 0 or (best[0] == 0 and best[1] < 0):
        best = -best
    return best, math.sqrt(best_norm2)


def reduce_to_gamma(lat):
    """Canonical GAMMA-representative of a lattice.

    The shortest vector is rescaled to length 1 and rotated to (1, 0); the
    second generator then lands in GAMMA after choosing signs (y0 > 0) and,
    if needed, a reflection (0 <= x0 <= 1/2).  Integer or Fraction inputs
    are reduced in exact rational arithmetic and converted at output.
    """
    if _exact_inputs(lat):
        u, v = _lagrange_reduce(
            [Fraction(c) for c in lat.v1], [Fraction(c) for c in lat.v2]
        )
        dot_uu = u[0] * u[0] + u[1] * u[1]
        dot_uv = u[0] * v[0] + u[1] * v[1]
        cross = u[0] * v[1] - u[1] * v[0]
        x0 = float(abs(dot_uv) / dot_uu)
        y0 = float(abs(cross) / dot_uu)
        scale = math.sqrt(float(dot_uu))
    else:
        u, v = _lagrange_reduce([float(c) for c in lat.v1], [float(c) for c in lat.v2])
        dot_uu = u[0] * u[0] + u[1] * u[1]
        dot_uv = u[0] * v[0] + u[1] * v[1]
        cross = u[0] * v[1] - u[1] * v[0]
        x0 = abs(dot_uv) / dot_uu
        y0 = abs(cross) / dot_uu
        scale = math.sqrt(dot_uu)
    # Lagrange reduction guarantees |x0| <= 1/2 up to rounding
    x0 = min(max(x0, 0.0), 0.5)
    rotation = math.atan2(float(u[1]), float(u[0]))
    return TorusModulus(x0=x0, y0=y0, scale=scale, rotation=rotation)


def torus_systolic_ratio(mod):
    """sys^2 / area for the flat torus with modulus (x0, y0).

    With the systole normalized to 1 the area is y0, so the ratio is 1/y0;
    over GAMMA it is at most 2/sqrt(3), with equality only at the hexagonal
    point (1/2, sqrt(3)/2).
    """
    return 1.0 / mod.y0


def klein_deck_displacement(a, b, kp):
    """Minimal displacement of the deck element g^a t^b of a flat Klein bottle.

    Generators: t(x, y) = (x, y + h) and the glide reflection
    g(x, y) = (x + w, h - y).  Even powers of g are translations by
    (a*w, b*h); odd powers displace every point by at least |a|*w, with
    equality on the invariant horizontal line.
    """
    if a % 2 == 0:
        return math.hypot(a * kp.w, b * kp.h)
    return abs(a) * kp.w


def klein_systole(kp, index_range=4):
    """Shortest displacement among nontrivial deck transformations.

    Enumerates g^a t^b for |a|, |b| <= index_range with the closed-form
    per-element displacement; the minimum is attained already at
    (a, b) in {(0, +-1), (+-1, 0)} and equals min(w, h).
    """
    best = math.inf
    for a in range(-index_range, index_range + 1):
        for b in range(-index_range, index_range + 1):
            if a == 0 and b == 0:
                continue
            best = min(best, klein_deck_displacement(a, b, kp))
    return best


def klein_systolic_ratio(kp):
    """sys^2 / area = min(w, h)^2 / (w * h), always <= 1 for flat bottles."""
    s = klein_systole(kp)
    return s * s / (kp.w * kp.h)

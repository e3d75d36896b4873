"""Acceptance battery: one function per criterion, used by tests and the CLI.

Each criterion returns a CriterionResult whose entries all carry
(value, reference, margin, status); margins are signed distances to the
bound, positive when satisfied.  Tolerances are pinned here.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import boothby_wang as bw
from . import conformal, convex, flat_moduli, revolution, symplectic

DEFAULT_SEED = 7


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime_s: float
    limit_s: float
    entries: list = field(default_factory=list)

    def line(self):
        return "criterion %2d %-28s %s  (%.2f s / limit %.0f s)" % (
            self.number, self.name, "PASS" if self.passed else "FAIL",
            self.runtime_s, self.limit_s,
        )


def _entry(name, value, reference, comparator, margin, tol=0.0):
    return {
        "name": name,
        "value": float(value),
        "reference": float(reference),
        "comparator": comparator,
        "margin": float(margin),
        "status": "pass" if margin >= -tol else "fail",
    }


def entry_le(name, value, reference, tol=0.0):
    return _entry(name, value, reference, "<=", reference - value + tol)


def entry_ge(name, value, reference, tol=0.0):
    return _entry(name, value, reference, ">=", value - reference + tol)


def entry_eq(name, value, reference, tol):
    return _entry(name, value, reference, "~", tol - abs(value - reference))


def _finish(number, name, limit_s, t0, entries):
    runtime = time.perf_counter() - t0
    passed = all(e["status"] == "pass" for e in entries) and runtime < limit_s
    return CriterionResult(number=number, name=name, passed=passed,
                           runtime_s=runtime, limit_s=limit_s, entries=entries)


def _random_gamma_modulus(rng):
    x0 = rng.uniform(0.0, 0.5)
    y_low = math.sqrt(max(1.0 - x0 * x0, 0.0))
    return flat_moduli.TorusModulus(x0=x0, y0=rng.uniform(y_low, y_low + 1.5))


def criterion_1_loewner(seed=DEFAULT_SEED, n_factors=100, grid=256):
    """Hexagonal equality case plus random-conformal-factor chain battery."""
    t0 = time.perf_counter()
    entries = []
    hexmod = flat_moduli.TorusModulus(0.5, math.sqrt(3.0) / 2.0)
    ones = conformal.ConformalTorusMetric(
        hexmod, np.ones((grid, grid)))
    rep = conformal.loewner_chain_check(ones)
    entries.append(entry_eq("hexagonal_sigma", rep.sigma_upper,
                            flat_moduli.TORUS_RATIO_MAX, 1e-12))
    rng = np.random.default_rng([seed, 1])
    worst_excess = -math.inf
    worst_gap = math.inf
    for _ in range(n_factors):
        mod = _random_gamma_modulus(rng)
        f = conformal.random_conformal_factor(rng, n_s=grid, n_t=grid)
        rep = conformal.loewner_chain_check(conformal.ConformalTorusMetric(mod, f))
        worst_excess = max(worst_excess, rep.sigma_upper - 1.0 / mod.y0)
        worst_gap = min(worst_gap, min(rep.stage_gaps))
    entries.append(entry_le("max_sigma_minus_1_over_y0", worst_excess, 0.0, tol=1e-9))
    entries.append(entry_ge("min_stage_gap", worst_gap, 0.0, tol=1e-10))
    return _finish(1, "loewner_constant", 10.0, t0, entries)


def _random_lattices(rng, count):
    """Random nondegenerate lattices; input bases are sheared so the
    exhaustive-enumeration oracle over |m|, |n| <= 20 stays exhaustive."""
    lats = []
    while len(lats) < count:
        v1 = rng.normal(size=2)
        v1 *= rng.uniform(0.5, 2.0) / np.linalg.norm(v1)
        v2 = rng.normal(size=2)
        v2 *= rng.uniform(0.5, 2.0) / np.linalg.norm(v2)
        cross = v1[0] * v2[1] - v1[1] * v2[0]
        if abs(cross) < 0.25 * np.linalg.norm(v1) * np.linalg.norm(v2):
            continue
        k = rng.integers(-3, 4)
        lats.append((v1, v2 + k * v1))
    return lats


def _oracle_systoles(lats, index_bound=20):
    """Brute-force shortest-vector lengths over |m|, |n| <= index_bound."""
    ms, ns = np.meshgrid(np.arange(-index_bound, index_bound + 1),
                         np.arange(-index_bound, index_bound + 1), indexing="ij")
    ms = ms.ravel().astype(float)
    ns = ns.ravel().astype(float)
    keep = ~((ms == 0) & (ns == 0))
    ms, ns = ms[keep], ns[keep]
    v1 = np.array([l[0] for l in lats])
    v2 = np.array([l[1] for l in lats])
    a = np.sum(v1 * v1, axis=1)
    b = np.sum(v1 * v2, axis=1)
    c = np.sum(v2 * v2, axis=1)
    out = np.empty(len(lats))
    chunk = 2000
    for lo in range(0, len(lats), chunk):
        hi = min(lo + chunk, len(lats))
        norms2 = (a[lo:hi, None] * ms[None, :] ** 2
                  + 2.0 * b[lo:hi, None] * ms[None, :] * ns[None, :]
                  + c[lo:hi, None] * ns[None, :] ** 2)
        out[lo:hi] = np.sqrt(np.min(norms2, axis=1))
    return out


def _canonical_gram(mod):
    return mod.scale ** 2 * np.array([
        [1.0, mod.x0],
        [mod.x0, mod.x0 ** 2 + mod.y0 ** 2],
    ])


def criterion_2_flat_moduli(seed=DEFAULT_SEED, count=10_000):
    """Round-trip through the moduli domain plus enumeration oracle."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 2])
    lats = _random_lattices(rng, count)
    oracle = _oracle_systoles(lats)
    worst_gram = 0.0
    worst_sys = 0.0
    in_gamma = True
    for (v1, v2), sys_ref in zip(lats, oracle):
        lat = flat_moduli.Lattice2(tuple(v1), tuple(v2))
        mod = flat_moduli.reduce_to_gamma(lat)
        in_gamma &= (0.0 <= mod.x0 <= 0.5
                     and mod.x0 ** 2 + mod.y0 ** 2 >= 1.0 - 1e-12)
        mod2 = flat_moduli.reduce_to_gamma(mod.lattice())
        g1, g2 = _canonical_gram(mod), _canonical_gram(mod2)
        worst_gram = max(worst_gram,
                         float(np.max(np.abs(g1 - g2)) / max(mod.scale ** 2, 1.0)))
        _, length = flat_moduli.shortest_vector(lat)
        worst_sys = max(worst_sys, abs(length - sys_ref),
                        abs(mod.scale - sys_ref))
    entries = [
        entry_ge("all_moduli_in_gamma", 1.0 if in_gamma else 0.0, 1.0),
        entry_le("max_gram_roundtrip_error", worst_gram, 1e-10),
        entry_le("max_systole_vs_enumeration", worst_sys, 1e-10),
    ]
    return _finish(2, "flat_moduli_roundtrip", 5.0, t0, entries)


def _klein_deck_elements(word_norm=6):
    """Deck elements g^a t^b reachable by words of length <= word_norm."""
    frontier = {(0, 0)}
    seen = {(0, 0)}
    gens = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    for _ in range(word_norm):
        nxt = set()
        for a, b in frontier:
            for c, d in gens:
                # composition (c,d) after (a,b): g^c t^d g^a t^b = g^(c+a) t^((-1)^a d + b)
                e = (c + a, (d if a % 2 == 0 else -d) + b)
                if e not in seen:
                    seen.add(e)
                    nxt.add(e)
        frontier = nxt
    seen.discard((0, 0))
    return sorted(seen)


def criterion_3_klein(seed=DEFAULT_SEED, grid=50):
    """klein_systole == min(w, h) against the deck-word oracle, ratios <= 1."""
    t0 = time.perf_counter()
    elements = _klein_deck_elements(6)
    ws = np.linspace(0.2, 3.0, grid)
    hs = np.linspace(0.2, 3.0, grid)
    worst = 0.0
    worst_closed = 0.0
    max_ratio = 0.0
    for w in ws:
        for h in hs:
            kp = flat_moduli.KleinParams(w, h)
            sys_op = flat_moduli.klein_systole(kp)
            sys_oracle = min(flat_moduli.klein_deck_displacement(a, b, kp)
                             for a, b in elements)
            worst = max(worst, abs(sys_op - sys_oracle))
            worst_closed = max(worst_closed, abs(sys_op - min(w, h)))
            max_ratio = max(max_ratio, flat_moduli.klein_systolic_ratio(kp))
    entries = [
        entry_le("max_systole_vs_deck_oracle", worst, 0.0, tol=1e-14),
        entry_le("max_systole_vs_min_wh", worst_closed, 0.0, tol=1e-14),
        entry_le("max_flat_ratio", max_ratio, 1.0, tol=1e-12),
        entry_le("flat_ceiling_vs_bavard", 1.0, flat_moduli.KLEIN_RATIO_CEILING),
    ]
    return _finish(3, "klein_bottles", 2.0, t0, entries)


def criterion_4_weinstein(seed=DEFAULT_SEED):
    """Zoll certification battery: rho = pi for odd profiles, control fails."""
    t0 = time.perf_counter()
    entries = []
    profiles = {
        "round": revolution.RevolutionMetric.round_sphere(),
        "odd_030": revolution.RevolutionMetric.from_odd_coeffs([0.3]),
        "odd_015": revolution.RevolutionMetric.from_odd_coeffs([0.15]),
    }
    for name, metric in profiles.items():
        est = revolution.weak_systolic_ratio_estimate(metric)
        entries.append(entry_le("%s_max_closure_defect" % name,
                                est.max_defect, 1e-6))
        entries.append(entry_eq("%s_area" % name, est.area,
                                4.0 * math.pi, 1e-10))
        entries.append(entry_eq("%s_ratio" % name, est.ratio, math.pi, 1e-4))
        entries.append(entry_ge("%s_certified" % name,
                                1.0 if est.zoll_certified else 0.0, 1.0))
    control = revolution.RevolutionMetric.from_polynomial([0.3, 0.0, -0.3])
    battery = revolution.zoll_closure_battery(control)
    entries.append(entry_ge("even_control_max_defect", battery.max_defect, 1e-2))
    return _finish(4, "weinstein_rho_pi", 60.0, t0, entries)


def criterion_5_viterbo_ellipsoids(seed=DEFAULT_SEED, count=10_000):
    """Viterbo ratio on random specs plus exact capacity rules."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 5])
    max_ratio = -math.inf
    spread_equality_violation = 0.0
    for _ in range(count):
        m = int(rng.integers(1, 5))
        a = np.sort(np.exp(rng.normal(scale=0.7, size=m)))
        spec = symplectic.EllipsoidSpec(tuple(a))
        ratio = symplectic.viterbo_ratio_ellipsoid(spec)
        max_ratio = max(max_ratio, ratio)
        if m > 1 and a[-1] / a[0] > 1.0 + 1e-12:
            spread_equality_violation = max(spread_equality_violation,
                                            ratio - 1.0 + 1e-12)
    ball = symplectic.EllipsoidSpec((2.0, 2.0, 2.0))
    entries = [
        entry_le("max_viterbo_ratio", max_ratio, 1.0, tol=1e-12),
        entry_le("nonequal_specs_stay_below_1", spread_equality_violation, 0.0),
        entry_eq("equal_axes_ratio", symplectic.viterbo_ratio_ellipsoid(ball),
                 1.0, 1e-12),
        entry_eq("ball_capacity", symplectic.capacity_ellipsoid(
            symplectic.EllipsoidSpec((1.0, 1.0))), math.pi, 0.0),
        entry_eq("cylinder_limit_capacity", symplectic.capacity_ellipsoid(
            symplectic.EllipsoidSpec((1.0, 1e9))), math.pi, 0.0),
        entry_eq("conformality_r2",
                 symplectic.capacity_ellipsoid(symplectic.EllipsoidSpec((3.0 * 2.25,))),
                 2.25 * symplectic.capacity_ellipsoid(symplectic.EllipsoidSpec((3.0,))),
                 1e-15),
    ]
    return _finish(5, "ellipsoid_viterbo_ratio", 1.0, t0, entries)


def criterion_6_nonsqueezing(seed=DEFAULT_SEED, count=1000):
    """Linear shadow bound for random symplectic maps in dimensions 4 and 6."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 6])
    min_shadow = math.inf
    max_residual = 0.0
    for m in (2, 3):
        for _ in range(count):
            mat = symplectic.random_symplectic(m, rng)
            max_residual = max(max_residual, symplectic.is_symplectic(mat)[1])
            min_shadow = min(min_shadow, symplectic.shadow_area_linear(mat))
    control = np.diag([0.5, 2.0, 0.5, 2.0])  # (q1,q2,p1,p2): squeezes (q1,p1)
    control_shadow = symplectic.shadow_area_linear(control)
    entries = [
        entry_ge("min_symplectic_shadow", min_shadow, math.pi, tol=1e-9),
        entry_le("max_symplecticity_residual", max_residual, 1e-9),
        entry_le("volume_preserving_control_shadow", control_shadow,
                 0.25 * math.pi, tol=1e-12),
    ]
    return _finish(6, "linear_nonsqueezing", 5.0, t0, entries)


def criterion_7_hopf(seed=DEFAULT_SEED):
    """Numeric Reeb flow on S^3 returns to start at t = pi."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 7])
    worst = 0.0
    for _ in range(5):
        z0 = rng.normal(size=4)
        z0 /= np.linalg.norm(z0)
        z1 = symplectic.integrate_reeb_sphere(z0, math.pi)
        worst = max(worst, float(np.linalg.norm(z1 - z0)))
        half = symplectic.integrate_reeb_sphere(z0, math.pi / 2.0)
        worst = max(worst, float(np.linalg.norm(half + z0)))
    entries = [entry_le("max_return_defect", worst, 1e-9)]
    return _finish(7, "hopf_reeb_period", 1.0, t0, entries)


def _random_radial_s3(rng):
    """Random positive radial function: affine + quadratic terms on S^3."""
    c = rng.normal(size=4)
    q = rng.normal(size=(4, 4))
    q = 0.5 * (q + q.T)
    budget = np.sum(np.abs(c)) + np.sum(np.abs(q))
    scale = 0.5 * rng.uniform(0.3, 1.0) / budget
    c *= scale
    q *= scale

    def fn(z):
        z = np.asarray(z, dtype=float)
        lin = z @ c
        quad = np.einsum("...i,ij,...j->...", z, q, z)
        return 1.0 + lin + quad

    return symplectic.RadialHypersurfaceS3.from_function(fn)


def criterion_8_stokes(seed=DEFAULT_SEED, n_psi=10, n_samples=1_000_000):
    """Contact volume equals twice the enclosed Euclidean volume (MC check)."""
    t0 = time.perf_counter()
    unit = symplectic.RadialHypersurfaceS3.constant(1.0)
    entries = [entry_eq("unit_sphere_contact_volume",
                        symplectic.contact_volume_radial_s3(unit),
                        math.pi ** 2, 1e-10)]
    rng = np.random.default_rng([seed, 8])
    worst_sigmas = 0.0
    for k in range(n_psi):
        surf = _random_radial_s3(rng)
        quad = symplectic.contact_volume_radial_s3(surf)
        est, err = symplectic.enclosed_volume_mc(
            surf, n_samples=n_samples, seed=seed * 1000 + k)
        worst_sigmas = max(worst_sigmas, abs(quad - 2.0 * est) / (2.0 * err))
    entries.append(entry_le("max_deviation_in_standard_errors",
                            worst_sigmas, 3.0))
    return _finish(8, "stokes_contact_volume", 30.0, t0, entries)


def criterion_9_boothby_wang(seed=DEFAULT_SEED, count=200):
    """Mean-inequality battery over Euler numbers 1..3 plus the round anchor."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 9])
    worst_excess = -math.inf
    flags_ok = True
    for k in range(count):
        euler = int(1 + k % 3)
        bundle = bw.BWBundle(euler)
        if k % 10 == 0:
            density = bw.DensityOnBase.constant(float(rng.uniform(0.5, 2.0)))
            expected_flag = True
        else:
            density = bw.random_positive_density(rng)
            expected_flag = False
        rep = bw.bw_systolic_ratio(density, bundle)
        worst_excess = max(worst_excess, rep.ratio - bundle.rho0)
        flags_ok &= (rep.is_zoll_equality == expected_flag)
        if expected_flag:
            flags_ok &= abs(rep.ratio - bundle.rho0) < 1e-9
    anchor = bw.bw_systolic_ratio(bw.DensityOnBase.constant(1.0), bw.BWBundle(2))
    entries = [
        entry_le("max_ratio_minus_rho0", worst_excess, 0.0, tol=1e-9),
        entry_ge("equality_flag_iff_constant", 1.0 if flags_ok else 0.0, 1.0),
        entry_eq("round_cotangent_anchor", anchor.ratio, 0.5, 1e-12),
    ]
    return _finish(9, "boothby_wang_battery", 10.0, t0, entries)


def criterion_10_mahler(seed=DEFAULT_SEED, count=500):
    """Cube values, the 2D/3D sandwich and linear invariance."""
    t0 = time.perf_counter()
    entries = []
    for n in (2, 3, 4):
        value = convex.mahler_volume(convex.PolytopeV.cube(n))
        expect = 4.0 ** n / math.factorial(n)
        entries.append(entry_eq("cube_mahler_dim%d" % n, value, expect,
                                1e-12 * expect))
    rng = np.random.default_rng([seed, 10])
    sandwich_ok = True
    worst_invariance = 0.0
    for k in range(count):
        n = 2 if k % 2 == 0 else 3
        poly = convex.random_symmetric_polytope(rng, n)
        report = convex.santalo_mahler_check(poly)
        sandwich_ok &= report.passed
        if k % 5 == 0:
            t = rng.normal(size=(n, n))
            while abs(np.linalg.det(t)) < 0.2:
                t = rng.normal(size=(n, n))
            v1 = convex.mahler_volume(poly)
            v2 = convex.mahler_volume(
                convex.PolytopeV(poly.vertices @ t.T, symmetric=True))
            worst_invariance = max(worst_invariance, abs(v2 - v1) / v1)
    entries.append(entry_ge("sandwich_all_passed", 1.0 if sandwich_ok else 0.0, 1.0))
    entries.append(entry_le("max_linear_invariance_error", worst_invariance, 1e-9))
    return _finish(10, "mahler_suite", 20.0, t0, entries)


def criterion_11_mvee(seed=DEFAULT_SEED, count=100):
    """Enclosing-ellipsoid chain on random symmetric 4D polytopes."""
    t0 = time.perf_counter()
    rng = np.random.default_rng([seed, 11])
    worst_slack = 0.0
    worst_volume_ratio = 0.0
    worst_chain = 0.0
    for _ in range(count):
        poly = convex.random_symmetric_polytope(rng, 4)
        ell = convex.mvee(poly.vertices, tol=1e-7, symmetric=True)
        slack = float(np.max(ell.level(poly.vertices))) - 1.0
        worst_slack = max(worst_slack, slack)
        report = convex.coarse_viterbo_bound(poly, tol=1e-7)
        worst_volume_ratio = max(worst_volume_ratio, report.volume_ratio)
        worst_chain = max(worst_chain, report.ratio_upper)
    entries = [
        entry_le("max_containment_violation", worst_slack, 0.0, tol=1e-7),
        entry_le("max_mvee_volume_ratio", worst_volume_ratio, 64.0),
        entry_le("max_capacity_chain_ratio", worst_chain, 64.0),
    ]
    return _finish(11, "mvee_loewner_chain", 60.0, t0, entries)


ALL_CRITERIA = (
    criterion_1_loewner,
    criterion_2_flat_moduli,
    criterion_3_klein,
    criterion_4_weinstein,
    criterion_5_viterbo_ellipsoids,
    criterion_6_nonsqueezing,
    criterion_7_hopf,
    criterion_8_stokes,
    criterion_9_boothby_wang,
    criterion_10_mahler,
    criterion_11_mvee,
)


def run_all(seed=DEFAULT_SEED, verbose=False):
    """Run every criterion; returns the list of CriterionResult."""
    results = []
    for criterion in ALL_CRITERIA:
        result = criterion(seed=seed)
        results.append(result)
        if verbose:
            print(result.line())
    return results

"""Command-line interface: every module as a subcommand with JSON reports.

Exit codes: 0 success, 1 a certified inequality failed beyond tolerance,
2 malformed input.  Reports are serialized deterministically (17
significant digits, stable key order), so identical seeds and flags give
byte-identical output.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import acceptance, boothby_wang, conformal, convex, flat_moduli, revolution, symplectic

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- serialization

def render_json(obj, compact=False):
    """Deterministic JSON: floats with 17 significant digits."""

    def render(node, depth):
        pad = "" if compact else "\n" + "  " * (depth + 1)
        end = "" if compact else "\n" + "  " * depth
        sep = "," if compact else ","
        if isinstance(node, dict):
            if not node:
                return "{}"
            items = (
                "%s%s: %s" % (pad, json.dumps(str(k)), render(v, depth + 1))
                for k, v in node.items()
            )
            return "{" + sep.join(items) + end + "}"
        if isinstance(node, (list, tuple, np.ndarray)):
            node = list(np.asarray(node).tolist()) if isinstance(node, np.ndarray) else list(node)
            if not node:
                return "[]"
            return "[" + sep.join(pad + render(v, depth + 1) for v in node) + end + "]"
        if isinstance(node, (bool, np.bool_)):
            return "true" if node else "false"
        if isinstance(node, (int, np.integer)):
            return str(int(node))
        if isinstance(node, (float, np.floating)):
            value = float(node)
            if not math.isfinite(value):
                raise ValueError("non-finite value in report: %r" % value)
            return format(value, ".17g")
        if node is None:
            return "null"
        return json.dumps(str(node))

    return render(obj, 0) + "\n"


def _emit(report, args):
    text = render_json(report, compact=args.json)
    sys.stdout.write(text)
    if args.out and not getattr(args, "_out_is_csv", False):
        with open(args.out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------- small parsers

def _pair(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    return tuple(parts)


def _float_list(text):
    return [float(x) for x in text.split(",")]


def _load_matrix(path):
    matrix = np.loadtxt(path, delimiter=",", ndmin=2)
    return matrix


def _check_entry(name, value, reference, comparator, tol=0.0):
    if comparator == "<=":
        margin = reference - value + tol
    elif comparator == ">=":
        margin = value - reference + tol
    else:
        margin = tol - abs(value - reference)
    return {
        "name": name,
        "value": float(value),
        "reference": float(reference),
        "comparator": comparator,
        "margin": float(margin),
        "status": "pass" if margin >= 0.0 else "fail",
    }


def _report(command, args, payload, checks):
    report = {"schema": SCHEMA_VERSION, "command": command, "seed": args.seed}
    report.update(payload)
    report["checks"] = checks
    code = 0 if all(c["status"] == "pass" for c in checks) else 1
    return report, code


# ---------------------------------------------------------------- subcommands

def _cmd_flat_reduce(args):
    lat = flat_moduli.Lattice2(args.v1, args.v2)
    mod = flat_moduli.reduce_to_gamma(lat)
    _, systole = flat_moduli.shortest_vector(lat)
    ratio = flat_moduli.torus_systolic_ratio(mod)
    payload = {
        "modulus": {"x0": mod.x0, "y0": mod.y0, "scale": mod.scale,
                    "rotation": mod.rotation},
        "systole": systole,
        "ratio": ratio,
    }
    checks = [
        _check_entry("ratio_vs_loewner_bound", ratio,
                     flat_moduli.TORUS_RATIO_MAX, "<=", 1e-12),
        _check_entry("systole_vs_scale", systole, mod.scale, "~", 1e-10),
    ]
    return _report("flat.reduce", args, payload, checks)


def _cmd_flat_klein(args):
    kp = flat_moduli.KleinParams(args.w, args.h)
    systole = flat_moduli.klein_systole(kp)
    ratio = flat_moduli.klein_systolic_ratio(kp)
    payload = {"systole": systole, "ratio": ratio}
    checks = [
        _check_entry("ratio_vs_flat_maximum", ratio, 1.0, "<=", 1e-12),
        _check_entry("ratio_vs_bavard_bound", ratio,
                     flat_moduli.KLEIN_RATIO_CEILING, "<="),
    ]
    return _report("flat.klein", args, payload, checks)


def _cmd_loewner_check(args):
    x0, y0 = args.modulus
    mod = flat_moduli.TorusModulus(x0, y0)
    grid = _load_matrix(args.f_grid)
    metric = conformal.ConformalTorusMetric(mod, grid)
    rep = conformal.loewner_chain_check(metric)
    payload = {
        "area_g": rep.area_g,
        "mean_sq_bound": rep.mean_sq_bound,
        "min_horizontal_length": rep.min_horizontal_length,
        "sigma_upper": rep.sigma_upper,
        "stage_gaps": list(rep.stage_gaps),
    }
    checks = [
        _check_entry("min_stage_gap", min(rep.stage_gaps), 0.0, ">=", 1e-9),
        _check_entry("sigma_upper_vs_flat", rep.sigma_upper, 1.0 / y0, "<=", 1e-9),
        _check_entry("sigma_upper_vs_loewner", rep.sigma_upper,
                     flat_moduli.TORUS_RATIO_MAX, "<=", 1e-9),
    ]
    return _report("loewner.check", args, payload, checks)


def _zoll_metric(args):
    return revolution.RevolutionMetric.from_odd_coeffs(_float_list(args.h))


def _cmd_zoll_certify(args):
    metric = _zoll_metric(args)
    tol = args.tol if args.tol else revolution.DEFAULT_TOL
    est = revolution.weak_systolic_ratio_estimate(metric, tol=tol)
    battery = revolution.zoll_closure_battery(metric, tol=tol)
    payload = {
        "h_coeffs": _float_list(args.h),
        "zoll": est.zoll_certified,
        "ratio": est.ratio,
        "area": est.area,
        "meridian_length": revolution.meridian_length(metric),
        "max_closure_defect": est.max_defect,
        "clairaut_battery": list(battery.p_phi_values),
        "closure_defects": list(battery.defects),
    }
    checks = [
        _check_entry("max_closure_defect", est.max_defect,
                     revolution.DEFAULT_TOL_CLOSE, "<="),
        _check_entry("area_vs_round", est.area, 4.0 * math.pi, "~", 1e-10),
        _check_entry("ratio_vs_weinstein", est.ratio, math.pi, "~", 1e-4),
    ]
    return _report("zoll.certify", args, payload, checks)


def _cmd_zoll_trace(args):
    metric = _zoll_metric(args)
    tol = args.tol if args.tol else revolution.DEFAULT_TOL
    state0 = revolution.equator_state(metric, args.pphi)
    traj = revolution.integrate_geodesic(metric, state0, args.length, tol=tol,
                                         n_samples=args.samples)
    if args.out:
        table = np.column_stack([traj.s, traj.states])
        np.savetxt(args.out, table, delimiter=",",
                   header="s,theta,phi,p_theta,p_phi", comments="")
        args._out_is_csv = True
    payload = {
        "h_coeffs": _float_list(args.h),
        "p_phi": args.pphi,
        "length": args.length,
        "samples": len(traj.s),
        "energy_drift": traj.energy_drift(),
        "clairaut_drift": traj.clairaut_drift(),
        "trajectory_csv": args.out or None,
    }
    checks = [
        _check_entry("energy_drift", traj.energy_drift(),
                     10.0 * tol * args.length, "<="),
        _check_entry("clairaut_drift", traj.clairaut_drift(),
                     10.0 * tol * args.length, "<="),
    ]
    return _report("zoll.trace", args, payload, checks)


def _cmd_symplectic_ellipsoid(args):
    spec = symplectic.EllipsoidSpec(tuple(sorted(_float_list(args.a))))
    ratio = symplectic.viterbo_ratio_ellipsoid(spec)
    payload = {
        "a": list(spec.a),
        "capacity": symplectic.capacity_ellipsoid(spec),
        "volume": symplectic.volume_ellipsoid(spec),
        "viterbo_ratio": ratio,
    }
    checks = [_check_entry("viterbo_ratio", ratio, 1.0, "<=", 1e-12)]
    return _report("symplectic.ellipsoid", args, payload, checks)


def _cmd_symplectic_shadow(args):
    matrix = _load_matrix(args.matrix)
    area = symplectic.shadow_area_linear(matrix)
    flag, residual = symplectic.is_symplectic(matrix, tol=1e-9)
    payload = {"shadow_area": area, "symplectic": flag,
               "symplecticity_residual": residual}
    checks = []
    if flag:
        checks.append(_check_entry("shadow_vs_nonsqueezing", area,
                                   math.pi, ">=", 1e-9))
    return _report("symplectic.shadow", args, payload, checks)


def _cmd_symplectic_check(args):
    matrix = _load_matrix(args.matrix)
    tol = args.tol if args.tol else 1e-9
    flag, residual = symplectic.is_symplectic(matrix, tol=tol)
    payload = {"symplectic": flag, "residual": residual, "tolerance": tol}
    return _report("symplectic.check", args, payload, [])


def _cmd_bw_ratio(args):
    if args.psi_harmonics:
        with open(args.psi_harmonics) as fh:
            spec = json.load(fh)
        density = boothby_wang.DensityOnBase.from_harmonics(
            spec.get("constant", 0.0), spec.get("terms", ()))
    else:
        density = boothby_wang.DensityOnBase.constant(1.0)
    bundle = boothby_wang.BWBundle(args.euler)
    rep = boothby_wang.bw_systolic_ratio(density, bundle)
    tmin_value, location = boothby_wang.min_of_density(density)
    payload = {
        "euler": args.euler,
        "rho0": bundle.rho0,
        "tmin_upper_bound": tmin_value,
        "tmin_location": {"theta": location[0], "phi": location[1]},
        "contact_volume": rep.volume,
        "ratio": rep.ratio,
        "is_zoll_equality": rep.is_zoll_equality,
    }
    checks = [_check_entry("ratio_vs_rho0", rep.ratio, bundle.rho0, "<=", 1e-9)]
    return _report("bw.ratio", args, payload, checks)


def _cmd_convex_mahler(args):
    vertices = _load_matrix(args.vertices)
    poly = convex.PolytopeV(vertices, symmetric=True)
    value = convex.mahler_volume(poly)
    n = poly.dim
    payload = {
        "dimension": n,
        "volume": convex.volume(poly),
        "polar_volume": convex.volume(convex.polar(poly)),
        "mahler_volume": value,
    }
    upper = convex.unit_ball_volume(n) ** 2
    checks = [_check_entry("mahler_vs_santalo", value, upper, "<=", 1e-9)]
    if n in (2, 3):
        checks.append(_check_entry("mahler_vs_cube", value,
                                   4.0 ** n / math.factorial(n), ">=", 1e-9))
    return _report("convex.mahler", args, payload, checks)


def _cmd_convex_mvee(args):
    points = _load_matrix(args.points)
    tol = args.tol if args.tol else 1e-7
    ellipsoid = convex.mvee(points, tol=tol)
    slack = 1.0 - float(np.max(ellipsoid.level(points)))
    payload = {
        "center": list(ellipsoid.center),
        "shape": [list(row) for row in ellipsoid.shape],
        "volume": ellipsoid.volume(),
        "min_containment_slack": slack,
    }
    checks = [_check_entry("containment_slack", slack, 0.0, ">=", tol)]
    return _report("convex.mvee", args, payload, checks)


def _cmd_verify_all(args):
    results = acceptance.run_all(seed=args.seed)
    # wall-clock times are left out of the report so identical seeds give
    # byte-identical bytes; only the limit verdict is recorded
    payload = {
        "criteria": [
            {
                "number": r.number,
                "name": r.name,
                "passed": r.passed,
                "runtime_within_limit": r.runtime_s < r.limit_s,
                "runtime_limit_s": r.limit_s,
                "entries": r.entries,
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    report = {"schema": SCHEMA_VERSION, "command": "verify-all",
              "seed": args.seed}
    report.update(payload)
    return report, 0 if payload["all_passed"] else 1


# ---------------------------------------------------------------- parser

def build_parser():
    # global flags are accepted before or after the subcommand; the
    # SUPPRESS default keeps a trailing occurrence from clobbering a
    # leading one
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized batteries (default %d)"
                             % acceptance.DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="override the subcommand's default tolerance")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="also write the report (or trace CSV) to this path")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="compact single-line JSON output")

    parser = argparse.ArgumentParser(
        prog="systolab",
        description="systolic-geometry laboratory: flat tori, Zoll metrics, "
                    "capacities, contact volumes, Mahler volumes",
        parents=[common],
    )
    commands = parser.add_subparsers(dest="command", required=True)

    flat = commands.add_parser("flat", help="flat tori and Klein bottles")
    flat_sub = flat.add_subparsers(dest="subcommand", required=True)
    reduce_p = flat_sub.add_parser("reduce", parents=[common],
                                   help="reduce a lattice to the moduli domain")
    reduce_p.add_argument("--v1", type=_pair, required=True, metavar="X,Y")
    reduce_p.add_argument("--v2", type=_pair, required=True, metavar="X,Y")
    reduce_p.set_defaults(func=_cmd_flat_reduce)
    klein_p = flat_sub.add_parser("klein", parents=[common],
                                  help="flat Klein bottle systole and ratio")
    klein_p.add_argument("--w", type=float, required=True)
    klein_p.add_argument("--h", type=float, required=True)
    klein_p.set_defaults(func=_cmd_flat_klein)

    loewner = commands.add_parser("loewner", help="conformal-torus chain check")
    loewner_sub = loewner.add_subparsers(dest="subcommand", required=True)
    check_p = loewner_sub.add_parser("check", parents=[common],
                                     help="certify the three-stage chain")
    check_p.add_argument("--modulus", type=_pair, required=True, metavar="X0,Y0")
    check_p.add_argument("--f-grid", required=True,
                         help="CSV, N_t rows x N_s columns, no header")
    check_p.set_defaults(func=_cmd_loewner_check)

    zoll = commands.add_parser("zoll", help="metrics of revolution on the sphere")
    zoll_sub = zoll.add_subparsers(dest="subcommand", required=True)
    certify_p = zoll_sub.add_parser("certify", parents=[common],
                                    help="closure battery + ratio")
    certify_p.add_argument("--h", required=True,
                           help="profile coefficients c_k of u - u^(2k+1), comma-separated")
    certify_p.set_defaults(func=_cmd_zoll_certify)
    trace_p = zoll_sub.add_parser("trace", parents=[common],
                                  help="integrate one geodesic to CSV")
    trace_p.add_argument("--h", required=True)
    trace_p.add_argument("--pphi", type=float, required=True)
    trace_p.add_argument("--length", type=float, default=2.0 * math.pi)
    trace_p.add_argument("--samples", type=int, default=400)
    trace_p.set_defaults(func=_cmd_zoll_trace)

    symp = commands.add_parser("symplectic", help="linear symplectic toolbox")
    symp_sub = symp.add_subparsers(dest="subcommand", required=True)
    ell_p = symp_sub.add_parser("ellipsoid", parents=[common],
                                help="capacity / volume / ratio")
    ell_p.add_argument("--a", required=True, help="semi-axis parameters, comma-separated")
    ell_p.set_defaults(func=_cmd_symplectic_ellipsoid)
    shadow_p = symp_sub.add_parser("shadow", parents=[common],
                                   help="projection area of M(ball)")
    shadow_p.add_argument("--matrix", required=True, help="CSV, row-major")
    shadow_p.set_defaults(func=_cmd_symplectic_shadow)
    check_m = symp_sub.add_parser("check", parents=[common],
                                  help="test M^T J M = J")
    check_m.add_argument("--matrix", required=True, help="CSV, row-major")
    check_m.set_defaults(func=_cmd_symplectic_check)

    bw_p = commands.add_parser("bw", help="circle-invariant contact forms over S^2")
    bw_sub = bw_p.add_subparsers(dest="subcommand", required=True)
    ratio_p = bw_sub.add_parser("ratio", parents=[common],
                                help="systolic ratio of (psi . p) alpha0")
    ratio_p.add_argument("--euler", type=int, required=True)
    ratio_p.add_argument("--psi-harmonics", default=None,
                         help='JSON {"constant": c, "terms": [[l, m, coeff], ...]}')
    ratio_p.set_defaults(func=_cmd_bw_ratio)

    conv = commands.add_parser("convex", help="polar duality and enclosing ellipsoids")
    conv_sub = conv.add_subparsers(dest="subcommand", required=True)
    mahler_p = conv_sub.add_parser("mahler", parents=[common],
                                   help="Mahler volume of a symmetric body")
    mahler_p.add_argument("--vertices", required=True, help="CSV, one vertex per row")
    mahler_p.set_defaults(func=_cmd_convex_mahler)
    mvee_p = conv_sub.add_parser("mvee", parents=[common],
                                 help="minimum-volume enclosing ellipsoid")
    mvee_p.add_argument("--points", required=True, help="CSV, one point per row")
    mvee_p.set_defaults(func=_cmd_convex_mvee)

    verify = commands.add_parser("verify-all", parents=[common],
                                 help="run the acceptance battery")
    verify.set_defaults(func=_cmd_verify_all)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    # the shared flags use SUPPRESS defaults (so a pre-subcommand occurrence
    # survives the subparser parse); fill in the fallbacks here
    for name, default in (("seed", acceptance.DEFAULT_SEED), ("tol", None),
                          ("out", None), ("json", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.seed < 0:
        sys.stderr.write("error: seed must be non-negative\n")
        return 2
    if args.tol is not None and not args.tol > 0.0:
        sys.stderr.write("error: tolerance must be positive\n")
        return 2
    args._out_is_csv = False
    try:
        report, code = args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())

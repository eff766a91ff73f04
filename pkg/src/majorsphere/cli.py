"""Command line front end: ``majorsphere <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors and 2 on usage errors.
Text output prints reals with 15 significant digits; ``--json`` prints
shortest round-trip floats.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import configurations as cf
from . import energy as en
from . import harmonic as hm
from . import majorization as mj
from . import optimize as op
from . import pointfile
from .errors import MajorsphereError


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.15g}"
    if x is None:
        return "none"
    return str(x)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (Fraction, float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dump_json(record) -> str:
    return json.dumps(jsonable(record), indent=2, allow_nan=False)


class Output:
    def __init__(self, args, stream=None):
        self.json = getattr(args, "json", False)
        self.stream = stream or sys.stdout

    def emit(self, record: dict, lines):
        if self.json:
            self.stream.write(dump_json(record) + "\n")
        else:
            for line in lines:
                self.stream.write(line + "\n")


def _floats(text: str, what: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise MajorsphereError(f"cannot parse {what} {text!r}") from None


def _load(path, args):
    return pointfile.load(path, normalize=getattr(args, "normalize", False))


# --- handlers ---------------------------------------------------------------


def cmd_gen(args, out):
    params = {
        "n": args.n, "m": args.m, "alpha": args.alpha, "a": args.a, "theta": args.theta,
        "dims": [int(d) for d in _floats(args.dims, "dims")] if args.dims else None,
    }
    X = cf.generate(args.family, **params)
    if out.json:
        out.emit({"command": "gen", "family": args.family, "n": X.dimension, "m": X.m,
                  "points": X.points.tolist()}, [])
    elif args.output:
        pointfile.save(X, args.output)
    else:
        pointfile.dump(X, out.stream)


def cmd_profile(args, out):
    X = _load(args.file, args)
    rho = cf.DistanceFunctional.parse(args.rho)
    prof = cf.distance_profile(X, rho)
    vals, pre = prof.sorted_view(), prof.prefix_sums()
    lines = [f"# rho={rho} pairs={prof.length}", "# value prefix_sum"]
    lines += [f"{fmt(v)} {fmt(s)}" for v, s in zip(vals, pre)]
    out.emit({"command": "profile", "rho": str(rho), "values": vals, "prefix_sums": pre}, lines)


def cmd_compare(args, out):
    rho = cf.DistanceFunctional.parse(args.rho)
    A = cf.distance_profile(_load(args.file_a, args), rho)
    B = cf.distance_profile(_load(args.file_b, args), rho)
    order = mj.compare(A, B, args.tol)
    out.emit({"command": "compare", "rho": str(rho), "order": order.value}, [order.value])


def cmd_energy(args, out):
    X = _load(args.file, args)
    if args.potential:
        rho = cf.DistanceFunctional.parse(args.rho)
        f = en.parse_potential(args.potential)
        E = en.pair_energy(X, rho, f)
        rec = {"command": "energy", "rho": str(rho), "potential": str(f), "energy": E}
    else:
        E = en.riesz_energy(X, args.t)
        rec = {"command": "energy", "t": args.t, "energy": E}
    out.emit(rec, [fmt(E)])


def cmd_minimize(args, out):
    cfg = op.OptimizerConfig(
        restarts=args.restarts, max_iterations=args.iters, gradient_tolerance=args.gtol,
        rng_seed=args.seed, workers=args.workers,
    )
    res = op.minimize_riesz(args.n, args.m, args.t, cfg)
    summary = (
        f"energy={fmt(res.energy)} converged={fmt(res.converged)} "
        f"gradient_norm={fmt(res.final_gradient_norm)} restart={res.restart_index} iterations={res.iterations}"
    )
    if out.json:
        out.emit({"command": "minimize", "n": args.n, "m": args.m, "t": args.t, "seed": args.seed,
                  "energy": res.energy, "converged": res.converged,
                  "final_gradient_norm": res.final_gradient_norm, "restart_index": res.restart_index,
                  "points": res.configuration.points.tolist()}, [])
        if args.output:
            pointfile.save(res.configuration, args.output, [summary])
        return
    if args.output:
        pointfile.save(res.configuration, args.output, [summary])
        out.stream.write(summary + "\n")
    else:
        pointfile.dump(res.configuration, out.stream)
        out.stream.write(f"# {summary}\n")


def cmd_falsify(args, out):
    X = _load(args.file, args)
    rho = cf.DistanceFunctional.parse(args.rho)
    cfg = op.OptimizerConfig(rng_seed=args.seed)
    res = op.mset_falsify(X, rho, args.trials, cfg, tol=args.tol)
    if res.found and args.output:
        pointfile.save(res.witness, args.output, [f"dominator of {args.file} under {rho}"])
    lines = [f"found={fmt(res.found)} trials_used={res.trials_used}"]
    if res.found:
        lines.append(f"witness_order={res.witness_order.value}")
    rec = {"command": "falsify", "rho": str(rho), "found": res.found, "trials_used": res.trials_used,
           "witness_order": res.witness_order.value if res.found else None,
           "witness": res.witness.points.tolist() if res.found else None}
    out.emit(rec, lines)


def cmd_extremal(args, out):
    T = mj.ConstraintVector(_floats(args.T, "T"))
    Y = mj.extremal_sequence(T)
    out.emit({"command": "extremal-seq", "T": T.values, "Y": Y.values},
             [",".join(fmt(v) for v in Y.values)])


def cmd_lower_bound(args, out):
    f = en.parse_potential(args.potential)
    val = en.lower_bound_from_constraints(_floats(args.T, "T"), f)
    out.emit({"command": "lower-bound", "potential": str(f), "bound": val}, [fmt(val)])


def cmd_simplex_bound(args, out):
    f = en.parse_potential(args.potential)
    val = en.simplex_energy_bound(args.m, f)
    out.emit({"command": "simplex-bound", "m": args.m, "potential": str(f), "a_m": 2 * args.m / (args.m - 1),
              "bound": val}, [fmt(val)])


def cmd_gegenbauer(args, out):
    if args.f is not None:
        p = hm.PolynomialInT.parse(args.f)
        e = hm.to_gegenbauer(p, args.n)
        lines = [f"f_{k} = {fmt(c)}" for k, c in enumerate(e.coefficients)]
        out.emit({"command": "gegenbauer", "n": args.n, "coefficients": e.coefficients,
                  "exact": [str(c) for c in e.coefficients] if e.exact else None}, lines)
        return
    if args.k is None or args.t is None:
        raise MajorsphereError("gegenbauer needs --f, or both --k and --t")
    v = hm.gegenbauer_eval(args.n, args.k, args.t)
    out.emit({"command": "gegenbauer", "n": args.n, "k": args.k, "t": args.t, "value": v}, [fmt(v)])


def cmd_moments(args, out):
    X = _load(args.file, args)
    mv = hm.moments(X, args.kmax)
    lines = [f"M_{k} = {fmt(v)}" for k, v in enumerate(mv.values)]
    out.emit({"command": "moments", "m": mv.m, "n": mv.dimension, "moments": mv.values}, lines)


def _cert_record(cert):
    return {
        "kind": cert.kind.value, "passed": cert.passed,
        "condition_1_residuals": cert.condition_1_residuals,
        "condition_2_violations": [list(v) for v in cert.condition_2_violations],
        "consistency": cert.consistency, "coefficients": cert.coefficients,
        "inner_products": cert.inner_products, "zeros": cert.zeros, "notes": cert.notes,
    }


def cmd_design_check(args, out):
    X = _load(args.file, args)
    chosen = [x is not None for x in (args.f, args.tau, args.harmonic_index)]
    if sum(chosen) != 1:
        raise MajorsphereError("design-check needs exactly one of --f, --tau, --harmonic-index")
    if args.f is not None:
        cert = hm.certify_f_design(X, hm.PolynomialInT.parse(args.f), args.tol, args.mtol, args.ctol)
    elif args.tau is not None:
        cert = hm.certify_tau_design(X, args.tau, args.mtol)
    else:
        K = [int(k) for k in _floats(args.harmonic_index, "index set")]
        cert = hm.harmonic_index_check(X, K, args.mtol)
    lines = [f"kind={cert.kind.value} passed={fmt(cert.passed)}"]
    lines += [f"k={k} residual={fmt(r)}" for k, r in cert.condition_1_residuals.items()]
    lines += [f"violation t={fmt(t)} f(t)={fmt(v)}" for t, v in cert.condition_2_violations]
    if cert.consistency:
        c = cert.consistency
        lines.append(f"f(1)={fmt(c['f_at_1'])} m*f_0={fmt(c['m_f0'])} consistent={fmt(c['ok'])}")
    lines += [f"note: {n}" for n in cert.notes]
    out.emit({"command": "design-check", **_cert_record(cert)}, lines)


def cmd_delsarte(args, out):
    p = hm.PolynomialInT.parse(args.f)
    if (args.T is None) == (args.interval is None):
        raise MajorsphereError("delsarte needs exactly one of --T or --interval")
    if args.T is not None:
        rep = hm.delsarte_bound(p, args.n, T=_floats(args.T, "T"), tol=args.tol)
    else:
        lo, hi = _floats(args.interval, "interval")
        rep = hm.delsarte_bound(p, args.n, interval=(lo, hi), tol=args.tol)
    lines = [f"bound={fmt(rep.bound)} hypotheses_ok={fmt(rep.hypotheses_ok)}",
             f"f_0={fmt(rep.f0)} f(1)={fmt(rep.f_at_1)}"]
    lines += [f"diagnostic: {d}" for d in rep.diagnostics]
    out.emit({"command": "delsarte", "bound": rep.bound, "hypotheses_ok": rep.hypotheses_ok,
              "f0": rep.f0, "f_at_1": rep.f_at_1, "coefficients": rep.coefficients,
              "diagnostics": rep.diagnostics}, lines)


def cmd_two_distance(args, out):
    X = _load(args.file, args)
    r = hm.two_distance_analysis(X, args.ctol)
    rec = {"command": "two-distance", "m": r.m, "n": r.n, "inner_products": r.inner_products,
           "is_two_distance": r.is_two_distance, "a": r.a, "b": r.b, "a_plus_b": r.a_plus_b,
           "a_plus_b_sign": r.a_plus_b_sign, "is_equiangular": r.is_equiangular,
           "relative_bound": r.relative_bound, "absolute_bound": r.absolute_bound,
           "meets_absolute": r.meets_absolute}
    lines = [f"{k}={fmt(v) if not isinstance(v, tuple) else ','.join(fmt(x) for x in v)}"
             for k, v in rec.items() if k != "command"]
    out.emit(rec, lines)


def cmd_decompose(args, out):
    X = _load(args.file, args)
    part = cf.kuperberg_decompose(X, args.ortho_tol)
    lines = [f"clusters={len(part.clusters)} dims={','.join(str(d) for d in part.dims)} valid={fmt(part.is_valid)}"]
    for c in part.clusters:
        lines.append(f"cluster size={c.cardinality} rank={c.rank} members={','.join(map(str, c.members))}")
    lines.append(f"max_cross_inner_product={part.max_cross_inner_product:.3e} min_distance={fmt(part.min_distance)}")
    lines += [f"failure: {f}" for f in part.failures]
    out.emit({"command": "decompose", "dims": part.dims, "is_valid": part.is_valid,
              "clusters": [{"members": c.members, "cardinality": c.cardinality, "rank": c.rank}
                           for c in part.clusters],
              "max_cross_inner_product": part.max_cross_inner_product,
              "min_distance": part.min_distance, "failures": part.failures}, lines)


def cmd_root51(args, out):
    t = op.solve_eq_5_1(args.s)
    g = op.eq51_residual(t, args.s)
    out.emit({"command": "root51", "s": args.s, "t_s": t, "residual": g}, [fmt(t)])


def cmd_classify(args, out):
    c = op.classify_triangle_msets(args.s)
    rec = {"command": "classify-triangles", "s": args.s, "case": c.case,
           "alpha_range": c.alpha_range, "lower_open": c.lower_open, "t_s": c.t_s}
    out.emit(rec, [f"case={c.case}", c.describe()])


# --- parser -------------------------------------------------------------------


def _add_file(p, name="file", optional=True):
    if optional:
        p.add_argument(name, nargs="?", default="-", help="point-set file (default '-': stdin)")
    else:
        p.add_argument(name, help="point-set file ('-' for stdin)")
    p.add_argument("--normalize", action="store_true", help="rescale points to unit norm instead of rejecting")


def _add_rho(p, default=None):
    p.add_argument("--rho", default=default, required=default is None,
                   help="distance functional: r, r2, phi or s:<value>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majorsphere", description=__doc__.splitlines()[0], allow_abbrev=False)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text, allow_abbrev=False)
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "generate a configuration in point-set format")
    p.add_argument("family", help="one of: " + ", ".join(f.replace("_", "-") for f in cf.FAMILIES))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--dims", help="simplex dimensions, e.g. 1,3")
    p.add_argument("-o", "--output")

    p = add("profile", cmd_profile, "sorted distance profile and prefix sums")
    _add_file(p)
    _add_rho(p)

    p = add("compare", cmd_compare, "majorization order between two configurations")
    _add_file(p, "file_a", optional=False)
    p.add_argument("file_b")
    _add_rho(p)
    p.add_argument("--tol", type=float, default=mj.REL_TOL, help="relative prefix-sum tolerance (default 1e-9)")

    p = add("energy", cmd_energy, "Riesz energy, or pair energy with --potential")
    _add_file(p)
    p.add_argument("--t", type=float, default=1.0, help="Riesz exponent (default 1; 0 = logarithmic)")
    _add_rho(p, "r")
    p.add_argument("--potential", help="inv:<t>, neglog, exp:<c>, riesz:<t>, riesz2:<t>, const:<c>, neg")

    p = add("minimize", cmd_minimize, "local Riesz energy minimization with restarts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gtol", type=float, default=1e-9, help="projected gradient tolerance (default 1e-9)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"parallel restarts (default from ${op.THREADS_ENV}, else 1)")
    p.add_argument("-o", "--output")

    p = add("falsify", cmd_falsify, "search for a strictly dominating configuration")
    _add_file(p)
    _add_rho(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=mj.REL_TOL)
    p.add_argument("-o", "--output", help="write the witness here when found")

    p = add("extremal-seq", cmd_extremal, "extremal sequence Y(T)")
    p.add_argument("--T", required=True, help="comma separated non-decreasing bounds")

    p = add("lower-bound", cmd_lower_bound, "energy lower bound sum f(y_k(T))")
    p.add_argument("--T", required=True)
    p.add_argument("--potential", required=True)

    p = add("simplex-bound", cmd_simplex_bound, "C(m,2) f(2m/(m-1)) for f of the squared distance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--potential", default="riesz2:1", help="potential in squared distance (default riesz2:1)")

    p = add("gegenbauer", cmd_gegenbauer, "evaluate G_k^(n)(t) or expand a polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--f", help="monomial coefficients low to high, e.g. -0.25,0,1")

    p = add("moments", cmd_moments, "Gegenbauer moments M_0..M_kmax")
    _add_file(p)
    p.add_argument("--kmax", type=int, default=6)

    p = add("design-check", cmd_design_check, "certify an f-design, tau-design or harmonic index")
    _add_file(p)
    p.add_argument("--f")
    p.add_argument("--tau", type=int)
    p.add_argument("--harmonic-index", help="comma separated index set K")
    p.add_argument("--tol", type=float, default=1e-9, help="zero test for f on inner products (default 1e-9)")
    p.add_argument("--mtol", type=float, default=hm.MOMENT_TOL, help="|M_k| <= mtol*m^2 (default 1e-8)")
    p.add_argument("--ctol", type=float, default=cf.CLUSTER_TOL, help="inner-product clustering (default 1e-6)")

    p = add("delsarte", cmd_delsarte, "Delsarte linear programming bound f(1)/f_0")
    p.add_argument("--f", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", help="finite set of allowed inner products")
    p.add_argument("--interval", help="allowed inner products lo,hi")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("two-distance", cmd_two_distance, "two-distance structure and cardinality bounds")
    _add_file(p)
    p.add_argument("--ctol", type=float, default=cf.CLUSTER_TOL)

    p = add("decompose", cmd_decompose, "split into mutually orthogonal clusters")
    _add_file(p)
    p.add_argument("--ortho-tol", type=float, default=cf.ORTHO_TOL)

    p = add("root51", cmd_root51, "second root t_s of the isosceles-triangle equation")
    p.add_argument("--s", type=float, required=True)

    p = add("classify-triangles", cmd_classify, "three-point M-sets on the circle for r_s")
    p.add_argument("--s", type=float, required=True)
    return parser


_LIST_FLAGS = ("--f", "--T", "--interval", "--dims", "--harmonic-index")


def _glue_list_values(argv):
    """Let list flags take values with a leading minus, e.g. ``--f -0.25,0,1``."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _glue_list_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, Output(args, stdout))
    except (MajorsphereError, OSError) as exc:
        stderr.write(f"majorsphere {args.command}: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

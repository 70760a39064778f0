"""Command-line front end: ``idemkit gen | analyze | nrange``.

Exit codes: 0 when every check passes, 1 when a numerical check fails,
2 for bad input (unreadable file, non-idempotent matrix, bad parameters).
"""
import argparse
import json
import sys
import time

import numpy as np

from . import canonical, distance, grid, idempotent, io, nrange
from . import linalg as la
from .errors import BadDims, IdemkitError

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


class _Checks:
    """Collects named residuals against tolerances; nothing is dropped on failure."""

    def __init__(self, scale):
        self.scale = scale
        self.items = {}

    def add(self, name, residual, tol):
        tol = tol * self.scale
        residual = float(residual)
        self.items[name] = {"pass": bool(residual <= tol), "residual": residual, "tol": tol}

    def flag(self, name, ok, detail=None):
        self.items[name] = {"pass": bool(ok), "residual": 0.0 if ok else 1.0, "tol": 0.0}
        if detail is not None:
            self.items[name]["detail"] = detail

    def run(self, name, fn):
        try:
            fn()
        except IdemkitError as exc:
            self.items[name] = {"pass": False, "residual": float(getattr(exc, "residual", 1.0)),
                                "tol": 0.0, "error": f"{type(exc).__name__}: {exc}"}

    @property
    def ok(self):
        return all(v["pass"] for v in self.items.values())


def analyze(Q, seed=0, tol=1e-9, samples=1000):
    """Run every identity the library knows about on one idempotent."""
    rng = np.random.default_rng(seed)
    Q = idempotent.as_idempotent(Q)
    n, q = Q.n, Q.norm
    I = np.eye(n)
    k = _Checks(tol / 1e-9)
    s2 = 1.0 + q * q
    m = idempotent.matched_projection(Q)
    report = {"schema": io.SCHEMA, "input": {"n": n, "norm": q, "defect": Q.defect,
                                             "is_projection": Q.is_projection}}
    timings = {}

    t0 = time.perf_counter()
    k.add("matched_idempotent", la.op_norm(m @ m - m), 1e-9 * s2)
    k.add("matched_selfadjoint", la.op_norm(m - la.adj(m)), 1e-9 * s2)
    k.add("matched_adjoint_invariance", la.op_norm(idempotent.matched_projection(la.adj(Q.Q)) - m), 1e-9 * s2)
    k.add("matched_complement", la.op_norm(idempotent.matched_projection(I - Q.Q) - (I - m)), 1e-9 * s2)
    k.add("reconstruct_from_matched", la.op_norm(idempotent.reconstruct_from_matched(Q) - Q.Q), 1e-8 * s2)
    timings["idempotent"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lo = distance.min_distance_formula(q)
    hi = 1.0 + lo
    k.add("min_distance_closed_form", abs(la.op_norm(m - Q.Q) - lo), 1e-9 * (1 + q))
    k.add("max_distance_closed_form", abs(la.op_norm(I - m - Q.Q) - hi), 1e-9 * (1 + q))
    worst = 0.0
    for _ in range(samples):
        P = idempotent.random_projection(n, rng)
        dist = la.op_norm(P - Q.Q)
        worst = max(worst, lo - dist, dist - hi)
    k.add("extremality_monte_carlo", max(worst, 0.0), 1e-9 * (1 + q))
    k.run("sqp_invariant", lambda: (distance.sqp_invariant(Q, rng), k.flag("sqp_invariant", True)))
    lam, mu = distance.lambda_mu(Q)
    report["distance"] = {"min_dist": lo, "max_dist": hi, "lambda_Q": lam, "mu_Q": mu}
    timings["distance"] = time.perf_counter() - t0

    if Q.is_projection:
        k.add("projection_fixed_by_m", la.op_norm(m - Q.Q), 1e-9 * s2)
        report["skipped"] = ["intermediate_value", "canonical", "universal", "numerical_range"]
        report["checks"] = k.items
        return report, k.ok, timings

    t0 = time.perf_counter()
    k.flag("lambda_mu_order", lo - 1e-9 <= lam < mu <= hi + 1e-9,
           detail=[lo, lam, mu, hi])
    alphas = [lo + 0.5 * (hi - lo), lo + rng.uniform() * (hi - lo)]
    worst = 0.0
    for al in alphas:
        try:
            P = distance.projection_at_distance(Q, al)
            worst = max(worst, abs(la.op_norm(P - Q.Q) - al), la.op_norm(P @ P - P), la.op_norm(P - la.adj(P)))
        except IdemkitError:
            worst = np.inf
    k.add("intermediate_value", worst, 1e-6)
    probe = distance.null_padding_probe(Q)
    if probe is not None:
        report["null_padding_probe"] = {"dim_H4": probe["dim_H4"], "P_minus_Q": probe["P_minus_Q"],
                                        "I_minus_P_minus_Q": probe["I_minus_P_minus_Q"]}
        k.add("null_padding_probe", max(abs(probe["P_minus_Q"] - max(lo, 1.0)),
                                        abs(probe["I_minus_P_minus_Q"] - hi)), 1e-9 * (1 + q))
    timings["intermediate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cf = canonical.canonical_form(Q)
    k.add("canonical_rebuild_Q", la.op_norm(cf.rebuild_Q() - Q.Q) / q, 1e-8)
    k.add("canonical_rebuild_m", la.op_norm(cf.rebuild_m() - m), 1e-8)
    k.add("canonical_norm", abs(q - max(1.0, 2 * cf.d - 1)), 1e-9 * (1 + q))
    subs = canonical.invariant_subspaces(Q)
    dims = {h: int(v.shape[1]) for h, v in subs.items()}
    k.flag("subspace_dims", (dims["H1"], dims["H4"], dims["H5"], dims["H6"]) == (cf.h1, cf.h4, cf.h5, cf.h5),
           detail=dims)
    k.add("H1_plus_H5_is_m", la.op_norm(la.projector(subs["H1"]) + la.projector(subs["H5"]) - m), 1e-8 * s2)
    k.run("eigen_transfer", lambda: k.flag("eigen_transfer", canonical.verify_eigen_transfer(cf.D)))
    dv = np.linalg.eigvalsh(cf.D)
    report["canonical"] = {"h1": cf.h1, "h4": cf.h4, "h5": cf.h5, "D_norm": float(dv[-1]),
                           "D_min": float(dv[0]),
                           "spectral_gap": float(np.max(np.diff(np.r_[1.0, dv, dv[-1]])))}
    uni = grid.universal_check(Q)
    k.flag("finite_not_universal", uni.verdict == grid.NOT_UNIVERSAL)
    k.flag("complement_universal_agrees", grid.complement_check(Q))
    report["universal"] = {"verdict": uni.verdict, "d": uni.d, "gap": uni.gap}
    timings["canonical"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    tq = nrange.tq_report(Q)
    E = tq["ellipse"]
    k.add("tq_norm", tq["norm_residual"], 1e-7 * tq["d"])
    k.add("tq_radius", tq["radius_residual"], 1e-7 * tq["d"])
    k.flag("tq_quadratic_classification", tq["is_quadratic"] == tq["predicted_quadratic"],
           detail={"residual": tq["quadratic_residual"], "predicted_quadratic": tq["predicted_quadratic"]})
    T = nrange.tq_operator(Q)
    zs = nrange.monte_carlo_points(T, samples, rng)
    k.add("tq_monte_carlo_inside", max(float(np.max(E.level(zs))) - 1.0, 0.0), 1e-7)
    cl = nrange.closedness(Q)
    k.add("closed_boundary_witness", cl.boundary_gap, 1e-8)
    report["numerical_range"] = {"tq_ellipse": {"x0": E.x0, "y0": E.y0, "a": E.a, "b": E.b},
                                 "norm": 2 * E.a, "radius": E.a + E.x0, "closed": cl.verdict,
                                 "quadratic": tq["is_quadratic"]}
    timings["numerical_range"] = time.perf_counter() - t0

    report["checks"] = k.items
    return report, k.ok, timings


# --- commands -------------------------------------------------------------------

def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_gen(args):
    Q = idempotent.random_idempotent(args.n, args.k, args.a, seed=args.seed)
    doc = io.idempotent_doc(Q)
    doc["params"] = {"n": args.n, "k": args.k, "a": args.a, "seed": args.seed}
    _write(io.dumps(doc), args.out)
    return EXIT_OK


def cmd_analyze(args):
    Q = idempotent.validate(io.matrix_from_doc(io.load(args.input)))
    report, ok, timings = analyze(Q, seed=args.seed, tol=args.tol, samples=args.samples)
    report["input"]["path"] = args.input
    if args.timings:
        report["timings"] = timings
    report["pass"] = ok
    _write(io.dumps(report), args.out)
    return EXIT_OK if ok else EXIT_CHECK


def _profile_rows(prof):
    return [(a, h, z.real, z.imag) for a, h, z in zip(prof.angles, prof.values, prof.points)]


def cmd_nrange(args):
    sources = [args.input is not None, args.qr is not None, args.sr is not None]
    if sum(sources) != 1:
        raise SystemExit("nrange: give exactly one of INPUT, --qr, --sr")
    angles = nrange.angle_grid(args.angles)
    header = {"schema": io.SCHEMA, "angles": args.angles}
    ok = True
    extra = {}
    if args.qr is not None:
        F = grid.make_Qr(args.qr, args.mesh)
        T = nrange.tq_grid(F)
        E = nrange.open_ellipse_qr(args.qr)
        header.update(source=f"T(Q_r) r={args.qr}", mesh=args.mesh, center=E.x0,
                      a2=E.a ** 2, b2=E.b ** 2, closure="ellipse", range="open")
        prof = nrange.support_profile(T, angles)
    elif args.sr is not None:
        F = grid.make_Sr(args.sr, args.mesh)
        prof = nrange.support_profile(F, angles)
        diag = nrange.sr_diagnostics(args.sr, args.mesh, angles=args.angles, refine=())
        fit = diag["fit"]
        ok = fit["mismatch"] > fit["floor"]
        header.update(source=f"S_r r={args.sr}", mesh=args.mesh, fit_residual=fit["mismatch"],
                      nonellipse_floor=fit["floor"], h_pi=diag["attainment"]["h_pi"])
        extra["exact"] = diag["exact"]
    else:
        T = io.matrix_from_doc(io.load(args.input))
        if T.shape[0] != T.shape[1]:
            raise BadDims(f"expected a square matrix, got shape {T.shape}")
        header.update(source=args.input, n=T.shape[0])
        prof = nrange.support_profile(T, angles)

    rows = _profile_rows(prof)
    if args.format == "json":
        doc = dict(header)
        doc.update(alpha=prof.angles, h=prof.values, re=prof.points.real, im=prof.points.imag, **extra)
        _write(io.dumps(doc), args.out)
    else:
        lines = [f"# {key}: {json.dumps(io.jsonable(val))}" for key, val in header.items()]
        lines.append("alpha,h,re,im")
        lines += [",".join(f"{io.num(v):.15g}" for v in row) for row in rows]
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_CHECK


def build_parser():
    p = argparse.ArgumentParser(prog="idemkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random idempotent as JSON")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--a", type=float, default=1.0, help="norm of the off-diagonal block")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="run every check on an idempotent from a JSON file")
    a.add_argument("input")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--tol", type=float, default=1e-9, help="base tolerance; all checks scale with it")
    a.add_argument("--samples", type=int, default=1000, help="Monte-Carlo sample count")
    a.add_argument("--timings", action="store_true", help="include wall-clock timings (not reproducible)")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("nrange", help="support profile and boundary polyline")
    r.add_argument("input", nargs="?")
    r.add_argument("--qr", type=float)
    r.add_argument("--sr", type=float)
    r.add_argument("--angles", type=int, default=256)
    r.add_argument("--mesh", type=int, default=400)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_nrange)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IdemkitError, OSError, json.JSONDecodeError) as exc:
        print(f"idemkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

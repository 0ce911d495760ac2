"""Command-line front-end: solve / check / study on problem files.

Exit codes are a stable contract: 0 success, 1 input or evaluation error,
2 reported non-convergence, 3 hypothesis-audit failure.  Every run writes
a manifest (problem source, resolved configuration, seed, tool version)
next to its outputs; re-running with the same manifest reproduces the data
files bit-for-bit (the manifest itself carries the only timestamp).
"""

import argparse
import csv
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .audit import run_audit
from .fnspace import difference_norm, norm_X
from .model import validate_problem
from .operator import QuadratureConfig
from .problemfile import load_problem_file
from .solver import SolverConfig, solve, verify_residuals

OUT_DIR_ENV = "IMPULSEBVP_OUT_DIR"


def _add_common(sub):
    sub.add_argument("problem", help="problem JSON file")
    sub.add_argument("--horizon", type=float, default=40.0,
                     help="truncation horizon H (default 40)")
    sub.add_argument("--t0", type=float, default=None,
                     help="override the working-domain start")
    sub.add_argument("--mesh-spacing", type=float, default=0.01,
                     help="node spacing of the working mesh (default 0.01)")
    sub.add_argument("--seed", type=int, default=0, help="manifest seed")
    sub.add_argument("--out-dir", default=None,
                     help=f"output directory (default: ${OUT_DIR_ENV} or '.')")


def _add_solver_flags(sub):
    sub.add_argument("--tol", type=float, default=1e-8)
    sub.add_argument("--max-iter", type=int, default=50)
    sub.add_argument("--damping", type=float, default=1.0)
    sub.add_argument("--anderson", type=int, default=0,
                     help="Anderson mixing depth (0 = plain damped Picard)")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="impulsebvp",
        description="solve and audit impulsive coupled BVPs on the half-line")
    sp = ap.add_subparsers(dest="command", required=True)

    s = sp.add_parser("solve", help="solve a problem file")
    _add_common(s)
    _add_solver_flags(s)
    s.add_argument("--gnuplot-script", action="store_true",
                   help="also emit a plotting script next to the data file")

    c = sp.add_parser("check", help="audit the existence-theorem hypotheses")
    _add_common(c)
    c.add_argument("--rho", type=float, default=1.0,
                   help="domination radius for the sampling audits")
    c.add_argument("--rho1", type=float, default=None,
                   help="given ball radius (default: rho)")
    c.add_argument("--samples", type=int, default=10000)
    c.add_argument("--ball-samples", type=int, default=100)
    c.add_argument("--K", type=int, default=1000,
                   help="impulse-sum truncation for the summability audit")
    c.add_argument("--sample-at-rho2", action="store_true",
                   help="draw ball samples from the rho2-ball instead of the "
                        "rho-ball (probes the literal self-mapping)")

    t = sp.add_parser("study", help="horizon/mesh refinement study")
    _add_common(t)
    _add_solver_flags(t)
    t.add_argument("--horizons", default=None,
                   help="comma list of increasing horizons, e.g. 20,40,80")
    t.add_argument("--mesh-levels", default=None,
                   help="comma list of mesh spacings, e.g. 0.02,0.01,0.005")
    return ap


def _out_dir(args):
    d = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve(args):
    p = load_problem_file(args.problem)
    if args.t0 is not None:
        p = dataclasses.replace(p, t0=args.t0)
    qc = QuadratureConfig(horizon=args.horizon, mesh_spacing=args.mesh_spacing)
    return p, qc


def _write_manifest(out, args, qc=None, sc=None):
    resolved = {k: v for k, v in vars(args).items() if k != "command"}
    manifest = {
        "command": args.command,
        "problem": str(Path(args.problem).resolve()),
        "resolved_flags": resolved,
        "seed": args.seed,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if qc is not None:
        manifest["quadrature_config"] = {
            k: v for k, v in dataclasses.asdict(qc).items()
            if not callable(v)}
    if sc is not None:
        manifest["solver_config"] = {
            "max_iter": sc.max_iter, "tol": sc.tol, "damping": sc.damping,
            "anderson_depth": sc.anderson_depth,
            "initial_guess": (sc.initial_guess
                              if isinstance(sc.initial_guess, str)
                              else "user-supplied")}
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)


def _side_rows(pair):
    """Rows (t, side, u, u', v, v') over the union grid, with -/+ rows at
    every impulse time of either component."""
    u, v = pair.u, pair.v
    times = np.union1d(u.mesh.grid, v.mesh.grid)
    jumps = np.union1d(u.mesh.impulse_times, v.mesh.impulse_times)

    def at(fn, t, side):
        if side == "+" and np.isin(t, fn.mesh.impulse_times):
            lo, hi = fn.mesh.impulse_slots(t)
            return fn.values[hi], fn.derivs[hi]
        return fn(t), fn.deriv(t)

    rows = []
    for t in times:
        sides = ("-", "+") if np.isin(t, jumps) else ("",)
        for side in sides:
            eff = "+" if side == "+" else "-"
            uu, du = at(u, t, eff)
            vv, dv = at(v, t, eff)
            rows.append((float(t), side, float(uu), float(du), float(vv), float(dv)))
    return rows


def _write_solution(out, pair, gnuplot_script=False):
    rows = _side_rows(pair)
    with open(out / "solution.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "side", "u", "u_deriv", "v", "v_deriv"])
        for r in rows:
            w.writerow([repr(r[0]), r[1], repr(r[2]), repr(r[3]), repr(r[4]), repr(r[5])])
    with open(out / "solution.dat", "w") as fh:
        fh.write("# t u u_deriv v v_deriv\n")
        for r in rows:
            if r[1] == "+":
                fh.write("\n")  # blank line: gnuplot breaks the polyline at jumps
            fh.write(f"{r[0]:.17g} {r[2]:.17g} {r[3]:.17g} {r[4]:.17g} {r[5]:.17g}\n")
    if gnuplot_script:
        with open(out / "solution.gp", "w") as fh:
            fh.write('set xlabel "t"\n'
                     'plot "solution.dat" using 1:2 with lines title "u", \\\n'
                     '     "solution.dat" using 1:4 with lines title "v"\n')


def cmd_solve(args):
    out = _out_dir(args)
    try:
        p, qc = _resolve(args)
        report = validate_problem(p, args.horizon, seed=args.seed)
        if not report.passed:
            print("problem validation failed:", file=sys.stderr)
            for c in report.checks:
                if not c["passed"]:
                    print(f"  {c['name']}: {c['details']}", file=sys.stderr)
            return 1
        sc = SolverConfig(max_iter=args.max_iter, tol=args.tol,
                          damping=args.damping, anderson_depth=args.anderson)
        pair, diag = solve(p, sc, qc)
        residuals = verify_residuals(p, pair)
    except (RuntimeError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _write_manifest(out, args, qc=qc, sc=sc)
    _write_solution(out, pair, gnuplot_script=getattr(args, "gnuplot_script", False))
    diagnostics = {
        "solve": diag.to_dict(),
        "residuals": residuals.to_dict(),
        "solution_norm": norm_X(pair),
    }
    with open(out / "diagnostics.json", "w") as fh:
        json.dump(diagnostics, fh, indent=2)
    status = "converged" if diag.converged else "did NOT converge"
    print(f"{status} after {diag.iterations} iterations; "
          f"final residual {diag.residual_history[-1]:.3e}; "
          f"outputs in {out}")
    return 0 if diag.converged else 2


def cmd_check(args):
    out = _out_dir(args)
    try:
        p, qc = _resolve(args)
        if p.bounds is None:
            print("error: the problem carries no Caratheodory bounds "
                  "(field 'bounds'); the audit needs Phi/Psi and the four "
                  "impulse-bound sequences", file=sys.stderr)
            return 1
        rho1 = args.rho1 if args.rho1 is not None else args.rho
        report = run_audit(p, p.bounds, rho=args.rho, rho1=rho1, K=args.K,
                           qc=qc, samples=args.samples, seed=args.seed,
                           ball_samples=args.ball_samples,
                           sample_at_rho=not args.sample_at_rho2)
    except (RuntimeError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_manifest(out, args, qc=qc)
    report.to_json(out / "hypothesis_report.json")
    print(report.summary())
    return 0 if report.all_pass else 3


def _study_levels(args):
    if args.horizons and args.mesh_levels:
        raise ValueError("pick one study axis: --horizons or --mesh-levels")
    if args.horizons:
        hs = [float(x) for x in args.horizons.split(",")]
        return [(h, args.mesh_spacing) for h in hs]
    if args.mesh_levels:
        ms = [float(x) for x in args.mesh_levels.split(",")]
        return [(args.horizon, m) for m in ms]
    raise ValueError("study needs --horizons or --mesh-levels")


def cmd_study(args):
    out = _out_dir(args)
    try:
        levels = _study_levels(args)
        p0 = load_problem_file(args.problem)
        if args.t0 is not None:
            p0 = dataclasses.replace(p0, t0=args.t0)
    except (RuntimeError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    sc = SolverConfig(max_iter=args.max_iter, tol=args.tol,
                      damping=args.damping, anderson_depth=args.anderson)
    rows = []
    prev = None
    for horizon, spacing in levels:
        row = {"horizon": horizon, "mesh_spacing": spacing}
        try:
            qc = QuadratureConfig(horizon=horizon, mesh_spacing=spacing)
            pair, diag = solve(p0, sc, qc)
            residuals = verify_residuals(p0, pair)
            row.update({
                "converged": diag.converged,
                "iterations": diag.iterations,
                "residual": diag.residual_history[-1],
                "ode_residual": residuals.max_ode_residual,
                "integral_tail": diag.truncation.integral_tail_estimate,
                "impulse_tail": diag.truncation.impulse_tail_estimate,
                "diff_to_prev": (difference_norm(prev, pair)
                                 if prev is not None else None),
            })
            prev = pair
        except (RuntimeError, ValueError) as exc:
            row["error"] = str(exc)
        rows.append(row)

    _write_manifest(out, args, sc=sc)
    fields = ["horizon", "mesh_spacing", "converged", "iterations", "residual",
              "ode_residual", "integral_tail", "impulse_tail", "diff_to_prev",
              "error"]
    with open(out / "study.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for row in rows:
            w.writerow({k: row.get(k, "") for k in fields})
    for row in rows:
        print(" ".join(f"{k}={row[k]}" for k in fields if row.get(k) is not None))
    return 0 if any("error" not in r for r in rows) else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    code = {"solve": cmd_solve, "check": cmd_check, "study": cmd_study}[args.command](args)
    sys.exit(code)


if __name__ == "__main__":
    main()

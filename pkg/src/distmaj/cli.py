"""Batch command line interface.

One solve per process; exit code 0 on success, 1 on input errors, 2 when the
solver finished without meeting its convergence criteria.  ``--threads`` (or
the DISTMAJ_THREADS env var) pins the BLAS thread pools, which is why every
numeric import happens inside the command handlers, after the env is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS")

SUMMARY_KEYS = ("objective", "violation_max", "violation_signed",
                "iterations", "seconds", "mu_final", "converged")


def _summary(objective, violation_max, violation_signed, iterations,
             seconds, mu_final, converged) -> dict:
    return {
        "objective": float(objective),
        "violation_max": float(violation_max),
        "violation_signed": float(violation_signed),
        "iterations": int(iterations),
        "seconds": float(seconds),
        "mu_final": float(mu_final),
        "converged": bool(converged),
    }


def _emit(summary: dict, out_prefix, trace=None) -> int:
    shown = {k: v for k, v in summary.items() if k != "seconds"}
    print(" ".join(f"{k}={v}" for k, v in shown.items()))
    if out_prefix:
        with open(out_prefix + ".summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if trace is not None:
            trace.write_csv(out_prefix + ".trace.csv")
    return 0 if summary["converged"] else 2


def _config(args, preset):
    """Apply explicit CLI overrides on top of an application preset."""
    from dataclasses import replace
    config = preset
    if args.stages is not None:
        config = replace(config, max_stages=args.stages, mu_schedule=None)
    if args.rho is not None:
        config = replace(config, rho=args.rho)
    if args.secants is not None:
        config = replace(config, secants=args.secants)
    return config


# ---------------------------------------------------------------------------
# command handlers


def cmd_feasibility(args) -> int:
    from .datasets import FeasibilityData, feasibility_halfspaces
    from .penalty import SolverConfig, feasibility_solve
    from .projections import Halfspace
    import numpy as np

    if args.input:
        data = FeasibilityData.from_csv(args.input)
    else:
        data = feasibility_halfspaces(args.size, args.seed, args.dim)
    sets = [Halfspace(a, b) for a, b in zip(data.normals, data.offsets)]
    preset = SolverConfig(rho=1e-12, mu_schedule=[1.0], max_inner=100_000)
    res = feasibility_solve(sets, np.zeros(data.normals.shape[1]),
                            tol=args.tol, config=_config(args, preset))
    return _emit(_summary(res.objective, res.violation, -res.violation,
                          res.iterations, res.seconds, 0.0, res.converged),
                 args.out, res.trace)


def cmd_project_dnn(args) -> int:
    from .applications.dnn import default_dnn_config, dnn_project
    from .datasets import dnn_matrix, load_matrix, save_matrix

    s = load_matrix(args.input) if args.input else \
        dnn_matrix(args.size, args.seed)
    config = _config(args, default_dnn_config(args.solver))
    res = dnn_project(s, config=config, solver=args.solver)
    if args.out:
        save_matrix(args.out + ".matrix.csv", res.matrix)
    return _emit(_summary(0.5 * res.distance ** 2,
                          max(res.eig_violation, res.entry_violation),
                          res.violation_signed, res.iterations, res.seconds,
                          res.mu_final, res.converged),
                 args.out, res.trace)


def cmd_isotone(args) -> int:
    from .applications.isotone import default_isotone_config, isotone_fit
    from .datasets import RegressionData, isotone_data

    data = RegressionData.from_csv(args.input) if args.input else \
        isotone_data(args.size, args.seed)
    config = _config(args, default_isotone_config(args.solver))
    fit = isotone_fit(data, config=config, solver=args.solver)
    return _emit(_summary(fit.objective, fit.violation_max,
                          fit.violation_signed, fit.iterations, fit.seconds,
                          fit.mu_final, fit.converged),
                 args.out, fit.trace)


def cmd_convexreg(args) -> int:
    from .applications.convex_regression import (convex_reg_fit,
                                                 default_convexreg_config)
    from .datasets import RegressionData, convexreg_data

    data = RegressionData.from_csv(args.input) if args.input else \
        convexreg_data(args.size, args.seed, args.dim)
    config = _config(args, default_convexreg_config(args.solver))
    fit = convex_reg_fit(data, config=config, solver=args.solver)
    return _emit(_summary(fit.objective, fit.violation_max,
                          fit.violation_signed, fit.iterations, fit.seconds,
                          fit.mu_final, fit.converged),
                 args.out, fit.trace)


def cmd_svm(args) -> int:
    from .applications.svm import default_svm_config, svm_fit
    from .datasets import RegressionData, svm_data

    data = RegressionData.from_csv(args.input) if args.input else \
        svm_data(args.size, args.seed, args.dim)
    config = _config(args, default_svm_config(args.solver))
    model = svm_fit(data.x, data.y, lam=args.lam, config=config,
                    solver=args.solver)
    return _emit(_summary(model.objective, model.violation_max,
                          model.violation_signed, model.iterations,
                          model.seconds, model.mu_final, model.converged),
                 args.out, model.trace)


def cmd_firestation(args) -> int:
    from .applications.fire_station import fire_station
    from .datasets import firestation_rectangles, load_rectangles

    rects = load_rectangles(args.input) if args.input else \
        firestation_rectangles()
    res = fire_station(rects, norm=args.norm)
    print("location=" + ",".join(repr(float(v)) for v in res.location))
    return _emit(_summary(res.objective, 0.0, 0.0, res.iterations,
                          res.seconds, 0.0, res.converged),
                 args.out, res.trace)


def cmd_robust(args) -> int:
    from .datasets import RegressionData, robust_data
    from .robust import default_robust_config, robust_regression

    data = RegressionData.from_csv(args.input) if args.input else \
        robust_data(args.size, args.seed, args.dim)
    config = _config(args, default_robust_config(constrained=False))
    fit = robust_regression(data.x, data.y, cutoff=args.cutoff,
                            config=config, n_starts=args.starts)
    print("coef=" + ",".join(repr(float(v)) for v in fit.coef))
    mu_final = fit.trace.last.mu if len(fit.trace) else 0.0
    return _emit(_summary(fit.objective, 0.0, 0.0, fit.iterations,
                          fit.trace.last.seconds if len(fit.trace) else 0.0,
                          mu_final, fit.converged),
                 args.out, fit.trace)


def cmd_cosine(args) -> int:
    from .applications.cosine import cosine_mm_iterate, summa_gap
    import numpy as np

    iters = cosine_mm_iterate(args.x0, args.steps)
    final = float(iters[-1])
    # nearest minimizer of cos: an odd multiple of pi
    target = float((2.0 * np.round((final / np.pi - 1.0) / 2.0) + 1.0) * np.pi)
    gap_grid = np.linspace(-2 * np.pi, 2 * np.pi, 2001)
    min_gap = float(np.min(summa_gap(gap_grid, args.x0)))
    err = abs(final - target)
    print(f"final={final!r} distance_to_minimizer={err!r} "
          f"min_summa_gap={min_gap!r}")
    return _emit(_summary(float(np.cos(final)), 0.0, 0.0, args.steps, 0.0,
                          0.0, err <= 1e-8),
                 args.out, None)


def cmd_bench(args) -> int:
    from .applications.dnn import default_dnn_config, dnn_project
    from .applications.isotone import default_isotone_config, isotone_fit
    from .datasets import dnn_matrix, isotone_data
    from .penalty import SolverConfig

    rows = []
    all_ok = True
    for solver in ("mm", "mm-qn", "dual", "dual-fista"):
        if args.problem == "dnn":
            config = default_dnn_config(solver)
            if args.rho is not None:
                config.rho = args.rho
            res = dnn_project(dnn_matrix(args.size, args.seed),
                              config=config, solver=solver)
            rows.append((solver, res.seconds, res.iterations, res.distance,
                         res.violation_signed))
            all_ok = all_ok and res.converged
        else:
            config = default_isotone_config(solver)
            if args.rho is not None:
                config.rho = args.rho
            fit = isotone_fit(isotone_data(args.size, args.seed),
                              config=config, solver=solver)
            rows.append((solver, fit.seconds, fit.iterations, fit.distance,
                         fit.violation_max))
            all_ok = all_ok and fit.converged
    header = f"{'method':<12}{'seconds':>10}{'iterations':>12}" \
        f"{'distance':>14}{'violation':>12}"
    print(header)
    for name, sec, it, dist, viol in rows:
        print(f"{name:<12}{sec:>10.3f}{it:>12d}{dist:>14.4f}{viol:>12.2e}")
    if args.out:
        import csv as _csv
        with open(args.out + ".bench.csv", "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["method", "seconds", "iterations", "distance",
                             "violation"])
            for name, sec, it, dist, viol in rows:
                writer.writerow([name, repr(float(sec)), int(it),
                                 repr(float(dist)), repr(float(viol))])
    return 0 if all_ok else 2


def cmd_generate(args) -> int:
    from .datasets import generate, save_dataset

    obj = generate(args.kind, args.size, args.seed, args.dim)
    save_dataset(obj, args.kind, args.output)
    print(f"wrote {args.kind} dataset to {args.output}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(p, solvers=None, size=50, dim=None):
    p.add_argument("--input", help="input CSV (otherwise --generate style "
                   "seeded data is built in memory)")
    p.add_argument("--generate", action="store_true",
                   help="build the seeded dataset (default when no --input)")
    p.add_argument("--size", type=int, default=size)
    p.add_argument("--seed", type=int, default=0)
    if dim is not None:
        p.add_argument("--dim", type=int, default=dim)
    p.add_argument("--rho", type=float, default=None,
                   help="relative step stopping threshold")
    p.add_argument("--stages", type=int, default=None,
                   help="number of mu stages (overrides the preset schedule)")
    p.add_argument("--secants", type=int, default=None,
                   help="acceleration history length (0 disables)")
    if solvers:
        p.add_argument("--solver", choices=solvers, default=solvers[0])
    p.add_argument("--out", help="prefix for .summary.json / .trace.csv")
    p.add_argument("--threads", type=int, default=None,
                   help="BLAS thread count (also via DISTMAJ_THREADS)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="distmaj",
        description="Distance-majorization solvers: smooth losses over "
                    "intersections of convex sets")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("feasibility", help="find a point in an intersection "
                       "of halfspaces")
    _add_common(p, size=8, dim=3)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="max set distance counted as feasible")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("project-dnn", help="nearest doubly nonnegative "
                       "matrix")
    _add_common(p, solvers=("mm-qn", "mm", "dual", "dual-fista"), size=50)
    p.set_defaults(func=cmd_project_dnn)

    p = sub.add_parser("isotone", help="monotone regression")
    _add_common(p, solvers=("mm-qn", "mm", "dual", "dual-fista"), size=100)
    p.set_defaults(func=cmd_isotone)

    p = sub.add_parser("convexreg", help="convex regression")
    _add_common(p, solvers=("mm-qn", "mm"), size=20, dim=1)
    p.set_defaults(func=cmd_convexreg)

    p = sub.add_parser("svm", help="soft-margin linear SVM")
    _add_common(p, solvers=("mm-qn", "mm"), size=200, dim=5)
    p.add_argument("--lam", type=float, default=10.0)
    p.set_defaults(func=cmd_svm)

    p = sub.add_parser("firestation", help="facility location for the "
                       "rectangle instance")
    _add_common(p)
    p.add_argument("--norm", choices=("l1", "l2"), default="l1")
    p.set_defaults(func=cmd_firestation)

    p = sub.add_parser("robust", help="Tukey biweight robust regression")
    _add_common(p, size=40, dim=3)
    p.add_argument("--cutoff", type=float, default=4.685)
    p.add_argument("--starts", type=int, default=1)
    p.set_defaults(func=cmd_robust)

    p = sub.add_parser("cosine-demo", help="cos(x) MM iteration and the "
                       "SUMMA gap")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_cosine)

    p = sub.add_parser("bench", help="compare MM / MM-QN / dual / "
                       "dual-FISTA on one instance")
    p.add_argument("--problem", choices=("dnn", "isotone"), required=True)
    p.add_argument("--size", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a seeded dataset CSV")
    p.add_argument("--kind", required=True)
    p.add_argument("--size", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--output", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_generate)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = args.threads if args.threads is not None else \
        os.environ.get("DISTMAJ_THREADS")
    if threads:
        for var in _THREAD_VARS:
            os.environ[var] = str(threads)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

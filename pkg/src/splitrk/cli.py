"""Command-line front end: method listing, order verification, stability scans,
and convergence studies, with CSV/JSON output and rendered figures."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .integrator import NewtonError, integrate
from .methods import REGISTRY, build_method
from .order_conditions import classical_order, residuals_up_to
from .problems import dahlquist, fit_order, heat2d, heat3d, l2_error, l2_error_raw
from .rk import BASE_METHODS
from .stability import scan_region
from .tableau import GarkTableau

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

ENV_WORKERS = "SPLITRK_WORKERS"


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(ENV_WORKERS, "1")))
    except ValueError:
        return 1


def _add_method_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", help="registered method name (see 'splitrk list')")
    parser.add_argument("--mode", choices=("adi", "parallel"), default="adi",
                        help="coupling-block assembly for methods that support it")
    parser.add_argument("--partitions", type=int, default=None,
                        help="number of stiff partitions (default: 2, or the problem's)")
    parser.add_argument("--theta", type=float, default=None)
    parser.add_argument("--sigma", type=float, default=None)
    parser.add_argument("--mu", type=float, default=None)
    parser.add_argument("--f0", type=_parse_bool, default=None,
                        help="include the nonstiff partition (true/false)")
    parser.add_argument("--base", choices=sorted(BASE_METHODS), default=None,
                        help="base Runge-Kutta method for composition schemes")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _collect_params(args) -> dict:
    info = REGISTRY[args.method]
    declared = {name for name, _, _ in info.params}
    params = {}
    for name in ("theta", "sigma", "mu", "f0", "base"):
        value = getattr(args, name, None)
        if value is None:
            continue
        if name not in declared:
            raise ValueError(f"method {args.method!r} takes no parameter --{name}")
        params[name] = value
    return params


def _resolve_tableau(args, default_partitions: int = 2):
    """Build (tableau, description dict) from --method or --tableau."""
    n = args.partitions if args.partitions is not None else default_partitions
    if getattr(args, "tableau", None):
        tableau = GarkTableau.load_json(args.tableau)
        return tableau, {"tableau_file": args.tableau}
    if not args.method:
        raise ValueError("either --method or --tableau is required")
    if args.method not in REGISTRY:
        raise ValueError(f"unknown method {args.method!r}; try 'splitrk list'")
    params = _collect_params(args)
    tableau = build_method(args.method, n_partitions=n, mode=args.mode, **params)
    meta = {"method": args.method, "mode": args.mode, "partitions": n, "params": params}
    return tableau, meta


def _out_base(path: str) -> str:
    root, ext = os.path.splitext(path)
    return root if ext in (".csv", ".json", ".png") else path


def _write_csv(rows, header, out_path):
    if out_path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# -- subcommands -----------------------------------------------------------------


def cmd_list(args) -> int:
    print(f"{'name':<20} {'parameters':<42} description")
    for name in sorted(REGISTRY):
        info = REGISTRY[name]
        parts = [
            f"{p}={d:.4g}" if isinstance(d, float) else f"{p}={d}"
            for p, _, d in info.params
        ]
        if info.supports_mode:
            parts.append("mode=adi|parallel")
        if info.fixed_partitions is not None:
            parts.append(f"partitions={info.fixed_partitions}")
        print(f"{name:<20} {', '.join(parts) or '-':<42} {info.summary}")
    print(f"\nbase methods for composition schemes: {', '.join(sorted(BASE_METHODS))}")
    return EXIT_OK


def cmd_verify(args) -> int:
    tableau, meta = _resolve_tableau(args)
    residuals = residuals_up_to(tableau, 4)
    rows = [
        (
            r.order,
            r.condition_id,
            ";".join(str(i) for i in r.partition_indices),
            f"{r.residual:.17g}",
            int(abs(r.residual) < args.tol),
        )
        for r in residuals
    ]
    _write_csv(rows, ("order", "condition_id", "indices", "residual", "pass"),
               f"{_out_base(args.out)}.csv" if args.out else None)
    attained = classical_order(tableau, tol=args.tol)
    if args.expect_order is not None:
        target = args.expect_order
    elif "method" in meta:
        info = REGISTRY[meta["method"]]
        target = info.nominal_order(meta["partitions"], meta["params"])
    else:
        target = None
    if target is None:
        print(f"classical order: {attained}", file=sys.stderr)
        return EXIT_OK
    verdict = "pass" if attained >= target else "FAIL"
    print(f"classical order: {attained} (documented {target}) -> {verdict}",
          file=sys.stderr)
    return EXIT_OK if attained >= target else EXIT_VERIFY_FAIL


def cmd_tableau(args) -> int:
    tableau, _ = _resolve_tableau(args)
    if args.out:
        tableau.dump_json(args.out)
    else:
        json.dump(tableau.to_json_dict(), sys.stdout, indent=2)
        print()
    return EXIT_OK


def cmd_stability(args) -> int:
    tableau, meta = _resolve_tableau(args)
    coupling = "equal" if args.coupling == "equal" else int(args.coupling)
    scan = scan_region(
        tableau,
        re_range=tuple(args.re),
        im_range=tuple(args.im),
        resolution=args.resolution,
        coupling=coupling,
    )
    rows = [
        (f"{x:.17g}", f"{y:.17g}", f"{scan.magnitude[j, k]:.17g}")
        for j, y in enumerate(scan.im)
        for k, x in enumerate(scan.re)
    ]
    base = _out_base(args.out) if args.out else None
    _write_csv(rows, ("re", "im", "abs_R"), f"{base}.csv" if base else None)
    if base:
        header = dict(meta)
        header.update(
            coupling=args.coupling,
            re_range=list(args.re),
            im_range=list(args.im),
            resolution=args.resolution,
        )
        with open(f"{base}.json", "w") as fh:
            json.dump(header, fh, indent=2)
            fh.write("\n")
        if not args.no_plot:
            from .reporting import save_stability_figure

            name = meta.get("method", "tableau")
            save_stability_figure(scan, f"{base}.png", title=f"{name} ({args.coupling})")
    return EXIT_OK


_PROBLEMS = {"heat2d": (heat2d, 2), "heat3d": (heat3d, 3)}


def _converge_case(case: dict) -> dict:
    """One (method, problem, step count) run; module-level so workers can pickle it."""
    if case["problem"] == "dahlquist":
        ode = dahlquist(case["rates"])
        prob = None
        y0 = np.array([1.0 + 0.0j])
        n_parts = len(case["rates"])
    else:
        maker, dim = _PROBLEMS[case["problem"]]
        prob = maker(case["np"])
        ode = prob.ode()
        y0 = prob.exact(0.0)
        n_parts = dim
    tableau = build_method(
        case["method"], n_partitions=n_parts, mode=case["mode"], **case["params"]
    )
    start = time.perf_counter()
    result = integrate(tableau, ode, 0.0, 1.0, y0, case["n_steps"])
    wall = time.perf_counter() - start
    if prob is not None:
        err = l2_error(result.y, prob, 1.0)
        raw = l2_error_raw(result.y, prob, 1.0)
    else:
        exact = np.exp(np.sum(case["rates"])) * y0
        err = raw = float(abs(result.y[0] - exact[0]))
    return {"n_steps": case["n_steps"], "error": err, "raw_error": raw, "wall": wall}


def cmd_converge(args) -> int:
    if args.method not in REGISTRY:
        raise ValueError(f"unknown method {args.method!r}; try 'splitrk list'")
    steps = [int(s) for s in args.steps.split(",")]
    if steps != sorted(steps) or len(set(steps)) != len(steps):
        raise ValueError("step counts must be strictly increasing")
    params = _collect_params(args)
    rates = [complex(r) for r in args.rates.split(",")] if args.rates else None
    if args.problem == "dahlquist" and rates is None:
        raise ValueError("dahlquist needs --rates, e.g. --rates=-1,-2")
    cases = [
        {
            "method": args.method,
            "mode": args.mode,
            "params": params,
            "problem": args.problem,
            "np": args.np,
            "rates": rates,
            "n_steps": ns,
        }
        for ns in steps
    ]
    workers = args.workers if args.workers else _default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_converge_case, cases))
    else:
        outcomes = [_converge_case(c) for c in cases]
    errors = [o["error"] for o in outcomes]
    fitted = fit_order(steps, errors)
    rows = [
        (o["n_steps"], f"{o['error']:.17g}", f"{o['raw_error']:.17g}") for o in outcomes
    ]
    base = _out_base(args.out) if args.out else None
    _write_csv(rows, ("n_steps", "l2_error", "raw_l2_error"),
               f"{base}.csv" if base else None)
    record = {
        "method": args.method,
        "mode": args.mode,
        "params": params,
        "problem": args.problem,
        "np": args.np,
        "steps": steps,
        "errors": errors,
        "fitted_order": fitted,
        "wall_times": [o["wall"] for o in outcomes],
    }
    if base:
        with open(f"{base}.json", "w") as fh:
            json.dump(record, fh, indent=2)
            fh.write("\n")
        if not args.no_plot:
            from .reporting import save_convergence_figure

            title = f"{args.method} ({args.mode}) on {args.problem}, np={args.np}"
            save_convergence_figure(steps, errors, fitted, f"{base}.png", title=title)
    print(f"fitted order: {fitted:.3f}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitrk",
        description="splitting-based implicit Runge-Kutta methods: verification,"
        " stability scans, and convergence studies",
    )
    parser.add_argument("--version", action="version", version=f"splitrk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="show the method catalog")
    p_list.set_defaults(func=cmd_list)

    p_verify = sub.add_parser("verify", help="evaluate order-condition residuals")
    _add_method_options(p_verify)
    p_verify.add_argument("--tableau", help="read the tableau from a JSON file instead")
    p_verify.add_argument("--expect-order", type=int, default=None,
                          help="override the documented order to check against")
    p_verify.add_argument("--tol", type=float, default=1e-10)
    p_verify.add_argument("--out", help="base path for the CSV report")
    p_verify.set_defaults(func=cmd_verify)

    p_tab = sub.add_parser("tableau", help="write a method's tableau as JSON")
    _add_method_options(p_tab)
    p_tab.add_argument("--tableau", help=argparse.SUPPRESS)
    p_tab.add_argument("--out", help="JSON output path (default: stdout)")
    p_tab.set_defaults(func=cmd_tableau)

    p_stab = sub.add_parser("stability", help="scan |R| over a complex-plane grid")
    _add_method_options(p_stab)
    p_stab.add_argument("--tableau", help="read the tableau from a JSON file instead")
    p_stab.add_argument("--re", type=float, nargs=2, default=(-15.0, 15.0),
                        metavar=("MIN", "MAX"))
    p_stab.add_argument("--im", type=float, nargs=2, default=(-15.0, 15.0),
                        metavar=("MIN", "MAX"))
    p_stab.add_argument("--resolution", type=int, default=301)
    p_stab.add_argument("--coupling", default="equal",
                        help="'equal' or a partition index receiving the argument")
    p_stab.add_argument("--out", help="base path for CSV/JSON/PNG outputs")
    p_stab.add_argument("--no-plot", action="store_true")
    p_stab.set_defaults(func=cmd_stability)

    p_conv = sub.add_parser("converge", help="temporal convergence study")
    _add_method_options(p_conv)
    p_conv.add_argument("--problem", choices=("heat2d", "heat3d", "dahlquist"),
                        required=True)
    p_conv.add_argument("--np", type=int, default=16,
                        help="interior grid points per direction")
    p_conv.add_argument("--rates", help="comma-separated rates for dahlquist")
    p_conv.add_argument("--steps", default="32,64,128,256",
                        help="comma-separated step counts")
    p_conv.add_argument("--workers", type=int, default=None,
                        help=f"parallel runs (default ${ENV_WORKERS} or 1)")
    p_conv.add_argument("--out", help="base path for CSV/JSON/PNG outputs")
    p_conv.add_argument("--no-plot", action="store_true")
    p_conv.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NewtonError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

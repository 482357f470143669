"""Command-line entry point: ``inspect``, ``solve``, ``sweep``, ``nonlocal``.

Specs for Young functions and meshes are JSON (inline or a file path), plus
compact shorthands ``interval:L,N`` / ``rectangle:LX,LY,NX,NY`` for meshes.
Outputs are JSON summaries and deterministic CSV; plots are emitted as
standalone scripts rather than rendered in-process.

Exit codes: 0 success (all requested checks pass), 1 a verification check
failed, 2 usage or configuration error.
"""

import argparse
import json
import math
import os
import sys
from concurrent import futures

import numpy as np

from . import __version__
from .errors import GeometryError, OrliczError, ConfigError
from .fractional import NonlocalMesh, solve_Es
from .mesh import Mesh
from .solver import SolveOptions, solve_E
from .sweep import (check_bounds, check_decay, estimate_limits,
                    geometric_grid, run_sweep)
from .young import (Endpoint, Regime, YoungFunction, delta2_report,
                    matuszewska_exponent)

__all__ = ["main"]

_CHECKS = ("bounds", "derivative", "limits", "decay")


def _load_spec(text):
    """Inline JSON, or a path to a JSON file."""
    text = text.strip()
    if not text.startswith(("{", "[")):
        try:
            with open(text) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read spec file {text!r}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON spec: {exc}")


def _young_from_arg(text):
    return YoungFunction.from_config(_load_spec(text))


def _mesh_from_arg(text):
    text = text.strip()
    if text.startswith("interval:"):
        parts = text[len("interval:"):].split(",")
        if len(parts) != 2:
            raise ConfigError("interval shorthand is interval:LENGTH,CELLS")
        return Mesh.interval(float(parts[0]), int(parts[1]))
    if text.startswith("rectangle:"):
        parts = text[len("rectangle:"):].split(",")
        if len(parts) != 4:
            raise ConfigError(
                "rectangle shorthand is rectangle:LX,LY,NX,NY")
        return Mesh.rectangle(float(parts[0]), float(parts[1]),
                              int(parts[2]), int(parts[3]))
    return Mesh.from_config(_load_spec(text))


def _solve_options(args):
    return SolveOptions(tol=args.tol, max_iter=args.max_iter,
                        restarts=args.restarts, seed=args.seed)


def _emit_json(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path, header, rows):
    """Deterministic CSV: repr-exact float formatting, fixed column order."""
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                f"{v:.17g}" if isinstance(v, float) else str(v)
                for v in row) + "\n")


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Generated plot script: quotient E(alpha)/alpha and lambda(alpha) vs alpha.
import csv
import matplotlib.pyplot as plt

alphas, quotients, lams = [], [], []
with open({csv_path!r}) as fh:
    for row in csv.DictReader(fh):
        alphas.append(float(row["alpha"]))
        quotients.append(float(row["quotient"]))
        lams.append(float(row["lambda"]))

fig, ax = plt.subplots()
ax.loglog(alphas, quotients, "o-", label="E(alpha)/alpha")
ax.loglog(alphas, lams, "s--", label="lambda(alpha)")
ax.set_xlabel("alpha")
ax.legend()
fig.savefig({out_path!r}, dpi=150, bbox_inches="tight")
print("wrote", {out_path!r})
"""


# -- subcommands ------------------------------------------------------------

def _cmd_inspect(args):
    F = _young_from_arg(args.young)
    payload = {"label": F.label, "family": F.family.value,
               "delta2": {}, "matuszewska": {}}
    p_candidates = []
    for ep in (Endpoint.ZERO, Endpoint.INFINITY):
        rep = delta2_report(F, ep)
        payload["delta2"][ep.value] = rep.as_dict()
        if math.isfinite(rep.p_index):
            p_candidates.append(rep.p_index)
        est = matuszewska_exponent(F, ep)
        payload["matuszewska"][ep.value] = est.as_dict()
    payload["p_index"] = max(p_candidates) if p_candidates else math.inf
    _emit_json(payload, args.out)
    return 0


def _result_payload(result):
    return result.as_dict()


def _cmd_solve(args):
    F = _young_from_arg(args.young)
    m = _mesh_from_arg(args.mesh)
    result = solve_E(F, m, args.alpha, _solve_options(args))
    _emit_json(_result_payload(result), args.out)
    if args.csv:
        result.u.to_csv(args.csv)
    return 0 if result.converged else 1


def _cmd_nonlocal(args):
    F = _young_from_arg(args.young)
    nm = NonlocalMesh(args.interval, args.nodes, args.s, args.rcut)
    result = solve_Es(F, nm, args.alpha, _solve_options(args))
    _emit_json(_result_payload(result), args.out)
    if args.csv:
        result.u.to_csv(args.csv)
    return 0 if result.converged else 1


def _global_p_index(F):
    ps = [delta2_report(F, ep).p_index
          for ep in (Endpoint.ZERO, Endpoint.INFINITY)]
    p = max(ps)
    if not math.isfinite(p):
        raise ConfigError(
            "bounds check needs the doubling condition; the doubling "
            "index diverges for this Young function")
    return p


def _check_derivative(records):
    mid = [r for r in records if r.converged and math.isfinite(r.dE_dalpha)]
    gaps = sorted(abs(r.dE_dalpha - r.lam) / r.lam for r in mid)
    median = gaps[len(gaps) // 2] if gaps else math.inf
    sandwich = all(-1e-12 <= r.dE_dalpha <= 1.05 * r.lam for r in mid)
    return {
        "median_relative_gap": median,
        "sandwich_ok": sandwich,
        "records_used": len(mid),
        "overall_pass": bool(gaps) and median <= 2e-2 and sandwich,
    }


def _check_limits(F, m, records, opts, solve):
    out = {"overall_pass": True}
    for ep in (Endpoint.ZERO, Endpoint.INFINITY):
        est = matuszewska_exponent(F, ep)
        if est.regime is not Regime.POWER_LIKE:
            out[ep.value] = {"regime": est.regime.value, "skipped": True}
            continue
        le = estimate_limits(F, m, records, ep, opts, solve)
        ok = le.relative_gap <= 5e-2
        out[ep.value] = dict(le.as_dict(), overall_pass=ok)
        out["overall_pass"] = out["overall_pass"] and ok
    return out


def _decay_endpoint(F):
    for ep in (Endpoint.INFINITY, Endpoint.ZERO):
        if not delta2_report(F, ep).holds:
            return ep
    raise ConfigError(
        "decay check needs a non-doubling endpoint, but the doubling "
        "condition holds at both")


def _cmd_sweep(args):
    F = _young_from_arg(args.young)
    m = _mesh_from_arg(args.mesh)
    opts = _solve_options(args)
    grid = geometric_grid(args.alpha_min, args.alpha_max, args.per_decade)
    if args.nonlocal_:
        if m.dim != 1:
            raise ConfigError("nonlocal sweeps are one-dimensional")
        nm = NonlocalMesh(m.extents[0], m.interior_count, args.s, args.rcut)

        def solve(Fy, _m, alpha, o, initial=None):
            return solve_Es(Fy, nm, alpha, o, initial)
        check_mesh = nm.mesh
    else:
        solve, check_mesh = solve_E, m

    if not args.warm:
        with futures.ThreadPoolExecutor(max_workers=max(args.jobs, 1)) \
                as pool:
            records = list(pool.map(
                lambda a: run_sweep(F, check_mesh, [a], opts, solve)[0],
                grid))
        for k in range(1, len(records) - 1):
            lo, hi = records[k - 1], records[k + 1]
            records[k].dE_dalpha = ((hi.energy - lo.energy)
                                    / (hi.alpha - lo.alpha))
    else:
        records = run_sweep(F, check_mesh, grid, opts, solve)

    report = {
        "alpha_min": args.alpha_min, "alpha_max": args.alpha_max,
        "records": len(records),
        "converged": sum(r.converged for r in records),
        "sup_quotient": max(r.quotient for r in records if r.converged),
        "checks": {},
    }
    checks = [c for c in (args.check or "").split(",") if c]
    for name in checks:
        if name not in _CHECKS:
            raise ConfigError(f"unknown check {name!r}; "
                              f"choose from {', '.join(_CHECKS)}")
        if name == "bounds":
            report["checks"]["bounds"] = check_bounds(records,
                                                     _global_p_index(F))
        elif name == "derivative":
            report["checks"]["derivative"] = _check_derivative(records)
        elif name == "limits":
            report["checks"]["limits"] = _check_limits(
                F, check_mesh, records, opts, solve)
        elif name == "decay":
            report["checks"]["decay"] = check_decay(
                F, check_mesh, records, _decay_endpoint(F))

    if args.csv:
        header = ["alpha", "energy", "quotient", "lambda", "dE_dalpha",
                  "converged", "residual"]
        rows = [[r.alpha, r.energy, r.quotient, r.lam, r.dE_dalpha,
                 r.converged, r.residual] for r in records]
        _write_csv(args.csv, header, rows)
    if args.plot_script:
        if not args.csv:
            raise ConfigError("--plot-script requires --csv")
        with open(args.plot_script, "w") as fh:
            fh.write(_PLOT_TEMPLATE.format(
                csv_path=args.csv,
                out_path=os.path.splitext(args.csv)[0] + ".png"))
    _emit_json(report, args.out)
    failed = [n for n, r in report["checks"].items()
              if not r.get("overall_pass", True)]
    return 1 if failed else 0


# -- argument parsing -------------------------------------------------------

def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=50_000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON summary here (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="orlicz-eigen",
        description="Constrained energy and first eigenvalue of the "
                    "generalized a-Laplacian.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="Young-function diagnostics")
    p.add_argument("--young", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_inspect)

    p = sub.add_parser("solve", help="minimize at one alpha")
    p.add_argument("--young", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--csv", help="write the minimizer's nodal values here")
    _add_solver_flags(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("sweep", help="alpha sweep with verification checks")
    p.add_argument("--young", required=True)
    p.add_argument("--mesh", required=True)
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--per-decade", type=int, default=5)
    p.add_argument("--nonlocal", dest="nonlocal_", action="store_true")
    p.add_argument("--s", type=float, default=0.5,
                   help="fractional order for --nonlocal")
    p.add_argument("--rcut", type=float, default=None)
    p.add_argument("--check", default="",
                   help="comma list from: " + ", ".join(_CHECKS))
    p.add_argument("--csv", help="write SweepRecord rows here")
    p.add_argument("--plot-script",
                   help="write a matplotlib script reading the CSV")
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("ORLICZ_EIGEN_JOBS", "1")))
    p.add_argument("--warm", action=argparse.BooleanOptionalAction,
                   default=True,
                   help="warm-start along the grid (sequential); "
                        "--no-warm enables --jobs parallelism")
    _add_solver_flags(p)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("nonlocal", help="fractional solve at one alpha")
    p.add_argument("--young", required=True)
    p.add_argument("--interval", type=float, required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--rcut", type=float, default=None)
    p.add_argument("--csv", help="write the minimizer's nodal values here")
    _add_solver_flags(p)
    p.set_defaults(fn=_cmd_nonlocal)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors and 0 for --help/--version
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OrliczError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Each subcommand computes a JSON payload and, where there is a curve or a
table, CSV rows. Without ``--out`` the JSON goes to stdout. Exit status is
0 on success, 1 on a usage error and 2 when a validation fails; failures
print a JSON error object with a witness on stderr.
"""
import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .classify import DEFAULT_SCHEDULE, classify_transform
from .concave_lab import (
    cap_construction,
    envelope_gap,
    hyp_condition_defect,
    lambda_estimate,
    midconcavity_defect,
    omega,
    omega_bracket,
    omega_hat,
    omega_hat_residual,
    omega_residual,
)
from .errors import GromovLabError, TransformSpecError
from .experiments import delta_sweep, geometric_schedule, rough_midpoint_defect, sample_halfline
from .metric_core import FiniteMetricSpace, Method, hyperbolicity_delta, ultrametric_defect
from .transforms import (
    Dilation,
    apply_transform,
    nondecreasing_defect,
    parse_grid,
    parse_transform,
    subadditivity_defect,
    triplet_preservation_check,
)

COMMANDS = ("classify", "delta", "ultra", "omega", "omegahat", "dichotomy", "midpoint", "fit-concave", "validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Result:
    name: str
    payload: dict
    tables: dict = field(default_factory=dict)
    charts: dict = field(default_factory=dict)
    log_x: bool = True
    # a validation failure still writes its report, then exits with status 2
    failure: GromovLabError = None


def _floats(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _transform(args, default=None):
    if args.transform is None:
        if default is None:
            raise UsageError("--transform is required")
        return default
    return parse_transform(args.transform, os.getcwd())


def _space(args):
    """The input metric space: a distance CSV, or the transformed half-line grid."""
    if getattr(args, "input", None):
        if not os.path.exists(args.input):
            raise UsageError(f"input file {args.input!r} does not exist")
        X = serialize.load_distance_csv(args.input)
        if args.transform:
            X = apply_transform(X, _transform(args))
        return X, {"input": args.input}
    grid = parse_grid(args.grid)
    phi = _transform(args, Dilation(1.0))
    X = apply_transform(sample_halfline(grid).space(), phi)
    return X, {"transform": phi.text, "grid": grid.text}


def _schedule(args):
    if args.schedule:
        return _floats(args.schedule)
    if args.Tmax is not None:
        # five decades ending at Tmax, like the default schedule
        return [args.Tmax / 10.0**k for k in range(4, -1, -1)]
    return list(DEFAULT_SCHEDULE)


def cmd_classify(args):
    phi = _transform(args)
    report = classify_transform(phi, _schedule(args), density=args.density)
    payload = {"transform": phi.text, **report.to_dict()}
    return Result(
        "classify",
        payload,
        tables={
            "dilation_residual": (("T", "value"), report.dilation_residual),
            "doubling_gap": (("T", "value"), report.doubling_gap),
        },
        charts={"dilation_residual": report.dilation_residual, "doubling_gap": report.doubling_gap},
    )


def cmd_delta(args):
    X, source = _space(args)
    rep = hyperbolicity_delta(X, Method(args.method), workers=args.workers)
    return Result("delta", {**rep.to_dict(), "n": X.n, **source})


def cmd_ultra(args):
    X, source = _space(args)
    rep = ultrametric_defect(X, workers=args.workers)
    return Result("ultra", {**rep.to_dict(), "n": X.n, **source})


def cmd_omega(args):
    phi = _transform(args)
    ys = _floats(args.y)
    rows = []
    for y in ys:
        z = omega(phi, args.x, y)
        rows.append((y, z, float(omega_residual(phi, args.x, y, z))))
    lo, hi = omega_bracket(args.x, ys[-1])
    payload = {
        "transform": phi.text,
        "x": args.x,
        "omega": [{"y": y, "omega": z, "residual": r} for y, z, r in rows],
        "bracket_last": [lo, hi],
    }
    return Result("omega", payload, tables={"omega": (("y", "omega", "residual"), rows)})


def cmd_omegahat(args):
    phi = _transform(args)
    if args.lam is None:
        est = lambda_estimate(phi, args.Tmax if args.Tmax is not None else 1e12)
        lam = est.lambda_hat
    else:
        lam = args.lam
    rows = []
    for x in _floats(args.x):
        w = omega_hat(phi, x, lam)
        rows.append((x, w, float(omega_hat_residual(phi, x, lam, w)), float(hyp_condition_defect(phi, x, lam))))
    payload = {
        "transform": phi.text,
        "lambda": lam,
        "omega_hat": [{"x": x, "omega_hat": w, "residual": r, "hyp_condition_defect": h} for x, w, r, h in rows],
    }
    return Result(
        "omegahat",
        payload,
        tables={"omegahat": (("x", "omega_hat", "residual", "hyp_condition_defect"), rows)},
    )


def cmd_dichotomy(args):
    phi = _transform(args)
    Ts = _schedule(args)
    rows = delta_sweep(phi, geometric_schedule(Ts, args.count, args.tmin), workers=args.workers)
    payload = {
        "transform": phi.text,
        "count": args.count,
        "t_min": args.tmin,
        "sweep": [
            {
                "T": r.T,
                "delta": r.delta,
                "ultra_defect": r.ultra_defect,
                "n": r.n,
                "delta_witness": list(r.delta_witness),
                "ultra_witness": list(r.ultra_witness),
            }
            for r in rows
        ],
    }
    return Result(
        "dichotomy",
        payload,
        tables={"sweep": (("T", "delta", "ultra_defect"), [(r.T, r.delta, r.ultra_defect) for r in rows])},
        charts={"delta": [(r.T, r.delta) for r in rows], "ultra_defect": [(r.T, r.ultra_defect) for r in rows]},
    )


def cmd_midpoint(args):
    X, source = _space(args)
    if args.pair:
        try:
            i, j = (int(s) for s in args.pair.split(","))
        except ValueError:
            raise UsageError(f"--pair expects I,J, got {args.pair!r}") from None
    else:
        i, j = 0, X.n - 1
    value, z = rough_midpoint_defect(X, (i, j))
    return Result("midpoint", {"pair": [i, j], "defect": value, "midpoint": z, "n": X.n, **source})


def cmd_fit_concave(args):
    phi = _transform(args)
    grid = parse_grid(args.grid)
    gap, t_gap, env = envelope_gap(phi, grid)
    mid, mid_wit = midconcavity_defect(phi, grid)
    payload = {
        "transform": phi.text,
        "grid": grid.text,
        "envelope_gap": gap,
        "envelope_gap_at": t_gap,
        "midconcavity_defect": mid,
        "midconcavity_witness": list(mid_wit),
        "knots": len(env.knots),
    }
    tables = {"envelope": (("t", "phi"), list(zip(env.knots.tolist(), env.values.tolist())))}
    if args.cap is not None:
        cap = cap_construction(phi, args.cap)
        t = grid.points()
        if hasattr(cap, "a"):
            payload["cap"] = {"eps": args.cap, "a": cap.a, "slope": cap.slope, "shift": cap.shift}
            t = np.union1d(t, [cap.a])
        else:
            payload["cap"] = {"eps": args.cap, "unchanged": True}
        tables["cap"] = (("t", "phi"), list(zip(t.tolist(), np.asarray(cap(t)).tolist())))
    return Result("fit-concave", payload, tables=tables)


def cmd_validate(args):
    """Check the transform on the chosen space; any violation exits with status 2."""
    X, source = _space(args)
    payload = {"n": X.n, "valid": True, **source}
    if args.transform:
        phi = _transform(args)
        t = np.unique(X.dist) if args.input else parse_grid(args.grid).points()
        sub, sub_wit = subadditivity_defect(phi, t)
        eta, eta_wit = nondecreasing_defect(phi, t)
        trip, trip_wit = triplet_preservation_check(phi, args.samples, seed=args.seed)
        payload.update(
            transform=phi.text,
            subadditivity_defect=sub,
            subadditivity_witness=list(sub_wit),
            eta_hat=eta,
            eta_witness=list(eta_wit),
            triplet_violation=trip,
            triplet_witness=list(trip_wit),
        )
        tol = 1e-9 * max(1.0, float(np.max(phi(t))))
        if sub > tol:
            failure = GromovLabError(f"{phi.text} is not subadditive on the sample by {sub!r}", sub_wit)
        elif trip > tol:
            failure = GromovLabError(f"{phi.text} breaks a triangle triplet by {trip!r}", trip_wit)
        else:
            failure = None
        if failure is not None:
            payload["valid"] = False
            return Result("validate", payload, failure=failure)
    return Result("validate", payload)


HANDLERS = {
    "classify": cmd_classify,
    "delta": cmd_delta,
    "ultra": cmd_ultra,
    "omega": cmd_omega,
    "omegahat": cmd_omegahat,
    "dichotomy": cmd_dichotomy,
    "midpoint": cmd_midpoint,
    "fit-concave": cmd_fit_concave,
    "validate": cmd_validate,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output directory (default: JSON on stdout)")
    common.add_argument("--format", choices=("json", "csv", "both"), default="json")
    common.add_argument("--svg", action="store_true", help="also write SVG charts of the curves")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--transform", help="transform, e.g. log1p:1, snowflake:0.5, tab:@knots.csv")

    space = _Parser(add_help=False)
    space.add_argument("--grid", default="geom:1,1e4,48", help="uniform:T,N or geom:TMIN,T,N")
    space.add_argument("--input", help="distance table CSV with header i,j,d")
    space.add_argument("--workers", type=int, default=1)

    sched = _Parser(add_help=False)
    sched.add_argument("--schedule", help="comma-separated T values")
    sched.add_argument("--Tmax", type=float)

    p = _Parser(prog="gromovlab", description="Hyperbolicity of metric transforms on finite samples.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("classify", parents=[common, sched], help="dilation / log-like verdict")
    c.add_argument("--density", type=int, default=256, help="grid points per decade")

    c = sub.add_parser("delta", parents=[common, space], help="brute-force Gromov delta")
    c.add_argument("--method", choices=[m.value for m in Method], default=Method.FOUR_POINT.value)

    sub.add_parser("ultra", parents=[common, space], help="ultrametric defect")

    c = sub.add_parser("omega", parents=[common], help="root omega(x, y)")
    c.add_argument("--x", type=float, required=True)
    c.add_argument("--y", required=True, help="one or more comma-separated y values")

    c = sub.add_parser("omegahat", parents=[common], help="root omega-hat(x) for slope lambda")
    c.add_argument("--x", required=True, help="one or more comma-separated x values")
    c.add_argument("--lambda", dest="lam", type=float, help="slope (default: estimated)")
    c.add_argument("--Tmax", type=float, help="probe point for the slope estimate")

    c = sub.add_parser("dichotomy", parents=[common, sched], help="delta sweep over growing samples")
    c.add_argument("--count", type=int, default=48)
    c.add_argument("--tmin", type=float, default=1.0)
    c.add_argument("--workers", type=int, default=1)

    c = sub.add_parser("midpoint", parents=[common, space], help="rough-midpoint defect of a pair")
    c.add_argument("--pair", help="I,J (default: first and last point)")

    c = sub.add_parser("fit-concave", parents=[common], help="least concave majorant and cap")
    c.add_argument("--grid", default="geom:1e-2,1e4,200")
    c.add_argument("--cap", type=float, help="eps for the linear cap near 0")

    c = sub.add_parser("validate", parents=[common, space], help="check a table or transform")
    c.add_argument("--samples", type=int, default=1000, help="random triangle triplets to test")
    return p


def write_outputs(result, args, stdout):
    if args.out is None:
        if args.format == "csv" and result.tables:
            name, (header, rows) = next(iter(result.tables.items()))
            stdout.write(",".join(header) + "\n")
            for row in rows:
                stdout.write(",".join(serialize.fmt_float(v) for v in row) + "\n")
        else:
            stdout.write(serialize.dumps(result.payload))
        return []
    os.makedirs(args.out, exist_ok=True)
    written = []
    stem = result.name.replace("-", "_")
    if args.format in ("json", "both") or not result.tables:
        path = os.path.join(args.out, f"{stem}.json")
        serialize.write_json(path, result.payload)
        written.append(path)
    if args.format in ("csv", "both"):
        for name, (header, rows) in result.tables.items():
            path = os.path.join(args.out, f"{name}.csv")
            serialize.write_rows(path, header, [tuple(float(v) for v in r) for r in rows])
            written.append(path)
    if args.svg:
        for name, series in result.charts.items():
            path = os.path.join(args.out, f"{name}.svg")
            serialize.write_svg(path, {name: series}, title=f"{stem} {name}", log_x=result.log_x)
            written.append(path)
    return written


def _fail(stderr, code, kind, message, witness=None):
    err = {"error": kind, "message": message, "witness": witness}
    stderr.write(serialize.dumps(err))
    return code


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = HANDLERS[args.command](args)
        write_outputs(result, args, stdout)
        if result.failure is not None:
            err = result.failure.to_dict()
            return _fail(stderr, 2, "ValidationFailure", err["message"], err["witness"])
    except (UsageError, TransformSpecError) as exc:
        return _fail(stderr, 1, "UsageError" if isinstance(exc, UsageError) else type(exc).__name__, str(exc))
    except GromovLabError as exc:
        err = exc.to_dict()
        return _fail(stderr, 2, err["error"], err["message"], err["witness"])
    except OSError as exc:
        return _fail(stderr, 1, "OutputError", str(exc))
    except ValueError as exc:
        return _fail(stderr, 1, "UsageError", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())

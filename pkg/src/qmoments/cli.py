"""Command-line front end.

Subcommands: discriminants, kronecker, charsum, moments, theta, squarecount,
gamma, ck, predict, intreal, verify.  Every report is emitted as JSON (with a
schema tag, package version, and the exact parameters, so tables are
regenerable) or as plot-ready CSV with fixed headers.  All randomness flows
from --seed.  Exit codes: 0 success, 1 failed verification criteria,
2 invalid parameters, 3 budget refusal, 4 numeric failure; failures print a
machine-readable error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, analysis, arith, constants, charsum, moments, polytope, squarecount, theta, verify
from .errors import BudgetExceeded, NumericFailure, ValidationError

DEFAULT_SEED = 20_240_817


def _int(value: str) -> int:
    return int(float(value))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmoments",
        description="Exact and Monte Carlo computations for quadratic character sum and theta moments",
    )
    parser.add_argument("--version", action="version", version=f"qmoments {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, seeded: bool = False) -> None:
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--output", default=None, help="write the report to a file instead of stdout")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--budget", type=int, default=None)
        if seeded:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("discriminants", help="enumerate fundamental discriminants")
    p.add_argument("--max", required=True, type=_int)
    p.add_argument("--segment-size", type=_int, default=arith.DEFAULT_SEGMENT)
    p.add_argument("--include-unit", action="store_true")
    p.add_argument("--cache", default=None, help="also write the binary cache file")
    p.add_argument("--from-cache", default=None, help="read values from a cache file instead of sieving")
    common(p)

    p = sub.add_parser("kronecker", help="one Kronecker symbol (d|n)")
    p.add_argument("--d", required=True, type=_int)
    p.add_argument("--n", required=True, type=_int)
    common(p)

    p = sub.add_parser("charsum", help="character sum S_chi_d(Y), sharp or smoothed")
    p.add_argument("--d", required=True, type=_int)
    p.add_argument("--y", required=True, type=float)
    p.add_argument("--smoothed", action="store_true")
    common(p)

    p = sub.add_parser("moments", help="family moments of character sums")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--x", type=_int)
    p.add_argument("--y", type=_int)
    p.add_argument("--scan", default=None, help="comma list of X:Y pairs for a table")
    p.add_argument("--smoothed", action="store_true")
    common(p)

    p = sub.add_parser("theta", help="theta values, moments, and the non-vanishing census")
    p.add_argument("--d", type=_int)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--x", type=_int)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--census", action="store_true")
    p.add_argument("--threshold", type=float, default=1e-10)
    common(p)

    p = sub.add_parser("squarecount", help="weighted count of tuples with square product")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--bounds", help="comma list of per-coordinate bounds")
    p.add_argument("--method", choices=("fast", "oracle"), default="fast")
    p.add_argument("--fit", action="store_true", help="fit the log-polynomial over --grid")
    p.add_argument("--grid", default=None, help="comma list of Y values for --fit")
    common(p)

    p = sub.add_parser("gamma", help="pair-constraint polytope volume")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--beta", default=None, help="comma list of caps (default all ones)")
    p.add_argument("--samples", type=_int, default=10 ** 6)
    common(p, seeded=True)

    p = sub.add_parser("ck", help="Euler product constant c_k")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--cutoff", type=_int, default=constants.DEFAULT_CUTOFF)
    common(p)

    p = sub.add_parser("predict", help="predicted main-term constant c_k gamma_k / zeta(2)")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--cutoff", type=_int, default=constants.DEFAULT_CUTOFF)
    p.add_argument("--samples", type=_int, default=constants.DEFAULT_GAMMA_SAMPLES)
    common(p, seeded=True)

    p = sub.add_parser("intreal", help="the singular double integral I(log X)")
    p.add_argument("--logx", required=True, type=float)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)

    p = sub.add_parser("verify", help="run acceptance criteria")
    p.add_argument("suite", choices=sorted(verify.SUITES))
    p.add_argument("--x", type=_int, default=None, help="rescale the family-size criteria")
    common(p)

    return parser


def _emit(args, payload, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise ValidationError(f"command {args.command!r} has no CSV form")
        text = csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _wrap(args, t0: float, data) -> dict:
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "format", "output") and v is not None
    }
    return {
        "schema": f"qmoments/{args.command}/1",
        "version": __version__,
        "parameters": params,
        "runtime_seconds": round(time.perf_counter() - t0, 3),
        "data": data,
    }


def _cmd_discriminants(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    if args.from_cache:
        values = arith.read_discriminant_cache(args.from_cache)
    else:
        values = np.fromiter(
            (
                d.d
                for d in arith.enumerate_fundamental(
                    args.max, segment_size=args.segment_size, include_unit=args.include_unit
                )
            ),
            dtype=np.int64,
        )
    if args.cache:
        arith.write_discriminant_cache(args.cache, values)
    csv_text = "d,kind\n" + "".join(
        f"{int(d)},{'1mod4' if d % 4 == 1 else '4m'}\n" for d in values
    )
    return _wrap(args, t0, {"count": int(values.size), "values": values.tolist()}), csv_text


def _cmd_kronecker(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    val = arith.kronecker(args.d, args.n)
    return _wrap(args, t0, {"d": args.d, "n": args.n, "symbol": val}), f"d,n,symbol\n{args.d},{args.n},{val}\n"


def _cmd_charsum(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    if args.smoothed:
        value: float | int = charsum.smoothed_sum(args.d, args.y)
    else:
        value = charsum.char_sum(args.d, args.y)
    return (
        _wrap(args, t0, {"d": args.d, "Y": args.y, "smoothed": args.smoothed, "value": value}),
        f"d,Y,smoothed,value\n{args.d},{args.y},{int(args.smoothed)},{value}\n",
    )


def _cmd_moments(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    if args.smoothed:
        if args.x is None or args.y is None:
            raise ValidationError("smoothed moments need --x and --y")
        res = moments.moment_smoothed(args.x, args.y, args.k, threads=args.threads, budget=args.budget)
        return _wrap(args, t0, res.to_dict()), None
    if args.scan:
        pairs = []
        for item in args.scan.split(","):
            xs, ys = item.split(":")
            pairs.append((_int(xs), _int(ys)))
        recs = moments.ratio_scan(args.k, pairs, threads=args.threads, budget=args.budget)
    else:
        if args.x is None or args.y is None:
            raise ValidationError("moments need --x and --y (or --scan)")
        recs = [moments.moment(args.x, args.y, args.k, threads=args.threads, budget=args.budget)]
    return _wrap(args, t0, [r.to_dict() for r in recs]), moments.records_to_csv(recs)


def _cmd_theta(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    if args.census:
        if args.x is None:
            raise ValidationError("--census needs --x")
        count, frac = theta.nonvanishing_census(args.x, args.threshold, budget=args.budget)
        data = {"X": args.x, "threshold": args.threshold, "count": count, "fraction": frac}
        return _wrap(args, t0, data), f"X,threshold,count,fraction\n{args.x},{args.threshold!r},{count},{frac!r}\n"
    if args.d is not None:
        sample = theta.theta(args.d, args.t)
        data = {
            "d": sample.d,
            "t": sample.t,
            "N": sample.truncation,
            "value": sample.value,
            "tail_bound": sample.tail_bound,
        }
        return _wrap(args, t0, data), "d,t,N,value,tail_bound\n" + sample.csv_row() + "\n"
    if args.x is None:
        raise ValidationError("theta needs --d for a sample or --x for a moment")
    value = theta.theta_moment(args.x, args.k, args.t, budget=args.budget)
    ratio = theta.moment_ratio(args.x, args.k, value)
    data = {"X": args.x, "k": args.k, "t": args.t, "moment": value, "ratio": ratio}
    csv_text = f"X,k,t,moment,ratio\n{args.x},{args.k},{args.t!r},{value!r},{ratio!r}\n"
    return _wrap(args, t0, data), csv_text


def _cmd_squarecount(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    if args.fit:
        if not args.grid:
            raise ValidationError("--fit needs --grid")
        grid = [_int(v) for v in args.grid.split(",")]
        fit = squarecount.fit_leading(args.k, grid, budget=args.budget)
        return _wrap(args, t0, fit.to_dict()), None
    if not args.bounds:
        raise ValidationError("squarecount needs --bounds")
    bounds = tuple(_int(v) for v in args.bounds.split(","))
    fn = squarecount.count_fast if args.method == "fast" else squarecount.count_oracle
    kwargs = {"budget": args.budget}
    if args.method == "fast":
        kwargs["threads"] = args.threads
    res = fn(args.k, bounds, **kwargs)
    data = {
        "k": res.k,
        "bounds": list(res.bounds),
        "value": f"{res.value.numerator}/{res.value.denominator}",
        "tuple_count": res.tuple_count,
        "method": args.method,
    }
    return _wrap(args, t0, data), "k,bounds,value,tuple_count\n" + res.csv_row() + "\n"


def _cmd_gamma(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    beta = tuple(float(v) for v in args.beta.split(",")) if args.beta else None
    system = polytope.PairFormSystem(args.k, beta)
    est = polytope.volume_mc(system, samples=args.samples, seed=args.seed)
    return _wrap(args, t0, est.to_dict()), None


def _cmd_ck(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    est = constants.euler_ck(args.k, args.cutoff)
    data = {"k": est.k, "cutoff": est.prime_cutoff, "c_k": est.partial, "tail_gap": est.tail_gap}
    return _wrap(args, t0, data), f"k,cutoff,c_k,tail_gap\n{est.k},{est.prime_cutoff},{est.partial!r},{est.tail_gap!r}\n"


def _cmd_predict(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    pred = constants.predicted_constant(
        args.k, prime_cutoff=args.cutoff, gamma_samples=args.samples, gamma_seed=args.seed
    )
    return _wrap(args, t0, pred.to_dict()), None


def _cmd_intreal(args) -> tuple[dict, str | None]:
    t0 = time.perf_counter()
    res = analysis.integral_I(args.logx, rel_tol=args.tol)
    data = res.to_dict()
    return _wrap(args, t0, data), "logX,I,I_over_sqrtlog\n%r,%r,%r\n" % (
        res.log_x,
        res.value,
        res.over_sqrt_log,
    )


def _cmd_verify(args) -> tuple[dict, str | None, int]:
    t0 = time.perf_counter()
    results = verify.run_suite(args.suite, x=args.x)
    for res in results:
        print(res.format_line())
    payload = _wrap(args, t0, [r.to_dict() for r in results])
    csv_text = "criterion,name,passed,measured,tolerance,runtime_seconds\n" + "".join(
        f"{r.index},{r.name},{int(r.passed)},\"{r.measured}\",\"{r.tolerance}\",{r.runtime_seconds:.2f}\n"
        for r in results
    )
    code = 0 if all(r.passed for r in results) else 1
    return payload, csv_text, code


_COMMANDS = {
    "discriminants": _cmd_discriminants,
    "kronecker": _cmd_kronecker,
    "charsum": _cmd_charsum,
    "moments": _cmd_moments,
    "theta": _cmd_theta,
    "squarecount": _cmd_squarecount,
    "gamma": _cmd_gamma,
    "ck": _cmd_ck,
    "predict": _cmd_predict,
    "intreal": _cmd_intreal,
}


def _error(kind: str, exc: Exception, code: int, extra: dict | None = None) -> int:
    obj = {"error": {"type": kind, "message": str(exc)}}
    if extra:
        obj["error"].update(extra)
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            payload, csv_text, code = _cmd_verify(args)
            if args.output or args.format == "csv":
                _emit(args, payload, csv_text)
            return code
        payload, csv_text = _COMMANDS[args.command](args)
        _emit(args, payload, csv_text)
        return 0
    except ValidationError as exc:
        return _error("validation", exc, 2)
    except BudgetExceeded as exc:
        return _error(
            "budget",
            exc,
            3,
            {"estimated_cost": exc.estimated_cost, "budget": exc.budget},
        )
    except (NumericFailure, OverflowError, FloatingPointError) as exc:
        return _error("numeric", exc, 4)


if __name__ == "__main__":
    sys.exit(main())

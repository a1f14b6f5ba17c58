"""Command-line front end.

Subcommands: ``measure``, ``ci``, ``sweep``, ``sample``, ``verify``.  Library
errors exit with status 1 and one line ``error: <Code>: <message>`` on
standard error; usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import DegenerateMarginal, PreLambdaError
from .inference import InferenceResult, confidence_interval
from .measures import Direction, Family, MeasureResult, measure, oriented, symmetric_lambda
from .normal import (
    DEFAULT_SEED,
    RNG_ALGORITHM,
    NormalGridSpec,
    build_normal_table,
    rho_grid,
    sample_multinomial,
    sweep,
    sweep_to_csv,
)
from .reproduce import golden_checks, run_checks
from .tables import ContingencyTable, normalize
from .tablefile import TableFile, grid_to_csv, parse_table_file

RESULT_KEYS = (
    "family",
    "direction",
    "t",
    "value",
    "error_case1",
    "error_case2",
    "se",
    "ci_low",
    "ci_high",
    "degenerate",
    "tie_warning",
)


class UsageError(PreLambdaError):
    pass


@dataclass
class RunReport:
    command: str
    input: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    text: str | None = None  # raw output for commands that emit CSV grids

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("text")
        return d


def _clean(v, precision):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        return round(v, precision) if precision is not None else v
    return v


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return _clean(obj, None)


def _record(**kw) -> dict:
    rec = dict.fromkeys(RESULT_KEYS)
    rec.update(kw)
    return rec


def measure_record(res: MeasureResult) -> dict:
    return _record(
        family=res.family.value,
        direction=res.direction.value,
        t=res.t,
        value=res.value,
        error_case1=res.error_case1,
        error_case2=res.error_case2,
        degenerate=res.degenerate,
        tie_warning=res.tie_flag,
    )


def inference_record(res: InferenceResult, table_result: MeasureResult) -> dict:
    return _record(
        family=res.family.value,
        direction=res.direction.value,
        t=res.t,
        value=res.estimate,
        error_case1=table_result.error_case1,
        error_case2=table_result.error_case2,
        se=res.std_error,
        ci_low=res.ci_low,
        ci_high=res.ci_high,
        degenerate=res.degenerate,
        tie_warning=res.tie_warning,
    )


def format_results(records: list[dict], fmt: str, precision: int | None) -> str:
    rows = [{k: _clean(rec[k], precision) for k in RESULT_KEYS} for rec in records]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_KEYS)
    for row in rows:
        writer.writerow(["" if row[k] is None else str(row[k]).lower() if isinstance(row[k], bool) else row[k]
                         for k in RESULT_KEYS])
    return buf.getvalue()


def _families(choice: str):
    return (Family.PLAIN, Family.K) if choice == "both" else (Family(choice),)


def _orders(args, c: int):
    if args.all_t:
        return list(range(1, c))
    if args.t is None:
        raise UsageError("give --t K or --all-t")
    return [args.t]


def _digest(table) -> dict:
    r, c = table.shape
    if isinstance(table, ContingencyTable):
        return {"rows": r, "cols": c, "mode": "counts", "n": table.n}
    return {"rows": r, "cols": c, "mode": "probabilities", "sum": float(table.p.sum())}


def _load(args):
    mode = "probabilities" if args.probabilities else "counts"
    return parse_table_file(TableFile(args.input, mode, args.header)).table


def _tie_warning(rec: dict) -> str:
    return (f"tie at the top-{rec['t']} selection boundary ({rec['family']}, {rec['direction']}); "
            "index sets are resolved toward the lowest column")


def cmd_measure(args) -> RunReport:
    table = _load(args)
    p = table if not isinstance(table, ContingencyTable) else normalize(table)
    report = RunReport("measure", input=_digest(table))
    if args.symmetric:
        report.parameters = {"symmetric": True}
        report.results.append(measure_record(symmetric_lambda(p)))
    else:
        direction = Direction(args.direction)
        c = oriented(p, direction).shape[1]
        orders = _orders(args, c)
        report.parameters = {"family": args.family, "t": orders, "direction": direction.value}
        for t in orders:
            for fam in _families(args.family):
                try:
                    report.results.append(measure_record(measure(p, fam, t, direction)))
                except DegenerateMarginal as exc:
                    if not args.all_t:
                        raise
                    report.results.append(_record(family=fam.value, direction=direction.value, t=t,
                                                  degenerate=True))
                    report.warnings.append(f"{exc.code}: t={t}: {exc}")
    for rec in report.results:
        if rec["tie_warning"]:
            report.warnings.append(_tie_warning(rec))
    return report


def cmd_ci(args) -> RunReport:
    if args.probabilities:
        raise UsageError("confidence intervals need counts input (sample size n)")
    table = _load(args)
    direction = Direction(args.direction)
    p = oriented(normalize(table), direction)
    orders = _orders(args, p.shape[1])
    report = RunReport(
        "ci",
        input=_digest(table),
        parameters={"family": args.family, "t": orders, "direction": direction.value, "alpha": args.alpha},
    )
    for t in orders:
        for fam in _families(args.family):
            res = confidence_interval(table, fam, t, direction, args.alpha)
            rec = inference_record(res, measure(p, fam, t))
            report.results.append(rec)
            if res.degenerate:
                report.warnings.append(f"degenerate standard error for {fam.value} t={t}; interval omitted")
            if res.tie_warning:
                report.warnings.append(_tie_warning(rec) + "; delta method is unreliable at ties")
    return report


def cmd_sweep(args) -> RunReport:
    report = RunReport("sweep", parameters={"r": args.r})
    if args.table_at is not None:
        table = build_normal_table(NormalGridSpec(args.r, args.table_at))
        report.parameters["table_at"] = args.table_at
        report.text = grid_to_csv(table.p)
        return report
    grid = rho_grid(args.rho_start, args.rho_end, args.step)
    report.parameters.update(rho_start=args.rho_start, rho_end=args.rho_end, step=args.step)
    rows = sweep(args.r, grid)
    for row in rows:
        for (fam, t), v in row.values.items():
            report.results.append({"rho": row.rho, "family": fam.value, "t": t, "value": v})
    report.text = sweep_to_csv(rows, args.precision)
    return report


def cmd_sample(args) -> RunReport:
    if args.input is not None:
        p = parse_table_file(TableFile(args.input, "probabilities", args.header)).table
        source = _digest(p)
    elif args.normal_r is not None:
        p = build_normal_table(NormalGridSpec(args.normal_r, args.rho))
        source = {"normal_r": args.normal_r, "rho": args.rho}
    else:
        raise UsageError("give --input or --normal-r")
    seed = DEFAULT_SEED if args.seed is None else args.seed
    counts = sample_multinomial(p, args.n, seed)
    report = RunReport(
        "sample",
        input=source,
        parameters={"n": args.n, "seed": seed, "rng": RNG_ALGORITHM},
    )
    report.text = _int_csv(counts.counts)
    return report


def _int_csv(grid) -> str:
    return "".join(",".join(str(int(v)) for v in row) + "\n" for row in grid)


def cmd_verify(args, checks=None) -> RunReport:
    outcomes = run_checks(golden_checks() if checks is None else checks)
    report = RunReport("verify")
    for o in outcomes:
        report.results.append({"name": o.name, "observed": o.observed, "expected": o.expected,
                               "tol": o.tol, "passed": o.passed})
        if not o.passed:
            report.warnings.append(o.line())
    report.text = "".join(o.line() + "\n" for o in outcomes)
    passed = sum(o.passed for o in outcomes)
    report.text += f"{passed}/{len(outcomes)} checks passed\n"
    return report


def _positive_int(min_value):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < min_value:
            raise argparse.ArgumentTypeError(f"must be >= {min_value}, got {v}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prelambda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    table_args = argparse.ArgumentParser(add_help=False)
    table_args.add_argument("--input", required=True, help="CSV grid; optional header row and label column")
    table_args.add_argument("--probabilities", action="store_true", help="input holds probabilities, not counts")
    table_args.add_argument("--header", action="store_true", help="first row holds column labels")
    order = table_args.add_mutually_exclusive_group()
    order.add_argument("--t", type=_positive_int(1), help="order t")
    order.add_argument("--all-t", action="store_true", help="every order 1..c-1")
    table_args.add_argument("--direction", choices=[d.value for d in (Direction.Y_GIVEN_X, Direction.X_GIVEN_Y)],
                            default=Direction.Y_GIVEN_X.value)
    table_args.add_argument("--family", choices=("plain", "k", "both"), default="both")

    out_args = argparse.ArgumentParser(add_help=False)
    out_args.add_argument("--format", choices=("csv", "json"), default="json")
    out_args.add_argument("--precision", type=int, default=6, help="decimal places in output")
    out_args.add_argument("--report", help="also write the full run report as JSON to this path")

    p = sub.add_parser("measure", parents=[table_args, out_args], help="association measures")
    p.add_argument("--symmetric", action="store_true", help="symmetric lambda (order 1)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("ci", parents=[table_args, out_args], help="standard errors and confidence intervals")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("sweep", help="measures on discretized bivariate normal tables over a rho grid")
    p.add_argument("--r", type=_positive_int(2), required=True, help="categories per margin (>= 2)")
    p.add_argument("--rho-start", type=float, default=0.0)
    p.add_argument("--rho-end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--table-at", type=float, metavar="RHO", help="print the probability grid at RHO instead")
    p.add_argument("--precision", type=int, default=None, help="decimal places (default: full precision)")
    p.add_argument("--report")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="draw a multinomial table of counts")
    p.add_argument("--input", help="probability table CSV")
    p.add_argument("--header", action="store_true")
    p.add_argument("--normal-r", type=_positive_int(2), help="sample from the r x r normal table instead")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--n", type=_positive_int(1), required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="reproduce the published reference values")
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except PreLambdaError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, UsageError) else 1
    if report.text is not None:
        sys.stdout.write(report.text)
    else:
        sys.stdout.write(format_results(report.results, args.format, args.precision))
    for w in report.warnings:
        if report.command != "verify":
            print(f"warning: {w}", file=sys.stderr)
    if report.command == "sample":
        print(f"info: rng={RNG_ALGORITHM} seed={report.parameters['seed']}", file=sys.stderr)
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            json.dump(_sanitize(report.to_dict()), fh, indent=2, default=str)
    if report.command == "verify" and report.warnings:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

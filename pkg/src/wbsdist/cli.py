"""Command-line interface.

Subcommands: fit, compare, simulate, ttt, props, datasets.  Reports are
emitted as JSON (schema version 1) or CSV; plot-ready curves (TTT,
hazard, exact-vs-empirical CDF) are always CSV.  Exit codes: 0 success,
1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import competitors, gof, series
from .datasets import REGISTRY, checksum, get_dataset, load_observations
from .errors import DataError, DomainError, NonConvergenceError, OverflowSignal
from .mle import FitOptions, Sample
from .wbs import WbsParams, wbs_cdf, wbs_hazard, wbs_quantile, wbs_sample

SCHEMA_VERSION = 1

_FAMILY_LOOKUP = {f.lower(): f for f in competitors.FAMILIES}


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common_fit_flags(p):
    p.add_argument("--starts", type=int, default=None, help="number of optimizer starts")
    p.add_argument("--tol", type=float, default=None, help="relative gradient tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="iteration budget per start")
    p.add_argument("--seed", type=int, default=0)


def _add_io_flags(p, default_format="json"):
    p.add_argument("--format", choices=("json", "csv"), default=default_format)
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wbsdist", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", parents=[], help="fit one model to a dataset")
    p_fit.add_argument("--data", required=True, help="built-in dataset name or file path")
    p_fit.add_argument("--column", default=None, help="CSV column (name or index) for --data files")
    p_fit.add_argument("--model", default="wbs", help="family to fit (default wbs)")
    _add_common_fit_flags(p_fit)
    _add_io_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_cmp = sub.add_parser("compare", help="fit several models and rank them")
    p_cmp.add_argument("--data", required=True)
    p_cmp.add_argument("--column", default=None)
    p_cmp.add_argument("--models", required=True,
                       help="comma-separated families, or 'all'")
    _add_common_fit_flags(p_cmp)
    _add_io_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_sim = sub.add_parser("simulate", help="draw an inverse-transform sample")
    for name in ("alpha", "beta", "a", "b"):
        p_sim.add_argument(f"--{name}", type=float, required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=None, help="sample output path (default: stdout)")
    p_sim.add_argument("--cdf-out", default=None,
                       help="also write CSV of (t, F_exact, F_empirical)")
    p_sim.set_defaults(func=cmd_simulate)

    p_ttt = sub.add_parser("ttt", help="emit the scaled TTT transform as CSV")
    p_ttt.add_argument("--data", required=True)
    p_ttt.add_argument("--column", default=None)
    p_ttt.add_argument("--out", default=None)
    p_ttt.set_defaults(func=cmd_ttt)

    p_props = sub.add_parser("props", help="moments, deviations, quantiles, hazard curve")
    for name in ("alpha", "beta", "a", "b"):
        p_props.add_argument(f"--{name}", type=float, required=True)
    p_props.add_argument("--hazard-points", type=int, default=101)
    p_props.add_argument("--out", default=None)
    p_props.set_defaults(func=cmd_props)

    p_ds = sub.add_parser("datasets", help="list built-in datasets")
    _add_io_flags(p_ds, default_format="json")
    p_ds.set_defaults(func=cmd_datasets)

    return parser


def _load_sample(args) -> tuple[str, Sample]:
    name = args.data
    if name in REGISTRY:
        return name, REGISTRY[name].values
    column = getattr(args, "column", None)
    if column is not None and column.isdigit():
        column = int(column)
    return name, load_observations(name, column=column)


def _fit_options(args) -> FitOptions:
    base = competitors.default_fit_options()
    kwargs = {}
    if args.starts is not None:
        if args.starts < 1:
            raise SystemExit(_usage("--starts must be >= 1"))
        kwargs["n_starts"] = args.starts
    if args.tol is not None:
        kwargs["grad_tol"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        kwargs["max_iterations"] = args.max_iter
    kwargs["seed"] = args.seed
    from dataclasses import replace

    return replace(base, **kwargs)


def _usage(message: str) -> int:
    print(f"wbsdist: error: {message}", file=sys.stderr)
    return 1


def _write(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _params_dict(family: str, params) -> dict:
    return {n: float(v) for n, v in zip(competitors.PARAM_NAMES[family], params)}


def _fit_record(res: competitors.ModelFitResult, s: Sample) -> dict:
    spec = res.spec
    d, pval = gof.ks_test(s, lambda t: competitors.model_cdf(spec, t))
    aic, bic, caic = gof.info_criteria(res.neg2loglik, len(res.params), s.n)
    stderr = res.stderr
    return {
        "family": res.family,
        "estimates": _params_dict(res.family, res.params),
        "stderr": None if stderr is None else _params_dict(res.family, stderr),
        "loglik": res.loglik,
        "neg2loglik": res.neg2loglik,
        "aic": aic,
        "bic": bic,
        "caic": caic,
        "ks_stat": d,
        "ks_pvalue": pval,
        "converged": res.converged,
        "iterations": res.iterations,
        "starts_tried": res.starts_tried,
        "message": res.message,
    }


def cmd_fit(args) -> int:
    dataset, s = _load_sample(args)
    family = _FAMILY_LOOKUP.get(args.model.lower())
    if family is None:
        return _usage(f"unknown model {args.model!r}; choose from "
                      f"{', '.join(competitors.FAMILIES)}")
    opts = _fit_options(args)
    res = competitors.model_fit(family, s, opts)
    record = _fit_record(res, s)
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "fit",
        "dataset": dataset,
        "n": s.n,
        **record,
    }
    if args.format == "json":
        _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["family", "parameter", "estimate", "stderr"])
        stderr = record["stderr"] or {}
        for pname, val in record["estimates"].items():
            w.writerow([family, pname, repr(val), repr(stderr.get(pname, ""))])
        for key in ("neg2loglik", "aic", "bic", "caic", "ks_stat", "ks_pvalue"):
            w.writerow([family, key, repr(record[key]), ""])
        w.writerow([family, "converged", record["converged"], ""])
        _write(buf.getvalue(), args.out)
    return 0


def cmd_compare(args) -> int:
    dataset, s = _load_sample(args)
    raw = args.models.strip()
    if raw.lower() == "all":
        families = list(competitors.FAMILIES)
    else:
        names = [x for x in (tok.strip() for tok in raw.split(",")) if x]
        if not names:
            return _usage("empty model list")
        families = []
        for nm in names:
            fam = _FAMILY_LOOKUP.get(nm.lower())
            if fam is None:
                return _usage(f"unknown model {nm!r}")
            families.append(fam)
    opts = _fit_options(args)

    rows = []
    failures = []
    for fam in families:
        try:
            res = competitors.model_fit(fam, s, opts)
            rows.append(_fit_record(res, s))
        except (DataError, DomainError, NonConvergenceError, OverflowSignal) as exc:
            failures.append({"family": fam, "error": str(exc)})
    if not rows and failures:
        print("wbsdist: all model fits failed", file=sys.stderr)
        return 3
    rows.sort(key=lambda r: r["aic"])
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "compare",
        "dataset": dataset,
        "n": s.n,
        "seed": args.seed,
        "models": rows + failures,
    }
    if args.format == "json":
        _write(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(
            ["family", "neg2loglik", "aic", "bic", "caic", "ks_stat",
             "ks_pvalue", "converged", "message"]
        )
        for r in rows:
            w.writerow(
                [r["family"], repr(r["neg2loglik"]), repr(r["aic"]), repr(r["bic"]),
                 repr(r["caic"]), repr(r["ks_stat"]), repr(r["ks_pvalue"]),
                 r["converged"], r["message"]]
            )
        for r in failures:
            w.writerow([r["family"], "", "", "", "", "", "", "failed", r["error"]])
        _write(buf.getvalue(), args.out)
    return 0


def _validated_params(args) -> WbsParams:
    try:
        return WbsParams(args.alpha, args.beta, args.a, args.b)
    except DomainError as exc:
        raise SystemExit(_usage(str(exc))) from None


def cmd_simulate(args) -> int:
    if args.n < 1:
        return _usage("--n must be >= 1")
    p = _validated_params(args)
    draws = wbs_sample(args.n, p, args.seed)
    _write("\n".join(repr(float(x)) for x in draws) + "\n", args.out)
    if args.cdf_out is not None:
        ts = np.sort(draws)
        exact = np.atleast_1d(wbs_cdf(ts, p))
        emp = np.arange(1, len(ts) + 1) / len(ts)
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "cdf_exact", "cdf_empirical"])
        for t, fe, fm in zip(ts, exact, emp):
            w.writerow([repr(float(t)), repr(float(fe)), repr(float(fm))])
        with open(args.cdf_out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    return 0


def cmd_ttt(args) -> int:
    _, s = _load_sample(args)
    curve = gof.ttt(s)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["u", "ttt"])
    for u, y in curve.points:
        w.writerow([repr(u), repr(y)])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_props(args) -> int:
    p = _validated_params(args)
    summary = series.moment_summary(p)
    d1, d2 = series.mean_deviations(p)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["quantity", "arg", "value"])
    for key in ("mu1", "mu2", "mu3", "mu4", "variance", "skewness", "kurtosis"):
        w.writerow([key, "", repr(summary[key])])
    w.writerow(["mean_deviation_about_mean", "", repr(d1)])
    w.writerow(["mean_deviation_about_median", "", repr(d2)])
    w.writerow(["median", "", repr(wbs_quantile(0.5, p))])
    for q in (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99):
        w.writerow(["quantile", repr(q), repr(wbs_quantile(q, p))])
    ts = np.geomspace(p.beta * 1e-2, p.beta * 1e2, max(2, args.hazard_points))
    hz = np.atleast_1d(wbs_hazard(ts, p))
    for t, h in zip(ts, hz):
        w.writerow(["hazard", repr(float(t)), repr(float(h))])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_datasets(args) -> int:
    entries = [
        {
            "name": ds.name,
            "n": ds.values.n,
            "sha256": checksum(ds.values.values),
            "source": ds.source,
        }
        for ds in REGISTRY.values()
    ]
    if args.format == "json":
        _write(json.dumps({"schema": SCHEMA_VERSION, "datasets": entries},
                          indent=2, sort_keys=True), args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["name", "n", "sha256", "source"])
        for e in entries:
            w.writerow([e["name"], e["n"], e["sha256"], e["source"]])
        _write(buf.getvalue(), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (DataError, OSError) as exc:
        print(f"wbsdist: data error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, OverflowSignal, np.linalg.LinAlgError) as exc:
        print(f"wbsdist: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

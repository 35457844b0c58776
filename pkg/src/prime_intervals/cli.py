"""Command-line front end: certify, optimize, table, zeros, fit.

Exit codes: 0 success, 1 usage or domain error, 2 certified with a
non-positive margin, 3 search found nothing feasible.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from mpmath import mp, mpf

from . import __version__
from ._rigor import DEFAULT_PRECISION, fmt, fmt_down, truncate_sig
from .certifier import DomainError, PrecisionExhausted, SearchParams, certify, summary_from_constants
from .constants import ConstantsError, default_constants, fingerprint, load_overrides
from .optimizer import NoFeasiblePoint, SearchConfig, fit_regression, optimize, refine
from .smoothing import WeightError
from .tables import TABLE3, reproduce_table2
from .zeros import CoverageError, ZeroFileError, read_summary, summarize_file, write_summary

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("prime_intervals")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: dict = field(default_factory=dict)
    constants_fingerprint: str = ""
    precision_bits: int = DEFAULT_PRECISION
    timestamp: str = ""
    tool_version: str = __version__

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = _timestamp()


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return t.replace(microsecond=0).isoformat()


def _inputs(args: argparse.Namespace) -> dict:
    skip = {"func", "verbose"}
    return {k: (None if v is None else str(v)) for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _load_context(args):
    c = load_overrides(args.constants) if getattr(args, "constants", None) else default_constants()
    zs = read_summary(args.zeros_summary) if getattr(args, "zeros_summary", None) else summary_from_constants(c)
    return c, zs


def _x0_args(args) -> dict:
    if (args.x0 is None) == (args.log_x0 is None):
        raise UsageError("give exactly one of --x0 and --log-x0")
    return {"log_x0": args.log_x0} if args.log_x0 is not None else {"x0": args.x0}


def parse_params(text: str) -> SearchParams:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) not in (5, 6):
        raise UsageError("--params expects m,n,delta,a,T1[,sigma0]")
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError("m and n must be integers") from None
    return SearchParams(m, n, *parts[2:])


def cmd_certify(args) -> int:
    c, zs = _load_context(args)
    p = parse_params(args.params)
    kw = _x0_args(args)
    x0 = kw.get("x0")
    cert = certify(x0, p, c, zs, log_x0=kw.get("log_x0"), precision_bits=args.precision,
                   norm_route=args.norm_route)
    manifest = RunManifest("certify", _inputs(args), fingerprint(c), args.precision)
    doc = cert.to_json()
    doc["dominant_term"] = cert.breakdown.dominant_term()
    doc["manifest"] = asdict(manifest)
    _emit(doc, args.out)
    return EXIT_OK if cert.valid else EXIT_NEGATIVE


def _config(args) -> SearchConfig:
    kw = dict(rng_seed=args.seed, precision_bits=args.precision, norm_route=args.norm_route)
    if args.budget_generations is not None:
        kw["de_generations"] = args.budget_generations
    if args.m_range:
        lo, hi = (int(s) for s in args.m_range.split(","))
        kw["m_range"] = (lo, hi)
    return SearchConfig(**kw)


def _result_doc(res, manifest) -> dict:
    return {
        "best": res.best.to_json(),
        "evaluations": res.evaluations,
        "runs": res.runs,
        "manifest": asdict(manifest),
    }


def _write_trace(res, out: str | None) -> None:
    if out:
        Path(out).with_suffix(".trace.tsv").write_text(res.trace_tsv(), encoding="utf-8")


def cmd_optimize(args) -> int:
    c, zs = _load_context(args)
    cfg = _config(args)
    kw = _x0_args(args)
    try:
        if args.refine:
            res = refine(kw.get("x0"), parse_params(args.refine), cfg, c, zs, log_x0=kw.get("log_x0"))
        else:
            res = optimize(kw.get("x0"), cfg, c, zs, log_x0=kw.get("log_x0"))
    except NoFeasiblePoint as exc:
        diag = {"error": str(exc)}
        if exc.least_infeasible:
            p, bd = exc.least_infeasible
            diag["least_infeasible"] = {"params": p.to_json(), "breakdown": bd.to_json(),
                                        "dominant_term": bd.dominant_term()}
        diag["manifest"] = asdict(RunManifest("optimize", _inputs(args), fingerprint(c), args.precision))
        _emit(diag, args.out)
        return EXIT_INFEASIBLE
    log.info("search took %.1f s over %d evaluations", res.wall_time, res.evaluations)
    manifest = RunManifest("optimize", _inputs(args), fingerprint(c), args.precision)
    _emit(_result_doc(res, manifest), args.out)
    _write_trace(res, args.out)
    return EXIT_OK


TABLE2_COLUMNS = ["log_x0", "m", "n", "delta", "a", "T1", "Delta_paper", "Delta_ours",
                  "margin", "pass", "delta_scale"]


def _table2(args, c, zs) -> int:
    results = reproduce_table2(c, zs, precision_bits=args.precision, norm_route=args.norm_route)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    ok = True
    if args.refine:
        w.writerow(TABLE2_COLUMNS + ["Delta_refined"])
    else:
        w.writerow(TABLE2_COLUMNS)
    cfg = _config(args) if args.refine else None
    for r in results:
        row = r.row
        with mp.workprec(args.precision):
            lx = row.log_x0 if row.log_x0 is not None else fmt(row.log_x0_value, 12)
        margin = fmt_down(r.certificate.breakdown.margin, 12) if r.certificate else "nan"
        scale = r.delta_scale
        rec = [lx, row.m, row.n, row.delta, row.a, row.T1, row.Delta, r.delta_ours, margin,
               "true" if r.passed else "false",
               str(scale.numerator) if scale.denominator == 1 else f"{scale.numerator}/{scale.denominator}"]
        if cfg is not None:
            try:
                res = refine(row.x0, row.params, cfg, c, zs, log_x0=row.log_x0)
                rec.append(truncate_sig(res.best.delta_lower, 5))
            except NoFeasiblePoint as exc:
                log.warning("row %s: %s", row.label, exc)
                rec.append("")
        w.writerow(rec)
        ok &= r.passed
        if r.passed and scale != 1:
            log.warning("row %s certifies only with delta scaled by %s", row.label, scale)
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        manifest = RunManifest("table", _inputs(args), fingerprint(c), args.precision)
        Path(args.out).with_suffix(".manifest.json").write_text(
            json.dumps(asdict(manifest), indent=2) + "\n", encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _table3(args, c, zs) -> int:
    cfg = _config(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["log_x0", "m", "n", "delta", "a", "T1", "Delta_paper", "Delta_ours", "margin", "ratio"])
    status = EXIT_OK
    for lx, published in TABLE3.items():
        try:
            res = optimize(None, cfg, c, zs, log_x0=lx)
        except NoFeasiblePoint as exc:
            log.error("log x0 = %s: %s", lx, exc)
            w.writerow([lx, "", "", "", "", "", published, "", "", ""])
            status = EXIT_INFEASIBLE
            continue
        p = res.best.params
        ours = res.best.delta_lower
        w.writerow([lx, p.m, p.n, p.delta, p.a, p.T1, published, truncate_sig(ours, 5),
                    fmt_down(res.best.breakdown.margin, 12), mp.nstr(ours / mpf(published), 6)])
    sys.stdout.write(buf.getvalue())
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return status


def cmd_table(args) -> int:
    if args.which not in ("2", "3"):
        raise UsageError(f"--which must be 2 or 3, got {args.which}")
    c, zs = _load_context(args)
    return _table2(args, c, zs) if args.which == "2" else _table3(args, c, zs)


def cmd_zeros(args) -> int:
    summary = summarize_file(args.zeros, args.T0, checkpoint=args.checkpoint)
    manifest = RunManifest("zeros", _inputs(args), "", DEFAULT_PRECISION)
    if args.out:
        write_summary(summary, args.out, asdict(manifest))
    doc = summary.to_json()
    doc["manifest"] = asdict(manifest)
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    sys.stderr.write(f"N0 = {summary.N0}\nS0 = {summary.S0}\n")
    return EXIT_OK


def _read_fit_rows(path: str) -> list[tuple[str, str]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise UsageError("empty input")
        names = [h.strip().lower() for h in header]
        try:
            i, j = names.index("log_x0"), names.index("delta_ours" if "delta_ours" in names else "delta")
        except ValueError:
            # headerless two-column data
            i, j = 0, 1
            rows.append((header[0], header[1]))
        for rec in reader:
            if rec:
                rows.append((rec[i], rec[j]))
    return rows


def cmd_fit(args) -> int:
    rows = _read_fit_rows(args.input)
    if len(rows) < 3:
        raise UsageError(f"need at least 3 rows, got {len(rows)}")
    slope, intercept = fit_regression(rows)
    manifest = RunManifest("fit", _inputs(args), "", DEFAULT_PRECISION)
    doc = {"slope": f"{slope:.6f}", "intercept": f"{intercept:.6f}", "rows": len(rows),
           "manifest": asdict(manifest)}
    lines = ["log_x0\tlog_Delta\tfitted_log_Delta"]
    for lx, d in rows:
        ld = float(mp.log(mpf(d)))
        lines.append(f"{lx}\t{ld:.9f}\t{slope * float(lx) + intercept:.9f}")
    tsv = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        Path(args.out).with_suffix(".tsv").write_text(tsv, encoding="utf-8")
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    if args.plot_data:
        sys.stdout.write(tsv)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, x0: bool = True) -> None:
    if x0:
        p.add_argument("--log-x0", help="natural log of x0, as a decimal string")
        p.add_argument("--x0", help="x0 as a decimal string")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="working precision in bits")
    p.add_argument("--constants", help="key=value file of constant overrides")
    p.add_argument("--zeros-summary", help="ZeroSummary JSON replacing the default N0, S0")
    p.add_argument("--norm-route", choices=("exact", "published"), default="exact",
                   help="closed form used for ||f^(m)||_2 (default: exact)")
    p.add_argument("--out", help="also write the result here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prime-intervals", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify one parameter set")
    _add_common(p)
    p.add_argument("--params", required=True, help="m,n,delta,a,T1[,sigma0]")
    p.set_defaults(func=cmd_certify)

    def search_flags(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-generations", type=int, help="DE generations per (m, n)")
        p.add_argument("--m-range", help="lo,hi for m (default 2,4)")

    p = sub.add_parser("optimize", help="search for the largest certifiable Delta")
    _add_common(p)
    search_flags(p)
    p.add_argument("--refine", metavar="PARAMS", help="local search around m,n,delta,a,T1[,sigma0]")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("table", help="reproduce the published tables")
    _add_common(p, x0=False)
    search_flags(p)
    p.add_argument("--which", required=True, help="2 or 3")
    p.add_argument("--refine", action="store_true",
                   help="table 2: also run a local search seeded at each row and report its Delta")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("zeros", help="summarise a file of zero ordinates")
    p.add_argument("--zeros", required=True, help="one ordinate per line")
    p.add_argument("--T0", required=True, help="height to sum up to")
    p.add_argument("--checkpoint", help="resume file for long lists")
    p.add_argument("--out", help="write ZeroSummary JSON here")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("fit", help="least-squares fit of log Delta on log x0")
    p.add_argument("--in", dest="input", required=True, help="CSV with log_x0 and Delta columns")
    p.add_argument("--out", help="write JSON here and plot data next to it")
    p.add_argument("--plot-data", action="store_true", help="also print the TSV to stdout")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", force=True)
    try:
        return args.func(args)
    except (UsageError, DomainError, WeightError, ConstantsError, ZeroFileError, CoverageError,
            ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except PrecisionExhausted:
        sys.stderr.write(f"error: margin undecided at {args.precision} bits; raise --precision\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: ``ingest``, ``synth``, ``run``, ``sweep`` and ``report``.
Machine-readable output goes to stdout or ``--out``; diagnostics go to
stderr, warnings prefixed with ``warning:``. Exit codes: 0 success, 1 runtime
or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from typing import TextIO

from . import __version__
from .errors import HybridSomError, InvalidConfig, IoFailure
from .ingest import DEFAULT_NOISE_SIGMA, build_monthly_matrices, parse_month_spec, read_csv, synth_generate
from .pipeline import PipelineConfig, dumps, load_result, prepare_centers, run_pipeline, save_result, sweep_centers


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hybridsom", description="Hybrid SOM + PCA + k-means load-profile clustering.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="validate readings and write the monthly matrices")
    s.add_argument("--input", required=True)
    s.add_argument("--months", required=True, help="YYYY-MM[,YYYY-MM...] or paper-default")
    s.add_argument("--out", required=True)

    s = sub.add_parser("synth", help="write a synthetic readings CSV with planted archetypes")
    s.add_argument("--series", type=int, required=True)
    s.add_argument("--archetypes", type=int, required=True)
    s.add_argument("--months", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--truth", help="also write series_id,archetype to this file")
    s.add_argument("--noise", type=float, default=DEFAULT_NOISE_SIGMA,
                   help="std-dev of daily-total noise in kWh (default %(default)s)")

    s = sub.add_parser("run", help="run the full pipeline and write the result JSON")
    s.add_argument("--config")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("sweep", help="print the silhouette-vs-k report as JSON")
    s.add_argument("--config")
    s.add_argument("--input", required=True)

    s = sub.add_parser("report", help="export final assignments from a result file")
    s.add_argument("--result", required=True)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def load_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise InvalidConfig("config must be a JSON object")
    return PipelineConfig.from_dict(d)


def _read_table(path: str):
    try:
        return read_csv(path)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def _cmd_ingest(args, out, err):
    table = _read_table(args.input)
    for w in table.warnings:
        print(f"warning: {w}", file=err)
    matrices = build_monthly_matrices(table, parse_month_spec(args.months))
    summary = {
        "source": table.source,
        "n_readings": len(table),
        "months": [
            {
                "month": str(m.month),
                "n_series": m.n,
                "series_ids": m.series_ids,
                "dropped": [{"series_id": s, "reason": r} for s, r in m.dropped],
                "values": m.values,
            }
            for m in matrices
        ],
    }
    _write(args.out, dumps(summary))


def _cmd_synth(args, out, err):
    table = synth_generate(args.series, args.archetypes, parse_month_spec(args.months),
                           noise_sigma=args.noise, seed=args.seed)
    buf = io.StringIO()
    table.to_csv(buf)
    _write(args.out, buf.getvalue())
    if args.truth:
        buf = io.StringIO()
        table.truth_csv(buf)
        _write(args.truth, buf.getvalue())


def _cmd_run(args, out, err):
    config = load_config(args.config)
    result = run_pipeline(_read_table(args.input), config)
    for w in result.warnings:
        print(f"warning: {w}", file=err)
    save_result(result, args.out)


def _cmd_sweep(args, out, err):
    config = load_config(args.config)
    prep = prepare_centers(_read_table(args.input), config)
    for w in prep.warnings:
        print(f"warning: {w}", file=err)
    out.write(dumps(sweep_centers(prep, config).to_dict()))


def _cmd_report(args, out, err):
    result = load_result(args.result)
    rows = [(a.series_id, a.month.year, a.month.month, a.label) for a in result.assignments]
    if args.format == "json":
        out.write(json.dumps([
            {"series_id": s, "year": y, "month": m, "label": lab} for s, y, m, lab in rows
        ], indent=1) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["series_id", "year", "month", "label"])
        w.writerows(rows)


COMMANDS = {
    "ingest": _cmd_ingest,
    "synth": _cmd_synth,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def dispatch(argv: list[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=err)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, out, err)
    except HybridSomError as exc:
        print(f"{type(exc).__name__}: {exc}", file=err)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""``lagcast`` command line: fetch, fit, compare, forecast or the whole pipeline.

Exit codes: 0 on success (possibly with per-model warnings), 1 for usage
and configuration errors, 2 for data errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, pipeline
from .config import read_config_file, resolve
from .exceptions import LagcastError

logger = logging.getLogger("lagcast")

COMMANDS = ("fetch", "fit", "compare", "forecast", "pipeline")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--role", choices=["deaths", "recovered", "confirmed", "all"])
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--horizon", type=int, help="forecast steps (default 15)")
    p.add_argument("--alpha", type=float, help="significance level for term removal")
    split = p.add_mutually_exclusive_group()
    split.add_argument("--split-ratio", type=float, dest="split_ratio", help="training fraction")
    split.add_argument("--split-date", dest="split_date", metavar="YYYY-MM-DD", help="last training day")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--format", choices=["csv", "json", "both"])
    p.add_argument("--offline", action="store_true", default=None, help="never touch the network")
    p.add_argument("--data-dir", dest="data_dir", metavar="DIR", help="directory holding the three CSV files")
    p.add_argument(
        "--clamp-negative", dest="clamp_negative", action="store_true", default=None,
        help="set negative daily increments to zero",
    )
    p.add_argument("--backend", dest="forecast_backend", help="forecast backend: ardl, persistence, rf, svr, knn, mlp")
    p.add_argument("--jobs", dest="n_jobs", type=int, help="worker threads")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lagcast", description="Distributed-lag fits, model comparison and recursive forecasts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "fetch": "download or locate the input files and report their size",
        "fit": "fit and prune the distributed-lag model of each role",
        "compare": "score RF, SVR, KNN and ANN on the lag features",
        "forecast": "recursive forecasts of the coupled system",
        "pipeline": "run every stage",
    }
    for name in COMMANDS:
        _add_common(sub.add_parser(name, help=helps[name]))
    return parser


FLAG_KEYS = (
    "role", "seed", "horizon", "alpha", "split_ratio", "split_date", "out", "format",
    "offline", "data_dir", "clamp_negative", "forecast_backend", "n_jobs",
)


def config_from_args(args) -> dict:
    file_config = read_config_file(args.config) if args.config else None
    flags = {k: getattr(args, k) for k in FLAG_KEYS}
    return resolve(file_config, flags)


def _print_fetch(counts):
    for role, (rows, cols) in counts.items():
        print(f"{role}: {rows} rows, {cols} date columns")


def _warn_failed(tables):
    failed = False
    for role, table in tables.items():
        for row in table.rows:
            if row.status != "ok" and row.split == "train":
                print(f"warning: {role}/{row.kind} failed: {row.error}", file=sys.stderr)
                failed = True
    return failed


def _report(written):
    for path in written:
        print(path)


def run(args) -> int:
    cfg = config_from_args(args)
    cmd = args.command
    if cmd == "fetch":
        counts, written = pipeline.run_fetch(cfg)
        _print_fetch(counts)
    elif cmd == "fit":
        _, written = pipeline.run_fit(cfg)
    elif cmd == "compare":
        tables, written = pipeline.run_compare(cfg)
        _warn_failed(tables)
    elif cmd == "forecast":
        _, written = pipeline.run_forecast(cfg)
    else:
        result = pipeline.run_pipeline(cfg)
        _print_fetch(result["counts"])
        _warn_failed(result["tables"])
        written = result["written"]
    _report(written)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return run(args)
    except LagcastError as exc:
        print(f"lagcast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

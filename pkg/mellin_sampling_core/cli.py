"""
Command-line front end: reproduce the printed tables and run the kernel and
convergence diagnostics.

    python -m mellin_sampling_core.cli table1 --check
    python -m mellin_sampling_core.cli rates --table 1a
    python -m mellin_sampling_core.cli kernel-check --kernel fejer --order 1

Data goes to stdout (text, csv or json); logs go to stderr and, when
MELLIN_LOG_DIR is set, to a per-run file. Exit codes: 0 success, 2 a
golden or property check failed, 64 usage error, 70 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Callable, Dict, List, Sequence

from dotenv import load_dotenv

from .analysis import fit_order, voronovskaja_limit
from .constants import LOG_DIR, LOG_LEVEL, NORM_MODE, WORKERS
from .exceptions import (
    DivergenceError,
    GoldenMismatchError,
    InvalidArgumentError,
    SamplingError,
    UnsupportedKernelError,
)
from .kernels import (
    Kernel,
    NormMode,
    bspline_kernel,
    condition_report,
    fejer_kernel,
    jackson_kernel,
    moment_M,
    moment_m,
    norm_mode_of,
)
from .mellin_ops import LogGrid, fejer_signal
from .tables import (
    COMMAND_TABLES,
    TABLES,
    TableDef,
    compare_golden,
    error_series,
    get_table,
    run_rows,
    x_of,
)

EXIT_OK = 0
EXIT_CHECK = 2
EXIT_USAGE = 64
EXIT_NUMERIC = SamplingError.exit_code

COMMANDS = ("table1", "table2", "table3", "table4", "kernel-check", "moments", "rates", "voronovskaja")
OUTPUTS = ("text", "csv", "json")
FIELDS = ("param", "value", "reference", "abs_err")

PARTITION_LIMIT = 1e-8
VORONOVSKAJA_W = (64, 128, 256, 512)
VORONOVSKAJA_REL_TOL = 0.05
RATE_NOISE_FLOOR = 1e-13

KERNELS: Dict[str, Callable[[NormMode], Kernel]] = {
    "b2": lambda mode: bspline_kernel(2),
    "fejer": lambda mode: fejer_kernel(1.0),
    "jackson": lambda mode: jackson_kernel(norm_mode=mode),
}

Row = Dict[str, str]


# ───────────────────────────── CONFIG ──────────────────────────────────────
@dataclass(frozen=True)
class RunConfig:
    command: str
    logx: float | None = None
    norm_mode: NormMode = NormMode.PAPER
    output: str = "text"
    precision: int | None = None
    check: bool = False
    kernel: str = "b2"
    order: int | None = None
    table: str | None = None
    workers: int = WORKERS
    points: int = 257

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidArgumentError(f"unknown command {self.command!r}")
        if self.precision is not None and not 1 <= self.precision <= 17:
            raise InvalidArgumentError(f"precision must be in 1..17, got {self.precision}")
        if self.logx is not None and not math.isfinite(self.logx):
            raise InvalidArgumentError(f"--logx must be finite, got {self.logx!r}")
        if self.order is not None and self.order < 0:
            raise InvalidArgumentError(f"--order must be >= 0, got {self.order}")
        if self.workers < 1:
            raise InvalidArgumentError(f"--workers must be >= 1, got {self.workers}")
        if self.table is not None:
            get_table(self.table)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mellin_sampling_core", description="Exponential sampling tables and diagnostics")
    ap.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="command", help=" | ".join(COMMANDS))
    ap.add_argument("--command", choices=COMMANDS, help="same as the positional command")
    ap.add_argument("--logx", type=float, help="log x to evaluate at (tables default to their own)")
    ap.add_argument("--norm-mode", choices=[m.value for m in NormMode], default=None)
    ap.add_argument("--output", choices=OUTPUTS, default="text")
    ap.add_argument("--precision", type=int, help="printed decimals (1..17)")
    ap.add_argument("--check", action="store_true", help="compare against the golden tables")
    ap.add_argument("--kernel", choices=sorted(KERNELS), default="b2")
    ap.add_argument("--order", type=int, help="moment / Voronovskaja order")
    ap.add_argument("--table", choices=sorted(TABLES), help="restrict to one table")
    ap.add_argument("--workers", type=int, help="row worker threads")
    ap.add_argument("--points", type=int, default=257, help="grid points for kernel-check")
    ap.add_argument("--env-file", help="load environment variables from this .env file")
    ap.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")
    return ap


def _config_from(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RunConfig:
    command = args.command_pos or args.command
    if command is None:
        parser.error("a command is required")
    if args.command and args.command_pos and args.command != args.command_pos:
        parser.error(f"conflicting commands {args.command_pos!r} and {args.command!r}")
    workers = args.workers
    if workers is None:
        env_workers = os.getenv("MELLIN_WORKERS", str(WORKERS))
        try:
            workers = int(env_workers)
        except ValueError:
            parser.error(f"MELLIN_WORKERS must be an integer, got {env_workers!r}")
    try:
        return RunConfig(
            command=command,
            logx=args.logx,
            norm_mode=norm_mode_of(args.norm_mode or os.getenv("MELLIN_NORM_MODE", NORM_MODE)),
            output=args.output,
            precision=args.precision,
            check=args.check,
            kernel=args.kernel,
            order=args.order,
            table=args.table,
            workers=workers,
            points=args.points,
        )
    except InvalidArgumentError as err:
        parser.error(str(err))
        raise  # pragma: no cover - parser.error exits


# ───────────────────────────── LOGGING ─────────────────────────────────────
def _setup_logging(level: str, log_dir: Path | None) -> logging.Logger:
    run_id = uuid.uuid4().hex[:8]
    log = logging.getLogger("mellin_sampling_core")
    log.handlers.clear()
    log.setLevel(getattr(logging, level.upper(), logging.INFO))
    fmt = logging.Formatter("%(asctime)s | %(levelname)s | %(message)s", "%Y-%m-%dT%H:%M:%SZ")
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now(timezone.utc)
        handlers.append(logging.FileHandler(log_dir / f"{stamp:%Y-%m-%d-%H-%M-%S}_{run_id}.log", encoding="utf-8"))
    for h in handlers:
        h.setFormatter(fmt)
        log.addHandler(h)
    log.info("----- mellin sampling run %s -----", run_id)
    return log


# ───────────────────────────── FORMATTING ──────────────────────────────────
def format_fixed(value: float, decimals: int) -> str:
    quantum = Decimal(1).scaleb(-decimals)
    q = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN)
    if q.is_zero():
        q = q.copy_abs()
    return format(q, "f")


def format_sci(value: float, digits: int) -> str:
    return f"{float(value):.{digits}e}"


def _fmt_value(value: float, decimals: int | None, precision: int | None) -> str:
    if decimals is None:
        return format_sci(value, precision or 6)
    return format_fixed(value, precision or decimals)


def _row(param: str, value: str, reference: str = "", abs_err: str = "") -> Row:
    return {"param": param, "value": value, "reference": reference, "abs_err": abs_err}


def render(rows: Sequence[Row], output: str, titles: Dict[int, str] | None = None) -> str:
    """Serialise rows; ``titles`` maps a row index to a heading shown in text mode."""
    if output == "json":
        return json.dumps([dict(r) for r in rows], indent=2, ensure_ascii=False) + "\n"
    if output == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    widths = {f: max([len(f)] + [len(r[f]) for r in rows]) for f in FIELDS}
    lines: List[str] = []
    header = "  ".join(f.ljust(widths[f]) for f in FIELDS).rstrip()
    for i, r in enumerate(rows):
        if titles and i in titles:
            if lines:
                lines.append("")
            lines.append(f"# {titles[i]}")
            lines.append(header)
        elif i == 0:
            lines.append(header)
        lines.append("  ".join(r[f].ljust(widths[f]) for f in FIELDS).rstrip())
    return "\n".join(lines) + "\n"


# ───────────────────────────── COMMANDS ────────────────────────────────────
@dataclass
class Outcome:
    rows: List[Row]
    titles: Dict[int, str]
    failed: bool = False


def _table_keys(config: RunConfig) -> Sequence[str]:
    if config.table is not None:
        return (config.table,)
    return COMMAND_TABLES[config.command]


def _golden_applies(table: TableDef, config: RunConfig, log: logging.Logger) -> bool:
    if not table.golden:
        log.warning("table %s has no golden file; nothing to check", table.key)
        return False
    if config.logx is not None and config.logx != table.logx:
        log.warning("table %s: golden rows are for log x = %g, skipping", table.key, table.logx)
        return False
    if table.jackson and config.norm_mode is not NormMode.PAPER:
        log.warning("table %s: golden rows use the printed constant, skipping", table.key)
        return False
    return True


def run_table(config: RunConfig, log: logging.Logger) -> Outcome:
    keys = _table_keys(config)
    prefix = len(keys) > 1
    outcome = Outcome([], {})
    failures = []
    for key in keys:
        table = get_table(key)
        rows = run_rows(table, config.logx, config.norm_mode, config.workers)
        logx = table.logx if config.logx is None else config.logx
        outcome.titles[len(outcome.rows)] = f"{table.key}  {table.title}  (log x = {logx:g})"
        for r in rows:
            param = f"{table.param_name}={r.param}"
            outcome.rows.append(
                _row(
                    f"{table.key}:{param}" if prefix else param,
                    _fmt_value(r.value, table.decimals, config.precision),
                    _fmt_value(r.reference, table.decimals, config.precision),
                    format_sci(r.abs_err, 3),
                )
            )
        if config.check and _golden_applies(table, config, log):
            failures.extend((table.key, m) for m in compare_golden(table, rows))
    if failures:
        raise GoldenMismatchError(f"{len(failures)} row(s) differ from the golden tables", rows=failures)
    return outcome


def _kernel(config: RunConfig) -> Kernel:
    return KERNELS[config.kernel](config.norm_mode)


def _window_for(kernel: Kernel, power: float, log: logging.Logger) -> int:
    if kernel.compact:
        return 1
    try:
        return kernel.window_for(1e-10, power=power)
    except UnsupportedKernelError:
        log.warning("%s: tail too heavy for a certified window, summing ±%d", kernel.name, 1 << 16)
        return 1 << 16


def run_kernel_check(config: RunConfig, log: logging.Logger) -> Outcome:
    kernel = _kernel(config)
    grid = LogGrid(points=config.points)
    K = 1 if kernel.compact else kernel.partition_window(PARTITION_LIMIT / 2.0)
    order = 2 if config.order is None else config.order
    report = condition_report(kernel, grid, K=K, orders=tuple(range(1, order + 1)))

    rows = [
        _row("partition_max_dev", format_sci(report.partition_max_dev, 3), "0"),
        _row("M0", format_fixed(report.M0, 13)),
    ]
    for r, sup in report.tail_profile:
        rows.append(_row(f"tail r={r:g}", format_sci(sup, 3)))
    for j in sorted(report.moment_x_variation):
        if j in report.divergent_orders:
            rows.append(_row(f"M_{j}", "divergent"))
            continue
        known = kernel.known_moments.get(j)
        mean = report.moments[j]
        rows.append(
            _row(
                f"m_{j}",
                format_fixed(mean, 13),
                "" if known is None else format_fixed(known, 13),
                "" if known is None else format_sci(abs(mean - known), 3),
            )
        )
        rows.append(_row(f"m_{j} x-variation", format_sci(report.moment_x_variation[j], 3)))

    failed = report.partition_max_dev > PARTITION_LIMIT or report.M0 < 1.0 - report.partition_max_dev
    if failed:
        log.error("%s fails the partition check: deviation %.3e", kernel.name, report.partition_max_dev)
    return Outcome(rows, {0: f"kernel-check {kernel.name} on {grid.points} points"}, failed)


def run_moments(config: RunConfig, log: logging.Logger) -> Outcome:
    kernel = _kernel(config)
    logx = 0.3 if config.logx is None else config.logx
    x = x_of(logx)
    order = 2 if config.order is None else config.order
    rows: List[Row] = []
    for j in range(order + 1):
        known = kernel.known_moments.get(j)
        try:
            m = moment_m(kernel, j, x, _window_for(kernel, j, log))
            rows.append(
                _row(
                    f"m_{j}",
                    format_fixed(m, 13),
                    "" if known is None else format_fixed(known, 13),
                    "" if known is None else format_sci(abs(m - known), 3),
                )
            )
        except DivergenceError:
            rows.append(_row(f"m_{j}", "divergent"))
        try:
            rows.append(_row(f"M_{j}", format_fixed(moment_M(kernel, j, x, _window_for(kernel, j, log)), 13)))
        except DivergenceError:
            rows.append(_row(f"M_{j}", "divergent"))
    return Outcome(rows, {0: f"moments of {kernel.name} at log x = {logx:g}"})


def run_rates(config: RunConfig, log: logging.Logger) -> Outcome:
    table = get_table(config.table or "1a")
    rows = run_rows(table, config.logx, config.norm_mode, config.workers)
    floor = 0.0 if table.decimals is None else RATE_NOISE_FLOOR
    fit = fit_order(error_series(table, rows, config.logx, config.norm_mode), noise_floor=floor)
    expected = table.expected_order
    out = [
        _row(
            "slope",
            format_fixed(fit.slope, 4),
            "" if expected is None else format_fixed(expected, 4),
            "" if expected is None else format_sci(abs(fit.slope - expected), 3),
        ),
        _row("intercept", format_fixed(fit.intercept, 4)),
        _row("r_squared", format_fixed(fit.r_squared, 6)),
        _row("rows_used", str(fit.rows_used)),
    ]
    failed = expected is not None and abs(fit.slope - expected) > table.order_tol
    if failed:
        log.error("table %s: slope %.3f is not %g ± %g", table.key, fit.slope, expected, table.order_tol)
    return Outcome(out, {0: f"rate fit for table {table.key}"}, failed)


def run_voronovskaja(config: RunConfig, log: logging.Logger) -> Outcome:
    mode = config.norm_mode
    if config.kernel == "jackson" and mode is not NormMode.ANALYTIC:
        log.info("Voronovskaja limits need a unit-mass kernel; using the exact Jackson constant")
        mode = NormMode.ANALYTIC
    kernel = KERNELS[config.kernel](mode)
    n = config.order or (2 if config.kernel == "jackson" else 1)
    logx = 2.7 if config.logx is None else config.logx
    result = voronovskaja_limit(kernel, fejer_signal(), x_of(logx), n, VORONOVSKAJA_W)

    rows = [_row(f"w={w:g}", format_fixed(s, 10)) for w, s in zip(result.w_list, result.sequence)]
    target = result.target
    rows.append(
        _row(
            "limit",
            format_fixed(result.extrapolated, 10),
            "" if target is None else format_fixed(target, 10),
            "" if target is None else format_sci(abs(result.extrapolated - target), 3),
        )
    )
    rel = result.rel_err
    failed = rel is not None and rel > VORONOVSKAJA_REL_TOL
    if failed:
        log.error("Voronovskaja limit off by %.2f%%", 100.0 * rel)
    return Outcome(rows, {0: f"w^{n}·(S_w f − f) for {kernel.name} at log x = {logx:g}"}, failed)


RUNNERS: Dict[str, Callable[[RunConfig, logging.Logger], Outcome]] = {
    "table1": run_table,
    "table2": run_table,
    "table3": run_table,
    "table4": run_table,
    "kernel-check": run_kernel_check,
    "moments": run_moments,
    "rates": run_rates,
    "voronovskaja": run_voronovskaja,
}


# ───────────────────────────── MAIN ────────────────────────────────────────
def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.env_file:
            if not Path(args.env_file).is_file():
                parser.error(f"--env-file {args.env_file!r} does not exist")
            load_dotenv(args.env_file)
        config = _config_from(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)

    env_dir = os.getenv("MELLIN_LOG_DIR")
    log_dir = Path(env_dir).resolve() if env_dir else LOG_DIR
    log = _setup_logging(args.log_level or os.getenv("MELLIN_LOG_LEVEL", LOG_LEVEL), log_dir)
    log.info("command %s (norm mode %s, %d workers)", config.command, config.norm_mode.value, config.workers)

    try:
        outcome = RUNNERS[config.command](config, log)
    except GoldenMismatchError as err:
        log.error("check failed: %s", err)
        for key, miss in err.rows:
            log.error("  %s param=%s value=%r printed=%s", key, miss.param, miss.value, miss.golden)
        return err.exit_code
    except SamplingError as err:
        log.error("%s failed: %s", config.command, err)
        return err.exit_code
    except ArithmeticError as err:
        log.error("%s failed: floating-point %s: %s", config.command, type(err).__name__, err)
        return EXIT_NUMERIC

    sys.stdout.write(render(outcome.rows, config.output, outcome.titles))
    sys.stdout.flush()
    if outcome.failed:
        return EXIT_CHECK
    log.info("SUCCESS")
    return EXIT_OK


def _cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    _cli()

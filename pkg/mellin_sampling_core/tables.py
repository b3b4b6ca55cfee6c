"""
Table definitions, row evaluation and golden comparison.

A table is a parameter list at a fixed log x plus a row evaluator. Rows are
computed in a thread pool and always returned in parameter order; every
evaluator is a deterministic sequential sum, so the pool size never shows
in the numbers.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Tuple

from .constants import (
    LOGX_NEGATIVE,
    LOGX_POSITIVE,
    TABLE1A_N,
    TABLE1B_W,
    TABLE2A_N,
    TABLE2B_W,
    TABLE3_N,
    TABLE4_N,
    WORKERS,
)
from .exceptions import InvalidArgumentError
from .kernels import NormMode, jackson_kernel, norm_mode_of
from .mellin_ops import fejer_signal
from .sampling import (
    ErrorSeries,
    bspline2_closed_form,
    classical_fejer_sum,
    fejer_value,
    jackson_sample,
    truncation_error,
)

log = logging.getLogger(__name__)

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# (w, N) for the Jackson truncation tail; N ≥ 2·w·log x throughout
JACKSON_TAIL_W = 20
JACKSON_TAIL_N = (400, 800, 1600, 3200, 6400)


class TableRow(NamedTuple):
    param: int
    value: float
    reference: float
    abs_err: float


class GoldenRow(NamedTuple):
    param: int
    value: Decimal
    status: str


class Mismatch(NamedTuple):
    param: int
    value: float
    golden: Decimal
    deviation: float


Evaluator = Callable[[int, float, NormMode], float]


@dataclass(frozen=True)
class TableDef:
    key: str
    title: str
    param_name: str
    params: Tuple[int, ...]
    logx: float
    evaluate: Evaluator
    decimals: int | None = 13
    tolerance: float = 5e-13
    golden: bool = True
    jackson: bool = False
    expected_order: float | None = None
    order_tol: float = 0.3

    def reference(self, logx: float) -> float:
        if self.key == "jackson-tail":
            return 0.0
        return fejer_value(math.pi, 0.0, x_of(logx))

    def limit(self, logx: float, norm_mode: NormMode) -> float:
        """Large-parameter limit of the column: f(x), scaled by m_0 for Jackson rows."""
        ref = self.reference(logx)
        if self.jackson:
            return ref * jackson_kernel(norm_mode=norm_mode).known_moments[0]
        return ref


# ───────────────────────────── EVALUATORS ──────────────────────────────────
def x_of(logx: float) -> float:
    """e^logx, refusing values a double cannot hold as a positive finite x."""
    if not math.isfinite(logx):
        raise InvalidArgumentError(f"log x must be finite, got {logx!r}")
    try:
        x = math.exp(logx)
    except OverflowError as err:
        raise InvalidArgumentError(f"x = e^{logx:g} overflows a double") from err
    if x == 0.0:
        raise InvalidArgumentError(f"x = e^{logx:g} underflows to zero")
    return x


def _classical(N: int, logx: float, norm_mode: NormMode) -> float:
    return classical_fejer_sum(math.pi, 0.0, N, x_of(logx))


def _bspline2(w: int, logx: float, norm_mode: NormMode) -> float:
    return bspline2_closed_form(fejer_signal(), w, x_of(logx))


def _jackson(w: int, logx: float, norm_mode: NormMode) -> float:
    return jackson_sample(fejer_signal(), w, x_of(logx), norm_mode)


def _analytic_jackson(w: int, logx: float, norm_mode: NormMode) -> float:
    return jackson_sample(fejer_signal(), w, x_of(logx), NormMode.ANALYTIC)


def _jackson_tail(N: int, logx: float, norm_mode: NormMode) -> float:
    kernel = jackson_kernel(norm_mode=norm_mode)
    return truncation_error(kernel, fejer_signal(), JACKSON_TAIL_W, N, x_of(logx))


TABLES: Dict[str, TableDef] = {
    t.key: t
    for t in (
        TableDef("1a", "S_N F^0_π(x), classical", "N", TABLE1A_N, LOGX_POSITIVE, _classical, expected_order=-3.0),
        TableDef("1b", "S_w^{B_2} F^0_π(x)", "w", TABLE1B_W, LOGX_POSITIVE, _bspline2, decimals=14, tolerance=5e-14),
        TableDef("2a", "S_N F^0_π(x), classical", "N", TABLE2A_N, LOGX_NEGATIVE, _classical, expected_order=-3.0),
        TableDef("2b", "S_w^{B_2} F^0_π(x)", "w", TABLE2B_W, LOGX_NEGATIVE, _bspline2),
        TableDef("3a", "S_N F^0_π(x), classical", "N", TABLE3_N, LOGX_POSITIVE, _classical, expected_order=-3.0),
        TableDef(
            "3b", "S_w^{J_{1,2}} F^0_π(x)", "w=N", TABLE3_N, LOGX_POSITIVE, _jackson,
            tolerance=1e-11, jackson=True, expected_order=-2.0,
        ),
        TableDef("4a", "S_N F^0_π(x), classical", "N", TABLE4_N, LOGX_NEGATIVE, _classical, expected_order=-3.0),
        TableDef(
            "4b", "S_w^{J_{1,2}} F^0_π(x)", "w=N", TABLE4_N, LOGX_NEGATIVE, _jackson,
            tolerance=1e-11, jackson=True, expected_order=-2.0,
        ),
        TableDef(
            "3b-analytic", "S_w^{J_{1,2}} F^0_π(x), exact constant", "w=N", TABLE3_N, LOGX_POSITIVE,
            _analytic_jackson, golden=False, expected_order=-2.0,
        ),
        TableDef(
            "jackson-tail", "Σ_{|k|>N} of S_20^{J_{1,2}} F^0_π(x)", "N", JACKSON_TAIL_N, LOGX_POSITIVE,
            _jackson_tail, decimals=None, golden=False, expected_order=-5.0, order_tol=0.5,
        ),
    )
}

COMMAND_TABLES: Dict[str, Tuple[str, ...]] = {
    "table1": ("1a", "1b"),
    "table2": ("2a", "2b"),
    "table3": ("3a", "3b"),
    "table4": ("4a", "4b"),
}


def get_table(key: str) -> TableDef:
    try:
        return TABLES[key]
    except KeyError as err:
        raise InvalidArgumentError(f"unknown table {key!r}; choose from {sorted(TABLES)}") from err


# ───────────────────────────── ROWS ────────────────────────────────────────
def _row(table: TableDef, logx: float, norm_mode: NormMode, reference: float, param: int) -> TableRow:
    value = table.evaluate(param, logx, norm_mode)
    return TableRow(param, value, reference, abs(value - reference))


def run_rows(
    table: TableDef,
    logx: float | None = None,
    norm_mode: NormMode | str = NormMode.PAPER,
    workers: int = WORKERS,
) -> List[TableRow]:
    """All rows of ``table`` in parameter order."""
    logx = table.logx if logx is None else float(logx)
    x_of(logx)
    norm_mode = norm_mode_of(norm_mode)
    reference = table.reference(logx)
    job = partial(_row, table, logx, norm_mode, reference)
    log.info("table %s: %d rows at log x = %g (%d workers)", table.key, len(table.params), logx, workers)
    if workers <= 1:
        return [job(p) for p in table.params]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, table.params))


def error_series(
    table: TableDef,
    rows: List[TableRow],
    logx: float | None = None,
    norm_mode: NormMode | str = NormMode.PAPER,
) -> ErrorSeries:
    """Rows measured against the column's own limit, for rate fits."""
    logx = table.logx if logx is None else float(logx)
    limit = table.limit(logx, norm_mode_of(norm_mode))
    series = ErrorSeries()
    for row in rows:
        series.add(row.param, row.value, limit)
    return series


# ───────────────────────────── GOLDEN ──────────────────────────────────────
def load_golden(key: str) -> List[GoldenRow]:
    path = GOLDEN_DIR / f"table{key}.csv"
    if not path.exists():
        raise InvalidArgumentError(f"no golden file for table {key!r}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        return [
            GoldenRow(int(r["param"]), Decimal(r["value"]), r["status"].strip())
            for r in csv.DictReader(fh)
        ]


def compare_golden(table: TableDef, rows: List[TableRow]) -> List[Mismatch]:
    """Verified rows that deviate from the printed value by more than the table tolerance.

    Rows marked ``erratum`` are compared too, but only logged.
    """
    golden = {g.param: g for g in load_golden(table.key)}
    failures: List[Mismatch] = []
    for row in rows:
        g = golden.get(row.param)
        if g is None:
            continue
        deviation = abs(float(Decimal(repr(row.value)) - g.value))
        if deviation <= table.tolerance:
            continue
        miss = Mismatch(row.param, row.value, g.value, deviation)
        if g.status == "erratum":
            log.warning(
                "table %s %s=%d: printed %s is a known erratum (deviation %.3e)",
                table.key, table.param_name, row.param, g.value, deviation,
            )
            continue
        log.error(
            "table %s %s=%d: %r differs from printed %s by %.3e",
            table.key, table.param_name, row.param, row.value, g.value, deviation,
        )
        failures.append(miss)
    return failures


__all__ = [
    "GOLDEN_DIR",
    "JACKSON_TAIL_W",
    "JACKSON_TAIL_N",
    "TableRow",
    "GoldenRow",
    "Mismatch",
    "TableDef",
    "TABLES",
    "COMMAND_TABLES",
    "get_table",
    "run_rows",
    "error_series",
    "load_golden",
    "compare_golden",
]

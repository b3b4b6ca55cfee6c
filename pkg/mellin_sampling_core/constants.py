from __future__ import annotations

import logging
import os
from pathlib import Path

# ───────────────────────────── psutil (optional) ───────────────────────────
try:
    import psutil  # type: ignore
except Exception as _e:  # pragma: no cover
    psutil = None  # type: ignore
    logging.getLogger(__name__).warning(
        "psutil missing – defaulting to one worker (%s)", _e
    )


def _default_workers() -> int:
    env = os.getenv("MELLIN_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logging.getLogger(__name__).warning("MELLIN_WORKERS=%r is not an integer; ignoring it", env)
    if psutil is None:  # pragma: no cover
        return 1
    return max(1, psutil.cpu_count(logical=False) or 1)


# ───────────────────────────── RUNTIME SETTINGS ────────────────────────────
_log_dir = os.getenv("MELLIN_LOG_DIR")
LOG_DIR = Path(_log_dir).resolve() if _log_dir else None
LOG_LEVEL = os.getenv("MELLIN_LOG_LEVEL", "INFO").upper()
WORKERS = _default_workers()
NORM_MODE = os.getenv("MELLIN_NORM_MODE", "paper")
TAIL_TOL = float(os.getenv("MELLIN_TAIL_TOL", "1e-14"))

# ───────────────────────────── SPECIAL FUNCTIONS ───────────────────────────
SINC_TAYLOR_SWITCH = 1e-4

# ───────────────────────────── MELLIN OPERATORS ────────────────────────────
GRID_LO = -6.0
GRID_HI = 6.0
GRID_POINTS = 4096
FD_STEP_LOW_ORDER = 1e-3  # r <= 2
FD_STEP_HIGH_ORDER = 1e-2  # r >= 3
MAX_DERIVATIVE_ORDER = 6

# ───────────────────────────── KERNEL WINDOWS ──────────────────────────────
MAX_WINDOW = 1 << 24

# ───────────────────────────── JACKSON CONSTANT ────────────────────────────
# C^{-1} as printed next to the tables; exact value is 8π/3.
PAPER_JACKSON_INVERSE_NORM = 8.37757951289894
# Trapezoid on [-L, L] that best reproduces the printed constant.
PAPER_QUAD_STEP = 1.0 / 32.0
PAPER_QUAD_REFINE = 1
PAPER_QUAD_HALF_WIDTH = 416.78125
PAPER_QUAD_TOL = 1e-5

# ───────────────────────────── TABLE PARAMETERS ────────────────────────────
LOGX_POSITIVE = 2.7
LOGX_NEGATIVE = -0.6

TABLE1A_N = (20, 40, 160, 640, 2560, 10240, 20480, 1310720)
TABLE1B_W = (16, 32, 128, 512, 2048, 8192, 16384, 1048576)
TABLE2A_N = (160, 320, 640, 1280, 2560, 5120, 10240)
TABLE2B_W = (512, 4096, 32768, 1048576, 8388608, 33554432, 2199023255552)
TABLE3_N = tuple(20 * 2**i for i in range(15))  # 20 … 327680
TABLE4_N = tuple(20 * 2**i for i in range(12))  # 20 … 40960

__all__ = [
    "LOG_DIR",
    "LOG_LEVEL",
    "WORKERS",
    "NORM_MODE",
    "TAIL_TOL",
    "SINC_TAYLOR_SWITCH",
    "GRID_LO",
    "GRID_HI",
    "GRID_POINTS",
    "FD_STEP_LOW_ORDER",
    "FD_STEP_HIGH_ORDER",
    "MAX_DERIVATIVE_ORDER",
    "MAX_WINDOW",
    "PAPER_JACKSON_INVERSE_NORM",
    "PAPER_QUAD_STEP",
    "PAPER_QUAD_REFINE",
    "PAPER_QUAD_HALF_WIDTH",
    "PAPER_QUAD_TOL",
    "LOGX_POSITIVE",
    "LOGX_NEGATIVE",
    "TABLE1A_N",
    "TABLE1B_W",
    "TABLE2A_N",
    "TABLE2B_W",
    "TABLE3_N",
    "TABLE4_N",
]

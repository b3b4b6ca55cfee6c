#!/usr/bin/env python3
"""
Reproduce the sampling tables from a scheduled job.

How it fits together
────────────────────
1. The job runner calls *this* script with the usual CLI arguments.
2. We load environment variables (.env next to the repository root) so
   MELLIN_LOG_DIR, MELLIN_WORKERS and friends are set before the package
   reads them.
3. Everything else is `mellin_sampling_core.cli.main`; its exit code is ours.
"""

from __future__ import annotations

import sys
from pathlib import Path

from dotenv import load_dotenv  # read settings from .env files

# ───────────────────────────── CONFIGURATION ──────────────────────────────
REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT))

# Load .env **once** so every downstream import can rely on the vars.
load_dotenv(REPO_ROOT / ".env")

from mellin_sampling_core.cli import main  # noqa: E402  (after load_dotenv!)


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))

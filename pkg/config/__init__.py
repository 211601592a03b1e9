"""
Configuration settings for saddlegame.

This module provides the Config class with all settings.
Every value can be overridden via environment variables (SADDLEGAME_*) or a
.env file; CLI flags override both.
"""

import os
from pathlib import Path

# Load environment variables from .env file if it exists
try:
    from dotenv import load_dotenv

    # Try multiple locations for .env
    for env_path in [
        Path.cwd() / ".env",  # Current working directory
        Path(__file__).parent.parent / ".env",  # Package root (when running from source)
        Path.home() / ".saddlegame" / ".env",  # User config directory
    ]:
        if env_path.exists():
            load_dotenv(env_path, override=True)
            break
except ImportError:
    # python-dotenv not installed, will use system environment variables only
    pass


def _get_bool(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).lower() == "true"


def _get_int_list(name: str, default: str) -> list[int]:
    raw = os.getenv(name, default)
    return [int(part) for part in raw.split(",") if part.strip()]


class Config:
    """Main configuration class for saddlegame."""

    # Enumeration caps (desk-scale verification)
    ENUM_CAP = int(os.getenv("SADDLEGAME_ENUM_CAP", "1000000"))  # pure actions per player
    MATRIX_CAP = int(os.getenv("SADDLEGAME_MATRIX_CAP", "10000000"))  # payoff matrix entries

    # Numerical tolerances
    FEAS_EPS = float(os.getenv("SADDLEGAME_FEAS_EPS", "1e-12"))  # relative, feasibility tests
    SUM_EPS = float(os.getenv("SADDLEGAME_SUM_EPS", "1e-9"))  # per target, marginal budgets
    CROSS_CHECK_RTOL = float(os.getenv("SADDLEGAME_CROSS_CHECK_RTOL", "1e-9"))
    ORACLE_DUAL_RTOL = float(os.getenv("SADDLEGAME_ORACLE_DUAL_RTOL", "1e-8"))
    VERIFY_TOL = float(os.getenv("SADDLEGAME_VERIFY_TOL", "1e-9"))
    PROB_EPS = float(os.getenv("SADDLEGAME_PROB_EPS", "1e-12"))  # strategy probabilities sum to 1
    # Costs below this fraction of the largest cost are treated as zero
    NEGLIGIBLE_COST = float(os.getenv("SADDLEGAME_NEGLIGIBLE_COST", "1e-301"))

    # Oracle Settings
    ORACLE_EXACT = _get_bool("SADDLEGAME_ORACLE_EXACT")

    # Bench Settings
    BENCH_M_LIST = _get_int_list("SADDLEGAME_BENCH_M_LIST", "1000,2000")
    BENCH_TRIALS = int(os.getenv("SADDLEGAME_BENCH_TRIALS", "5"))
    BENCH_SEED = int(os.getenv("SADDLEGAME_BENCH_SEED", "0"))
    BENCH_DIST = os.getenv("SADDLEGAME_BENCH_DIST", "uniform")
    BENCH_WORKERS = int(os.getenv("SADDLEGAME_BENCH_WORKERS", "1"))

    # Logging
    LOG_LEVEL = os.getenv("SADDLEGAME_LOG_LEVEL", "WARNING").upper()

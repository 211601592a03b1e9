"""
Scaling benchmark for the linear solvers.

Instances are drawn from one PCG64 stream in (m, trial) order before any
solving starts, so the same seed always yields the same instances whatever
the worker count. Rows come back sorted by m.
"""

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

import numpy as np

from config import Config
from core.dto import GameInstance
from core.errors import ScaleLimit
from core.game import normalize
from core.oracle import oracle_certificate
from core.solver import solve_linear

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("uniform", "lognormal")
CSV_COLUMNS = ["m", "median_ns", "p90_ns", "cells_U", "cells_W", "cells_UII"]


@dataclass
class BenchRow:
    """Aggregated measurements for one instance size."""

    m: int
    median_ns: int
    p90_ns: int
    cells_U: int  # U^I and diagonal, max over trials
    cells_W: int
    cells_UII: int = 0
    max_abs_dv: Optional[float] = None  # None when the oracle was skipped

    def to_dict(self) -> dict:
        row = {
            "m": self.m,
            "median_ns": self.median_ns,
            "p90_ns": self.p90_ns,
            "cells_U": self.cells_U,
            "cells_W": self.cells_W,
            "cells_UII": self.cells_UII,
        }
        row["max_abs_dv"] = "" if self.max_abs_dv is None else f"{self.max_abs_dv:.17g}"
        return row


def draw_costs(rng: np.random.Generator, m: int, dist: str) -> np.ndarray:
    """Positive costs: uniform on (0, 1] or standard lognormal."""
    if dist == "uniform":
        return 1.0 - rng.random(m)
    if dist == "lognormal":
        return rng.lognormal(0.0, 1.0, m)
    raise ValueError(f"unknown distribution {dist!r}, expected one of {DISTRIBUTIONS}")


def budgets(m: int, ka: Optional[int] = None, kd_frac: Optional[float] = None) -> tuple[int, int]:
    """Default k_a = k_d = ceil(m / 10); kd_frac and ka override."""
    k_a = math.ceil(m / 10) if ka is None else ka
    k_d = math.ceil(m / 10) if kd_frac is None else math.ceil(kd_frac * m)
    return min(max(k_a, 0), m), min(max(k_d, 0), m)


def generate_instances(
    m_list: Iterable[int],
    trials: int,
    seed: int,
    dist: str = "uniform",
    ka: Optional[int] = None,
    kd_frac: Optional[float] = None,
) -> list[tuple[int, int, GameInstance]]:
    """(m, trial, instance) triples, reproducible from the seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for m in m_list:
        k_a, k_d = budgets(m, ka, kd_frac)
        for trial in range(trials):
            out.append((m, trial, normalize(draw_costs(rng, m, dist), k_a, k_d)))
    return out


def _measure(
    g: GameInstance, with_oracle: bool, cap: int
) -> tuple[int, int, int, Optional[float], int]:
    started = time.perf_counter_ns()
    cert = solve_linear(g)
    elapsed = time.perf_counter_ns() - started
    dv = None
    if with_oracle:
        try:
            dv = abs(cert.value - oracle_certificate(g, cap=cap).value)
        except ScaleLimit as e:
            logger.warning(f"skipping oracle comparison at m={g.m}: {e}")
    return elapsed, cert.stats.cells_u, cert.stats.cells_w, dv, cert.stats.cells_uii


def run_bench(
    m_list: Iterable[int],
    trials: int,
    seed: int,
    dist: str = "uniform",
    ka: Optional[int] = None,
    kd_frac: Optional[float] = None,
    with_oracle: bool = False,
    workers: Optional[int] = None,
    timings: bool = True,
    cap: Optional[int] = None,
) -> list[BenchRow]:
    """Time the fast solve over seeded instances and aggregate per m."""
    workers = Config.BENCH_WORKERS if workers is None else workers
    cap = Config.MATRIX_CAP if cap is None else cap
    instances = generate_instances(m_list, trials, seed, dist, ka, kd_frac)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(
                executor.map(lambda item: _measure(item[2], with_oracle, cap), instances)
            )
    else:
        results = [_measure(g, with_oracle, cap) for _, _, g in instances]

    by_m: dict[int, list] = {}
    for (m, _, _), result in zip(instances, results):
        by_m.setdefault(m, []).append(result)

    rows = []
    for m in sorted(by_m):
        samples = by_m[m]
        times = np.array([s[0] for s in samples])
        dvs = [s[3] for s in samples if s[3] is not None]
        rows.append(
            BenchRow(
                m=m,
                median_ns=int(np.median(times)) if timings else 0,
                p90_ns=int(np.percentile(times, 90)) if timings else 0,
                cells_U=max(s[1] for s in samples),
                cells_W=max(s[2] for s in samples),
                cells_UII=max(s[4] for s in samples),
                max_abs_dv=max(dvs) if dvs else None,
            )
        )
        logger.info(
            f"bench m={m}: median {rows[-1].median_ns} ns over {len(samples)} trials, "
            f"cells U={rows[-1].cells_U} UII={rows[-1].cells_UII} W={rows[-1].cells_W}"
        )
    return rows


def write_csv(rows: list[BenchRow], stream: TextIO, with_oracle: bool = False) -> None:
    """CSV with a header row and LF line endings."""
    fieldnames = CSV_COLUMNS + (["max_abs_dv"] if with_oracle else [])
    writer = csv.DictWriter(
        stream, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n"
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_dict())

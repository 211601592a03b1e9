"""
saddlegame command-line interface.

    saddlegame solve  --input game.json [--mode fast|oracle|both] [--strategies]
    saddlegame verify --input game.json --certificate cert.json [--tol 1e-9]
    saddlegame bench  --m-list 1000,2000 --trials 5 --seed 7 [--with-oracle]
    saddlegame cells  --input game.json [--json]

Machine-readable output (certificates, CSV, cell dumps) goes to --output or
stdout; human-readable summaries go to stderr.

Exit codes: 0 ok, 1 verification failed, 2 unreadable or invalid input,
3 enumeration cap exceeded, 4 fast solvers disagree.
"""

import dataclasses
import io
import logging
import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from config import Config
from core.attacker_solver import AttackerTable
from core.bench import DISTRIBUTIONS, run_bench, write_csv
from core.defender_solver import DefenderTable
from core.errors import (
    InfeasibleMarginal,
    InvalidInstance,
    InvalidStrategy,
    MalformedFile,
    NumericalFailure,
    ScaleLimit,
)
from core.oracle import OracleSaddleSolver
from core.ports import SaddleSolver
from core.serialization import (
    emit,
    emit_certificate,
    from_certificate_file,
    load_instance,
    parse_certificate,
    to_certificate_file,
)
from core.solver import LinearSaddleSolver, positive_part, solve_both
from core.strategy_lift import lift_defender, lift_marginal, verify_saddle

console = Console(stderr=True)
logger = logging.getLogger("saddlegame")

EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_SCALE_LIMIT = 3
EXIT_CROSS_CHECK = 4


def _fail(message: str, code: int) -> None:
    console.print(f"[red]Error:[/red] {message}", soft_wrap=True)
    sys.exit(code)


def _load(path: str):
    try:
        return load_instance(path)
    except (MalformedFile, InvalidInstance) as e:
        _fail(f"{path}: {e}", EXIT_BAD_INPUT)
    except OSError as e:
        _fail(f"cannot read {path}: {e}", EXIT_BAD_INPUT)


def _write(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _solver(
    mode: str, strategies: bool, exact: Optional[bool], cap: Optional[int]
) -> SaddleSolver:
    if mode == "oracle":
        return OracleSaddleSolver(exact=exact, cap=cap)
    return LinearSaddleSolver(strategies=strategies)


def _parse_m_list(ctx, param, value) -> list[int]:
    if isinstance(value, list):
        return value
    try:
        sizes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")
    if not sizes or any(m < 1 for m in sizes):
        raise click.BadParameter("sizes must be positive integers")
    return sizes


@click.group()
@click.option(
    "--timings/--no-timings",
    default=True,
    help="Record wall times; --no-timings writes 0 for byte-stable output.",
)
@click.option("-v", "--verbose", count=True, help="-v for info, -vv for debug logging.")
@click.pass_context
def cli(ctx, timings, verbose):
    """Saddle-point solver for zero-sum additive security games."""
    level = {0: Config.LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(name)s: %(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )
    ctx.ensure_object(dict)
    ctx.obj["timings"] = timings


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--output", type=click.Path(dir_okay=False), help="Certificate path (default stdout)."
)
@click.option(
    "--mode", type=click.Choice(["fast", "oracle", "both"]), default="fast", show_default=True
)
@click.option("--strategies", is_flag=True, help="Include lifted mixed strategies.")
@click.option("--cap", type=int, default=None, help="Oracle payoff-matrix entry cap.")
@click.option("--exact", is_flag=True, help="Rational arithmetic in the oracle.")
@click.pass_context
def solve(ctx, input_path, output, mode, strategies, cap, exact):
    """Compute the saddle-point value and a certificate."""
    g = _load(input_path)
    try:
        if mode == "both":
            cert = solve_both(g, strategies=strategies, exact=exact or None, cap=cap)
        else:
            cert = _solver(mode, strategies, exact or None, cap).certify(g)
    except ScaleLimit as e:
        _fail(str(e), EXIT_SCALE_LIMIT)
    except NumericalFailure as e:
        _fail(str(e), EXIT_CROSS_CHECK)

    if not ctx.obj["timings"]:
        cert = dataclasses.replace(cert, runtime_ns=0)
    _write(emit_certificate(to_certificate_file(cert, strategies=strategies)), output)

    table = Table(title=f"Saddle point ({cert.method.value})", show_header=False)
    table.add_column("field", style="cyan")
    table.add_column("value")
    table.add_row("targets", str(g.m))
    table.add_row("budgets", f"k_a={g.k_a}, k_d={g.k_d}")
    table.add_row("value", f"{cert.value:.12g}")
    table.add_row("s*, r*", f"{cert.s_star}, {cert.r_star}")
    table.add_row("defender", "pure" if cert.defender_pure else "mixed")
    if cert.stats is not None:
        table.add_row(
            "cells",
            f"UI={cert.stats.cells_u}, UII={cert.stats.cells_uii}, W={cert.stats.cells_w}",
        )
    if cert.discrepancy is not None:
        table.add_row("|Δv| vs oracle", f"{cert.discrepancy:.3g}")
    console.print(table)


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--certificate", "cert_path", required=True, type=click.Path(exists=True, dir_okay=False)
)
@click.option("--tol", type=float, default=None, help="Absolute tolerance (default 1e-9).")
@click.option("--cap", type=int, default=None, help="Pure-action enumeration cap.")
def verify(input_path, cert_path, tol, cap):
    """Check a certificate against every pure deviation."""
    g = _load(input_path)
    try:
        doc = parse_certificate(Path(cert_path).read_text(encoding="utf-8"))
        cert = from_certificate_file(doc, g)
    except MalformedFile as e:
        _fail(f"{cert_path}: {e}", EXIT_BAD_INPUT)

    try:
        p, q = cert.attacker_strategy, cert.defender_strategy
        if p is None or q is None:
            logger.info("certificate has no strategies; lifting its marginals")
            p = lift_marginal(cert.alpha, g.k_a)
            q = lift_defender(cert.beta, g.k_d, g.m)
        verdict = verify_saddle(p, q, cert.value, g, tol=tol, cap=cap)
    except ScaleLimit as e:
        _fail(str(e), EXIT_SCALE_LIMIT)
    except InfeasibleMarginal as e:
        _fail(f"certificate marginals are infeasible: {e}", EXIT_VERIFY_FAILED)
    except InvalidStrategy as e:
        _fail(f"{cert_path}: {e}", EXIT_BAD_INPUT)

    table = Table(title="Saddle inequalities")
    table.add_column("check")
    table.add_column("bound", justify="right")
    table.add_column("claimed v", justify="right")
    table.add_column("ok")
    table.add_row(
        "min over defenses (attacker p)",
        f"{verdict.attacker_guarantee:.12g}",
        f"{verdict.value:.12g}",
        "[green]yes[/green]" if verdict.attacker_ok else "[red]no[/red]",
    )
    table.add_row(
        "max over attacks (defender q)",
        f"{verdict.defender_guarantee:.12g}",
        f"{verdict.value:.12g}",
        "[green]yes[/green]" if verdict.defender_ok else "[red]no[/red]",
    )
    console.print(table)

    if not verdict.passed:
        witness = verdict.to_dict(g)
        console.print(f"worst defense against p: {witness['worst_defense']}", soft_wrap=True)
        console.print(f"best attack against q:   {witness['best_attack']}", soft_wrap=True)
        sys.exit(EXIT_VERIFY_FAILED)
    console.print("[green]certificate verified[/green]")


# ----------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------


@cli.command()
@click.option(
    "--m-list",
    default=",".join(str(m) for m in Config.BENCH_M_LIST),
    callback=_parse_m_list,
    show_default=True,
    help="Comma-separated instance sizes.",
)
@click.option("--trials", type=int, default=Config.BENCH_TRIALS, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=Config.BENCH_SEED, show_default=True)
@click.option(
    "--dist", type=click.Choice(DISTRIBUTIONS), default=Config.BENCH_DIST, show_default=True
)
@click.option("--kd-frac", type=float, default=None, help="k_d = ceil(kd_frac * m).")
@click.option("--ka", type=int, default=None, help="Fixed attacker budget.")
@click.option("--with-oracle", is_flag=True, help="Compare against the LP oracle where it fits.")
@click.option("--workers", type=int, default=None, help="Parallel solver threads.")
@click.option("--cap", type=int, default=None, help="Oracle payoff-matrix entry cap.")
@click.option("--output", type=click.Path(dir_okay=False), help="CSV path (default stdout).")
@click.pass_context
def bench(ctx, m_list, trials, seed, dist, kd_frac, ka, with_oracle, workers, cap, output):
    """Measure solve time and cell counts over seeded random instances."""
    rows = run_bench(
        m_list,
        trials,
        seed,
        dist=dist,
        ka=ka,
        kd_frac=kd_frac,
        with_oracle=with_oracle,
        workers=workers,
        timings=ctx.obj["timings"],
        cap=cap,
    )
    if output:
        with open(output, "w", encoding="utf-8", newline="") as f:
            write_csv(rows, f, with_oracle=with_oracle)
    else:
        buffer = io.StringIO()
        write_csv(rows, buffer, with_oracle=with_oracle)
        click.echo(buffer.getvalue(), nl=False)

    table = Table(title=f"Bench ({dist}, seed {seed}, {trials} trials)")
    for column in ("m", "median ns", "p90 ns", "cells U", "cells W", "cells UII"):
        table.add_column(column, justify="right")
    if with_oracle:
        table.add_column("max |Δv|", justify="right")
    for row in rows:
        cells = [
            str(row.m),
            str(row.median_ns),
            str(row.p90_ns),
            str(row.cells_U),
            str(row.cells_W),
            str(row.cells_UII),
        ]
        if with_oracle:
            cells.append("skipped" if row.max_abs_dv is None else f"{row.max_abs_dv:.3g}")
        table.add_row(*cells)
    console.print(table)


# ----------------------------------------------------------------------
# cells
# ----------------------------------------------------------------------


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Dump the cells as JSON on stdout.")
def cells(input_path, as_json):
    """List the candidate cells the linear searches evaluate."""
    g = _load(input_path)
    reduced, _ = positive_part(g)
    if reduced.m == 0 or reduced.is_degenerate:
        console.print("[yellow]degenerate budgets: solved in closed form, no tables[/yellow]")
        u_cells, w_cells = [], []
    else:
        try:
            u_cells = AttackerTable(reduced).candidates()
            w_cells = DefenderTable(reduced).candidates()
        except NumericalFailure as e:
            _fail(str(e), EXIT_CROSS_CHECK)

    if as_json:
        dump = {"U": [c.to_dict() for c in u_cells], "W": [c.to_dict() for c in w_cells]}
        click.echo(emit(dump), nl=False)
        return

    for title, rows in (("U (attacker, maximized)", u_cells), ("W (defender, minimized)", w_cells)):
        table = Table(title=title)
        for column in ("family", "i", "r", "s", "value", "feasible"):
            table.add_column(column, justify="right")
        for c in rows:
            table.add_row(
                c.family.value,
                str(c.i),
                str(c.r),
                str(c.s),
                f"{c.value:.12g}",
                "[green]yes[/green]" if c.feasible else "[dim]no[/dim]",
            )
        console.print(table)


if __name__ == "__main__":
    cli()

"""``afescale`` command line.

Exit codes: 0 success, 2 config error, 3 tolerance failure, 4 infeasible
design or validity-range violation.
"""

from __future__ import annotations

import functools
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from afescale.commands import (
    REPRODUCE_TARGETS,
    Check,
    Table,
    bundled_config,
    checks_table,
    reproduce_checks,
    run_coding,
    run_fading,
    run_interference,
    run_optimize_chain,
    run_qam,
    run_scale,
)
from afescale.config import AnalysisConfig, ConfigError, load_config
from afescale.errors import (
    ConvergenceError,
    DomainError,
    InfeasibleDesignError,
    OutOfModelError,
    ValidityError,
)
from afescale.output import format_cell, write_csv, write_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_INFEASIBLE = 4

OUT_ENV = "AFESCALE_OUT"


@dataclass
class Options:
    config_path: Path | None
    out: Path
    seed: int | None
    samples: int | None
    workers: int | None
    plots: bool

    def config(self) -> AnalysisConfig:
        if self.config_path is None:
            raise ConfigError("this command needs --config PATH")
        return load_config(self.config_path)


def _handled(fn):
    """Map library errors to exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        except ValidityError as exc:
            click.echo(f"validity range violated: {exc}", err=True)
            ctx.exit(EXIT_INFEASIBLE)
        except (InfeasibleDesignError, OutOfModelError, ConvergenceError) as exc:
            click.echo(f"infeasible: {exc}", err=True)
            ctx.exit(EXIT_INFEASIBLE)
        except DomainError as exc:
            click.echo(f"invalid input: {exc}", err=True)
            ctx.exit(EXIT_CONFIG)
        ctx.exit(code or EXIT_OK)

    return wrapper


def _emit(opts: Options, stem: str, table: Table) -> None:
    path = write_csv(table, opts.out / f"{stem}.csv")
    click.echo(f"wrote {path}")
    if opts.plots:
        svg = write_plot(table, opts.out / f"{stem}.svg")
        if svg is not None:
            click.echo(f"wrote {svg}")


def _report_checks(opts: Options, stem: str, checks: list[Check]) -> int:
    if not checks:
        return EXIT_OK
    write_csv(checks_table(checks), opts.out / f"{stem}_checks.csv")
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        click.echo(f"{status}  {c.name}: {format_cell(float(c.value))} "
                   f"(reference {format_cell(float(c.reference))}, {c.mode} tol {c.tolerance:g})")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_TOLERANCE


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Analysis config (YAML).")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path),
              help=f"Output directory [default: ${OUT_ENV} or ./afescale-out].")
@click.option("--seed", type=int, help="Override the Monte Carlo / optimizer seed.")
@click.option("--samples", type=click.IntRange(min=1), help="Override Monte Carlo sample count.")
@click.option("--workers", type=click.IntRange(min=1), help="Monte Carlo / multi-start worker threads.")
@click.option("--format", "fmt", type=click.Choice(["csv", "csv+plot"]), default="csv", show_default=True)
@click.version_option(package_name="artifact", prog_name="afescale")
@click.pass_context
def cli(ctx, config_path, out, seed, samples, workers, fmt):
    """Front-end power scaling analyses."""
    out = out or Path(os.environ.get(OUT_ENV) or "afescale-out")
    ctx.obj = Options(config_path, out, seed, samples, workers, fmt == "csv+plot")


@cli.command("optimize-chain")
@click.pass_obj
@_handled
def optimize_chain_cmd(opts: Options):
    """Numerically minimise chain power and compare with the closed form."""
    table, checks = run_optimize_chain(opts.config(), seed=opts.seed, workers=opts.workers or 1)
    for r in table.records():
        click.echo(f"gain set {r['gain_set']} [{r['gains']}]: closed form {r['closed_form_w']:.6e} W, "
                   f"optimizer {r['optimizer_w']:.6e} W, gap {r['rel_gap']:.2e}")
    _emit(opts, "optimize_chain", table)
    return _report_checks(opts, "optimize_chain", checks)


@cli.command("scale")
@click.pass_obj
@_handled
def scale_cmd(opts: Options):
    """Power scaling for a scenario pair or a single-parameter law."""
    table = run_scale(opts.config())
    r = table.records()[0]
    click.echo(f"sigma_P = {r['sigma_p']:.6g} ({r['sigma_p_db']:+.2f} dB); phi = {r['phi']:.6g}, "
               f"delta = {r['delta_factor']:.6g}; pure law {r['ideal_db']:+.2f} dB")
    click.echo(f"validity: {r['constraint']} -> {'ok' if r['valid'] else 'VIOLATED'}")
    for key, note in table.notes.items():
        click.echo(f"{key}: {note}")
    _emit(opts, "scale", table)
    return EXIT_OK


@cli.command("qam")
@click.pass_obj
@_handled
def qam_cmd(opts: Options):
    """AFE savings from relaxing square-QAM order and/or symbol error rate."""
    table, checks = run_qam(opts.config())
    _emit(opts, "qam", table)
    return _report_checks(opts, "qam", checks)


def _coding(opts: Options, cfg: AnalysisConfig, stem: str) -> tuple[dict[str, Table], list[Check]]:
    table, savings, checks = run_coding(cfg)
    for r in table.records():
        click.echo(f"{r['label']:<24} AFE {r['afe_power_mw']:8.3f} mW  decoder {r['decoder_power_mw']:6.2f} mW  "
                   f"total {r['total_power_mw']:8.3f} mW  {r['efficiency_gbit_per_j']:.3f} Gbit/J")
    _emit(opts, stem, table)
    tables = {"coding-table": table}
    if savings is not None:
        _emit(opts, f"{stem}_savings", savings)
        tables["coding-savings"] = savings
    return tables, checks


@cli.command("coding")
@click.pass_obj
@_handled
def coding_cmd(opts: Options):
    """Receiver power (AFE + decoder) with error control coding."""
    _, checks = _coding(opts, opts.config(), "coding")
    return _report_checks(opts, "coding", checks)


def _fading(opts: Options, cfg: AnalysisConfig, stem: str):
    table, checks = run_fading(cfg, seed=opts.seed, samples=opts.samples, workers=opts.workers)
    _emit(opts, stem, table)
    return {"fading": table}, checks


@cli.command("fading")
@click.pass_obj
@_handled
def fading_cmd(opts: Options):
    """Expected power of fading-adaptive front ends, closed form and Monte Carlo."""
    _, checks = _fading(opts, opts.config(), "fading")
    return _report_checks(opts, "fading", checks)


def _interference(opts: Options, cfg: AnalysisConfig, stem: str):
    table, checks = run_interference(cfg)
    _emit(opts, stem, table)
    return {"interference": table}, checks


@cli.command("interference")
@click.pass_obj
@_handled
def interference_cmd(opts: Options):
    """Expected power of a two-step interference-adaptive front end."""
    _, checks = _interference(opts, opts.config(), "interference")
    return _report_checks(opts, "interference", checks)


def _qam(opts: Options, cfg: AnalysisConfig, stem: str):
    table, checks = run_qam(cfg)
    _emit(opts, stem, table)
    return {"qam": table}, checks


_RUNNERS = {
    "fig2": _qam,
    "fig3": _coding,
    "table2": _coding,
    "fig5a": _fading,
    "fig5b": _interference,
}


@cli.command("reproduce")
@click.argument("target", type=click.Choice(REPRODUCE_TARGETS))
@click.pass_obj
@_handled
def reproduce_cmd(opts: Options, target: str):
    """Regenerate a figure's data or the coded-receiver table and check it."""
    cfg = opts.config() if opts.config_path is not None else bundled_config(target)
    tables, checks = _RUNNERS[target](opts, cfg, target)
    checks = checks + reproduce_checks(target, tables)
    code = _report_checks(opts, target, checks)
    click.echo(f"{target}: {'all checks passed' if code == EXIT_OK else 'TOLERANCE FAILURE'}")
    return code


def main(argv: list[str] | None = None) -> None:
    cli.main(args=argv, prog_name="afescale")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

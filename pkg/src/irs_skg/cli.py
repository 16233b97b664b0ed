"""CLI for irs-skg."""

import functools
import json
import logging
from pathlib import Path

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from irs_skg.errors import IrsSkgError
from irs_skg.harness import ExperimentReport
from irs_skg.harness.config import DEFAULT_PRESET, ExperimentConfig, load_presets, resolve_config
from irs_skg.harness.report import FORMATS, save_report, save_trace
from irs_skg.harness.runner import ExperimentRunner
from irs_skg.harness.scorecard import compact_summary, render_table

console = Console()


class ExperimentError(click.ClickException):
    """Library error surfaced as a JSON record on stderr, exit status 2."""

    exit_code = 2

    def __init__(self, error: IrsSkgError):
        super().__init__(str(error))
        self.record = {"error": error.code, "type": type(error).__name__, "message": str(error)}

    def show(self, file=None) -> None:
        click.echo(json.dumps(self.record, sort_keys=True), file=file or click.get_text_stream("stderr"))


def reports_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except IrsSkgError as exc:
            raise ExperimentError(exc) from exc

    return wrapper


def experiment_options(fn):
    """Options shared by every experiment command."""
    options = [
        click.option("--config", "-c", "config_path", type=click.Path(path_type=Path), help="YAML config file"),
        click.option(
            "--preset",
            "-p",
            type=click.Choice(sorted(load_presets())),
            default=DEFAULT_PRESET,
            show_default=True,
            help="Built-in preset the config file and flags override",
        ),
        click.option("--seed", type=int, help="Root seed (unsigned 64-bit)"),
        click.option("--snr", "snr_db", type=float, multiple=True, help="SNR in dB; repeat for a sweep"),
        click.option("--eves", "eve_counts", type=int, multiple=True, help="Colluding Eve count; repeat for a sweep"),
        click.option("--rounds", type=int, help="Coherence rounds per sweep point"),
        click.option("--trials", "mc_trials", type=int, help="Monte-Carlo deployments for the attack sweep"),
        click.option("--out", "-o", type=click.Path(path_type=Path), default=Path("results"), show_default=True),
        click.option("--threads", "-j", type=int, default=1, show_default=True, help="Worker threads"),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def build_config(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials) -> ExperimentConfig:
    overrides = {
        "seed": seed,
        "snr_db": list(snr_db) or None,
        "eve_counts": list(eve_counts) or None,
        "rounds": rounds,
        "mc_trials": mc_trials,
    }
    return resolve_config(preset, config_path, overrides)


def display_report(report: ExperimentReport, paths: list[Path]) -> None:
    console.print(render_table(report))
    console.print(f"\n[bold]{compact_summary(report)}[/bold]")
    console.print(f"[dim]{report.metadata['snr_definition']}[/dim]")
    for path in paths:
        console.print(f"[green]Saved {path}[/green]")


def _runner(config: ExperimentConfig, threads: int, title: str) -> ExperimentRunner:
    console.print(
        Panel(
            f"N_A={config.n_a} N_B={config.n_b} N_E={config.n_e} N_R={config.n_r} "
            f"D={config.probe_length} T={config.rounds} seed={config.seed}",
            title=title,
            border_style="blue",
        )
    )
    return ExperimentRunner(config, threads)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.version_option(package_name="irs-skg")
def cli(verbose):
    """IRS-assisted secret key generation: simulation, colluded-Eve attack and key rates."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@cli.command()
@experiment_options
@reports_errors
def simulate(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials, out, threads, fmt):
    """Run RGM rounds and write the sigma-pair trace.

    Example:
        irs-skg simulate --preset desk --snr 20 -o results
    """
    config = build_config(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials)
    report, trace = _runner(config, threads, "RGM simulation").run_simulation()
    paths = save_report(report, out, fmt)
    paths.append(save_trace(trace, out))
    display_report(report, paths)


@cli.command()
@experiment_options
@reports_errors
def attack(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials, out, threads, fmt):
    """Colluded-Eve NRMSE sweep over SNR and Eve count.

    Example:
        irs-skg attack --eves 1 --eves 4 --eves 16
    """
    config = build_config(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials)
    report = _runner(config, threads, "Colluded attack").run_nrmse_sweep()
    display_report(report, save_report(report, out, fmt))


@cli.command()
@experiment_options
@click.option("--scheme", type=click.Choice(["rgm", "pilot", "both"]), default="both", show_default=True)
@reports_errors
def skr(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials, out, threads, fmt, scheme):
    """Secret key rate lower bound per SNR and Eve count.

    Example:
        irs-skg skr --scheme rgm --snr 0 --snr 10
    """
    config = build_config(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials)
    report = _runner(config, threads, f"SKR ({scheme})").run_skr_sweep(scheme)
    display_report(report, save_report(report, out, fmt))


@cli.command()
@experiment_options
@reports_errors
def validate(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials, out, threads, fmt):
    """Closed-form moments against Monte Carlo, sigma-pair trace and SKR versus probe length.

    Example:
        irs-skg validate --preset desk --seed 42
    """
    config = build_config(config_path, preset, seed, snr_db, eve_counts, rounds, mc_trials)
    report = _runner(config, threads, "Validation suite").run_validation_suite()
    display_report(report, save_report(report, out, fmt))


if __name__ == "__main__":
    cli()

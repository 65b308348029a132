"""
Command line tool running household scheduling scenarios.

Exit codes:

* 102: scenario file (or run directory artifact) missing, unreadable or not
  JSON.
* 103: scenario invalid; every violation is logged.
* 104: exhaustive search refused, search space over the cap.
* 105: a ``--strict`` check failed.
"""
import logging
import os
import sys
from typing import NoReturn, Optional

import click

from homeload.exceptions import (
    MissingArtifactError,
    ScenarioValidationError,
    SearchSpaceTooLargeError,
)
from homeload.ga.oracle import DEFAULT_CAP
from homeload.scenario.io import (
    REFERENCE_SCENARIO_PATH,
    load_scenario,
    scenario_to_dict,
)
from homeload.scenario.model import MAX_SEED, ScenarioConfig
from homeload.utils.cli import initialize_logging, output_config, write_json
from homeload.utils.comparison import run_scenario, verify_against_oracle
from homeload.utils.plot_data import emit_plot_data

LOG = logging.getLogger(__name__)

EXIT_MISSING_FILE = 102
EXIT_INVALID_SCENARIO = 103
EXIT_ORACLE_REFUSED = 104
EXIT_STRICT_FAILED = 105


def _exit_on_invalid(ex: ScenarioValidationError) -> NoReturn:
    # An unparsable file is a file problem, not a scenario problem.
    if any(v.field == "<file>" for v in ex.violations):
        for v in ex.violations:
            LOG.error("%s", v)
        sys.exit(EXIT_MISSING_FILE)
    LOG.error("Scenario has %d violation(s):", len(ex.violations))
    for v in ex.violations:
        LOG.error("  %s", v)
    sys.exit(EXIT_INVALID_SCENARIO)


def _load_or_exit(path: str) -> ScenarioConfig:
    try:
        return load_scenario(path)
    except OSError as ex:
        LOG.error("Cannot read scenario file %s: %s", path, ex)
        sys.exit(EXIT_MISSING_FILE)
    except ScenarioValidationError as ex:
        _exit_on_invalid(ex)


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.option('-v', '--verbose',
              default=0, count=True,
              help="This option must be provided before any command. "
                   "Provide once for additional informational logging. "
                   "Provide a second time for additional debug logging.")
def cli_group(verbose: int) -> None:
    """
    Schedule household appliances against a real-time price signal with a
    genetic algorithm, and compare the result with the unscheduled day.
    """
    llevel = logging.WARN - (10 * verbose)
    initialize_logging(logging.getLogger(), llevel)
    LOG.info("Displaying informational logging.")
    LOG.debug("Displaying debug logging.")


@click.command('config')
@click.argument('output_filepath')
@click.option('-c', '--input-config',
              type=click.Path(dir_okay=False),
              default=None,
              help='Optional existing scenario file to re-write with defaults '
                   'filled in. The bundled reference scenario otherwise.')
@click.option('-o', '--overwrite',
              default=False, is_flag=True,
              help='If the given filepath should be overwritten if it '
                   'already exists.')
def cli_config(
    output_filepath: str, input_config: Optional[str], overwrite: bool
) -> None:
    """
    Write a scenario file to start from.
    """
    config = _load_or_exit(input_config or REFERENCE_SCENARIO_PATH)
    if not output_config(output_filepath, scenario_to_dict(config),
                         overwrite=overwrite, log=LOG):
        sys.exit(1)


@click.command('run')
@click.argument('scenario_filepath')
@click.option('--out', 'out_dir', default=None,
              type=click.Path(file_okay=False),
              help="Run directory to write. Defaults to '<scenario name>_run' "
                   "in the working directory.")
@click.option('--seed', default=None, type=click.IntRange(0, MAX_SEED),
              help="Seed replacing the one in the scenario file.")
@click.option('--no-pv', default=False, is_flag=True,
              help="Skip the case with local PV generation.")
@click.option('--oracle', default=False, is_flag=True,
              help="Also solve every case exhaustively and report the GA's "
                   "optimality gap.")
@click.option('--cap', default=DEFAULT_CAP, show_default=True,
              type=click.IntRange(min=1),
              help="Largest search space the exhaustive solver enumerates.")
@click.option('--strict', default=False, is_flag=True,
              help="Exit with an error when daily energy is not conserved "
                   "or, with --oracle, when the GA missed the optimum.")
def cli_run(
    scenario_filepath: str, out_dir: Optional[str], seed: Optional[int],
    no_pv: bool, oracle: bool, cap: int, strict: bool
) -> None:
    """
    Evolve a schedule for a scenario and compare it with the unscheduled
    day, without and with PV. Writes the run directory: scenario echo,
    schedules, summary and plot data.
    """
    config = _load_or_exit(scenario_filepath)
    if out_dir is None:
        name = os.path.splitext(os.path.basename(scenario_filepath))[0]
        out_dir = name + "_run"
    try:
        run = run_scenario(config, out_dir=out_dir, seed=seed,
                           include_pv=not no_pv,
                           oracle_cap=cap if oracle else None)
    except SearchSpaceTooLargeError as ex:
        LOG.error("Exhaustive search refused: %s", ex)
        sys.exit(EXIT_ORACLE_REFUSED)

    for name, case in run.cases.items():
        c = case.comparison
        click.echo("{}: cost {:.4f} -> {:.4f} ({:.4f}% bill reduction), "
                   "peak {:.4f} -> {:.4f}, PAR reduction {}".format(
                       name, c.cost_us, c.cost_s, c.bill_reduction_pct,
                       c.u_us, c.u_s,
                       "n/a" if c.par_reduction_pct is None
                       else "{:.4f}%".format(c.par_reduction_pct)))
    for name, check in run.oracle.items():
        click.echo("{}: optimum {:.4f}, GA {:.4f}, gap {:g}".format(
            name, check.result.best_cost, check.ga_cost, check.gap))
    click.echo("Results written to {}".format(out_dir))

    if strict:
        if not run.eq12_holds:
            LOG.error("Scheduled daily energy differs from unscheduled.")
            sys.exit(EXIT_STRICT_FAILED)
        if not run.oracle_matched:
            LOG.error("GA did not reach the exhaustive optimum.")
            sys.exit(EXIT_STRICT_FAILED)


@click.command('verify')
@click.argument('scenario_filepath')
@click.option('--cap', default=DEFAULT_CAP, show_default=True,
              type=click.IntRange(min=1),
              help="Largest search space the exhaustive solver enumerates.")
@click.option('--seeds', 'n_seeds', default=100, show_default=True,
              type=click.IntRange(min=1),
              help="Number of consecutive seeds the GA is run with.")
@click.option('--base-seed', default=0, show_default=True,
              type=click.IntRange(0, MAX_SEED),
              help="First seed.")
@click.option('--min-match', default=0.95, show_default=True,
              type=click.FloatRange(0, 1),
              help="Fraction of seeds that must reach the optimum under "
                   "--strict.")
@click.option('--report', 'report_filepath', default=None,
              type=click.Path(dir_okay=False),
              help="Optionally write the per-seed report as JSON.")
@click.option('--strict', default=False, is_flag=True,
              help="Exit with an error when fewer seeds than --min-match "
                   "reach the optimum.")
def cli_verify(
    scenario_filepath: str, cap: int, n_seeds: int, base_seed: int,
    min_match: float, report_filepath: Optional[str], strict: bool
) -> None:
    """
    Check the GA against the exhaustive optimum over a range of seeds.
    """
    config = _load_or_exit(scenario_filepath)
    try:
        report = verify_against_oracle(config, cap=cap, seeds=n_seeds,
                                       base_seed=base_seed)
    except SearchSpaceTooLargeError as ex:
        LOG.error("Exhaustive search refused: %s", ex)
        sys.exit(EXIT_ORACLE_REFUSED)

    for s, cost, gap in zip(report.seeds, report.ga_costs, report.gaps):
        LOG.info("seed %d: GA cost %f, gap %g", s, cost, gap)
    click.echo("Optimum {:.4f} over {} schedules; GA matched on {} of {} "
               "seed(s) ({:.2%}), worst gap {:g}".format(
                   report.optimum.best_cost, report.optimum.enumerated_count,
                   report.matches, len(report.seeds), report.match_fraction,
                   max(report.gaps)))
    if report_filepath:
        write_json(report_filepath, report.to_dict())

    if strict and report.match_fraction < min_match:
        LOG.error("Match fraction %f below the required %f",
                  report.match_fraction, min_match)
        sys.exit(EXIT_STRICT_FAILED)


@click.command('plot-data')
@click.argument('run_dir', type=click.Path(file_okay=False))
def cli_plot_data(run_dir: str) -> None:
    """
    (Re)write the plot data CSVs of a completed run directory.
    """
    try:
        written = emit_plot_data(run_dir)
    except MissingArtifactError as ex:
        LOG.error("%s", ex)
        sys.exit(EXIT_MISSING_FILE)
    except ScenarioValidationError as ex:
        _exit_on_invalid(ex)
    for path in written.values():
        click.echo(path)


cli_group.add_command(cli_config)
cli_group.add_command(cli_run)
cli_group.add_command(cli_verify)
cli_group.add_command(cli_plot_data)

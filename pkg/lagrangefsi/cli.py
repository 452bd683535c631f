"""
The `fsi` command line.

    fsi <subcommand> [--config <path>] [--out <dir>] [--kappa <list>] [--quiet]

Every subcommand writes config_echo.ini, summary.txt, timing.txt and mesh.txt
into the output directory. The exit code is 0 when every verdict passes, 1 when
one fails and 2 on a usage or configuration error.
"""

import argparse
import os
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence
from colorama import Fore, Style
from pydantic import ValidationError
from tabulate import tabulate

from lagrangefsi.core.datatypes import RunSummary
from lagrangefsi.core.exceptions import ConfigError, ExperimentError, MeshError, SolverError
from lagrangefsi.metrics import flag
from lagrangefsi.mesh.phase_mesh import build_mesh
from lagrangefsi.readers.config import RunConfig, describe_defaults
from lagrangefsi.readers.config_reader import parse_config
from lagrangefsi.compat.checker import check_compatibility
from lagrangefsi.compat.hierarchy import elasticity_of
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.stepper import run
from lagrangefsi.experiments.lemma_key import lemma_key_suite, scalar_mode_check
from lagrangefsi.experiments.mms import mms_convergence
from lagrangefsi.experiments.sweeps import kappa_runs, run_name, sweep_table
from lagrangefsi.experiments.verification import (
    VERIFICATION_CHECKS,
    existence_time_verdict,
    lemma_key_verdicts,
    mms_verdicts,
    verify,
)
from lagrangefsi.writers.config_writer import emit_config, write_config
from lagrangefsi.writers.outputs import write_checkpoint, write_mesh, write_series, write_summary, write_timing

PASS_COLOR = f"{Fore.GREEN}"
FAIL_COLOR = f"{Fore.RED}"
INFO_COLOR = f"{Fore.CYAN}"

RUN_FOLDER = "run"

def _float_list(text: str) -> List[float]:
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got '{text}'")
    if not values or any(not value > 0 for value in values):
        raise argparse.ArgumentTypeError(f"expected positive values, got '{text}'")
    return values

def _prefixed(prefix: str, values: Dict) -> Dict:
    return {f"{prefix}.{key}": value for key, value in values.items()}

def command_run(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    """March the configured problem, writing the series and the optional checkpoints."""
    run_folder = os.path.join(folder, RUN_FOLDER)
    every = config.numerics.checkpoint_every

    def on_state(n, state, record):
        if every and n % every == 0:
            write_checkpoint(state, n, run_folder)

    trajectory = run(config, keep_states=False, on_state=on_state, verbose=verbose)
    write_series(trajectory.records, run_folder)
    norms = _prefixed("final", trajectory.records[-1].to_dict())
    norms["finish_reason"] = trajectory.finish_reason.value
    if trajectory.compat_report is not None:
        norms.update(_prefixed("compat", trajectory.compat_report.to_dict()))
    verdict = flag(
        "run_completed",
        trajectory.reached_end,
        {"t_star": trajectory.t_star},
        trajectory.finish_reason.value,
    )
    return RunSummary(verdicts=[verdict], t_star=trajectory.t_star, final_norms=norms)

def command_sweep(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    """One run per kappa on the configured horizon, one series folder per run."""
    horizon = config.numerics.t_end
    runs = kappa_runs(config, config.experiment.kappa_list, horizon, keep_states=False, verbose=verbose)
    for kappa, trajectory in runs:
        write_series(trajectory.records, os.path.join(folder, run_name(kappa)))
    table = sweep_table(runs, horizon)
    if verbose:
        rows = [[row.kappa, row.t_star, row.reached_end, row.zt_norm, row.finish_reason.value] for row in table.rows]
        print(tabulate(rows, headers=["kappa", "T*", "reached end", "Z proxy", "finish"]))
    norms = {}
    for row in table.rows:
        norms[f"{row.run_name}.t_star"] = row.t_star
        norms[f"{row.run_name}.zt_norm"] = row.zt_norm
        norms[f"{row.run_name}.finish_reason"] = row.finish_reason.value
    norms["t_star_ratio"] = table.t_star_ratio
    verdict = existence_time_verdict(table, config.experiment.kappa_ratio_threshold)
    return RunSummary(verdicts=[verdict], t_star=min(row.t_star for row in table.rows), final_norms=norms)

def command_lemma_key(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    experiment = config.experiment
    mesh = build_mesh(config.geometry_spec())
    c = elasticity_of(mesh, config.solver_params())
    u0 = solid_bump(mesh, config.data.amplitude)
    reports = lemma_key_suite(
        mesh, c, u0, experiment.lemma_eps_list, experiment.lemma_t_end, experiment.lemma_dt,
        trials=experiment.lemma_trials, seed=config.output.seed, verbose=verbose,
    )
    scalar = scalar_mode_check(mesh, c, 1.0, experiment.lemma_eps_list, experiment.lemma_t_end, experiment.lemma_dt)
    if verbose:
        rows = [
            [trial, eps, sup, report.bound, slack]
            for trial, report in enumerate(reports)
            for eps, sup, slack in zip(report.eps_values, report.sup_norms, report.slack)
        ]
        print(tabulate(rows, headers=["trial", "eps", "sup |L(u)|", "bound", "slack"]))
    norms = {}
    for trial, report in enumerate(reports):
        norms[f"trial_{trial}.bound"] = report.bound
        norms[f"trial_{trial}.min_slack"] = min(report.slack)
        norms[f"trial_{trial}.integration_tolerance"] = report.integration_tolerance
    norms.update(_prefixed("scalar_mode", scalar))
    return RunSummary(verdicts=lemma_key_verdicts(reports, scalar), final_norms=norms)

def command_check_compat(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    """Build the hierarchy of the configured initial data and report every compatibility condition."""
    problem = FSIProblem.from_config(config, verbose=verbose)
    report = check_compatibility(problem.compat, problem.forcing, problem.mesh, problem.params)
    if verbose:
        rows = [[name, value, value <= report.tolerance] for name, value in report.violations.items()]
        print(tabulate(rows, headers=["condition", "violation", "within tolerance"]))
    verdict = flag("compatibility", report.compatible, report.violations, f"violations <= {report.tolerance!r}")
    return RunSummary(verdicts=[verdict], final_norms=_prefixed("compat", report.to_dict()))

def command_mms(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    temporal = mms_convergence("temporal", verbose=verbose)
    spatial = mms_convergence("spatial", verbose=verbose)
    norms = {}
    for table in (temporal, spatial):
        if verbose:
            rows = [[row.level, row.error] for row in table.rows]
            print(tabulate(rows, headers=[table.variable, f"{table.family} error"]))
        for row in table.rows:
            norms[f"{table.family}.{table.variable}_{row.level!r}"] = row.error
        norms[f"{table.family}.rate"] = table.rate
    return RunSummary(verdicts=mms_verdicts(temporal, spatial), final_norms=norms)

def command_verify(config: RunConfig, folder: str, args: argparse.Namespace, verbose: bool) -> RunSummary:
    return RunSummary(verdicts=verify(config, checks=args.check, verbose=verbose))

COMMANDS: Dict[str, Callable] = {
    "run": command_run,
    "sweep-kappa": command_sweep,
    "lemma-key": command_lemma_key,
    "check-compat": command_check_compat,
    "mms": command_mms,
    "verify": command_verify,
}

COMMAND_HELP = {
    "run": "march one trajectory and write its time series",
    "sweep-kappa": "existence time over the kappa list",
    "lemma-key": "eps-uniform bound of the regularized solid equation",
    "check-compat": "build the compatibility hierarchy and check it",
    "mms": "manufactured-solution refinement ladders",
    "verify": "the full acceptance suite",
}

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsi",
        description="Lagrangian fluid-structure interaction solver and its verification harness.",
        epilog="configuration defaults:\n" + describe_defaults(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="subcommand")
    for name, help_text in COMMAND_HELP.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", default=None, help="Sectioned key = value configuration file (defaults when omitted)")
        sub.add_argument("--out", default=None, help="Output directory, overrides output.directory")
        sub.add_argument("--quiet", action="store_true", help="Only the exit code and errors")
        if name == "sweep-kappa":
            sub.add_argument("--kappa", type=_float_list, default=None, help="Comma-separated kappa values, overrides experiment.kappa_list")
        if name == "verify":
            sub.add_argument("--check", action="append", choices=list(VERIFICATION_CHECKS), default=None,
                             help="Run only this check, repeatable")
    return parser

def load_config(args: argparse.Namespace) -> RunConfig:
    """
    The configuration of a command with its command-line overrides applied.

    Raises:
        ConfigError: On a syntax or validation error in the file.
        OSError: When the file cannot be read.
    """
    config = RunConfig() if args.config is None else parse_config(args.config)
    if args.out is not None:
        config = config.replace(output={"directory": args.out})
    if getattr(args, "kappa", None) is not None:
        config = config.replace(experiment={"kappa_list": args.kappa})
    return config

def report(summary: RunSummary):
    rows = [
        [f"{PASS_COLOR}PASS{Style.RESET_ALL}" if v.passed else f"{FAIL_COLOR}FAIL{Style.RESET_ALL}", v.name, v.detail]
        for v in summary.verdicts
    ]
    print(tabulate(rows, headers=["verdict", "check", "criterion"]))

def _error(message: str):
    print(f"{FAIL_COLOR}fsi: {message}{Style.RESET_ALL}", file=sys.stderr)

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else int(e.code)
    verbose = not args.quiet

    try:
        config = load_config(args)
        mesh = build_mesh(config.geometry_spec())
    except (ConfigError, MeshError, ValidationError) as e:
        _error(f"invalid configuration: {e}")
        return 2
    except OSError as e:
        _error(f"cannot read configuration: {e}")
        return 2

    folder = config.output.directory
    os.makedirs(folder, exist_ok=True)
    write_config(config, folder)
    write_mesh(mesh, folder)
    if verbose:
        print(f"{INFO_COLOR}{args.command}: writing to {folder}{Style.RESET_ALL}")

    start = time.perf_counter()
    try:
        summary = COMMANDS[args.command](config, folder, args, verbose)
    except (SolverError, ExperimentError) as e:
        summary = RunSummary(verdicts=[flag(args.command, False, {}, f"{type(e).__name__}: {e}")])
    summary.wall_clock = time.perf_counter() - start
    summary.config_echo = emit_config(config)
    write_summary(summary, folder)
    write_timing(summary.wall_clock, folder)

    if verbose:
        report(summary)
    if summary.passed:
        return 0
    if verbose:
        failed = ", ".join(v.name for v in summary.verdicts if not v.passed)
        print(f"{FAIL_COLOR}failed: {failed}{Style.RESET_ALL}")
    return 1

if __name__ == "__main__":
    sys.exit(main())

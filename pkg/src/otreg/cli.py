"""Command-line entry point: solve a configured pair, run a named
experiment, or aggregate reports.

Exit codes: 0 success, 2 threshold failure, 3 solver failure.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .experiments import (ConfigError, aggregate_reports, load_config,
                          run_experiment, solve_pair)
from .solver import SolverError, save_solution

EXIT_THRESHOLD_FAIL = 2
EXIT_SOLVER_FAIL = 3


@click.group()
@click.option("--seed", type=int, default=None,
              help="Override the config seed.")
@click.option("--threads", type=int, default=None,
              help="Cap the number of compute threads.")
@click.option("--verbose", is_flag=True, default=False)
@click.pass_context
def main(ctx, seed, threads, verbose):
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["verbose"] = verbose
    if threads is not None:
        os.environ["NUMBA_NUM_THREADS"] = str(threads)
        os.environ["OMP_NUM_THREADS"] = str(threads)


def _load(ctx, config_path):
    try:
        config = load_config(config_path)
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        raise click.ClickException(str(e))
    if ctx.obj.get("seed") is not None:
        config["seed"] = ctx.obj["seed"]
    return config


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def solve(ctx, config_path, out_path):
    """Solve the configured pair and write the solution JSON."""
    config = _load(ctx, config_path)
    try:
        solved = solve_pair(config)
    except SolverError as e:
        click.echo(f"solver failed: {e}", err=True)
        sys.exit(EXIT_SOLVER_FAIL)
    save_solution(out_path, solved["source"], solved["target"],
                  solved["cloud"], solved["weights"], solved["info"])
    if ctx.obj.get("verbose"):
        info = solved["info"]
        click.echo(f"solved in {info['iterations']} iterations, "
                   f"residual {info['residual']:.3g}")


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def run(ctx, config_path, out_dir):
    """Run the configured experiment; emit CSVs, SVGs, report.json."""
    config = _load(ctx, config_path)
    report = run_experiment(config, out_dir, verbose=ctx.obj.get("verbose"))
    if report["status"] != "ok":
        click.echo(f"solver failed: {report.get('error')}", err=True)
        sys.exit(EXIT_SOLVER_FAIL)
    n_fail = sum(not c["pass"] for c in report["checks"])
    click.echo(f"{config['experiment']}: "
               f"{'PASS' if report['pass'] else f'FAIL ({n_fail} checks)'}")
    if not report["pass"]:
        sys.exit(EXIT_THRESHOLD_FAIL)


@main.command()
@click.option("--dir", "root", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def report(root, out_path):
    """Aggregate report.json fragments under a directory tree."""
    agg = aggregate_reports(root)
    from .solver import write_atomic
    write_atomic(out_path, json.dumps(agg, indent=2, sort_keys=True))
    click.echo(f"{agg['n_runs']} runs, "
               f"{'PASS' if agg['pass'] else 'FAIL'}")
    if not agg["pass"]:
        sys.exit(EXIT_THRESHOLD_FAIL)


if __name__ == "__main__":
    main()

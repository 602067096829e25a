"""Main entry point for the ipstar-lab command line."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import click

from . import __version__
from .config_manager import ConfigManager, Param, apply_overrides, load_config_file
from .errors import IpstarLabError
from .experiment_definitions import ExperimentFactory
from .experiment_manager import ExperimentManager, build_config
from .utils.logger import Logger


@dataclass
class AppContext:
    settings: ConfigManager
    logger: Logger


def _execute(data: Dict[str, Any], workers: Optional[int]) -> None:
    ctx = click.get_current_context()
    app: AppContext = ctx.obj
    try:
        config = build_config(data, app.settings)
        report = ExperimentManager(app.settings, app.logger, workers).run(config)
    except IpstarLabError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)
    if config.output:
        click.echo(f"{report.experiment}: wrote {config.output} (region {report.region_sha256()[:16]})", err=True)
    else:
        click.echo(report.render(config.format), nl=False)


def _common_options(command):
    command = click.option('--explain', is_flag=True, help="Print the claim this experiment checks and exit")(command)
    command = click.option('--workers', type=click.IntRange(min=1), default=None, help="Worker processes")(command)
    command = click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default=None)(command)
    command = click.option('--output', '-o', type=click.Path(dir_okay=False), default=None,
                           help="Report path; stdout when omitted")(command)
    command = click.option('--seed', type=click.IntRange(min=0), default=None, help="PRNG seed")(command)
    return command


def _param_option(param: Param) -> click.Option:
    flag = f"--{param.name.lower().replace('_', '-')}"
    if param.kind == 'bool':
        return click.Option([f"{flag}/--no-{flag[2:]}", param.name], default=None, help=param.help)
    if param.kind == 'int':
        return click.Option([flag, param.name], type=int, default=None, help=param.help)
    if param.choices:
        return click.Option([flag, param.name], type=click.Choice(param.choices), default=None, help=param.help)
    return click.Option([flag, param.name], type=str, default=None, help=param.help)


def _experiment_command(name: str) -> click.Command:
    strategy = ExperimentFactory.create(name)

    @_common_options
    def callback(seed, output, fmt, workers, explain, **values):
        if explain:
            click.echo(strategy.explain())
            return
        data: Dict[str, Any] = {'experiment': name}
        if seed is not None:
            data['seed'] = seed
        if output is not None:
            data['output'] = output
        if fmt is not None:
            data['format'] = fmt
        for param in strategy.parameters:
            value = values.get(param.name)
            if value is not None:
                data[param.name] = param.parse_text(value) if param.kind == 'int_list' else value
        _execute(data, workers)

    command = click.command(name, help=strategy.title)(callback)
    command.params.extend(_param_option(p) for p in strategy.parameters)
    return command


@click.group()
@click.version_option(__version__, prog_name='ipstar-lab')
@click.option('--settings', 'settings_path', type=click.Path(dir_okay=False, path_type=Path),
              envvar='IPSTAR_LAB_SETTINGS', default=None, help="Settings file (default ~/.ipstar_lab/settings.json)")
@click.option('--verbose', '-v', is_flag=True, help="Forward debug messages to stderr")
@click.pass_context
def cli(ctx: click.Context, settings_path: Optional[Path], verbose: bool) -> None:
    """Largeness experiments with re-checkable reports."""
    settings = ConfigManager(settings_path)
    logger = Logger(
        settings.get_log_dir(),
        callback=lambda message: click.echo(message, err=True),
        callback_level='DEBUG' if verbose else 'INFO',
    )
    ctx.obj = AppContext(settings, logger)


@cli.command('list')
def list_experiments() -> None:
    """List registered experiments."""
    for name, title in ExperimentFactory.get_type_display_names().items():
        click.echo(f"{name:<18} {title}")


@cli.command('run')
@click.option('--config', '-c', 'config_path', required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Experiment config JSON")
@click.option('--set', 'overrides', multiple=True, metavar='KEY=VALUE', help="Override a config key")
@_common_options
def run(config_path, overrides, seed, output, fmt, workers, explain) -> None:
    """Run an experiment from a config file."""
    ctx = click.get_current_context()
    try:
        data = apply_overrides(load_config_file(config_path), overrides)
        if explain:
            click.echo(ExperimentFactory.create(str(data.get('experiment'))).explain())
            return
    except IpstarLabError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)
    for key, value in (('seed', seed), ('output', output), ('format', fmt)):
        if value is not None:
            data[key] = value
    _execute(data, workers)


for _name in ExperimentFactory.get_available_types():
    cli.add_command(_experiment_command(_name))


def main() -> None:
    cli(prog_name='ipstar-lab')


if __name__ == "__main__":
    main()

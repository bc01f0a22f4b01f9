"""Command-line interface for the mask competition simulator."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, List, Optional, Tuple

import click
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from .exceptions import (
    CompeteSimError,
    ConfigError,
    DuplicateScenarioError,
    ScenarioFileError,
    UnknownScenarioError,
    ValidationError,
)
from .formatters import (
    OutputFormat,
    format_comparison,
    format_csv,
    format_report,
    format_table,
    suffixed_path,
    write_atomic,
)
from .integrator import Method, SolverConfig, convergence_order, integrate, settle
from .model import classify_outcome, equilibria
from .plotting import build_chart, emit_plot, render_svg
from .scenario_files import load_scenario_file
from .scenarios import (
    BUILTIN_NAMES,
    SWEEPABLE_PARAMS,
    ComparisonReport,
    Scenario,
    builtin_scenario,
    builtin_scenarios,
    capability_level,
    compare,
    run_scenario,
    sweep,
)
from .settings import Settings, load_settings

logger = logging.getLogger(__name__)

FORMAT_CHOICES = [f.value for f in OutputFormat]
METHOD_CHOICES = [m.value for m in Method]


@dataclass
class CliContext:
    settings: Settings
    console: Console
    err_console: Console


def _pydantic_message(e: PydanticValidationError) -> str:
    return "; ".join(err["msg"] for err in e.errors())


def scenario_options(func: Callable) -> Callable:
    """Scenario selection and solver override flags shared by commands."""
    options = [
        click.option("--scenario", "-s", "scenario_names", multiple=True,
                     help=f"Builtin scenario ({', '.join(BUILTIN_NAMES)})"),
        click.option("--file", "-f", "scenario_files", multiple=True,
                     type=click.Path(path_type=Path),
                     help="Scenario file (key=value or YAML)"),
        click.option("--h", "h", type=float, help="Step size"),
        click.option("--t-end", "t_end", type=float, help="Final time"),
        click.option("--method", type=click.Choice(METHOD_CHOICES),
                     help="Integration method"),
        click.option("--stride", "record_stride", type=int,
                     help="Record every k-th step"),
        click.option("--saturation-fraction", type=float,
                     help="Fraction of n1 that counts as saturated"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_scenarios(
    names: Tuple[str, ...],
    files: Tuple[Path, ...],
    default: Optional[str] = None,
    **overrides: Any,
) -> List[Scenario]:
    """Builtin names and scenario files, with flag overrides applied."""
    if not names and not files and default:
        names = (default,)

    scenarios = []
    for name in names:
        try:
            scenarios.append(builtin_scenario(name))
        except UnknownScenarioError as e:
            raise click.BadParameter(str(e), param_hint="--scenario")
    for path in files:
        try:
            scenarios.append(load_scenario_file(path))
        except ScenarioFileError as e:
            raise click.BadParameter(str(e), param_hint="--file")

    try:
        return [sc.with_overrides(**overrides) for sc in scenarios]
    except PydanticValidationError as e:
        raise click.UsageError(_pydantic_message(e))
    except ValidationError as e:
        raise click.UsageError(str(e))


def _single(scenarios: List[Scenario]) -> Scenario:
    if len(scenarios) != 1:
        raise click.UsageError(
            f"Expected exactly one scenario, got {len(scenarios)}; "
            "use --scenario NAME or --file PATH"
        )
    return scenarios[0]


def _emit(ctx: CliContext, text: str, out: Optional[Path]) -> None:
    """Write to ``out`` atomically, or to stdout."""
    if out is None:
        click.echo(text, nl=False)
        return
    write_atomic(out, text)
    ctx.err_console.print(f"[green]✓[/green] Wrote {escape(str(out))}")


def _runtime_failure(ctx: CliContext, e: Exception) -> click.ClickException:
    ctx.err_console.print(f"[red]❌ Error: {escape(str(e))}[/red]")
    return click.ClickException(str(e))


@click.group()
@click.version_option()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              help="YAML settings file (tolerances, step budget, workers)")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.option("--no-color", is_flag=True, envvar="COMPETE_SIM_NO_COLOR",
              help="Disable styled output")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[Path], verbose: bool, no_color: bool):
    """KN95 vs. disposable mask competition simulator"""
    err_console = Console(stderr=True, no_color=no_color, highlight=not no_color)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    try:
        settings = load_settings(config_path)
    except ConfigError as e:
        raise click.BadParameter(str(e), param_hint="--config")

    ctx.obj = CliContext(
        settings=settings,
        console=Console(no_color=no_color, highlight=not no_color),
        err_console=err_console,
    )


@cli.command("list-scenarios")
@click.pass_obj
def list_scenarios(ctx: CliContext):
    """List builtin scenarios"""
    table = Table(title="Builtin Scenarios")
    table.add_column("Name", style="cyan")
    table.add_column("Capability", style="green")
    table.add_column("r1", justify="right")
    table.add_column("r2", justify="right")
    table.add_column("t_end", justify="right")

    for sc in builtin_scenarios():
        table.add_row(
            sc.name,
            capability_level(sc.name) or "",
            f"{sc.params.r1:g}",
            f"{sc.params.r2:g}",
            f"{sc.solver.t_end:g}",
        )
    ctx.console.print(table)


@cli.command()
@scenario_options
@click.option("--format", "fmt", type=click.Choice(FORMAT_CHOICES), default="csv",
              show_default=True, help="Output format")
@click.option("--phase", is_flag=True, help="SVG: draw the (x, y) phase path")
@click.option("--out", "-o", type=click.Path(path_type=Path), help="Output file")
@click.pass_obj
def simulate(ctx: CliContext, scenario_names, scenario_files, fmt: str, phase: bool,
             out: Optional[Path], **overrides):
    """Integrate one scenario and write its trajectory"""
    sc = _single(resolve_scenarios(scenario_names, scenario_files, **overrides))
    fmt = OutputFormat(fmt)
    try:
        traj, report = run_scenario(sc, ctx.settings)
        if fmt is OutputFormat.TABLE:
            text = format_table(traj)
        elif fmt is OutputFormat.REPORT:
            text = format_report(sc.name, report)
        elif fmt is OutputFormat.SVG:
            text = render_svg(build_chart(traj, title=sc.name, phase=phase))
        else:
            text = format_csv(traj)
        _emit(ctx, text, out)
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)


@cli.command()
@click.option("--scenario", "-s", "scenario_names", multiple=True,
              help="Builtin scenario (default situation1)")
@click.option("--file", "-f", "scenario_files", multiple=True,
              type=click.Path(path_type=Path), help="Scenario file")
@click.option("--h", "h", type=float, default=0.1, show_default=True,
              help="Row spacing")
@click.option("--t-end", "t_end", type=float, default=1.0, show_default=True,
              help="Final time")
@click.option("--method", type=click.Choice(METHOD_CHOICES), default="rk4",
              show_default=True)
@click.option("--substeps", type=click.IntRange(min=1), default=10, show_default=True,
              help="Integration steps per printed row")
@click.option("--out", "-o", type=click.Path(path_type=Path), help="Output file")
@click.pass_obj
def table(ctx: CliContext, scenario_names, scenario_files, h: float, t_end: float,
          method: str, substeps: int, out: Optional[Path]):
    """Print the evolution table of both mask counts (3 decimals)"""
    sc = _single(resolve_scenarios(scenario_names, scenario_files,
                                   default="situation1"))
    if t_end < h:
        raise click.UsageError("t_end must be ≥ h")
    try:
        cfg = SolverConfig(method=method, h=h / substeps, t_end=t_end,
                           record_stride=substeps)
    except PydanticValidationError as e:
        raise click.UsageError(_pydantic_message(e))

    try:
        traj = integrate(sc.params, sc.initial, cfg, max_steps=ctx.settings.max_steps)
        _emit(ctx, format_table(traj, interval=h), out)
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)


@cli.command("analyze")
@scenario_options
@click.option("--raw-counts", is_flag=True,
              help="Report counts in masks, not 1e4 masks")
@click.option("--out", "-o", type=click.Path(path_type=Path), help="Output file")
@click.pass_obj
def analyze_command(ctx: CliContext, scenario_names, scenario_files, raw_counts: bool,
                    out: Optional[Path], **overrides):
    """Report outcome, crossover, peak and saturation for one scenario"""
    sc = _single(resolve_scenarios(scenario_names, scenario_files, **overrides))
    try:
        _, report = run_scenario(sc, ctx.settings)
        _emit(ctx, format_report(sc.name, report, raw_counts=raw_counts), out)
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)


def _write_per_scenario(
    ctx: CliContext,
    comparison: ComparisonReport,
    fmt: OutputFormat,
    out: Optional[Path],
) -> None:
    assert out is not None
    for name, traj in comparison.trajectories.items():
        target = suffixed_path(out, name)
        if fmt is OutputFormat.TABLE:
            write_atomic(target, format_table(traj))
        else:
            emit_plot(traj, target, fmt=fmt, title=name)
        ctx.err_console.print(f"[green]✓[/green] Wrote {escape(str(target))}")


@cli.command("compare")
@scenario_options
@click.option("--format", "fmt", type=click.Choice(FORMAT_CHOICES), default="report",
              show_default=True,
              help="report: summary lines; csv/svg/table: one file per scenario")
@click.option("--out", "-o", type=click.Path(path_type=Path),
              help="Output file (per-scenario files get a _<name> suffix)")
@click.pass_obj
def compare_command(ctx: CliContext, scenario_names, scenario_files, fmt: str,
                    out: Optional[Path], **overrides):
    """Run two or more scenarios and order them by saturation time"""
    scenarios = resolve_scenarios(scenario_names, scenario_files, **overrides)
    if len(scenarios) < 2:
        raise click.UsageError("compare needs at least two scenarios")
    fmt = OutputFormat(fmt)
    if fmt is not OutputFormat.REPORT and out is None:
        raise click.UsageError(f"--out is required for --format {fmt.value}")

    try:
        comparison = compare(scenarios, ctx.settings)
        if fmt is OutputFormat.REPORT:
            _emit(ctx, format_comparison(comparison), out)
        else:
            _write_per_scenario(ctx, comparison, fmt, out)
    except (ValidationError, DuplicateScenarioError) as e:
        raise click.UsageError(str(e))
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)


def _parse_values(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {raw!r}",
                                 param_hint="--values")


@cli.command("sweep")
@scenario_options
@click.option("--param", "param", type=click.Choice(SWEEPABLE_PARAMS), required=True,
              help="Coefficient to vary")
@click.option("--values", "raw_values", required=True,
              help="Comma-separated values, e.g. 0.5,1,2")
@click.option("--out", "-o", type=click.Path(path_type=Path), help="Output file")
@click.pass_obj
def sweep_command(ctx: CliContext, scenario_names, scenario_files, param: str,
                  raw_values: str, out: Optional[Path], **overrides):
    """Vary one coefficient of a scenario and compare the runs"""
    base = _single(resolve_scenarios(scenario_names, scenario_files,
                                     default="situation1", **overrides))
    values = _parse_values(raw_values)
    try:
        _emit(ctx, format_comparison(sweep(base, param, values, ctx.settings)), out)
    except PydanticValidationError as e:
        raise click.UsageError(_pydantic_message(e))
    except (ValidationError, DuplicateScenarioError) as e:
        raise click.UsageError(str(e))
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)


@cli.command("equilibria")
@scenario_options
@click.option("--settle", "do_settle", is_flag=True,
              help="Integrate until the flow is at rest and show where it ends")
@click.pass_obj
def equilibria_command(ctx: CliContext, scenario_names, scenario_files,
                       do_settle: bool, **overrides):
    """Show fixed points and the predicted outcome of a scenario"""
    sc = _single(resolve_scenarios(scenario_names, scenario_files,
                                   default="situation1", **overrides))
    settings = ctx.settings
    points = equilibria(sc.params, tolerance=settings.degeneracy_tolerance)

    table = Table(title=f"Equilibria of {sc.name}")
    table.add_column("Kind", style="cyan")
    table.add_column("x*", justify="right")
    table.add_column("y*", justify="right")
    table.add_column("Residual", justify="right")
    for point in points:
        ok = point.is_fixed_point(sc.params, settings.fixed_point_tolerance)
        table.add_row(
            point.kind.value,
            f"{point.x_star:.6f}",
            f"{point.y_star:.6f}",
            f"{point.residual(sc.params):.3g}" + ("" if ok else " [red]![/red]"),
        )
    ctx.console.print(table)
    outcome = classify_outcome(sc.params, tolerance=settings.degeneracy_tolerance)
    click.echo(f"outcome: {outcome.value}")

    if do_settle:
        try:
            traj = settle(sc.params, sc.initial, sc.solver,
                          rate_tolerance=settings.settle_rate_tolerance,
                          max_steps=settings.max_steps)
        except CompeteSimError as e:
            raise _runtime_failure(ctx, e)
        end = traj.final_state
        click.echo(f"settled: x={end.x:.6f} y={end.y:.6f} at t={end.t:.6f}")


@cli.command("convergence")
@scenario_options
@click.option("--t-probe", type=float, default=1.0, show_default=True,
              help="Time at which the refinements are compared")
@click.pass_obj
def convergence_command(ctx: CliContext, scenario_names, scenario_files,
                        t_probe: float, **overrides):
    """Estimate the observed order of accuracy by step halving"""
    sc = _single(resolve_scenarios(scenario_names, scenario_files,
                                   default="situation1", **overrides))
    try:
        estimate = convergence_order(
            sc.params, sc.initial, t_probe, sc.solver.h,
            method=sc.solver.method,
            precision_floor=ctx.settings.precision_floor,
            max_steps=ctx.settings.max_steps,
        )
    except ValidationError as e:
        raise click.UsageError(str(e))
    except CompeteSimError as e:
        raise _runtime_failure(ctx, e)
    click.echo(f"method: {estimate.method.value}")
    click.echo(f"order-x: {estimate.order_x:.4f}")
    click.echo(f"order-y: {estimate.order_y:.4f}")


def main():
    """Entry point for the CLI"""
    cli()


if __name__ == "__main__":
    main()

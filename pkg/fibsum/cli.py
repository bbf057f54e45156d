from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, NoReturn, Optional, Sequence

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from . import __version__
from .bench import BenchError, DigestMismatchError, bench_entry, bench_fib, log_spaced, write_csv
from .bigfib import fib, lucas, unlimited_int_digits
from .catalog import (
    Catalog,
    CatalogEntry,
    CatalogError,
    CatalogReadError,
    open_catalog,
    render_audit,
)
from .config import CONFIG_PATH, Config, load_config, resolve_catalog_dir, save_config
from .dsl import DslError, IdentitySpec, eval_expr, parse_file, print_identity, requires_hold, select_case
from .models import BenchRecord, ExitCode
from .output import build_groups_table, build_list_table, render_summary
from .verify import (
    GridError,
    ParamGrid,
    adjudicate_suspects,
    parse_grid,
    render_report_lines,
    verify_all,
    write_errata,
    write_json_lines,
)

app = typer.Typer(
    help="Exact verification of binomial Fibonacci and Lucas sum identities.",
    no_args_is_help=True,
    add_completion=True,
)
bench_app = typer.Typer(help="Time competing evaluation strategies and emit CSV.", no_args_is_help=True)
app.add_typer(bench_app, name="bench")

console = Console()
err_console = Console(stderr=True)

DEFAULT_BENCH_N = (1_000, 100_000, 5)


@dataclass
class _State:
    catalog: Optional[str] = None
    _config: Optional[Config] = None

    @property
    def config(self) -> Config:
        if self._config is None:
            self._config = load_config()
        return self._config


def _state(ctx: typer.Context) -> _State:
    if not isinstance(ctx.obj, _State):
        ctx.obj = _State()
    return ctx.obj


def _fail(exc: BaseException, code: ExitCode) -> NoReturn:
    err_console.print(f"[red]{escape(str(exc))}[/red]", soft_wrap=True)
    raise typer.Exit(code=int(code))


def _configure_logging(verbose: bool, debug: bool) -> None:
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=debug)],
        force=True,
    )


def _version_callback(value: bool) -> None:
    if value:
        console.print(f"fibsum {__version__}")
        raise typer.Exit()


def _open_catalog(ctx: typer.Context) -> Catalog:
    state = _state(ctx)
    root = resolve_catalog_dir(state.catalog, state.config)
    try:
        return open_catalog(root)
    except DslError as exc:
        _fail(exc, ExitCode.USAGE)
    except CatalogReadError as exc:
        _fail(exc, ExitCode.IO)
    except CatalogError as exc:
        _fail(exc, ExitCode.USAGE)
    except OSError as exc:
        _fail(exc, ExitCode.IO)


def _lookup(catalog: Catalog, ident: str) -> CatalogEntry:
    try:
        return catalog.entry(ident)
    except CatalogError as exc:
        _fail(exc, ExitCode.USAGE)


def _parse_binding(text: str) -> dict[str, int]:
    try:
        grid = parse_grid(text, max_cases=None)
    except GridError as exc:
        raise typer.BadParameter(str(exc)) from exc
    binding: dict[str, int] = {}
    for name, (lo, hi) in grid.ranges.items():
        if lo != hi:
            raise typer.BadParameter(f"binding for {name} must be a single value")
        binding[name] = lo
    return binding


@app.callback()
def root(
    ctx: typer.Context,
    catalog: Optional[str] = typer.Option(
        None,
        "--catalog",
        help="Catalog directory; defaults to $FIBSUM_CATALOG, then the config file, then the shipped corpus.",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress to stderr."),
    debug: bool = typer.Option(False, "--debug", help="Log debug detail to stderr."),
    version: bool = typer.Option(
        False,
        "--version",
        callback=_version_callback,
        is_eager=True,
        help="Show version and exit.",
    ),
) -> None:
    """Exact verification of binomial Fibonacci and Lucas sum identities."""
    _ = version
    _configure_logging(verbose, debug)
    ctx.obj = _State(catalog=catalog)


@app.command("fib")
def fib_command(j: int = typer.Argument(..., help="Index; pass negative values after --.")) -> None:
    """Print F_j in decimal."""
    with unlimited_int_digits():
        typer.echo(str(fib(j)))


@app.command("lucas")
def lucas_command(j: int = typer.Argument(..., help="Index; pass negative values after --.")) -> None:
    """Print L_j in decimal."""
    with unlimited_int_digits():
        typer.echo(str(lucas(j)))


def _pick_identity(specs: Sequence[IdentitySpec], ident: Optional[str], path: Path) -> IdentitySpec:
    if ident is not None:
        for spec in specs:
            if spec.id == ident:
                return spec
        _fail(CatalogError(f"{path} has no identity {ident!r}"), ExitCode.USAGE)
    if len(specs) != 1:
        _fail(
            CatalogError(f"{path} holds {len(specs)} identities; choose one with --id"),
            ExitCode.USAGE,
        )
    return specs[0]


@app.command("eval")
def eval_command(
    file: Path = typer.Argument(..., help="File with one or more identity blocks."),
    bind: str = typer.Option("", "--bind", help="Parameter values, e.g. n=2,s=0."),
    ident: Optional[str] = typer.Option(None, "--id", help="Identity to evaluate when the file holds several."),
    side: str = typer.Option("both", "--side", help="lhs, rhs or both."),
) -> None:
    """Evaluate one identity exactly under a binding."""
    if side not in ("lhs", "rhs", "both"):
        raise typer.BadParameter("side must be one of lhs, rhs, both")
    binding = _parse_binding(bind)

    try:
        text = file.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(exc, ExitCode.IO)
    try:
        specs = parse_file(text)
    except DslError as exc:
        _fail(exc, ExitCode.USAGE)

    spec = _pick_identity(specs, ident, file)
    missing = [name for name in spec.param_names if name not in binding]
    if missing:
        raise typer.BadParameter(f"missing values for: {', '.join(missing)}", param_hint="--bind")
    extra = sorted(set(binding) - set(spec.param_names))
    if extra:
        raise typer.BadParameter(f"{spec.id} has no parameter {extra[0]}", param_hint="--bind")

    try:
        if not requires_hold(spec, binding):
            err_console.print(f"[yellow]binding violates a require clause of {escape(spec.id)}[/yellow]")
        lhs = eval_expr(spec.lhs, binding) if side != "rhs" else None
        rhs = eval_expr(select_case(spec, binding).expr, binding) if side != "lhs" else None
    except DslError as exc:
        _fail(exc, ExitCode.USAGE)

    with unlimited_int_digits():
        if side == "lhs":
            typer.echo(str(lhs))
        elif side == "rhs":
            typer.echo(str(rhs))
        else:
            typer.echo(f"lhs = {lhs}")
            typer.echo(f"rhs = {rhs}")
    if side == "both" and lhs != rhs:
        raise typer.Exit(code=int(ExitCode.VERIFICATION_FAILED))


def _select_entries(
    catalog: Catalog,
    ids: Sequence[str],
    group: Optional[str],
    everything: bool,
) -> list[CatalogEntry]:
    if everything:
        if not catalog.entries:
            _fail(CatalogReadError(f"no identities found under {catalog.root}"), ExitCode.IO)
        return list(catalog.entries)
    if not ids and group is None:
        raise typer.BadParameter("choose entries with --id, --group or --all")
    chosen: dict[str, CatalogEntry] = {}
    if group is not None:
        try:
            for e in catalog.by_group(group):
                chosen[e.id] = e
        except CatalogError as exc:
            _fail(exc, ExitCode.USAGE)
    for ident in ids:
        e = _lookup(catalog, ident)
        chosen[e.id] = e
    return list(chosen.values())


@app.command("verify")
def verify_command(
    ctx: typer.Context,
    ids: Optional[List[str]] = typer.Option(None, "--id", help="Entry id; repeatable."),
    group: Optional[str] = typer.Option(None, "--group", help="Verify every entry of a group."),
    everything: bool = typer.Option(False, "--all", help="Verify the whole catalog."),
    grid: Optional[str] = typer.Option(
        None,
        "--grid",
        help="Range overrides, e.g. 'n=0..30;s=-6..6;j=-3..3'.",
    ),
    max_cases: Optional[int] = typer.Option(None, "--max-cases", min=1, help="Sample grids above this size."),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Worker processes."),
    json_path: Optional[Path] = typer.Option(None, "--json", help="Write one JSON report per line."),
    json_metadata: bool = typer.Option(
        False,
        "--json-metadata",
        help="Start the JSON file with a version and timestamp line.",
    ),
    errata: Optional[Path] = typer.Option(None, "--errata", help="Write suspect verdicts as markdown."),
    summary: bool = typer.Option(True, "--summary/--no-summary", help="Print a summary panel to stderr."),
) -> None:
    """Check identities exactly over parameter grids."""
    state = _state(ctx)
    catalog = _open_catalog(ctx)
    entries = _select_entries(catalog, ids or [], group, everything)
    config = state.config
    cap = max_cases if max_cases is not None else config.max_cases
    workers = jobs if jobs is not None else config.jobs

    overrides = dict(config.grid)
    try:
        if grid:
            overrides.update(parse_grid(grid).ranges)
        grid_overrides = ParamGrid(overrides, cap) if overrides else None
        reports = verify_all(entries, grid_overrides, jobs=workers, max_cases=cap)
    except GridError as exc:
        _fail(exc, ExitCode.USAGE)

    for report in reports:
        for line in render_report_lines(report):
            typer.echo(line)

    verdicts = adjudicate_suspects(reports)
    try:
        if json_path is not None:
            write_json_lines(reports, json_path, metadata=json_metadata)
        if errata is not None:
            write_errata(verdicts, errata)
    except OSError as exc:
        _fail(exc, ExitCode.IO)

    if summary:
        render_summary(err_console, reports, verdicts)
    if any(not r.passed for r in reports if not r.suspect):
        raise typer.Exit(code=int(ExitCode.VERIFICATION_FAILED))


@app.command("list")
def list_command(
    ctx: typer.Context,
    group: Optional[str] = typer.Option(None, "--group", help="Only entries of this group."),
    markdown: bool = typer.Option(False, "--markdown", help="Print the id-to-source audit as markdown."),
) -> None:
    """List catalog entries."""
    catalog = _open_catalog(ctx)
    entries: Sequence[CatalogEntry] = catalog.entries
    if group is not None:
        try:
            entries = catalog.by_group(group)
        except CatalogError as exc:
            _fail(exc, ExitCode.USAGE)
    if markdown:
        typer.echo(render_audit(entries), nl=False)
        return
    console.print(build_list_table(entries))


@app.command("show")
def show_command(ctx: typer.Context, ident: str = typer.Argument(..., help="Entry id.")) -> None:
    """Print one entry in canonical form."""
    item = _lookup(_open_catalog(ctx), ident)
    typer.echo(f"# group: {item.group}")
    typer.echo(f"# source: {item.source}")
    if item.alias_of:
        typer.echo(f"# alias-of: {item.alias_of}")
    if item.suspect:
        typer.echo("# status: suspect")
    typer.echo(print_identity(item.spec), nl=False)


@app.command("groups")
def groups_command(ctx: typer.Context) -> None:
    """Count entries per group."""
    console.print(build_groups_table(_open_catalog(ctx)))


def _emit_csv(records: Sequence[BenchRecord], out: Optional[Path]) -> None:
    if out is None:
        write_csv(records, sys.stdout)
        return
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8", newline="") as handle:
            write_csv(records, handle)
    except OSError as exc:
        _fail(exc, ExitCode.IO)
    err_console.print(f"[green]Wrote[/green] {out}")


@bench_app.command("fib")
def bench_fib_command(
    n: Optional[List[int]] = typer.Option(None, "--n", help="Index to time; repeatable."),
    reps: int = typer.Option(5, "--reps", help="Repetitions per strategy (median is reported)."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write CSV here instead of stdout."),
) -> None:
    """Fast doubling against the linear recurrence."""
    n_values = list(n) if n else log_spaced(*DEFAULT_BENCH_N)
    try:
        records = bench_fib(n_values, reps)
    except DigestMismatchError as exc:
        _fail(exc, ExitCode.VERIFICATION_FAILED)
    except BenchError as exc:
        _fail(exc, ExitCode.USAGE)
    _emit_csv(records, out)


@bench_app.command("entry")
def bench_entry_command(
    ctx: typer.Context,
    ident: str = typer.Argument(..., help="Entry id with a parameter n."),
    n: int = typer.Option(1_000, "--n", help="Value of n."),
    reps: int = typer.Option(5, "--reps", help="Repetitions per side (median is reported)."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write CSV here instead of stdout."),
) -> None:
    """Summation side against closed form for one entry."""
    catalog = _open_catalog(ctx)
    try:
        records = bench_entry(ident, n, reps, catalog=catalog)
    except CatalogError as exc:
        _fail(exc, ExitCode.USAGE)
    except DigestMismatchError as exc:
        _fail(exc, ExitCode.VERIFICATION_FAILED)
    except BenchError as exc:
        _fail(exc, ExitCode.USAGE)
    _emit_csv(records, out)


def _print_config(config: Config) -> None:
    console.print_json(json.dumps(config.to_dict(), ensure_ascii=False, indent=2))
    console.print(f"[dim]Config path:[/dim] {CONFIG_PATH}")


@app.command("config")
def config_command(
    show: bool = typer.Option(False, "--show", help="Print current configuration."),
    catalog_dir: Optional[str] = typer.Option(None, "--catalog-dir", help="Default catalog directory."),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Default worker count for verify."),
    max_cases: Optional[int] = typer.Option(None, "--max-cases", min=1, help="Default sampling cap."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Default range overrides, e.g. 'n=0..20'."),
    reset: bool = typer.Option(False, "--reset", help="Restore defaults."),
) -> None:
    """Set defaults for catalog location, workers and grids."""
    config = Config() if reset else load_config()
    has_update_flags = reset or any(
        value is not None for value in (catalog_dir, jobs, max_cases, grid)
    )

    if not has_update_flags:
        _print_config(config)
        return

    if catalog_dir is not None:
        config.catalog_dir = catalog_dir or None
    if jobs is not None:
        config.jobs = jobs
    if max_cases is not None:
        config.max_cases = max_cases
    if grid is not None:
        try:
            config.grid = dict(parse_grid(grid).ranges)
        except GridError as exc:
            raise typer.BadParameter(str(exc), param_hint="--grid") from exc

    try:
        save_config(config)
    except OSError as exc:
        _fail(exc, ExitCode.IO)
    console.print("[green]Configuration saved.[/green]")
    _print_config(config)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Invoke the command line and return its exit code instead of exiting."""
    try:
        app(args=list(argv) if argv is not None else None, prog_name="fibsum")
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return int(ExitCode.OK)
        if isinstance(code, int):
            return code
        err_console.print(str(code))
        return int(ExitCode.USAGE)
    return int(ExitCode.OK)


if __name__ == "__main__":
    sys.exit(run())

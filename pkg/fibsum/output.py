from __future__ import annotations

from typing import Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from .catalog import Catalog, CatalogEntry
from .models import ReportStatus, Verdict, VerificationReport

STATUS_STYLES: dict[str, str] = {
    "normal": "",
    "suspect": "yellow",
}

RESULT_STYLES: dict[ReportStatus, str] = {
    "pass": "green",
    "fail": "bold red",
}


def build_list_table(entries: Sequence[CatalogEntry]) -> Table:
    table = Table(show_header=True, header_style="bold cyan", expand=False)
    table.add_column("Id", style="bold", no_wrap=True)
    table.add_column("Group", no_wrap=True)
    table.add_column("Status")
    table.add_column("Source")

    for e in entries:
        table.add_row(e.id, e.group, Text(e.status, style=STATUS_STYLES[e.status]), e.source)

    return table


def build_groups_table(catalog: Catalog) -> Table:
    table = Table(show_header=True, header_style="bold cyan", expand=False)
    table.add_column("Group", style="bold")
    table.add_column("Entries", justify="right")
    table.add_column("Suspect", justify="right")

    for group, count in catalog.groups().items():
        suspects = sum(1 for e in catalog.by_group(group) if e.suspect)
        table.add_row(group, str(count), str(suspects) if suspects else "")

    table.add_row(Text("total", style="dim"), str(len(catalog)), "")
    return table


def build_summary_panel(reports: Sequence[VerificationReport], verdicts: Sequence[Verdict]) -> Panel:
    normal = [r for r in reports if not r.suspect]
    broken = [r for r in normal if not r.passed]
    cases = sum(r.cases_checked for r in reports)
    skipped = sum(r.cases_skipped for r in reports)

    table = Table(show_header=False, box=None, pad_edge=False)
    table.add_column("Key", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("entries", str(len(reports)))
    table.add_row("cases", f"{cases:,}")
    table.add_row("skipped", f"{skipped:,}")
    table.add_row(
        "normal failing",
        Text(str(len(broken)), style=RESULT_STYLES["fail" if broken else "pass"]),
    )
    for verdict in verdicts:
        style = "green" if verdict.kind != "unresolved" else "bold red"
        table.add_row(verdict.suspect_id, Text(verdict.kind, style=style))

    status: ReportStatus = "fail" if broken else "pass"
    return Panel(
        table,
        title=Text("Verification", style="bold"),
        subtitle=Text(status, style=RESULT_STYLES[status]),
        border_style=RESULT_STYLES[status],
        expand=False,
    )


def render_summary(
    console: Console,
    reports: Sequence[VerificationReport],
    verdicts: Sequence[Verdict],
) -> None:
    console.print(build_summary_panel(reports, verdicts))

"""Exact verification of catalog entries over integer parameter grids."""

from __future__ import annotations

import itertools
import json
import logging
import math
import random
import re
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping, Optional, Sequence, Union

from . import __version__
from .bigfib import binom, fib, lucas, unlimited_int_digits
from .catalog import CatalogEntry
from .config import DEFAULT_MAX_CASES
from .dsl import DslError, eval_value, print_guard, requires_hold, select_case
from .golden import SQRT5, ZERO, GoldenNum, alpha_pow, beta_pow, gf_pow
from .models import (
    CORRECTED_SUFFIX,
    EMPTY_GRID_DIAGNOSTIC,
    MAX_SHOWN_FAILURES,
    MAX_STORED_FAILURES,
    UNCOVERED_DIAGNOSTIC,
    Failure,
    VerificationReport,
    Verdict,
)

logger = logging.getLogger(__name__)

N_RANGE = (0, 30)
N_RANGE_BY_GROUP: dict[str, tuple[int, int]] = {
    "G-Q": (0, 24),
    "G-C": (0, 16),
    "G-X": (0, 16),
}
J_RANGE = (-3, 3)
OFFSET_RANGE = (-6, 6)

_GRID_ITEM = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=(-?\d+)(?:\.\.(-?\d+))?$")

Coefficients = Sequence[tuple[Union[int, Fraction, GoldenNum], int]]


class GridError(RuntimeError):
    """Raised for malformed grids or grids that miss a declared parameter."""


@dataclass
class ParamGrid:
    ranges: dict[str, tuple[int, int]] = field(default_factory=dict)
    max_cases: Optional[int] = DEFAULT_MAX_CASES

    def __post_init__(self) -> None:
        for name, (lo, hi) in self.ranges.items():
            if lo > hi:
                raise GridError(f"empty range {lo}..{hi} for {name}")
        if self.max_cases is not None and self.max_cases < 1:
            raise GridError(f"max_cases must be positive, got {self.max_cases}")

    def __str__(self) -> str:
        return ";".join(f"{name}={lo}..{hi}" for name, (lo, hi) in self.ranges.items())


def parse_grid(text: str, max_cases: Optional[int] = DEFAULT_MAX_CASES) -> ParamGrid:
    """Parse ``n=0..30;s=-6..6;j=-3..3``; a bare ``n=5`` pins a single value."""
    ranges: dict[str, tuple[int, int]] = {}
    for item in re.split(r"[;,]", text):
        item = re.sub(r"\s+", "", item)
        if not item:
            continue
        match = _GRID_ITEM.match(item)
        if not match:
            raise GridError(f"bad grid item {item!r}; expected name=lo..hi")
        name, lo, hi = match.group(1), int(match.group(2)), match.group(3)
        if name in ranges:
            raise GridError(f"parameter {name} listed twice in grid")
        ranges[name] = (lo, int(hi) if hi is not None else lo)
    return ParamGrid(ranges, max_cases)


def default_range(group: str, name: str) -> tuple[int, int]:
    if name == "n":
        return N_RANGE_BY_GROUP.get(group, N_RANGE)
    if name == "j":
        return J_RANGE
    return OFFSET_RANGE


def default_grid_for(
    item: CatalogEntry,
    max_cases: Optional[int] = DEFAULT_MAX_CASES,
    overrides: Optional[Mapping[str, tuple[int, int]]] = None,
) -> ParamGrid:
    """Default ranges for the entry's parameters, lifted onto each declared lower bound."""
    overrides = overrides or {}
    ranges: dict[str, tuple[int, int]] = {}
    for p in item.spec.params:
        if p.name in overrides:
            ranges[p.name] = overrides[p.name]
            continue
        lo, hi = default_range(item.group, p.name)
        if p.lo is not None and lo < p.lo:
            lo = p.lo
            hi = max(hi, lo)
        if p.hi is not None and hi > p.hi:
            hi = max(p.hi, lo)
        ranges[p.name] = (lo, hi)
    return ParamGrid(ranges, max_cases)


def _axes(item: CatalogEntry, grid: ParamGrid) -> list[range]:
    axes: list[range] = []
    missing = [p.name for p in item.spec.params if p.name not in grid.ranges]
    if missing:
        raise GridError(f"grid for {item.id} has no range for: {', '.join(missing)}")
    for p in item.spec.params:
        lo, hi = grid.ranges[p.name]
        if p.lo is not None:
            lo = max(lo, p.lo)
        if p.hi is not None:
            hi = min(hi, p.hi)
        axes.append(range(lo, hi + 1))
    return axes


def _decode(index: int, axes: Sequence[range]) -> tuple[int, ...]:
    values: list[int] = []
    for axis in reversed(axes):
        index, offset = divmod(index, len(axis))
        values.append(axis[offset])
    return tuple(reversed(values))


def _corner_indices(axes: Sequence[range]) -> set[int]:
    corners: set[int] = set()
    for choice in itertools.product((0, 1), repeat=len(axes)):
        index = 0
        for pick, axis in zip(choice, axes):
            index = index * len(axis) + (len(axis) - 1 if pick else 0)
        corners.add(index)
    return corners


def iter_bindings(item: CatalogEntry, grid: ParamGrid) -> Iterator[dict[str, int]]:
    """Bindings in lexicographic order; grids above max_cases are sampled deterministically."""
    names = item.spec.param_names
    axes = _axes(item, grid)
    if any(len(axis) == 0 for axis in axes):
        return
    total = math.prod(len(axis) for axis in axes)
    if grid.max_cases is None or total <= grid.max_cases:
        for combo in itertools.product(*axes):
            yield dict(zip(names, combo))
        return

    rng = random.Random(zlib.crc32(item.id.encode("utf-8")))
    picks = set(sorted(_corner_indices(axes))[: grid.max_cases])
    for index in rng.sample(range(total), grid.max_cases):
        if len(picks) >= grid.max_cases:
            break
        picks.add(index)
    logger.debug("%s: sampling %d of %d bindings", item.id, len(picks), total)
    for index in sorted(picks):
        yield dict(zip(names, _decode(index, axes)))


def _canonical(value: object) -> str:
    with unlimited_int_digits():
        return str(GoldenNum.of(value))  # type: ignore[arg-type]


def verify_entry(item: CatalogEntry, grid: ParamGrid) -> VerificationReport:
    spec = item.spec
    report = VerificationReport(id=item.id, group=item.group, suspect=item.suspect, grid=str(grid))
    hits = [0] * len(spec.rhs)

    for binding in iter_bindings(item, grid):
        try:
            if not requires_hold(spec, binding):
                report.cases_skipped += 1
                continue
            case = select_case(spec, binding)
            lhs = eval_value(spec.lhs, binding)
            rhs = eval_value(case.expr, binding)
        except (DslError, ArithmeticError, ValueError) as exc:
            report.cases_checked += 1
            report.cases_failed += 1
            if len(report.failures) < MAX_STORED_FAILURES:
                report.failures.append(Failure(binding, error=str(exc)))
            continue

        report.cases_checked += 1
        hits[spec.rhs.index(case)] += 1
        if GoldenNum.of(lhs) != GoldenNum.of(rhs):
            report.cases_failed += 1
            if len(report.failures) < MAX_STORED_FAILURES:
                report.failures.append(Failure(binding, lhs=_canonical(lhs), rhs=_canonical(rhs)))

    if report.cases_checked == 0:
        report.diagnostics.append(EMPTY_GRID_DIAGNOSTIC)
    elif spec.has_cases:
        for case, count in zip(spec.rhs, hits):
            if count == 0 and not case.otherwise:
                report.diagnostics.append(f"{UNCOVERED_DIAGNOSTIC}: {print_guard(case.guard)}")
                logger.warning("%s: no binding reached case %s", item.id, print_guard(case.guard))

    logger.debug(
        "%s: %s after %d cases (%d skipped)",
        item.id,
        report.status,
        report.cases_checked,
        report.cases_skipped,
    )
    return report


def resolve_grid(
    item: CatalogEntry,
    grid: Optional[ParamGrid] = None,
    max_cases: Optional[int] = DEFAULT_MAX_CASES,
) -> ParamGrid:
    """Defaults for the entry, with any ranges from ``grid`` laid over them."""
    if grid is None:
        return default_grid_for(item, max_cases)
    return default_grid_for(item, grid.max_cases, grid.ranges)


def _verify_task(task: tuple[CatalogEntry, ParamGrid]) -> VerificationReport:
    item, grid = task
    return verify_entry(item, grid)


def verify_all(
    entries: Sequence[CatalogEntry],
    grid: Optional[ParamGrid] = None,
    jobs: int = 1,
    max_cases: Optional[int] = DEFAULT_MAX_CASES,
) -> list[VerificationReport]:
    """Verify every entry; reports come back in (group, id) order for any worker count."""
    ordered = sorted(entries, key=lambda e: (e.group, e.id))
    tasks = [(item, resolve_grid(item, grid, max_cases)) for item in ordered]
    if jobs <= 1 or len(tasks) < 2:
        return [_verify_task(task) for task in tasks]

    logger.info("verifying %d entries with %d workers", len(tasks), jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_verify_task, tasks, chunksize=4))


# --- Binet transform -------------------------------------------------------


def _h(coeffs: Coefficients, w: GoldenNum) -> GoldenNum:
    total = ZERO
    for g, f in coeffs:
        total = total + GoldenNum.of(g) * gf_pow(w, f)
    return total


def check_binet_transform(
    coeffs: Coefficients,
    j: int,
    z: Union[int, Fraction, GoldenNum],
) -> bool:
    """Check both Binet-transformed forms of h(w) = sum g_k w^f_k at z.

    sqrt5 * sum g_k z^f_k F(j f_k) == h(alpha^j z) - h(beta^j z)
    sum g_k z^f_k L(j f_k)         == h(alpha^j z) + h(beta^j z)
    """
    z = GoldenNum.of(z)
    if not z and any(f < 0 for _, f in coeffs):
        raise ValueError("z = 0 with a negative exponent")

    f_side = ZERO
    l_side = ZERO
    for g, f in coeffs:
        weight = GoldenNum.of(g) * gf_pow(z, f)
        f_side = f_side + weight * fib(j * f)
        l_side = l_side + weight * lucas(j * f)

    at_alpha = _h(coeffs, alpha_pow(j) * z)
    at_beta = _h(coeffs, beta_pow(j) * z)
    return SQRT5 * f_side == at_alpha - at_beta and l_side == at_alpha + at_beta


def binomial_row_coeffs(n: int, r: int, s: int, x: int = 1) -> list[tuple[int, int]]:
    """Coefficients of z^s (x + z^r)^n as (g_k, f_k) pairs."""
    return [(binom(n, k) * x ** (n - k), r * k + s) for k in range(n + 1)]


# --- reporting -------------------------------------------------------------


def render_report_lines(report: VerificationReport) -> list[str]:
    lines = [
        f"{report.status} {report.id} cases={report.cases_checked} skipped={report.cases_skipped}"
    ]
    for failure in report.failures[:MAX_SHOWN_FAILURES]:
        if failure.error is not None:
            lines.append(f"  at {failure.binding_text()}: error={failure.error}")
        else:
            lines.append(f"  at {failure.binding_text()}: lhs={failure.lhs} rhs={failure.rhs}")
    for note in report.diagnostics:
        lines.append(f"  note: {note}")
    return lines


def write_json_lines(
    reports: Sequence[VerificationReport],
    path: Union[str, Path],
    metadata: bool = False,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        if metadata:
            header = {
                "fibsum": __version__,
                "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "entries": len(reports),
            }
            handle.write(json.dumps(header) + "\n")
        for report in reports:
            handle.write(json.dumps(report.to_dict(), ensure_ascii=False) + "\n")


def adjudicate_suspects(reports: Sequence[VerificationReport]) -> list[Verdict]:
    by_id = {r.id: r for r in reports}
    verdicts: list[Verdict] = []
    for report in reports:
        if not report.suspect:
            continue
        twin = by_id.get(report.id + CORRECTED_SUFFIX)
        counterexample = next((f for f in report.failures if f.error is None), None)
        if report.passed:
            kind = "verbatim-holds"
        elif twin is not None and twin.passed:
            kind = "corrected-holds"
        else:
            kind = "unresolved"
        verdicts.append(
            Verdict(
                suspect_id=report.id,
                corrected_id=twin.id if twin is not None else None,
                kind=kind,  # type: ignore[arg-type]
                counterexample=counterexample,
            )
        )
    return verdicts


_VERDICT_TEXT = {
    "verbatim-holds": "the entry holds as printed over the whole grid",
    "corrected-holds": "the entry fails as printed; the corrected twin holds",
    "unresolved": "neither the entry nor a corrected twin holds",
}


def render_errata(verdicts: Sequence[Verdict]) -> str:
    lines = [
        "# Errata",
        "",
        "Verdicts for catalog entries marked `status: suspect`. Each suspect is",
        "checked as printed, next to its `-corrected` twin, over the default grids.",
        "",
    ]
    for verdict in verdicts:
        lines.append(f"## `{verdict.suspect_id}`")
        lines.append("")
        lines.append(f"- verdict: **{verdict.kind}**, {_VERDICT_TEXT[verdict.kind]}")
        if verdict.corrected_id:
            lines.append(f"- corrected twin: `{verdict.corrected_id}`")
        if verdict.counterexample is not None:
            c = verdict.counterexample
            lines.append(f"- counterexample: at {c.binding_text()}, lhs = {c.lhs}, rhs = {c.rhs}")
        lines.append("")
    return "\n".join(lines)


def write_errata(verdicts: Sequence[Verdict], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_errata(verdicts), encoding="utf-8")
    return path

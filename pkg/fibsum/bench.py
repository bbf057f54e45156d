"""Timing harness: fast doubling against the recurrence, closed forms against sums."""

from __future__ import annotations

import csv
import hashlib
import itertools
import logging
import statistics
import time
from typing import Callable, Optional, Sequence, TextIO, TypeVar

from .bigfib import fib, fib_iterative, unlimited_int_digits
from .catalog import Catalog, CatalogEntry, open_catalog
from .dsl import DslError, Expr, clear_walkers, eval_value, requires_hold, select_case
from .golden import GoldenNum
from .models import BenchRecord

logger = logging.getLogger(__name__)

CSV_HEADER = ("subject", "n", "reps", "median_ns", "digest")
MIN_REPS = 3
FIXED_VALUE_ORDER = (1, 0, 2, -1)

T = TypeVar("T")


class BenchError(RuntimeError):
    pass


class DigestMismatchError(BenchError):
    """Two strategies produced different values for the same input."""


def digest(value: object) -> str:
    """Short sha256 of the canonical rendering of a value."""
    with unlimited_int_digits():
        text = str(GoldenNum.of(value))  # type: ignore[arg-type]
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]


def _time(fn: Callable[[], T], reps: int) -> tuple[int, T]:
    samples: list[int] = []
    result: Optional[T] = None
    for _ in range(reps):
        start = time.perf_counter_ns()
        result = fn()
        samples.append(time.perf_counter_ns() - start)
    return int(statistics.median(samples)), result  # type: ignore[return-value]


def _check_reps(reps: int) -> None:
    if reps < MIN_REPS:
        raise BenchError(f"need at least {MIN_REPS} repetitions, got {reps}")


def log_spaced(lo: int, hi: int, count: int) -> list[int]:
    if lo < 1 or hi < lo or count < 1:
        raise BenchError(f"bad log-spaced range {lo}..{hi} x{count}")
    if count == 1 or lo == hi:
        return [lo]
    ratio = hi / lo
    values = {round(lo * ratio ** (i / (count - 1))) for i in range(count)}
    return sorted(values)


def bench_fib(n_values: Sequence[int], reps: int) -> list[BenchRecord]:
    _check_reps(reps)
    records: list[BenchRecord] = []
    for n in n_values:
        if n < 0:
            raise BenchError(f"n must be non-negative, got {n}")
        slow_ns, slow = _time(lambda: fib_iterative(n), reps)
        fast_ns, fast = _time(lambda: fib(n), reps)
        slow_digest, fast_digest = digest(slow), digest(fast)
        if slow_digest != fast_digest:
            raise DigestMismatchError(f"strategies disagree on F_{n}")
        records.append(BenchRecord("fib-iterative", n, reps, slow_ns, slow_digest))
        records.append(BenchRecord("fib-fast-doubling", n, reps, fast_ns, fast_digest))
        logger.info("F_%d: iterative %d ns, fast doubling %d ns", n, slow_ns, fast_ns)
    return records


def _bench_binding(item: CatalogEntry, n: int) -> dict[str, int]:
    spec = item.spec
    by_name = {p.name: p for p in spec.params}
    if "n" not in by_name:
        raise BenchError(f"{item.id} has no parameter n")
    if not by_name["n"].admits(n):
        raise BenchError(f"n={n} is outside the domain of {item.id}")

    others = [p for p in spec.params if p.name != "n"]
    choices = [[v for v in FIXED_VALUE_ORDER if p.admits(v)] or [p.lo] for p in others]
    for combo in itertools.product(*choices):
        binding = {p.name: value for p, value in zip(others, combo)}
        binding["n"] = n
        if requires_hold(spec, binding):
            return {p.name: binding[p.name] for p in spec.params}
    raise BenchError(f"no admissible binding for {item.id} at n={n}")


def _cold_eval(expr: Expr, binding: dict[str, int]) -> object:
    clear_walkers()
    return eval_value(expr, binding)


def bench_entry(
    ident: str,
    n: int,
    reps: int,
    catalog: Optional[Catalog] = None,
) -> tuple[BenchRecord, BenchRecord]:
    """Time the summation side against the closed form at one n."""
    _check_reps(reps)
    item = (catalog if catalog is not None else open_catalog()).entry(ident)
    binding = _bench_binding(item, n)
    try:
        case = select_case(item.spec, binding)
        lhs_ns, lhs = _time(lambda: _cold_eval(item.spec.lhs, binding), reps)
        rhs_ns, rhs = _time(lambda: _cold_eval(case.expr, binding), reps)
    except DslError as exc:
        raise BenchError(f"{item.id} at {binding}: {exc}") from exc

    lhs_digest, rhs_digest = digest(lhs), digest(rhs)
    if lhs_digest != rhs_digest:
        raise DigestMismatchError(f"{item.id} sides disagree at {binding}")
    return (
        BenchRecord(f"{item.id}:lhs", n, reps, lhs_ns, lhs_digest),
        BenchRecord(f"{item.id}:rhs", n, reps, rhs_ns, rhs_digest),
    )


def write_csv(records: Sequence[BenchRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.to_row())

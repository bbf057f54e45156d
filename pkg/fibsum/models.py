from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Literal, Optional

EntryStatus = Literal["normal", "suspect"]
ReportStatus = Literal["pass", "fail"]
VerdictKind = Literal["verbatim-holds", "corrected-holds", "unresolved"]
GroupTag = Literal[
    "G-INTRO",
    "G-L2",
    "G-L3",
    "G-L4",
    "G-L5",
    "G-L6",
    "G-P1",
    "G-P2",
    "G-P3",
    "G-Q",
    "G-C",
    "G-X",
]

GROUP_TAGS: tuple[GroupTag, ...] = (
    "G-INTRO",
    "G-L2",
    "G-L3",
    "G-L4",
    "G-L5",
    "G-L6",
    "G-P1",
    "G-P2",
    "G-P3",
    "G-Q",
    "G-C",
    "G-X",
)

CORRECTED_SUFFIX = "-corrected"
MAX_SHOWN_FAILURES = 5
MAX_STORED_FAILURES = 25
EMPTY_GRID_DIAGNOSTIC = "empty grid"
UNCOVERED_DIAGNOSTIC = "branch uncovered"


class ExitCode(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 1
    USAGE = 2
    IO = 3


@dataclass
class Failure:
    binding: dict[str, int]
    lhs: Optional[str] = None
    rhs: Optional[str] = None
    error: Optional[str] = None

    def binding_text(self) -> str:
        if not self.binding:
            return "(no parameters)"
        return ", ".join(f"{name}={value}" for name, value in self.binding.items())

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"binding": dict(self.binding)}
        if self.error is not None:
            payload["error"] = self.error
        else:
            payload["lhs"] = self.lhs
            payload["rhs"] = self.rhs
        return payload

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Failure":
        return cls(
            binding={str(k): int(v) for k, v in dict(data["binding"]).items()},
            lhs=data.get("lhs"),
            rhs=data.get("rhs"),
            error=data.get("error"),
        )


@dataclass
class VerificationReport:
    id: str
    group: str
    suspect: bool = False
    cases_checked: int = 0
    cases_skipped: int = 0
    cases_failed: int = 0
    failures: list[Failure] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    grid: str = ""

    @property
    def status(self) -> ReportStatus:
        if self.failures or self.cases_checked < 1:
            return "fail"
        if any(d.startswith(UNCOVERED_DIAGNOSTIC) for d in self.diagnostics):
            return "fail"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "group": self.group,
            "status": self.status,
            "suspect": self.suspect,
            "cases_checked": self.cases_checked,
            "cases_skipped": self.cases_skipped,
            "cases_failed": self.cases_failed,
            "grid": self.grid,
            "failures": [f.to_dict() for f in self.failures],
            "diagnostics": list(self.diagnostics),
        }


@dataclass
class Verdict:
    suspect_id: str
    corrected_id: Optional[str]
    kind: VerdictKind
    counterexample: Optional[Failure] = None

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "suspect": self.suspect_id,
            "corrected": self.corrected_id,
            "verdict": self.kind,
        }
        if self.counterexample is not None:
            payload["counterexample"] = self.counterexample.to_dict()
        return payload


@dataclass
class BenchRecord:
    subject: str
    n: int
    reps: int
    median_ns: int
    digest: str

    def to_row(self) -> list[str]:
        return [self.subject, str(self.n), str(self.reps), str(self.median_ns), self.digest]

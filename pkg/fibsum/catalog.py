"""Loading the identity catalog from ``*.fib`` files.

Each file opens with a ``# group: <tag>`` line. Every identity block is
preceded by directive comments::

    # source: <locator>
    # alias-of: <id>          (optional)
    # status: suspect         (optional)
"""

from __future__ import annotations

import difflib
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .dsl import IdentitySpec, ParseError, parse_file
from .models import CORRECTED_SUFFIX, EntryStatus

logger = logging.getLogger(__name__)

_DIRECTIVE = re.compile(r"^#\s*(group|source|status|alias-of)\s*:\s*(.*?)\s*$")
_STATUSES: tuple[EntryStatus, ...] = ("normal", "suspect")


class CatalogError(RuntimeError):
    """Raised when the catalog cannot be assembled or queried."""


class CatalogReadError(CatalogError):
    """The catalog directory or one of its files cannot be read."""


class DuplicateIdError(CatalogError):
    pass


class UnknownIdError(CatalogError):
    def __init__(self, ident: str, suggestions: Sequence[str] = ()) -> None:
        self.ident = ident
        self.suggestions = tuple(suggestions)
        message = f"unknown identity id {ident!r}"
        if self.suggestions:
            message += "; did you mean: " + ", ".join(self.suggestions)
        super().__init__(message)


@dataclass(frozen=True)
class CatalogEntry:
    spec: IdentitySpec
    group: str
    source: str
    status: EntryStatus = "normal"
    alias_of: Optional[str] = None
    path: str = ""

    @property
    def id(self) -> str:
        return self.spec.id

    @property
    def suspect(self) -> bool:
        return self.status == "suspect"

    @property
    def is_corrected_twin(self) -> bool:
        return self.id.endswith(CORRECTED_SUFFIX)


def shipped_catalog_dir() -> Path:
    return Path(str(resources.files("fibsum.data").joinpath("catalog")))


def _directives_above(lines: list[str], line_no: int) -> dict[str, str]:
    """Collect the contiguous comment block that ends right above ``line_no`` (1-based)."""
    found: dict[str, str] = {}
    index = line_no - 2
    while index >= 0:
        text = lines[index].strip()
        if not text.startswith("#"):
            break
        match = _DIRECTIVE.match(text)
        if match and match.group(1) != "group":
            found.setdefault(match.group(1), match.group(2))
        index -= 1
    return found


def _file_group(lines: list[str], path: Path) -> str:
    for text in lines:
        match = _DIRECTIVE.match(text.strip())
        if match and match.group(1) == "group" and match.group(2):
            return match.group(2)
        if text.startswith("identity"):
            break
    raise CatalogError(f"{path}: missing '# group: <tag>' header")


def _entries_from_file(path: Path) -> list[CatalogEntry]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CatalogReadError(f"cannot read {path}: {exc}") from exc
    try:
        specs = parse_file(text)
    except ParseError as exc:
        raise exc.with_source(str(path)) from None

    lines = text.splitlines()
    group = _file_group(lines, path)
    entries: list[CatalogEntry] = []
    for spec in specs:
        directives = _directives_above(lines, spec.line)
        source = directives.get("source")
        if not source:
            raise CatalogError(f"{path}:{spec.line}: identity {spec.id} has no '# source:' line")
        status = directives.get("status", "normal")
        if status not in _STATUSES:
            raise CatalogError(f"{path}:{spec.line}: unknown status {status!r} for {spec.id}")
        entries.append(
            CatalogEntry(
                spec=spec,
                group=group,
                source=source,
                status=status,  # type: ignore[arg-type]
                alias_of=directives.get("alias-of") or None,
                path=str(path),
            )
        )
    return entries


def load_catalog(root: Union[str, Path]) -> list[CatalogEntry]:
    """Parse every ``*.fib`` file under ``root``; entries come back sorted by (group, id)."""
    root = Path(root)
    if not root.is_dir():
        raise CatalogReadError(f"catalog directory not found: {root}")

    files = sorted(root.rglob("*.fib"))
    if not files:
        logger.warning("no catalog files under %s", root)
        return []

    seen: dict[str, CatalogEntry] = {}
    for path in files:
        for item in _entries_from_file(path):
            previous = seen.get(item.id)
            if previous is not None:
                raise DuplicateIdError(
                    f"duplicate identity id {item.id!r} in {previous.path} and {item.path}"
                )
            seen[item.id] = item

    for item in seen.values():
        if item.alias_of and item.alias_of not in seen:
            logger.warning("%s refers to missing alias %s", item.id, item.alias_of)

    entries = sorted(seen.values(), key=lambda e: (e.group, e.id))
    logger.info("loaded %d identities from %d files under %s", len(entries), len(files), root)
    return entries


class Catalog:
    def __init__(self, entries: Sequence[CatalogEntry], root: Optional[Path] = None) -> None:
        self.root = root
        self.entries: tuple[CatalogEntry, ...] = tuple(entries)
        self._by_id = {e.id: e for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):  # type: ignore[no-untyped-def]
        return iter(self.entries)

    def __contains__(self, ident: object) -> bool:
        return ident in self._by_id

    def entry(self, ident: str) -> CatalogEntry:
        try:
            return self._by_id[ident]
        except KeyError:
            near = difflib.get_close_matches(ident, list(self._by_id), n=5, cutoff=0.6)
            raise UnknownIdError(ident, near) from None

    def groups(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.group] = counts.get(e.group, 0) + 1
        return counts

    def by_group(self, tag: str) -> list[CatalogEntry]:
        wanted = tag.upper()
        matched = [e for e in self.entries if e.group.upper() == wanted]
        if not matched and wanted not in {g.upper() for g in self.groups()}:
            near = difflib.get_close_matches(tag, list(self.groups()), n=3, cutoff=0.5)
            hint = f"; did you mean: {', '.join(near)}" if near else ""
            raise CatalogError(f"unknown group {tag!r}{hint}")
        return matched

    def twin_of(self, suspect: CatalogEntry) -> Optional[CatalogEntry]:
        return self._by_id.get(suspect.id + CORRECTED_SUFFIX)


@lru_cache(maxsize=8)
def _cached_catalog(root: str) -> Catalog:
    path = Path(root)
    return Catalog(load_catalog(path), path)


def open_catalog(root: Union[str, Path, None] = None) -> Catalog:
    path = Path(root) if root is not None else shipped_catalog_dir()
    return _cached_catalog(str(path.resolve()))


def entry(ident: str, root: Union[str, Path, None] = None) -> CatalogEntry:
    return open_catalog(root).entry(ident)


def render_audit(entries: Sequence[CatalogEntry]) -> str:
    """Markdown listing of every entry id next to its source locator."""
    lines = [
        "# Catalog audit",
        "",
        "| id | group | status | source |",
        "| --- | --- | --- | --- |",
    ]
    for e in entries:
        source = e.source
        if e.alias_of:
            source += f" (same fact as `{e.alias_of}`)"
        lines.append(f"| `{e.id}` | {e.group} | {e.status} | {source} |")
    return "\n".join(lines) + "\n"

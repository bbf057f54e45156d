from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .catalog import shipped_catalog_dir

CONFIG_DIR = Path.home() / ".config" / "fibsum"
CONFIG_PATH = CONFIG_DIR / "config.json"
CATALOG_ENV = "FIBSUM_CATALOG"

DEFAULT_JOBS = 1
DEFAULT_MAX_CASES = 2000


@dataclass
class Config:
    catalog_dir: Optional[str] = None
    jobs: int = DEFAULT_JOBS
    max_cases: int = DEFAULT_MAX_CASES
    grid: dict[str, tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "catalog_dir": self.catalog_dir,
            "jobs": self.jobs,
            "max_cases": self.max_cases,
            "grid": {name: [lo, hi] for name, (lo, hi) in sorted(self.grid.items())},
        }


def _sanitize_catalog_dir(value: Any) -> Optional[str]:
    if isinstance(value, str) and value.strip():
        return value.strip()
    return None


def _sanitize_positive(value: Any, default: int) -> int:
    if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
        return value
    return default


def _sanitize_grid(value: Any) -> dict[str, tuple[int, int]]:
    if not isinstance(value, dict):
        return {}
    grid: dict[str, tuple[int, int]] = {}
    for name, bounds in value.items():
        if not isinstance(name, str) or not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
            continue
        lo, hi = bounds
        if isinstance(lo, int) and isinstance(hi, int) and lo <= hi:
            grid[name] = (lo, hi)
    return grid


def default_config() -> Config:
    return Config()


def load_config() -> Config:
    if not CONFIG_PATH.exists():
        config = default_config()
        try:
            save_config(config)
        except OSError:
            pass
        return config

    try:
        data = json.loads(CONFIG_PATH.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return default_config()
    if not isinstance(data, dict):
        return default_config()

    return Config(
        catalog_dir=_sanitize_catalog_dir(data.get("catalog_dir")),
        jobs=_sanitize_positive(data.get("jobs"), DEFAULT_JOBS),
        max_cases=_sanitize_positive(data.get("max_cases"), DEFAULT_MAX_CASES),
        grid=_sanitize_grid(data.get("grid")),
    )


def save_config(config: Config) -> None:
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)
    CONFIG_PATH.write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")


def resolve_catalog_dir(flag: Optional[str], config: Optional[Config] = None) -> Path:
    """--catalog, then $FIBSUM_CATALOG, then the config file, then the shipped corpus."""
    if flag:
        return Path(flag).expanduser()
    from_env = os.environ.get(CATALOG_ENV, "").strip()
    if from_env:
        return Path(from_env).expanduser()
    if config is not None and config.catalog_dir:
        return Path(config.catalog_dir).expanduser()
    return shipped_catalog_dir()

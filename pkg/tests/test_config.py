from __future__ import annotations

import json
from pathlib import Path

import pytest

from fibsum import config
from fibsum.catalog import shipped_catalog_dir


def test_missing_file_writes_defaults() -> None:
    assert not config.CONFIG_PATH.exists()
    loaded = config.load_config()
    assert loaded == config.default_config()
    assert json.loads(config.CONFIG_PATH.read_text(encoding="utf-8")) == loaded.to_dict()


def test_round_trip() -> None:
    saved = config.Config(catalog_dir="~/catalog", jobs=4, max_cases=500, grid={"n": (0, 12)})
    config.save_config(saved)
    assert config.load_config() == saved


def test_invalid_json_falls_back() -> None:
    config.CONFIG_DIR.mkdir(parents=True)
    config.CONFIG_PATH.write_text("{not json", encoding="utf-8")
    assert config.load_config() == config.default_config()


def test_invalid_values_are_sanitized() -> None:
    config.CONFIG_DIR.mkdir(parents=True)
    payload = {
        "catalog_dir": "   ",
        "jobs": 0,
        "max_cases": True,
        "grid": {"n": [0, 5], "s": [3, 1], "j": "wide", "r": [1, 2, 3]},
    }
    config.CONFIG_PATH.write_text(json.dumps(payload), encoding="utf-8")
    loaded = config.load_config()
    assert loaded.catalog_dir is None
    assert loaded.jobs == config.DEFAULT_JOBS
    assert loaded.max_cases == config.DEFAULT_MAX_CASES
    assert loaded.grid == {"n": (0, 5)}


def test_catalog_dir_precedence(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    settings = config.Config(catalog_dir=str(tmp_path / "from-config"))
    assert config.resolve_catalog_dir(None) == shipped_catalog_dir()
    assert config.resolve_catalog_dir(None, settings) == tmp_path / "from-config"

    monkeypatch.setenv(config.CATALOG_ENV, str(tmp_path / "from-env"))
    assert config.resolve_catalog_dir(None, settings) == tmp_path / "from-env"
    assert config.resolve_catalog_dir(str(tmp_path / "from-flag"), settings) == tmp_path / "from-flag"

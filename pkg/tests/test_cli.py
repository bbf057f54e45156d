from __future__ import annotations

import json
from pathlib import Path

from typer.testing import CliRunner

from fibsum import __version__
from fibsum.cli import app, run

runner = CliRunner()

T2F_TEXT = """\
identity T2F {
  params n in 0..., s in int;
  lhs = 2*sum(k=0..fdiv(n, 2); C(n, 2*k)*F(2*k + s));
  rhs = F(2*n + s) - (-1)^(s)*F(n - s)
}
"""

MUTANT_CATALOG = """\
# group: G-P1

# source: test fixture, sign flipped
identity T2F-mutant {
  params n in 0..., s in int;
  lhs = 2*sum(k=0..fdiv(n, 2); C(n, 2*k)*F(2*k + s));
  rhs = F(2*n + s) + (-1)^(s)*F(n - s)
}
"""


def test_fib_and_lucas() -> None:
    assert runner.invoke(app, ["fib", "10"]).output.strip() == "55"
    assert runner.invoke(app, ["fib", "--", "-4"]).output.strip() == "-3"
    assert runner.invoke(app, ["lucas", "7"]).output.strip() == "29"


def test_version() -> None:
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert f"fibsum {__version__}" in result.output


def test_unknown_command_is_usage_error() -> None:
    assert runner.invoke(app, ["frobnicate"]).exit_code == 2
    assert run(["frobnicate"]) == 2
    assert run(["fib", "3"]) == 0


def test_verify_t2f_grid() -> None:
    result = runner.invoke(app, ["verify", "--id", "T2F", "--grid", "n=0..10;s=-5..5", "--no-summary"])
    assert result.exit_code == 0, result.output
    assert "pass T2F cases=121 skipped=0" in result.output


def test_verify_needs_a_selection() -> None:
    result = runner.invoke(app, ["verify"])
    assert result.exit_code == 2


def test_verify_unknown_id() -> None:
    result = runner.invoke(app, ["verify", "--id", "T2G"])
    assert result.exit_code == 2
    assert "unknown identity id" in result.output
    assert "T2F" in result.output


def test_verify_bad_grid() -> None:
    result = runner.invoke(app, ["verify", "--id", "T2F", "--grid", "n=5..1"])
    assert result.exit_code == 2


def test_verify_failure_exit_code(tmp_path: Path) -> None:
    (tmp_path / "mutant.fib").write_text(MUTANT_CATALOG, encoding="utf-8")
    result = runner.invoke(
        app,
        ["--catalog", str(tmp_path), "verify", "--all", "--grid", "n=0..10;s=-5..5", "--no-summary"],
    )
    assert result.exit_code == 1
    assert "fail T2F-mutant" in result.output
    assert "at n=0, s=-5:" in result.output


def test_verify_missing_catalog_is_io_error(tmp_path: Path) -> None:
    result = runner.invoke(app, ["--catalog", str(tmp_path / "absent"), "verify", "--all"])
    assert result.exit_code == 3


def test_verify_empty_catalog_is_io_error(tmp_path: Path) -> None:
    result = runner.invoke(app, ["--catalog", str(tmp_path), "verify", "--all"])
    assert result.exit_code == 3
    assert "no identities found" in result.output


def test_verify_broken_catalog_is_usage_error(tmp_path: Path) -> None:
    (tmp_path / "bad.fib").write_text("# group: G-P1\nidentity x { lhs = F( }\n", encoding="utf-8")
    result = runner.invoke(app, ["--catalog", str(tmp_path), "verify", "--all"])
    assert result.exit_code == 2
    assert "bad.fib" in result.output


def test_verify_catalog_from_environment(tmp_path: Path, monkeypatch) -> None:
    (tmp_path / "mutant.fib").write_text(MUTANT_CATALOG, encoding="utf-8")
    monkeypatch.setenv("FIBSUM_CATALOG", str(tmp_path))
    result = runner.invoke(app, ["verify", "--id", "T2F-mutant", "--grid", "n=0..2;s=0..1"])
    assert result.exit_code == 1


def test_failing_suspect_keeps_exit_zero(tmp_path: Path) -> None:
    errata = tmp_path / "docs" / "errata.md"
    report = tmp_path / "report.jsonl"
    result = runner.invoke(
        app,
        [
            "verify",
            "--id",
            "G-P2/pow9-f",
            "--id",
            "G-P2/pow9-f-corrected",
            "--grid",
            "n=0..4;s=-3..3",
            "--json",
            str(report),
            "--errata",
            str(errata),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "fail G-P2/pow9-f " in result.output
    assert "pass G-P2/pow9-f-corrected " in result.output
    assert "**corrected-holds**" in errata.read_text(encoding="utf-8")
    rows = [json.loads(line) for line in report.read_text(encoding="utf-8").splitlines()]
    assert [row["id"] for row in rows] == ["G-P2/pow9-f", "G-P2/pow9-f-corrected"]


def test_config_grid_feeds_verify() -> None:
    assert runner.invoke(app, ["config", "--grid", "n=0..3"]).exit_code == 0
    result = runner.invoke(app, ["verify", "--id", "T2F", "--no-summary"])
    assert result.exit_code == 0
    assert "pass T2F cases=52 " in result.output


def test_config_show_and_reset() -> None:
    assert runner.invoke(app, ["config", "--jobs", "3"]).exit_code == 0
    shown = runner.invoke(app, ["config", "--show"])
    assert '"jobs": 3' in shown.output
    assert runner.invoke(app, ["config", "--reset"]).exit_code == 0
    assert '"jobs": 1' in runner.invoke(app, ["config"]).output


def test_eval_file(tmp_path: Path) -> None:
    path = tmp_path / "t2f.fib"
    path.write_text(T2F_TEXT, encoding="utf-8")

    both = runner.invoke(app, ["eval", str(path), "--bind", "n=2,s=0"])
    assert both.exit_code == 0
    assert both.output.splitlines() == ["lhs = 2", "rhs = 2"]

    lhs = runner.invoke(app, ["eval", str(path), "--bind", "n=3,s=1", "--side", "lhs"])
    assert lhs.output.strip() == "14"

    missing = runner.invoke(app, ["eval", str(path), "--bind", "n=2"])
    assert missing.exit_code == 2


def test_eval_detects_disagreement(tmp_path: Path) -> None:
    path = tmp_path / "mutant.fib"
    path.write_text(MUTANT_CATALOG, encoding="utf-8")
    result = runner.invoke(app, ["eval", str(path), "--bind", "n=1,s=0"])
    assert result.exit_code == 1
    assert "lhs = 0" in result.output
    assert "rhs = 2" in result.output


def test_eval_errors(tmp_path: Path) -> None:
    assert runner.invoke(app, ["eval", str(tmp_path / "none.fib")]).exit_code == 3
    broken = tmp_path / "broken.fib"
    broken.write_text("identity bad { lhs = F( }", encoding="utf-8")
    assert runner.invoke(app, ["eval", str(broken)]).exit_code == 2


def test_list_show_groups() -> None:
    listed = runner.invoke(app, ["list", "--group", "G-L3"])
    assert listed.exit_code == 0

    audit = runner.invoke(app, ["list", "--markdown"])
    assert audit.output.startswith("# Catalog audit")
    assert "`T2F`" in audit.output

    shown = runner.invoke(app, ["show", "T2F"])
    assert shown.exit_code == 0
    assert "# group: G-P1" in shown.output
    assert "identity T2F {" in shown.output

    groups = runner.invoke(app, ["groups"])
    assert "G-INTRO" in groups.output

    assert runner.invoke(app, ["list", "--group", "G-ZZ"]).exit_code == 2


def test_bench_commands(tmp_path: Path) -> None:
    result = runner.invoke(app, ["bench", "fib", "--n", "10", "--n", "20", "--reps", "3"])
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert lines[0] == "subject,n,reps,median_ns,digest"
    assert len(lines) == 5

    out = tmp_path / "bench" / "t2f.csv"
    entry = runner.invoke(app, ["bench", "entry", "T2F", "--n", "20", "--reps", "3", "--out", str(out)])
    assert entry.exit_code == 0
    assert out.read_text(encoding="utf-8").splitlines()[1].startswith("T2F:lhs,20,3,")

    assert runner.invoke(app, ["bench", "fib", "--n", "10", "--reps", "1"]).exit_code == 2
    assert runner.invoke(app, ["bench", "entry", "G-P2/pow9-f", "--n", "1", "--reps", "3"]).exit_code == 1

"""End-to-end tests for the command-line interface."""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from sqicube.cli import create_parser, main
from sqicube.report import ErrorTable, read_csv, write_csv


def _golden(tmp_path: Path, name: str, first_error: float = 1e-3) -> Path:
    path = tmp_path / name
    table = ErrorTable.from_errors(
        [6, 8], [(first_error, 2e-3, 3e-3), (5e-4, 1e-3, 1.5e-3)]
    )
    write_csv(table, path)
    return path


class TestCLIParser:
    def test_subcommand_required(self) -> None:
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_empty_n_list(self) -> None:
        with pytest.raises(SystemExit) as info:
            main(["run", "--example", "2", "--N", ""])
        assert info.value.code == 2

    def test_malformed_n_list(self) -> None:
        with pytest.raises(SystemExit) as info:
            main(["run", "--example", "2", "--N", "6,eight"])
        assert info.value.code == 2

    def test_n_list_parsed(self) -> None:
        args = create_parser().parse_args(["run", "--example", "2", "--N", "6,8, 10"])
        assert args.n_values == (6, 8, 10)

    def test_unknown_example(self) -> None:
        with pytest.raises(SystemExit) as info:
            main(["run", "--example", "7"])
        assert info.value.code == 2


class TestCLIConfigErrors:
    def test_neither_config_nor_example(self) -> None:
        assert main(["run"]) == 2

    def test_invalid_override(self) -> None:
        assert main(["run", "--example", "2", "--p", "5", "--N", "6"]) == 2

    def test_bad_manifest(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        manifest = tmp_path / "bad.ini"
        manifest.write_text("[experiment]\nexample = 2\nd = x\n")
        assert main(["run", "--config", str(manifest)]) == 2
        assert "bad.ini:3" in capsys.readouterr().err

    def test_invalid_thread_count(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("SQICUBE_THREADS", "zero")
        assert main(["run", "--example", "2"]) == 2


class TestCLICheck:
    def test_matching_tables(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        table = _golden(tmp_path, "table.csv")
        golden = _golden(tmp_path, "golden.csv")
        assert main(["check", str(table), str(golden)]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_perturbed_table(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        table = _golden(tmp_path, "table.csv", first_error=1e-2)
        golden = _golden(tmp_path, "golden.csv")
        assert main(["check", str(table), str(golden)]) == 1
        assert "MISMATCH N=6, errmax1" in capsys.readouterr().err

    def test_loose_tolerance(self, tmp_path: Path) -> None:
        table = _golden(tmp_path, "table.csv", first_error=1.1e-3)
        golden = _golden(tmp_path, "golden.csv")
        assert main(["check", str(table), str(golden)]) == 1
        assert main(["check", str(table), str(golden), "--rtol", "0.2"]) == 0

    def test_schema_mismatch(self, tmp_path: Path) -> None:
        bad = tmp_path / "bad.csv"
        bad.write_text("N,errmax\n6,1e-3\n")
        assert main(["check", str(bad), str(_golden(tmp_path, "golden.csv"))]) == 1

    def test_missing_file(self, tmp_path: Path) -> None:
        missing = tmp_path / "missing.csv"
        assert main(["check", str(missing), str(missing)]) == 1


class TestCLIOracle:
    def test_prints_value(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["oracle", "--example", "2", "--d", "1", "--s", "0.5", "0.5"]) == 0
        out = capsys.readouterr().out
        value = float(out.splitlines()[0].split("=")[1])
        assert math.isfinite(value) and value > 0


@pytest.mark.slow
class TestCLIRun:
    def test_run_writes_table_and_sidecars(self, tmp_path: Path) -> None:
        manifest = tmp_path / "runs.ini"
        out = tmp_path / "results" / "exact.csv"
        manifest.write_text(
            "[experiment]\n"
            "example = 1\n"
            "d = 1\n"
            "N = 4, 6\n"
            "sources = 0 0; 1 0; 1.1 0\n"
            f"out = {out}\n"
        )
        assert main(["run", "--config", str(manifest), "--check"]) == 0
        table = read_csv(out)
        assert table.n_values == (4, 6)
        assert max(table.column(3)) < 1e-10
        assert (out.parent / "exact.csv.references.csv").exists()
        log = json.loads((out.parent / "exact.csv.json").read_text())
        assert log["acceptance"][-1].startswith("EXACTNESS PASS")
        assert log["config"]["d"] == 1

        # A second run reuses the cached references and reproduces the table.
        assert main(["run", "--config", str(manifest)]) == 0
        assert read_csv(out).column(3) == table.column(3)

    def test_flags_override_manifest(self, tmp_path: Path) -> None:
        manifest = tmp_path / "runs.ini"
        out = tmp_path / "smooth.csv"
        manifest.write_text(
            "[experiment]\nexample = 2\nd = 1\nsources = 0.5 0.5\n"
            f"out = {out}\n"
        )
        assert main(["run", "--config", str(manifest), "--p", "1", "--N", "3,4"]) == 0
        assert read_csv(out).n_values == (3, 4)

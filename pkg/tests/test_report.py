"""Tests for error tables, CSV output and golden comparisons."""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import pytest

from sqicube.experiments import ExperimentResult, preset
from sqicube.reference_oracle import OracleResult
from sqicube.report import (
    CSV_HEADER,
    ErrorTable,
    SchemaMismatchError,
    check_golden,
    format_csv,
    format_table,
    read_csv,
    read_references,
    references_path,
    run_log_path,
    write_csv,
    write_references,
    write_run_log,
)


def _table() -> ErrorTable:
    return ErrorTable.from_errors(
        [6, 8],
        [(1e-3, 2e-3, math.nan), (5e-4, 1e-3, math.nan)],
        metadata={"name": "demo"},
    )


class TestErrorTable:
    def test_orders(self) -> None:
        table = _table()
        assert table.rows[0].orders == (None, None, None)
        assert table.rows[1].orders[0] == pytest.approx(math.log(2.0) / math.log(8.0 / 6.0))
        assert table.rows[1].orders[2] is None

    def test_columns(self) -> None:
        table = _table()
        assert table.n_values == (6, 8)
        assert table.column(2) == [2e-3, 1e-3]

    def test_length_mismatch(self) -> None:
        with pytest.raises(ValueError, match="error rows"):
            ErrorTable.from_errors([6, 8], [(1.0, 1.0, 1.0)])


class TestCsv:
    def test_format(self) -> None:
        lines = format_csv(_table()).splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1] == "6,1.0000e-03,,2.0000e-03,,nan,"
        assert lines[2] == "8,5.0000e-04,2.41,1.0000e-03,2.41,nan,"

    def test_read_back(self, tmp_path: Path) -> None:
        path = tmp_path / "out" / "table.csv"
        write_csv(_table(), path)
        table = read_csv(path)
        assert table.n_values == (6, 8)
        assert table.column(1) == [1e-3, 5e-4]
        assert math.isnan(table.column(3)[0])
        assert table.rows[1].orders[1] == pytest.approx(2.41)

    def test_bad_header(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.csv"
        path.write_text("N,err\n6,1e-3\n")
        with pytest.raises(SchemaMismatchError, match="expected header"):
            read_csv(path)

    def test_bad_cell(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.csv"
        path.write_text(",".join(CSV_HEADER) + "\n6,abc,,1e-3,,1e-3,\n")
        with pytest.raises(SchemaMismatchError, match=":2:"):
            read_csv(path)

    def test_text_table(self) -> None:
        text = format_table(_table())
        assert text.splitlines()[0].split() == list(CSV_HEADER)
        assert "2.41" in text


class TestGolden:
    def test_identical_tables_pass(self) -> None:
        report = check_golden(_table(), _table())
        assert report.passed
        assert report.mismatches == ()

    def test_perturbed_error_fails(self) -> None:
        golden = _table()
        perturbed = ErrorTable.from_errors(
            [6, 8], [(1e-2, 2e-3, math.nan), (5e-4, 1e-3, math.nan)]
        )
        report = check_golden(perturbed, golden)
        assert not report.passed
        assert any("N=6, errmax1" in m for m in report.mismatches)
        # The order of the second row changes too.
        assert any("N=8, o1" in m for m in report.mismatches)

    def test_small_differences_pass(self) -> None:
        close = ErrorTable.from_errors(
            [6, 8], [(1.005e-3, 2e-3, math.nan), (5e-4, 1e-3, math.nan)]
        )
        assert check_golden(close, _table()).passed

    def test_different_n_values(self) -> None:
        other = ErrorTable.from_errors([6, 10], [(1e-3, 1e-3, 1e-3), (1e-4, 1e-4, 1e-4)])
        with pytest.raises(SchemaMismatchError, match="N values differ"):
            check_golden(other, _table())


class TestSidecars:
    def test_paths(self) -> None:
        out = Path("runs/example2.csv")
        assert references_path(out) == Path("runs/example2.csv.references.csv")
        assert run_log_path(out) == Path("runs/example2.csv.json")

    def test_references_keyed(self, tmp_path: Path) -> None:
        path = tmp_path / "refs.csv"
        references = {(0.1, -1.1): OracleResult(0.123456789012345678, 1e-15)}
        write_references(references, "abc", path)
        loaded = read_references(path, "abc")
        assert loaded is not None
        assert loaded[(0.1, -1.1)].value == references[(0.1, -1.1)].value
        assert read_references(path, "other") is None
        assert read_references(tmp_path / "missing.csv", "abc") is None

    def test_run_log(self, tmp_path: Path) -> None:
        config = preset(2)
        result = ExperimentResult(
            config=config,
            table=dataclasses.replace(_table(), metadata={"config_hash": config.config_hash()}),
            references={},
            elapsed=1.23456,
        )
        path = tmp_path / "log.json"
        write_run_log(result, path, ["CONVERGENCE PASS"])
        data = json.loads(path.read_text())
        assert data["config_hash"] == config.config_hash()
        assert data["config"]["function"] == "exp"
        assert data["elapsed_seconds"] == 1.235
        assert data["acceptance"] == ["CONVERGENCE PASS"]
        assert "timestamp" in data

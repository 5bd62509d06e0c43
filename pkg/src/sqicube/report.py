"""Error tables: CSV and JSON output, human-readable formatting and golden checks."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING

from .reference_oracle import OracleResult

if TYPE_CHECKING:
    from .experiments import ExperimentResult

UTC = timezone.utc

CSV_HEADER = ("N", "errmax1", "o1", "errmax2", "o2", "errmax3", "o3")


class SchemaMismatchError(ValueError):
    """Two error tables cannot be compared cell by cell."""


@dataclass(frozen=True)
class ErrorRow:
    n: int
    errmax: tuple[float, float, float]
    orders: tuple[float | None, float | None, float | None]


@dataclass(frozen=True)
class ErrorTable:
    """Rows ``(N, errmax_k, o_k)``; the first row has no orders."""

    rows: tuple[ErrorRow, ...]
    metadata: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def from_errors(
        cls,
        n_values: Sequence[int],
        errors: Sequence[tuple[float, float, float]],
        metadata: Mapping[str, object] | None = None,
    ) -> ErrorTable:
        if len(n_values) != len(errors):
            raise ValueError(f"Got {len(errors)} error rows for {len(n_values)} values of N")
        rows = []
        for k, (n, row) in enumerate(zip(n_values, errors, strict=True)):
            orders = tuple(
                _order(errors[k - 1][c], row[c], n_values[k - 1], n) if k > 0 else None
                for c in range(3)
            )
            rows.append(ErrorRow(n=int(n), errmax=tuple(row), orders=orders))  # type: ignore[arg-type]
        return cls(rows=tuple(rows), metadata=dict(metadata or {}))

    @property
    def n_values(self) -> tuple[int, ...]:
        return tuple(row.n for row in self.rows)

    def column(self, k: int) -> list[float]:
        """The ``errmax{k}`` column, ``k`` in 1..3."""
        return [row.errmax[k - 1] for row in self.rows]


def _order(previous: float, current: float, n_previous: int, n_current: int) -> float | None:
    if not (previous > 0 and current > 0) or math.isnan(previous) or math.isnan(current):
        return None
    return math.log(previous / current) / math.log(n_current / n_previous)


def _format_error(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.4e}"


def _format_order(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


def format_csv(table: ErrorTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in table.rows:
        cells = [str(row.n)]
        for error, order in zip(row.errmax, row.orders, strict=True):
            cells += [_format_error(error), _format_order(order)]
        writer.writerow(cells)
    return buffer.getvalue()


def write_csv(table: ErrorTable, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(table))


def read_csv(path: Path) -> ErrorTable:
    """Parse a table written by ``write_csv``.

    Raises:
        SchemaMismatchError: If the header or a row does not follow the schema.
    """
    with path.open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise SchemaMismatchError(f"{path}: expected header {','.join(CSV_HEADER)}, got {header}")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != len(CSV_HEADER):
                raise SchemaMismatchError(f"{path}:{lineno}: expected {len(CSV_HEADER)} cells")
            try:
                errmax = (float(cells[1]), float(cells[3]), float(cells[5]))
                orders = tuple(float(c) if c else None for c in (cells[2], cells[4], cells[6]))
                rows.append(ErrorRow(n=int(cells[0]), errmax=errmax, orders=orders))  # type: ignore[arg-type]
            except ValueError as e:
                raise SchemaMismatchError(f"{path}:{lineno}: {e}") from e
    return ErrorTable(rows=tuple(rows))


def format_table(table: ErrorTable) -> str:
    """Aligned text rendering for the terminal."""
    lines = ["  ".join(f"{h:>10}" for h in CSV_HEADER)]
    for row in table.rows:
        cells = [str(row.n)]
        for error, order in zip(row.errmax, row.orders, strict=True):
            cells += [_format_error(error), _format_order(order)]
        lines.append("  ".join(f"{c:>10}" for c in cells))
    return "\n".join(lines)


@dataclass(frozen=True)
class GoldenReport:
    passed: bool
    mismatches: tuple[str, ...]


def check_golden(
    table: ErrorTable,
    golden: ErrorTable,
    rtol: float = 1e-2,
    order_tol: float = 0.5,
) -> GoldenReport:
    """Compare errors relatively and orders absolutely, cell by cell.

    Raises:
        SchemaMismatchError: If the tables have different ``N`` columns.
    """
    if table.n_values != golden.n_values:
        raise SchemaMismatchError(
            f"N values differ: {list(table.n_values)} vs golden {list(golden.n_values)}"
        )
    mismatches: list[str] = []
    for row, expected in zip(table.rows, golden.rows, strict=True):
        for k in range(3):
            got, want = row.errmax[k], expected.errmax[k]
            same_nan = math.isnan(got) and math.isnan(want)
            if not same_nan and not abs(got - want) <= rtol * abs(want):
                mismatches.append(
                    f"N={row.n}, errmax{k + 1}: {_format_error(got)} vs golden {_format_error(want)}"
                )
            got_o, want_o = row.orders[k], expected.orders[k]
            if (got_o is None) != (want_o is None) or (
                got_o is not None and want_o is not None and abs(got_o - want_o) > order_tol
            ):
                mismatches.append(
                    f"N={row.n}, o{k + 1}: {_format_order(got_o)!r} vs golden {_format_order(want_o)!r}"
                )
    return GoldenReport(passed=not mismatches, mismatches=tuple(mismatches))


def references_path(out: Path) -> Path:
    return out.with_name(out.name + ".references.csv")


def run_log_path(out: Path) -> Path:
    return out.with_name(out.name + ".json")


def write_references(references: Mapping[tuple[float, float], OracleResult], key: str, path: Path) -> None:
    """Cache reference integrals; ``key`` identifies what they were computed for."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        f.write(f"# key={key}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("s1", "s2", "value", "error_estimate"))
        for (s1, s2), result in references.items():
            writer.writerow((repr(s1), repr(s2), repr(result.value), repr(result.error_estimate)))


def read_references(path: Path, key: str) -> dict[tuple[float, float], OracleResult] | None:
    """Cached references, or ``None`` when missing or computed for another key."""
    if not path.exists():
        return None
    with path.open(newline="") as f:
        if f.readline().strip() != f"# key={key}":
            return None
        reader = csv.DictReader(f)
        return {
            (float(r["s1"]), float(r["s2"])): OracleResult(
                value=float(r["value"]), error_estimate=float(r["error_estimate"])
            )
            for r in reader
        }


def write_run_log(result: ExperimentResult, path: Path, acceptance: Sequence[str] | None = None) -> None:
    """JSON companion of the CSV with the run metadata."""
    log_data = {
        "timestamp": datetime.now(UTC).isoformat(),
        "elapsed_seconds": round(result.elapsed, 3),
        "config": result.config.to_dict(),
        **{key: value for key, value in result.table.metadata.items()},
        "acceptance": list(acceptance) if acceptance is not None else None,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(log_data, indent=2) + "\n")

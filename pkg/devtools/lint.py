"""Lint and fast-test runner for sqicube development."""

import argparse
import subprocess

from funlog import log_calls
from rich import get_console, reconfigure
from rich import print as rprint

SRC_PATHS = ["src", "tests", "devtools"]
DOC_PATHS = ["README.md", "docs", "DESIGN.md"]

# Steps in run order. Each entry is (name, command).
LINT_STEPS: list[tuple[str, list[str]]] = [
    ("spelling", ["codespell", "--write-changes", *SRC_PATHS, *DOC_PATHS]),
    ("ruff check", ["ruff", "check", "--fix", *SRC_PATHS]),
    ("ruff format", ["ruff", "format", *SRC_PATHS]),
    ("types", ["basedpyright", "--stats", *SRC_PATHS]),
]
TEST_STEP = ("fast tests", ["pytest", "-q", "-m", "not slow"])


reconfigure(emoji=not get_console().options.legacy_windows)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Run linters (and optionally fast tests).")
    parser.add_argument(
        "--tests", action="store_true", help="also run the test suite without slow sweeps"
    )
    args = parser.parse_args(argv)

    steps = [*LINT_STEPS, TEST_STEP] if args.tests else LINT_STEPS
    failed = [name for name, cmd in steps if run(cmd) != 0]

    rprint()
    if failed:
        rprint(f"[bold red]:x: Failed: {', '.join(failed)}[/bold red]")
    else:
        rprint(f"[bold green]:white_check_mark: All {len(steps)} steps passed[/bold green]")
    rprint()
    return len(failed)


@log_calls(level="warning", show_timing_only=True)
def run(cmd: list[str]) -> int:
    rprint(f"\n[bold green]>> {' '.join(cmd)}[/bold green]")
    try:
        subprocess.run(cmd, text=True, check=True)
    except KeyboardInterrupt:
        rprint("[yellow]Cancelled[/yellow]")
        return 1
    except (subprocess.CalledProcessError, FileNotFoundError) as e:
        rprint(f"[bold red]Error: {e}[/bold red]")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

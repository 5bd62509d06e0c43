"""Tests for experiment configuration, manifests and acceptance checks."""

from __future__ import annotations

import math
from pathlib import Path

import pytest

from sqicube.experiments import (
    PUBLISHED_ERRORS,
    ConfigError,
    ExperimentConfig,
    Pipeline,
    SourceRegion,
    apply_overrides,
    check_acceptance,
    classify_source,
    compare_runs,
    default_sources,
    load_config,
    parse_sources,
    preset,
    resolve_threads,
    run_experiment,
)
from sqicube.report import ErrorTable

SUPPORT = ((-1.0, 1.0), (-1.0, 1.0))


class TestSources:
    def test_default_grid(self) -> None:
        sources = default_sources()
        assert len(sources) == 49
        regions = [classify_source(s, SUPPORT) for s in sources]
        assert regions.count(SourceRegion.OUTSIDE) == 24
        assert regions.count(SourceRegion.BOUNDARY) == 16
        assert regions.count(SourceRegion.INSIDE) == 9

    def test_classification(self) -> None:
        assert classify_source((0.0, 0.0), SUPPORT) is SourceRegion.INSIDE
        assert classify_source((1.0, 0.5), SUPPORT) is SourceRegion.BOUNDARY
        assert classify_source((-1.0, -1.0), SUPPORT) is SourceRegion.BOUNDARY
        assert classify_source((1.1, 0.0), SUPPORT) is SourceRegion.OUTSIDE

    def test_parse_sources(self) -> None:
        assert parse_sources("-1.1 0; 0.5, 0.5") == ((-1.1, 0.0), (0.5, 0.5))
        assert parse_sources("default") == default_sources()
        with pytest.raises(ValueError, match="two coordinates"):
            parse_sources("1 2 3")


class TestConfig:
    def test_presets(self) -> None:
        assert preset(1).relative
        assert preset(2).function == "exp"
        assert preset(3).pipeline is Pipeline.MULTIPLICATIVE
        assert preset(4).surface == "hyperboloid"
        assert preset(4).wavenumber == pytest.approx(math.pi / 2)

    def test_unknown_preset(self) -> None:
        with pytest.raises(ConfigError, match="Unknown example"):
            preset(5)

    def test_n_values_checked(self) -> None:
        with pytest.raises(ConfigError, match="empty"):
            preset(2, n_values=())
        with pytest.raises(ConfigError, match="at least p"):
            preset(2, p=3, n_values=(4, 6))
        with pytest.raises(ConfigError, match="increasing"):
            preset(2, n_values=(8, 6))

    def test_pipeline_needs_surface(self) -> None:
        with pytest.raises(ConfigError, match="needs a surface"):
            ExperimentConfig(pipeline=Pipeline.SUBTRACTIVE, matrix=(1.0, 0.0, 1.0))

    def test_matrix_must_be_positive_definite(self) -> None:
        with pytest.raises(ConfigError, match="positive definite"):
            ExperimentConfig(matrix=(1.0, 1.0, 1.0))

    def test_source_too_far(self) -> None:
        with pytest.raises(ConfigError, match="too far"):
            preset(2, sources=((2.0, 0.0),))

    def test_custom_weight_knots(self) -> None:
        config = preset(2, weight_knots=(-1.0, -0.2, 0.4, 1.0))
        assert config.weight().support == SUPPORT
        with pytest.raises(ConfigError, match="weight knots"):
            preset(2, weight_knots=(-1.0, 1.0))

    def test_hash_tracks_every_setting(self) -> None:
        config = preset(2)
        assert config.config_hash() == preset(2).config_hash()
        assert config.config_hash() != preset(2, p=3).config_hash()
        assert config.config_hash() != apply_overrides(config, gauss_order=20).config_hash()

    def test_reference_key_ignores_discretization(self) -> None:
        config = preset(2)
        assert config.reference_key() == preset(2, p=4, n_values=(8, 10)).reference_key()
        assert config.reference_key() != preset(2, function="one").reference_key()

    def test_overrides(self) -> None:
        config = apply_overrides(preset(2), p=3, gauss_order=20, relative=None)
        assert config.p == 3
        assert config.quad.gauss_order == 20
        assert not config.relative

    def test_override_example_resets_preset(self) -> None:
        config = apply_overrides(preset(2, name="mine"), example=3)
        assert config.pipeline is Pipeline.MULTIPLICATIVE
        assert config.name == "mine"

    def test_bad_override(self) -> None:
        with pytest.raises(ConfigError):
            apply_overrides(preset(2), grading=2.0)


class TestManifest:
    def test_named_sections_inherit_defaults(self, tmp_path: Path) -> None:
        manifest = tmp_path / "runs.ini"
        manifest.write_text(
            "[experiment]\n"
            "d = 3\n"
            "N = 6, 8\n"
            "\n"
            "[experiment.smooth]\n"
            "example = 2\n"
            "p = 3\n"
            "\n"
            "[experiment.cylinder]\n"
            "example = 3\n"
            "sources = 0 0; 1.1 0\n"
            "moment_tol = 1e-10\n"
        )
        smooth, cyl = load_config(manifest)
        assert (smooth.name, smooth.d, smooth.p, smooth.n_values) == ("smooth", 3, 3, (6, 8))
        assert cyl.pipeline is Pipeline.MULTIPLICATIVE
        assert cyl.sources == ((0.0, 0.0), (1.1, 0.0))
        assert cyl.quad.target_accuracy == 1e-10

    def test_custom_experiment_without_example(self, tmp_path: Path) -> None:
        manifest = tmp_path / "custom.ini"
        manifest.write_text(
            "[experiment]\nfunction = one\nmatrix = 2, 0.5, 1\nrelative = yes\n"
        )
        (config,) = load_config(manifest)
        assert config.matrix == (2.0, 0.5, 1.0)
        assert config.relative

    def test_invalid_value_reports_line(self, tmp_path: Path) -> None:
        manifest = tmp_path / "bad.ini"
        manifest.write_text("[experiment]\nexample = 2\np = two\n")
        with pytest.raises(ConfigError, match=r"bad\.ini:3: \[experiment\] p"):
            load_config(manifest)

    def test_unknown_key(self, tmp_path: Path) -> None:
        manifest = tmp_path / "bad.ini"
        manifest.write_text("[experiment]\nexample = 2\ncolour = red\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config(manifest)

    def test_unknown_section(self, tmp_path: Path) -> None:
        manifest = tmp_path / "bad.ini"
        manifest.write_text("[experiment]\nexample = 2\n[plots]\nstyle = dark\n")
        with pytest.raises(ConfigError, match="unknown sections"):
            load_config(manifest)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="Cannot read"):
            load_config(tmp_path / "missing.ini")


class TestThreads:
    def test_explicit_value(self) -> None:
        assert resolve_threads("3") == 3

    @pytest.mark.parametrize("raw", ["0", "-2", "many"])
    def test_invalid_value(self, raw: str) -> None:
        with pytest.raises(ConfigError, match="positive integer"):
            resolve_threads(raw)

    def test_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("SQICUBE_THREADS", "2")
        assert resolve_threads() == 2


class TestAcceptance:
    def test_exactness(self) -> None:
        table = ErrorTable.from_errors([6, 8], [(1e-13, 2e-14, 5e-14), (3e-14, 1e-13, 1e-14)])
        report = check_acceptance(preset(1), table)
        assert report.passed
        assert report.messages[-1].startswith("EXACTNESS PASS")

    def test_exactness_failure(self) -> None:
        table = ErrorTable.from_errors([6, 8], [(1e-13, 2e-14, 5e-9), (3e-14, 1e-13, 1e-14)])
        assert not check_acceptance(preset(1), table).passed

    def test_convergence(self) -> None:
        n_values = (6, 8, 10)
        errors = [PUBLISHED_ERRORS[(2, 3)][n] for n in n_values]
        table = ErrorTable.from_errors(n_values, errors)
        report = check_acceptance(preset(2, p=3, n_values=n_values), table)
        assert report.passed
        assert report.messages[-1] == "PUBLISHED PASS"

    def test_convergence_far_from_published(self) -> None:
        n_values = (6, 8, 10)
        errors = [tuple(20.0 * e for e in PUBLISHED_ERRORS[(2, 3)][n]) for n in n_values]
        table = ErrorTable.from_errors(n_values, errors)  # type: ignore[arg-type]
        report = check_acceptance(preset(2, p=3, n_values=n_values), table)
        assert not report.passed
        assert "CONVERGENCE PASS" in report.messages
        assert report.messages[-1] == "PUBLISHED FAIL"

    def test_published_values_only_for_the_preset_integrand(self) -> None:
        n_values = (6, 8, 10)
        errors = [tuple(c * n**-4.0 for c in (1.0, 2.0, 3.0)) for n in n_values]
        table = ErrorTable.from_errors(n_values, errors)  # type: ignore[arg-type]
        config = preset(2, p=3, n_values=n_values, function="quadratic")
        report = check_acceptance(config, table)
        assert report.passed
        assert report.messages[-1] == "CONVERGENCE PASS"

    def test_convergence_too_slow(self) -> None:
        n_values = (6, 8, 10)
        errors = [tuple(c * n ** -2.0 for c in (1.0, 2.0, 3.0)) for n in n_values]
        table = ErrorTable.from_errors(n_values, errors)  # type: ignore[arg-type]
        report = check_acceptance(preset(2, p=3, n_values=n_values), table)
        assert not report.passed
        assert report.messages[-1] == "CONVERGENCE FAIL"

    def test_monotone_allows_one_small_outside_bump(self) -> None:
        n_values = (6, 8, 10, 12)
        errors = [(1e-3, 1e-3, 1e-3), (1.05e-3, 5e-4, 5e-4), (5e-4, 2e-4, 2e-4), (2e-4, 1e-4, 1e-4)]
        table = ErrorTable.from_errors(n_values, errors)
        assert check_acceptance(preset(4, n_values=n_values), table).passed

    def test_monotone_rejects_growth_inside(self) -> None:
        n_values = (6, 8)
        errors = [(1e-3, 1e-3, 1e-4), (5e-4, 5e-4, 2e-4)]
        table = ErrorTable.from_errors(n_values, errors)
        assert not check_acceptance(preset(4, n_values=n_values), table).passed

    @pytest.mark.parametrize(("errmax3", "passed"), [(1e-5, True), (1e-6, False), (8e-5, False)])
    def test_cylinder_band(self, errmax3: float, passed: bool) -> None:
        n_values = (12, 14)
        errors = [(1e-3, 1e-3, 1e-4), (5e-4, 5e-4, errmax3)]
        table = ErrorTable.from_errors(n_values, errors)
        report = check_acceptance(preset(3, n_values=n_values), table)
        assert report.passed is passed
        assert report.messages[-1].startswith("BAND PASS" if passed else "BAND FAIL")


def _table(n_values: tuple[int, ...], scale: float) -> ErrorTable:
    return ErrorTable.from_errors(
        n_values, [(scale * n**-4.0, 2 * scale * n**-4.0, 3 * scale * n**-4.0) for n in n_values]
    )


class TestCompareRuns:
    N = (12, 14)

    def test_cylinder_degrees_agree(self) -> None:
        runs = [
            (preset(3, p=2, n_values=self.N), _table(self.N, 1.0)),
            (preset(3, p=3, n_values=self.N), _table(self.N, 0.5)),
        ]
        report = compare_runs(runs)
        assert report.passed
        assert len(report.messages) == 2

    def test_cylinder_degrees_differ_too_much(self) -> None:
        runs = [
            (preset(3, p=2, n_values=self.N), _table(self.N, 1.0)),
            (preset(3, p=3, n_values=self.N), _table(self.N, 0.1)),
        ]
        assert not compare_runs(runs).passed

    def test_hyperboloid_is_harder(self) -> None:
        runs = [
            (preset(3, p=2, n_values=self.N), _table(self.N, 1.0)),
            (preset(4, p=2, n_values=self.N), _table(self.N, 2.0)),
        ]
        report = compare_runs(runs)
        assert report.passed
        assert report.messages == ("HARDER THAN CYLINDER PASS (d=2, p=2)",)

    def test_hyperboloid_not_harder(self) -> None:
        runs = [
            (preset(3, p=2, n_values=self.N), _table(self.N, 1.0)),
            (preset(4, p=2, n_values=self.N), _table(self.N, 0.5)),
        ]
        report = compare_runs(runs)
        assert not report.passed
        assert "not worse at N=[12, 14]" in report.messages[0]

    @pytest.mark.parametrize(("scale", "passed"), [(0.5, True), (1.0, False), (2.0, False)])
    def test_hyperboloid_higher_degree(self, scale: float, passed: bool) -> None:
        runs = [
            (preset(4, p=2, n_values=self.N), _table(self.N, 1.0)),
            (preset(4, p=3, n_values=self.N), _table(self.N, scale)),
        ]
        report = compare_runs(runs)
        assert report.passed is passed
        assert report.messages[0].startswith("HIGHER DEGREE")

    def test_modified_presets_are_skipped(self) -> None:
        runs = [
            (preset(4, p=2, n_values=self.N, wavenumber=3.0), _table(self.N, 1.0)),
            (preset(4, p=3, n_values=self.N, wavenumber=3.0), _table(self.N, 2.0)),
        ]
        report = compare_runs(runs)
        assert report.passed
        assert report.messages == ()


@pytest.mark.slow
class TestRunExperiment:
    def test_quadratic_is_integrated_exactly(self) -> None:
        config = preset(1, d=1, n_values=(4, 6), sources=((0.0, 0.0), (1.0, 0.0), (1.1, 0.0)))
        result = run_experiment(config, threads=2)
        assert result.table.n_values == (4, 6)
        for k in (1, 2, 3):
            assert max(result.table.column(k)) < 1e-10
        assert set(result.references) == set(config.sources)
        assert result.table.metadata["config_hash"] == config.config_hash()

    def test_missing_region_gives_nan(self) -> None:
        config = preset(2, d=1, p=1, n_values=(4, 6), sources=((0.2, 0.1),))
        table = run_experiment(config, threads=1).table
        assert math.isnan(table.column(1)[0])
        assert math.isnan(table.column(2)[0])
        assert table.column(3)[1] < table.column(3)[0]

    def test_cached_references_are_reused(self) -> None:
        config = preset(2, d=1, p=1, n_values=(3, 4), sources=((0.5, 0.5),))
        first = run_experiment(config, threads=1)
        second = run_experiment(config, references=first.references, threads=1)
        assert second.references == first.references
        assert second.table.column(3) == first.table.column(3)

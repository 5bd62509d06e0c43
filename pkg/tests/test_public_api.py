"""Tests that the public API is accessible from the top-level package."""

from __future__ import annotations


class TestPublicAPI:
    def test_spline_types_importable(self) -> None:
        from sqicube import (
            BSplineWeight,
            KnotVector,
            Spline1D,
            SplineError,
            TensorSpline2D,
            clamped_knot_vector,
            uniform_weight,
        )

        assert issubclass(SplineError, ValueError)
        weight = uniform_weight(2)
        assert isinstance(weight, BSplineWeight)
        assert isinstance(weight.spline_u, Spline1D)
        assert isinstance(clamped_knot_vector(1, [0.0, 1.0]), KnotVector)
        assert TensorSpline2D is not None

    def test_error_hierarchy(self) -> None:
        from sqicube import (
            ConfigError,
            DegenerateSurfaceError,
            OracleConvergenceError,
            QIError,
            SchemaMismatchError,
            SingularPointError,
            SourceTooFarError,
            SplineError,
        )

        assert issubclass(QIError, SplineError)
        assert issubclass(ConfigError, ValueError)
        assert issubclass(DegenerateSurfaceError, ValueError)
        assert issubclass(SourceTooFarError, ValueError)
        assert issubclass(SchemaMismatchError, ValueError)
        assert issubclass(SingularPointError, ArithmeticError)
        assert issubclass(OracleConvergenceError, RuntimeError)

    def test_cubature_functions_importable(self) -> None:
        from sqicube import (
            CubatureRule,
            integrate_multiplicative,
            integrate_subtractive,
            integrate_weakly_singular,
            modified_moments,
            reference_integral,
        )

        assert callable(integrate_weakly_singular)
        assert callable(integrate_multiplicative)
        assert callable(integrate_subtractive)
        assert callable(modified_moments)
        assert callable(reference_integral)
        assert CubatureRule is not None

    def test_validation_helpers_importable(self) -> None:
        from sqicube import SampleGrid2D, as_sampler, check_derivatives, compare_runs

        assert callable(check_derivatives)
        assert callable(compare_runs)
        assert callable(as_sampler)
        assert SampleGrid2D([[0.0]], [0.0], [0.0]).shape == (1, 1)

    def test_main_importable(self) -> None:
        from sqicube import main

        assert callable(main)

    def test_all_is_complete(self) -> None:
        import sqicube

        for name in sqicube.__all__:
            assert hasattr(sqicube, name), name
        assert len(set(sqicube.__all__)) == len(sqicube.__all__)
        assert {"main", "CubatureRule", "run_experiment", "check_golden"} <= set(sqicube.__all__)

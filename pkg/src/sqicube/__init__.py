__all__ = (  # noqa: F405
    # CLI
    "main",
    # B-splines
    "BernsteinPieces",
    "BSplineWeight",
    "KnotVector",
    "Spline1D",
    "SplineError",
    "TensorSpline2D",
    "bezier_extract",
    "clamped_knot_vector",
    "eval_basis",
    "eval_spline_1d",
    "eval_spline_2d",
    "format_knots",
    "greville_abscissae",
    "merge_knot_vectors",
    "parse_knots",
    "uniform_weight",
    # Quasi-interpolation
    "QIError",
    "QIOperator",
    "SampleGrid2D",
    "apply_qi_1d",
    "apply_qi_tensor",
    "build_qi",
    "sample_grid",
    # Spline products
    "ProductCoefficients",
    "ProductSpace",
    "multiply_1d",
    "multiply_tensor",
    # Geometry
    "DegenerateSurfaceError",
    "MetricMatrix",
    "SingularPointError",
    "SurfacePatch",
    "builtin_surface",
    "check_derivatives",
    "first_fundamental_form",
    "jacobian",
    "kernel_G",
    "kernel_K",
    "quadratic_form",
    "rho",
    # Modified moments
    "MomentVector",
    "SingularQuadConfig",
    "SourceTooFarError",
    "modified_moments",
    "nearly_singular_cell_integral",
    "singular_cell_integral",
    # Cubature
    "CubatureRule",
    "IntegrandSampler",
    "as_sampler",
    "convergence_order",
    "integrate_multiplicative",
    "integrate_subtractive",
    "integrate_weakly_singular",
    "regular_integral",
    # Reference integrals
    "OracleConvergenceError",
    "OracleRequest",
    "OracleResult",
    "reference_integral",
    # Experiments and reports
    "ConfigError",
    "ErrorTable",
    "ExperimentConfig",
    "Pipeline",
    "SchemaMismatchError",
    "SourceRegion",
    "check_acceptance",
    "compare_runs",
    "check_golden",
    "load_config",
    "oracle_table",
    "preset",
    "read_csv",
    "run_experiment",
    "write_csv",
)

from .sqicube import *  # noqa: F403

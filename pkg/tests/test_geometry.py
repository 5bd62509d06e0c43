"""Tests for surface patches, metrics and kernels."""

from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sqicube.geometry import (
    DERIVATIVE_TOLERANCE,
    SURFACES,
    DegenerateSurfaceError,
    MetricMatrix,
    SingularPointError,
    SurfacePatch,
    builtin_surface,
    check_derivatives,
    cylinder,
    first_fundamental_form,
    hyperboloid,
    jacobian,
    kernel_G,
    kernel_K,
    plane,
    quadratic_form,
    rho,
)


class TestMetricMatrix:
    def test_identity(self) -> None:
        A = MetricMatrix.identity()
        assert A.det == 1.0
        assert A.is_spd

    def test_semidefinite_rejected(self) -> None:
        A = MetricMatrix(1.0, 1.0, 1.0)
        assert not A.is_spd
        with pytest.raises(DegenerateSurfaceError, match="not positive definite"):
            A.require_spd()

    def test_from_array_requires_symmetry(self) -> None:
        with pytest.raises(DegenerateSurfaceError, match="symmetric"):
            MetricMatrix.from_array([[1.0, 0.2], [0.3, 1.0]])
        assert MetricMatrix.from_array([[2.0, 0.5], [0.5, 1.0]]).as_tuple() == (2.0, 0.5, 1.0)


class TestSurfaces:
    def test_cylinder_metric(self) -> None:
        A = first_fundamental_form(cylinder(2.0), (0.0, 0.0))
        assert A.e == pytest.approx((math.pi / 2) ** 2)
        assert A.f == pytest.approx(0.0, abs=1e-15)
        assert A.g == pytest.approx(1.0)

    def test_hyperboloid_metric(self) -> None:
        A = first_fundamental_form(hyperboloid(), (0.0, 0.0))
        assert A.e == pytest.approx((math.pi / 4) ** 2)
        assert A.g == pytest.approx(1.0)

    def test_cylinder_jacobian_is_constant(self) -> None:
        t = np.linspace(-1.0, 1.0, 5)
        assert_allclose(jacobian(cylinder(2.0), t, t[::-1]), math.pi / 2)

    def test_finite_difference_tangents(self) -> None:
        exact = hyperboloid(0.5)
        approx = SurfacePatch("fd", exact.domain, exact.point)
        s = (0.3, -0.4)
        assert_allclose(
            first_fundamental_form(approx, s).as_tuple(),
            first_fundamental_form(exact, s).as_tuple(),
            rtol=1e-7,
            atol=1e-9,
        )

    @pytest.mark.parametrize("name", sorted(SURFACES))
    def test_builtin_tangents_match_central_differences(self, name: str) -> None:
        assert check_derivatives(builtin_surface(name)) <= DERIVATIVE_TOLERANCE

    def test_wrong_tangents_rejected(self) -> None:
        def point(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
            return np.stack(np.broadcast_arrays(t1, t2, t1 * t2), axis=-1)

        def tangents(t1: np.ndarray, t2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            ones, zeros = np.ones_like(t1), np.zeros_like(t1)
            # d/dt1 of the third component should be t2.
            return (
                np.stack(np.broadcast_arrays(ones, zeros, zeros), axis=-1),
                np.stack(np.broadcast_arrays(zeros, ones, t1), axis=-1),
            )

        with pytest.raises(DegenerateSurfaceError, match="central differences"):
            SurfacePatch("saddle", ((-1.0, 1.0), (-1.0, 1.0)), point, tangents)

    def test_unknown_surface(self) -> None:
        with pytest.raises(DegenerateSurfaceError, match="Unknown surface"):
            builtin_surface("torus")

    def test_bad_parameters(self) -> None:
        with pytest.raises(DegenerateSurfaceError):
            builtin_surface("cylinder", (-1.0,))
        with pytest.raises(DegenerateSurfaceError, match="Bad parameters"):
            builtin_surface("plane", (1.0,))

    def test_degenerate_patch(self) -> None:
        flat = SurfacePatch(
            "line",
            ((-1.0, 1.0), (-1.0, 1.0)),
            lambda t1, t2: np.stack(np.broadcast_arrays(t1, t1, t1), axis=-1),
        )
        with pytest.raises(DegenerateSurfaceError, match="degenerate"):
            first_fundamental_form(flat, (0.0, 0.0))


class TestKernels:
    def test_quadratic_form(self) -> None:
        A = MetricMatrix(2.0, 0.5, 1.0)
        assert float(quadratic_form(A, (0.0, 0.0), 1.0, 1.0)) == pytest.approx(4.0)

    def test_model_kernel_singular_point(self) -> None:
        with pytest.raises(SingularPointError):
            kernel_K(MetricMatrix.identity(), (0.0, 0.0), np.array([0.0, 1.0]), np.array([0.0, 1.0]))

    def test_exact_kernel_on_plane_equals_model(self) -> None:
        t1 = np.array([0.5, -0.3])
        t2 = np.array([0.1, 0.9])
        s = (0.2, 0.2)
        assert_allclose(
            kernel_G(plane(), s, t1, t2), kernel_K(MetricMatrix.identity(), s, t1, t2), rtol=1e-14
        )

    def test_rho_is_one_at_source(self) -> None:
        surface = cylinder(2.0)
        s = (0.25, -0.5)
        assert float(rho(surface, s, s[0], s[1])) == 1.0

    def test_rho_tends_to_one(self) -> None:
        surface = hyperboloid()
        s = (0.1, 0.2)
        values = rho(surface, s, s[0] + np.array([1e-2, 1e-4]), s[1] + np.array([1e-2, -1e-4]))
        assert abs(values[1] - 1.0) < abs(values[0] - 1.0)
        assert values[1] == pytest.approx(1.0, abs=1e-3)

    def test_rho_on_cylinder_chord(self) -> None:
        # Along the circle direction the chord is 2 r sin(omega dt / 2).
        surface = cylinder(2.0)
        omega = math.pi / 4
        dt = 0.8
        expected = 2.0 * omega * dt / (2.0 * 2.0 * math.sin(omega * dt / 2.0))
        assert float(rho(surface, (0.0, 0.0), dt, 0.0)) == pytest.approx(expected)

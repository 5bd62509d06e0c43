"""Tests for the adaptive reference integrator."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sqicube.reference_oracle import OracleConvergenceError, OracleRequest, reference_integral

SQUARE = ((-1.0, 1.0), (-1.0, 1.0))


def _inverse_distance(t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    return 1.0 / np.hypot(t1, t2)


class TestReferenceIntegral:
    def test_polynomial(self) -> None:
        request = OracleRequest(integrand=lambda t1, t2: t1**2 * t2**2, domain=((0.0, 1.0), (0.0, 1.0)))
        assert reference_integral(request).value == pytest.approx(1.0 / 9.0, rel=1e-14)

    def test_inverse_distance_closed_form(self) -> None:
        request = OracleRequest(integrand=_inverse_distance, domain=SQUARE, singular_point=(0.0, 0.0))
        result = reference_integral(request)
        assert result.value == pytest.approx(8.0 * math.asinh(1.0), rel=1e-12)
        assert result.error_estimate < 1e-10

    def test_singular_point_off_grid(self) -> None:
        s = (0.37, -0.21)
        request = OracleRequest(
            integrand=lambda t1, t2: 1.0 / np.hypot(t1 - s[0], t2 - s[1]),
            domain=((0.0, 1.0), (-1.0, 0.0)),
            singular_point=s,
        )
        # Four corner rectangles around s, each with the closed form of int 1/|t|.
        def corner(a: float, b: float) -> float:
            return a * math.asinh(b / a) + b * math.asinh(a / b)

        expected = (
            corner(0.37, 0.79) + corner(0.63, 0.79) + corner(0.37, 0.21) + corner(0.63, 0.21)
        )
        assert reference_integral(request).value == pytest.approx(expected, rel=1e-12)

    def test_kinks_at_breaks(self) -> None:
        request = OracleRequest(
            integrand=lambda t1, t2: np.abs(t1 - 0.3) * np.ones_like(t2),
            domain=((0.0, 1.0), (0.0, 2.0)),
            breaks_u=(0.3,),
        )
        assert reference_integral(request).value == pytest.approx(2.0 * (0.045 + 0.245), rel=1e-14)

    def test_processing_order_does_not_matter(self) -> None:
        base = dict(integrand=_inverse_distance, domain=SQUARE, singular_point=(0.0, 0.0))
        first = reference_integral(OracleRequest(**base, seed=1))  # type: ignore[arg-type]
        second = reference_integral(OracleRequest(**base, seed=2))  # type: ignore[arg-type]
        assert first.value == second.value
        assert first.n_cells == second.n_cells

    def test_zero_integrand(self) -> None:
        request = OracleRequest(integrand=lambda t1, t2: np.zeros_like(t1), domain=SQUARE)
        assert reference_integral(request).value == 0.0

    def test_convergence_failure(self) -> None:
        request = OracleRequest(
            integrand=lambda t1, t2: (t1 > 1.0 / 3.0).astype(float),
            domain=SQUARE,
            target_accuracy=1e-14,
            max_depth=2,
        )
        with pytest.raises(OracleConvergenceError) as info:
            reference_integral(request)
        assert info.value.best_estimate == pytest.approx(4.0 / 3.0, rel=0.1)
        assert info.value.error_estimate > 0

    def test_singular_point_next_to_a_break(self) -> None:
        s = (0.5 + 1e-14, 0.0)
        request = OracleRequest(
            integrand=lambda t1, t2: 1.0 / np.hypot(t1 - s[0], t2 - s[1]),
            domain=((0.0, 1.0), (-1.0, 1.0)),
            singular_point=s,
            breaks_u=(0.5,),
        )
        expected = 4.0 * (0.5 * math.asinh(2.0) + math.asinh(0.5))
        assert reference_integral(request).value == pytest.approx(expected, rel=1e-11)


class TestOracleRequest:
    @pytest.mark.parametrize(
        "changes",
        [
            {"target_accuracy": 1e-16},
            {"target_accuracy": 1.0},
            {"max_depth": 0},
            {"domain": ((1.0, -1.0), (-1.0, 1.0))},
            {"domain": ((0.0, 0.0), (-1.0, 1.0))},
            {"domain": ((0.0, math.inf), (-1.0, 1.0))},
        ],
    )
    def test_invalid_settings(self, changes: dict[str, object]) -> None:
        fields: dict[str, object] = {"integrand": _inverse_distance, "domain": SQUARE, **changes}
        with pytest.raises(ValueError):
            OracleRequest(**fields)  # type: ignore[arg-type]

    def test_smallest_target_accepted(self) -> None:
        request = OracleRequest(integrand=_inverse_distance, domain=SQUARE, target_accuracy=1e-14)
        assert request.target_accuracy == 1e-14

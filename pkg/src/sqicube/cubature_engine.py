"""Cubature of weakly singular integrals against a B-spline weight.

The basic rule approximates

    int_{R_I} K(s, t) B_{I,d}(t) f(t) dt  ~  sum_i mu_i lambda^Pi_i

where ``f`` is replaced by its tensor quasi-interpolant ``sigma``, the product
``sigma * B_{I,d}`` is written exactly in B-spline form (coefficients
``lambda^Pi``) and ``mu`` are the modified moments of the product space.

``CubatureRule`` holds everything that depends only on the weight, the QI
degree and the number of intervals, plus a cache of moment vectors keyed by
source point and metric.
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .bspline_core import BSplineWeight, FloatArray, breakpoints
from .geometry import (
    MetricMatrix,
    Point,
    Rect,
    SurfacePatch,
    first_fundamental_form,
    kernel_G,
    kernel_K,
    rho,
)
from .quadrature import Integrand, corner_duffy_rule, distance_to_rect, tensor_rule
from .quasi_interp import QIOperator, apply_qi_tensor, sample_grid, uniform_qi
from .singular_kernel import MomentVector, SingularQuadConfig, modified_moments
from .spline_product import (
    ProductCoefficients,
    ProductSpace,
    TensorProductOperator,
    tensor_product_operator,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegrandSampler:
    """A vectorized ``f_s(t1, t2)`` bound to the source point ``s`` it belongs to."""

    func: Integrand
    source: Point | None = None

    def __call__(self, t1: FloatArray, t2: FloatArray) -> FloatArray:
        return np.asarray(self.func(t1, t2), dtype=np.float64)

    def bound_to(self, s: Point) -> IntegrandSampler:
        """This sampler for source ``s``; one bound to another source is rejected."""
        if self.source is None:
            return IntegrandSampler(self.func, source=(float(s[0]), float(s[1])))
        if not np.allclose(self.source, s, rtol=0.0, atol=1e-12):
            raise ValueError(f"Integrand is bound to source {self.source}, not {tuple(s)}")
        return self


def as_sampler(f: IntegrandSampler | Integrand, s: Point) -> IntegrandSampler:
    if isinstance(f, IntegrandSampler):
        return f.bound_to(s)
    return IntegrandSampler(f, source=(float(s[0]), float(s[1])))


class CubatureRule:
    """Reusable pieces of the cubature for one weight, QI degree and ``N``."""

    def __init__(
        self,
        weight: BSplineWeight,
        p: int,
        n_intervals: int,
        config: SingularQuadConfig | None = None,
        backend: str = "nearest",
    ) -> None:
        self.weight = weight
        self.p = p
        self.n_intervals = n_intervals
        self.config = config or SingularQuadConfig()
        (u0, u1), (v0, v1) = weight.support
        self.qi_u: QIOperator = uniform_qi(p, n_intervals, (u0, u1), backend)
        self.qi_v: QIOperator = uniform_qi(p, n_intervals, (v0, v1), backend)
        self.product: TensorProductOperator = tensor_product_operator(
            self.qi_u.basis, self.qi_v.basis, weight
        )
        self._moments: dict[tuple[float, ...], MomentVector] = {}
        self._lock = threading.Lock()
        log.debug(
            "Rule p=%d N=%d: product space %s, QI stability %.3f",
            p,
            n_intervals,
            self.product.space.shape,
            self.qi_u.stability_constant,
        )

    @property
    def space(self) -> ProductSpace:
        return self.product.space

    def moments(self, A: MetricMatrix, s: Point) -> MomentVector:
        """Moment vector for ``(s, A)``, computed once per key."""
        key = (float(s[0]), float(s[1]), *A.as_tuple())
        with self._lock:
            cached = self._moments.get(key)
        if cached is not None:
            return cached
        moments = modified_moments(self.space, A, s, self.config)
        with self._lock:
            return self._moments.setdefault(key, moments)

    def product_coefficients(self, f: Integrand) -> ProductCoefficients:
        """``lambda^Pi`` of ``QI(f) * B_{I,d}``."""
        grid = sample_grid(self.qi_u, self.qi_v, f)
        sigma = apply_qi_tensor(self.qi_u, self.qi_v, grid)
        return self.product.apply(sigma.coefficients)


def integrate_weakly_singular(
    rule: CubatureRule, f: IntegrandSampler | Integrand, A: MetricMatrix, s: Point
) -> float:
    """``int K(s, t) B_{I,d}(t) f(t) dt`` by quasi-interpolation of ``f``.

    A plain callable is bound to ``s``; a sampler bound to another source
    raises ``ValueError``.
    """
    coefficients = rule.product_coefficients(as_sampler(f, s))
    return rule.moments(A, s).dot(coefficients.values)


def integrate_multiplicative(
    rule: CubatureRule, surface: SurfacePatch, g: IntegrandSampler | Integrand, s: Point
) -> float:
    """``int G(s, t) B_{I,d}(t) g(t) dt`` written as ``K * (rho g)``."""
    g = as_sampler(g, s)
    A = first_fundamental_form(surface, s)

    def f(t1: FloatArray, t2: FloatArray) -> FloatArray:
        return rho(surface, s, t1, t2, A) * g(t1, t2)

    return integrate_weakly_singular(rule, IntegrandSampler(f, g.source), A, s)


def integrate_subtractive(
    rule: CubatureRule, surface: SurfacePatch, g: IntegrandSampler | Integrand, s: Point
) -> float:
    """``int G B g`` as ``int K B g`` plus the bounded remainder ``int (G - K) B g``."""
    g = as_sampler(g, s)
    A = first_fundamental_form(surface, s)
    singular = integrate_weakly_singular(rule, g, A, s)

    def remainder(t1: FloatArray, t2: FloatArray) -> FloatArray:
        difference = kernel_G(surface, s, t1, t2) - kernel_K(A, s, t1, t2)
        return difference * rule.weight(t1, t2) * g(t1, t2)

    breaks_u, _ = breakpoints_of(rule.weight, 0)
    breaks_v, _ = breakpoints_of(rule.weight, 1)
    regular = regular_integral(
        remainder, breaks_u, breaks_v, rule.config.gauss_order, singular_point=s
    )
    return singular + regular


def breakpoints_of(weight: BSplineWeight, axis: int) -> tuple[FloatArray, FloatArray]:
    spline = weight.spline_u if axis == 0 else weight.spline_v
    return breakpoints(spline.basis)


def regular_integral(
    integrand: Integrand,
    breaks_u: ArrayLike,
    breaks_v: ArrayLike,
    gauss_order: int = 16,
    singular_point: Point | None = None,
    levels: int | None = None,
) -> float:
    """Tensor Gauss integral over the grid ``breaks_u x breaks_v``.

    With ``singular_point`` the grid is split through it (when inside) and the
    cells touching it are refined 2x2 ``levels`` times; the innermost cells
    having the point as a corner use Duffy rules. This handles integrands that
    are bounded but not smooth at the point.
    """
    bu = np.asarray(breaks_u, dtype=np.float64)
    bv = np.asarray(breaks_v, dtype=np.float64)
    domain = ((float(bu[0]), float(bu[-1])), (float(bv[0]), float(bv[-1])))
    if singular_point is None:
        cells = _grid_cells(bu, bv)
        return math.fsum(_gauss(integrand, rect, gauss_order) for rect in cells)

    distance = distance_to_rect(singular_point, domain)
    inside = distance == 0.0
    point = (
        float(np.clip(singular_point[0], *domain[0])),
        float(np.clip(singular_point[1], *domain[1])),
    )
    bu = _insert(bu, point[0])
    bv = _insert(bv, point[1])
    if levels is None:
        size = max(np.diff(bu).max(), np.diff(bv).max())
        levels = 2 if inside else max(2, math.ceil(math.log2(size / distance)) + 1)
        levels = min(levels, 40)

    total: list[float] = []
    for rect in _grid_cells(bu, bv):
        if _touches(rect, point):
            total.append(
                _refine_toward(integrand, rect, point, levels, gauss_order, duffy=inside)
            )
        else:
            total.append(_gauss(integrand, rect, gauss_order))
    return math.fsum(total)


def _insert(breaks: FloatArray, x: float) -> FloatArray:
    tol = 1e-12 * (breaks[-1] - breaks[0])
    if np.any(np.abs(breaks - x) <= tol):
        return breaks
    return np.sort(np.append(breaks, x))


def _grid_cells(bu: FloatArray, bv: FloatArray) -> list[Rect]:
    return [
        ((float(a), float(b)), (float(c), float(d)))
        for a, b in zip(bu[:-1], bu[1:], strict=True)
        for c, d in zip(bv[:-1], bv[1:], strict=True)
    ]


def _touches(rect: Rect, point: Point) -> bool:
    (u0, u1), (v0, v1) = rect
    tol = 1e-12 * max(u1 - u0, v1 - v0)
    return u0 - tol <= point[0] <= u1 + tol and v0 - tol <= point[1] <= v1 + tol


def _gauss(integrand: Integrand, rect: Rect, n: int) -> float:
    t1, t2, w = tensor_rule(rect, n)
    return float(w @ np.asarray(integrand(t1, t2), dtype=np.float64))


def _refine_toward(integrand: Integrand, rect: Rect, point: Point, levels: int, n: int, duffy: bool) -> float:
    (u0, u1), (v0, v1) = rect
    if levels == 0:
        if duffy:
            t1, t2, w = corner_duffy_rule(rect, point, n)
            return float(w @ np.asarray(integrand(t1, t2), dtype=np.float64))
        return _gauss(integrand, rect, n)
    um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
    parts = []
    for child in (((u0, um), (v0, vm)), ((um, u1), (v0, vm)), ((u0, um), (vm, v1)), ((um, u1), (vm, v1))):
        if _corner_of(child, point):
            parts.append(_refine_toward(integrand, child, point, levels - 1, n, duffy))
        else:
            parts.append(_gauss(integrand, child, n))
    return math.fsum(parts)


def _corner_of(rect: Rect, point: Point) -> bool:
    (u0, u1), (v0, v1) = rect
    tol = 1e-12 * max(u1 - u0, v1 - v0)
    on_u = abs(point[0] - u0) <= tol or abs(point[0] - u1) <= tol
    on_v = abs(point[1] - v0) <= tol or abs(point[1] - v1) <= tol
    return on_u and on_v


def convergence_order(errors: Sequence[float], n_values: Sequence[int]) -> list[float]:
    """Observed orders ``ln(e_{k-1} / e_k) / ln(N_k / N_{k-1})`` for ``k >= 1``.

    Raises:
        ValueError: On mismatched lengths, nonpositive errors or non-increasing ``N``.
    """
    if len(errors) != len(n_values):
        raise ValueError(f"Got {len(errors)} errors for {len(n_values)} values of N")
    if any(not e > 0 for e in errors):
        raise ValueError(f"Errors must be positive to define an order: {list(errors)}")
    if any(b <= a for a, b in zip(n_values[:-1], n_values[1:], strict=True)):
        raise ValueError(f"N must be strictly increasing: {list(n_values)}")
    return [
        math.log(errors[k - 1] / errors[k]) / math.log(n_values[k] / n_values[k - 1])
        for k in range(1, len(errors))
    ]


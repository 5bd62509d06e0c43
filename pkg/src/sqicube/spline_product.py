"""Products of splines with the B-spline weight, expressed exactly in B-spline form.

On each element of the merged knot vector both factors are converted to
Bernstein form, multiplied there, and the product's B-spline coefficients are
read back as blossoms of the product pieces. Everything is linear in the first
factor's coefficients, so the tensor product with a fixed weight reduces to two
small dense matrices ``M_u`` and ``M_v`` with ``lambda^Pi = M_u Lambda M_v^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import comb

from .bspline_core import (
    KNOT_TOLERANCE,
    BSplineWeight,
    ElementExtraction,
    FloatArray,
    KnotVector,
    Spline1D,
    SplineError,
    TensorSpline2D,
    bernstein_blossom,
    bernstein_operator,
    extraction_operators,
    greville_abscissae,
    merge_knot_vectors,
    restrict_knot_vector,
)


@dataclass(frozen=True, eq=False)
class ProductSpace:
    """Tensor spline space of bidegree ``(p + d, p + d)`` on the weight support.

    Basis functions are ordered lexicographically: index ``i * dim_v + j``.
    ``weight_element`` is the shortest knot interval of the weight the space
    was built from; it sets the admissible distance of source points.
    """

    basis_u: KnotVector
    basis_v: KnotVector
    weight_element: float | None = None

    @property
    def min_element_size(self) -> float:
        """``weight_element`` if known, else the shortest element of the space."""
        if self.weight_element is not None:
            return self.weight_element
        return float(
            min(np.diff(self.extraction_u.breaks).min(), np.diff(self.extraction_v.breaks).min())
        )

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.basis_u.degree, self.basis_v.degree

    @property
    def shape(self) -> tuple[int, int]:
        return self.basis_u.dimension, self.basis_v.dimension

    @property
    def dimension(self) -> int:
        return self.basis_u.dimension * self.basis_v.dimension

    @property
    def domain(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.basis_u.domain, self.basis_v.domain

    @cached_property
    def extraction_u(self) -> ElementExtraction:
        return extraction_operators(self.basis_u)

    @cached_property
    def extraction_v(self) -> ElementExtraction:
        return extraction_operators(self.basis_v)

    def index(self, i: int, j: int) -> int:
        return i * self.basis_v.dimension + j

    def evaluate(self, coefficients: ArrayLike, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        grid = np.asarray(coefficients, dtype=np.float64).reshape(self.shape)
        return TensorSpline2D(self.basis_u, self.basis_v, grid)(t1, t2)


@dataclass(frozen=True, eq=False)
class ProductCoefficients:
    """``lambda^Pi`` in lexicographic order over a ``ProductSpace``."""

    space: ProductSpace
    values: FloatArray

    def __post_init__(self) -> None:
        if self.values.shape != (self.space.dimension,):
            raise SplineError(
                f"Expected {self.space.dimension} product coefficients, got {self.values.shape}"
            )

    @property
    def grid(self) -> FloatArray:
        return self.values.reshape(self.space.shape)

    def __call__(self, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        return self.space.evaluate(self.values, t1, t2)


def _bernstein_product_matrix(factor: FloatArray, p: int) -> FloatArray:
    """Matrix taking degree-``p`` Bernstein coefficients ``a`` to those of ``a * b``.

    ``b`` is the fixed degree-``d`` Bernstein vector ``factor``.
    """
    d = factor.size - 1
    q = p + d
    matrix = np.zeros((q + 1, p + 1))
    for i in range(p + 1):
        for j in range(d + 1):
            matrix[i + j, i] += comb(p, i) * comb(d, j) / comb(q, i + j) * factor[j]
    return matrix


def _representative_element(kv: KnotVector, i: int) -> int:
    """Nonempty knot interval inside the support of ``B_i`` nearest its Greville point."""
    q, z = kv.degree, kv.knots
    gamma = greville_abscissae(kv)[i]
    candidates = [mu for mu in range(i, i + q + 1) if z[mu + 1] - z[mu] > kv.tolerance]
    return min(candidates, key=lambda mu: abs(0.5 * (z[mu] + z[mu + 1]) - gamma))


def product_operator_1d(basis: KnotVector, factor: Spline1D) -> tuple[KnotVector, FloatArray]:
    """Linear map from coefficients on ``basis`` to those of the product with ``factor``.

    The product lives on ``factor``'s domain, which must lie inside ``basis``'s.

    Returns:
        The product knot vector and the matrix ``M`` of shape
        ``(product dimension, basis dimension)``.
    """
    lo, hi = factor.domain
    restricted = restrict_knot_vector(basis, lo, hi)
    p, d = basis.degree, factor.degree
    product = merge_knot_vectors(restricted, factor.basis, p + d)
    q, z = product.degree, product.knots

    local: dict[int, FloatArray] = {}
    matrix = np.zeros((product.dimension, basis.dimension))
    for i in range(product.dimension):
        mu = _representative_element(product, i)
        if mu not in local:
            a = bernstein_operator(basis, z[mu], z[mu + 1])
            b = bernstein_operator(factor.basis, z[mu], z[mu + 1]) @ factor.coefficients
            local[mu] = _bernstein_product_matrix(b, p) @ a
        weights = bernstein_blossom(np.eye(q + 1), z[mu], z[mu + 1], z[i + 1 : i + q + 1])
        matrix[i] = weights @ local[mu]
    return product, matrix


def multiply_1d(a: Spline1D, b: Spline1D) -> Spline1D:
    """The exact product ``a * b`` of degree ``p_a + p_b`` on the common domain."""
    (lo, hi), (lo_b, hi_b) = a.domain, b.domain
    tol = KNOT_TOLERANCE * max(hi - lo, hi_b - lo_b)
    if abs(lo - lo_b) > tol or abs(hi - hi_b) > tol:
        raise SplineError(f"Domains differ: [{lo}, {hi}] vs [{lo_b}, {hi_b}]")
    product, matrix = product_operator_1d(a.basis, b)
    return Spline1D(product, matrix @ a.coefficients)


@dataclass(frozen=True, eq=False)
class TensorProductOperator:
    """Precomputed ``sigma -> sigma * B_{I,d}`` for a fixed spline space and weight."""

    space: ProductSpace
    matrix_u: FloatArray
    matrix_v: FloatArray

    def apply(self, coefficients: ArrayLike) -> ProductCoefficients:
        grid = np.asarray(coefficients, dtype=np.float64)
        expected = (self.matrix_u.shape[1], self.matrix_v.shape[1])
        if grid.shape != expected:
            raise SplineError(f"Expected a coefficient grid of shape {expected}, got {grid.shape}")
        values = self.matrix_u @ grid @ self.matrix_v.T
        return ProductCoefficients(self.space, values.ravel())


def tensor_product_operator(
    basis_u: KnotVector, basis_v: KnotVector, weight: BSplineWeight
) -> TensorProductOperator:
    """Build ``M_u`` and ``M_v`` for products with ``weight``.

    Raises:
        SplineError: If the weight's support is not inside the spline domain.
    """
    (wu0, wu1), (wv0, wv1) = weight.support
    for name, kv, (lo, hi) in (("u", basis_u, (wu0, wu1)), ("v", basis_v, (wv0, wv1))):
        a, b = kv.domain
        if lo < a - kv.tolerance or hi > b + kv.tolerance:
            raise SplineError(
                f"Weight support [{lo}, {hi}] leaves the {name}-domain [{a}, {b}]"
            )
    product_u, matrix_u = product_operator_1d(basis_u, weight.spline_u)
    product_v, matrix_v = product_operator_1d(basis_v, weight.spline_v)
    return TensorProductOperator(
        space=ProductSpace(product_u, product_v, weight.min_element_size),
        matrix_u=matrix_u,
        matrix_v=matrix_v,
    )


def multiply_tensor(sigma: TensorSpline2D, weight: BSplineWeight) -> ProductCoefficients:
    """B-spline coefficients of ``sigma * B_{I,d}`` on the weight's support."""
    operator = tensor_product_operator(sigma.basis_u, sigma.basis_v, weight)
    return operator.apply(sigma.coefficients)

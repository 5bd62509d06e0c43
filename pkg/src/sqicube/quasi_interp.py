"""Local spline quasi-interpolation at breakpoints.

A quasi-interpolant (QI) of degree ``p`` maps samples ``f(tau_k)`` at the
breakpoints to B-spline coefficients by a banded matrix:

    lambda_j = sum_k C[j, k] f(tau_k)

Row ``j`` is the blossom functional of the polynomial interpolating ``f`` on a
window of ``p + 1`` consecutive breakpoints close to the Greville abscissa of
``B_j``, so the scheme reproduces every polynomial of degree ``<= p``.

The 2D operator is the tensor product of two 1D operators.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from numpy.typing import ArrayLike
from scipy import sparse
from scipy.special import comb

from .bspline_core import (
    FloatArray,
    KnotVector,
    Spline1D,
    SplineError,
    TensorSpline2D,
    clamped_knot_vector,
    elementary_symmetric,
    greville_abscissae,
)

log = logging.getLogger(__name__)

# Stencil weights below this fraction of the row maximum are rounding noise.
_DROP_TOLERANCE = 1e-14

# Largest accepted row sum of |C|.
MAX_STABILITY_CONSTANT = 100.0


class QIError(SplineError):
    """Insufficient nodes or an otherwise ill-posed quasi-interpolation rule."""


class CoefficientRule(Protocol):
    """Builds the dense coefficient matrix of a QI on ``basis`` sampled at ``nodes``."""

    def __call__(self, basis: KnotVector, nodes: FloatArray) -> FloatArray: ...


@dataclass(frozen=True)
class NearestStencilRule:
    """Interpolate on the ``p + 1`` breakpoints nearest the Greville abscissa.

    When two windows are equally close the leftmost one wins, unless
    ``symmetric`` is set, in which case the tied stencils are averaged.
    """

    symmetric: bool = False

    def __call__(self, basis: KnotVector, nodes: FloatArray) -> FloatArray:
        p = basis.degree
        greville = greville_abscissae(basis)
        length = float(nodes[-1] - nodes[0])
        tol = 1e-12 * length
        matrix = np.zeros((basis.dimension, nodes.size))
        for j, gamma in enumerate(greville):
            spread = np.array(
                [
                    max(gamma - nodes[s], nodes[s + p] - gamma)
                    for s in range(nodes.size - p)
                ]
            )
            tied = np.flatnonzero(spread <= spread.min() + tol)
            windows = tied if self.symmetric else tied[:1]
            args = basis.knots[j + 1 : j + p + 1]
            for s in windows:
                matrix[j, s : s + p + 1] += blossom_stencil(nodes[s : s + p + 1], args)
            matrix[j] /= windows.size
        return matrix


QI_BACKENDS: dict[str, CoefficientRule] = {
    "nearest": NearestStencilRule(),
    "symmetric": NearestStencilRule(symmetric=True),
}


def blossom_stencil(window: FloatArray, args: ArrayLike) -> FloatArray:
    """Weights ``w`` with ``sum_k w_k P(window_k) = blossom(P)(args)`` for deg P <= p.

    Solved in centered and scaled coordinates; the blossom of ``x^n`` is
    ``e_n(args) / C(p, n)``.
    """
    p = window.size - 1
    args = np.asarray(args, dtype=np.float64)
    center = 0.5 * (window[0] + window[-1])
    scale = 0.5 * (window[-1] - window[0]) if p > 0 else 1.0
    y = (window - center) / scale
    z = (args - center) / scale
    vandermonde = np.vander(y, p + 1, increasing=True)
    rhs = elementary_symmetric(z) / comb(p, np.arange(p + 1))
    return np.linalg.solve(vandermonde.T, rhs)


@dataclass(frozen=True, eq=False)
class QIOperator:
    """Sparse QI coefficient matrix together with its spline space and nodes."""

    basis: KnotVector
    nodes: FloatArray
    coeff_matrix: sparse.csr_array
    band: tuple[int, int]
    backend: str = "nearest"

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def stability_constant(self) -> float:
        """The infinity norm of the coefficient matrix."""
        return float(abs(self.coeff_matrix).sum(axis=1).max())


def build_qi(
    p: int,
    breakpoints: ArrayLike,
    backend: str = "nearest",
    max_stability: float = MAX_STABILITY_CONSTANT,
) -> QIOperator:
    """Construct the degree-``p`` QI on clamped knots over ``breakpoints``.

    Args:
        p: Spline degree, at least 1.
        breakpoints: Strictly increasing, at least ``p + 2`` values; they are
            both the spline breakpoints and the sampling nodes.
        backend: Name of the coefficient rule in ``QI_BACKENDS``.
        max_stability: Upper bound on ``stability_constant``.

    Returns:
        The operator, its matrix stored as CSR.

    Raises:
        QIError: If there are too few breakpoints, the backend is unknown or
            the operator is unstable on these breakpoints.
        SplineError: If the breakpoints are not strictly increasing.
    """
    nodes = np.asarray(breakpoints, dtype=np.float64)
    if p < 1:
        raise QIError(f"QI degree must be at least 1, got {p}")
    if nodes.ndim != 1 or nodes.size < p + 2:
        raise QIError(f"Degree {p} needs at least {p + 2} breakpoints, got {nodes.size}")
    if backend not in QI_BACKENDS:
        raise QIError(f"Unknown QI backend {backend!r}; choose from {sorted(QI_BACKENDS)}")
    basis = clamped_knot_vector(p, nodes)
    dense = QI_BACKENDS[backend](basis, nodes)
    row_max = np.abs(dense).max(axis=1, keepdims=True)
    dense[np.abs(dense) <= _DROP_TOLERANCE * row_max] = 0.0

    rows, cols = np.nonzero(dense)
    offsets = cols - rows
    band = (int(max(0, -offsets.min())), int(max(0, offsets.max())))
    operator = QIOperator(
        basis=basis,
        nodes=nodes,
        coeff_matrix=sparse.csr_array(dense),
        band=band,
        backend=backend,
    )
    stability = operator.stability_constant
    log.debug("QI degree %d on %d nodes: band %s, stability %.3f", p, nodes.size, band, stability)
    if stability > max_stability:
        raise QIError(
            f"Degree-{p} QI on these breakpoints has stability constant {stability:.4g}, "
            f"above the limit {max_stability:g}; use less strongly graded breakpoints"
        )
    return operator


def uniform_qi(p: int, n_intervals: int, domain: tuple[float, float], backend: str = "nearest") -> QIOperator:
    """QI on ``n_intervals`` equal subintervals of ``domain``."""
    if n_intervals < 1:
        raise QIError(f"Need at least one interval, got {n_intervals}")
    return build_qi(p, np.linspace(domain[0], domain[1], n_intervals + 1), backend)


def apply_qi_1d(op: QIOperator, samples: ArrayLike) -> Spline1D:
    values = np.asarray(samples, dtype=np.float64)
    if values.shape != op.nodes.shape:
        raise QIError(f"Expected {op.nodes.size} samples, got shape {values.shape}")
    return Spline1D(op.basis, op.coeff_matrix @ values)


@dataclass(frozen=True, eq=False)
class SampleGrid2D:
    """Samples ``values[k1, k2] = f(nodes_u[k1], nodes_v[k2])``."""

    values: FloatArray
    nodes_u: FloatArray
    nodes_v: FloatArray

    def __post_init__(self) -> None:
        for name in ("values", "nodes_u", "nodes_v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        expected = (self.nodes_u.size, self.nodes_v.size)
        if self.values.shape != expected:
            raise QIError(f"Expected a sample grid of shape {expected}, got {self.values.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.nodes_u.size, self.nodes_v.size


def _same_nodes(a: FloatArray, b: FloatArray) -> bool:
    scale = max(float(np.abs(a).max(initial=0.0)), 1.0)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= 1e-12 * scale))


def apply_qi_tensor(op_u: QIOperator, op_v: QIOperator, grid: SampleGrid2D) -> TensorSpline2D:
    """Tensor QI: ``Lambda = C_u F C_v^T``, the Kronecker product ``(C_u x C_v) vec(F)``.

    Raises:
        QIError: If the grid was not sampled at the operators' nodes.
    """
    if not (_same_nodes(grid.nodes_u, op_u.nodes) and _same_nodes(grid.nodes_v, op_v.nodes)):
        raise QIError(
            f"Sample grid nodes ({grid.shape[0]} x {grid.shape[1]}) do not match "
            f"the QI nodes ({op_u.nodes.size} x {op_v.nodes.size})"
        )
    partial = op_u.coeff_matrix @ grid.values
    coefficients = (op_v.coeff_matrix @ partial.T).T
    return TensorSpline2D(op_u.basis, op_v.basis, coefficients)


def sample_grid(
    op_u: QIOperator, op_v: QIOperator, f: Callable[[FloatArray, FloatArray], ArrayLike]
) -> SampleGrid2D:
    """Sample a vectorized ``f(t1, t2)`` on the tensor grid of QI nodes."""
    t1, t2 = np.meshgrid(op_u.nodes, op_v.nodes, indexing="ij")
    values = np.asarray(f(t1, t2), dtype=np.float64)
    if values.shape != t1.shape:
        values = np.broadcast_to(values, t1.shape).copy()
    if not np.all(np.isfinite(values)):
        raise QIError("Integrand produced non-finite samples on the QI grid")
    return SampleGrid2D(values, op_u.nodes, op_v.nodes)

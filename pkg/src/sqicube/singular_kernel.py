"""Modified moments ``mu_i = int_{R_I} K(s, t) B^Pi_i(t) dt``.

Moments are assembled element by element over the product space. Three
kinds of cells are distinguished by their distance to the source ``s``:

* far cells (distance at least the cell diameter) use a tensor Gauss rule,
  and are evaluated all at once as ``B_u^T (W * K) B_v``;
* near cells are graded geometrically toward the point closest to ``s`` so
  that every sub-cell is no larger than its distance to ``s``;
* cells containing ``s`` are split into triangles with apex ``s``. On each
  triangle a polar (Duffy) map removes the ``1/r`` singularity and an
  ``asinh`` substitution in the angular variable removes the remaining
  near-singularity of ``1 / sqrt(d^T A d)``.

The rules returned by the cell helpers carry the kernel in their weights, so
``sum(w * phi(t))`` approximates ``int K phi``.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bspline_core import BernsteinPatch, ElementExtraction, FloatArray, bernstein_basis
from .geometry import DegenerateSurfaceError, MetricMatrix, Point, Rect, kernel_K
from .quadrature import (
    clip_to_rect,
    distance_to_rect,
    gauss_legendre,
    graded_breaks,
    rect_diameter,
    refinement_levels,
    tensor_rule,
)
from .spline_product import ProductSpace

log = logging.getLogger(__name__)

CellRule = tuple[FloatArray, FloatArray, FloatArray]

# Relative to the patch scale: closer than this, s is taken to lie on the cell.
_ON_CELL_TOLERANCE = 1e-12

# Angular (asinh) intervals longer than this are split.
_MAX_ANGULAR_STEP = 1.0

# The accuracy estimate compares against a rule with this many fewer points.
ERROR_CHECK_DROP = 4


class SourceTooFarError(ValueError):
    """The source point lies outside the admissible neighborhood of ``R_I``."""


@dataclass(frozen=True)
class SingularQuadConfig:
    """Quadrature settings for modified moments.

    ``max_source_distance`` is measured in units of the smallest element of
    the weight (or of the product space when it has no weight attached).
    ``estimate_error`` repeats the computation at a lower order to fill in
    ``MomentVector.accuracy_estimate``.
    """

    gauss_order: int = 16
    radial_subdivisions: int = 4
    grading: float = 0.5
    target_accuracy: float = 1e-12
    max_source_distance: float = 0.5
    estimate_error: bool = True

    def __post_init__(self) -> None:
        if self.gauss_order < 2:
            raise ValueError(f"gauss_order must be at least 2, got {self.gauss_order}")
        if self.radial_subdivisions < 0:
            raise ValueError(
                f"radial_subdivisions must be nonnegative, got {self.radial_subdivisions}"
            )
        if not 0 < self.grading < 1:
            raise ValueError(f"grading must lie in (0, 1), got {self.grading}")
        if not self.target_accuracy > 0:
            raise ValueError(f"target_accuracy must be positive, got {self.target_accuracy}")
        if self.max_source_distance < 0:
            raise ValueError(
                f"max_source_distance must be nonnegative, got {self.max_source_distance}"
            )


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Modified moments in the lexicographic order of the product space."""

    source: Point
    metric: MetricMatrix
    space: ProductSpace
    values: FloatArray
    accuracy_estimate: float = field(default=math.nan)

    @property
    def grid(self) -> FloatArray:
        return self.values.reshape(self.space.shape)

    def dot(self, coefficients: FloatArray) -> float:
        return float(self.values @ coefficients)


# ---------------------------------------------------------------------------
# Cell rules
# ---------------------------------------------------------------------------


def singular_cell_rule(rect: Rect, A: MetricMatrix, s: Point, config: SingularQuadConfig) -> CellRule:
    """Kernel-weighted rule on a cell whose closure contains ``s``."""
    (u0, u1), (v0, v1) = rect
    s = clip_to_rect(s, rect)
    corners = [(u0, v0), (u1, v0), (u1, v1), (u0, v1)]
    radial, radial_w = gauss_legendre(config.gauss_order)
    angular, angular_w = gauss_legendre(config.gauss_order)
    sqrt_det = math.sqrt(A.det)
    area_tol = 1e-14 * (u1 - u0) * (v1 - v0)
    pieces: list[CellRule] = []
    for k in range(4):
        p1, p2 = np.array(corners[k]), np.array(corners[(k + 1) % 4])
        r1 = p1 - np.asarray(s)
        e = p2 - p1
        det = r1[0] * e[1] - r1[1] * e[0]
        if det <= area_tol:
            continue
        a = A.e * e[0] ** 2 + 2 * A.f * e[0] * e[1] + A.g * e[1] ** 2
        b = A.e * r1[0] * e[0] + A.f * (r1[0] * e[1] + r1[1] * e[0]) + A.g * r1[1] * e[1]
        sqrt_a = math.sqrt(a)
        # Height of s over the edge line in the A-metric (Lagrange identity).
        height = sqrt_det * det / sqrt_a
        w0 = math.asinh(b / (sqrt_a * height))
        w1 = math.asinh((a + b) / (sqrt_a * height))
        n_steps = max(1, math.ceil((w1 - w0) / _MAX_ANGULAR_STEP))
        steps = np.linspace(w0, w1, n_steps + 1)
        for lo, hi in zip(steps[:-1], steps[1:], strict=True):
            w = lo + (hi - lo) * angular
            eta = height / sqrt_a * np.sinh(w) - b / a
            d = r1[None, :] + eta[:, None] * e[None, :]
            t1 = s[0] + np.outer(d[:, 0], radial)
            t2 = s[1] + np.outer(d[:, 1], radial)
            weights = np.outer(angular_w * (hi - lo), radial_w) * (det / sqrt_a)
            pieces.append((t1.ravel(), t2.ravel(), weights.ravel()))
    if not pieces:
        raise DegenerateSurfaceError(f"Cell {rect} is degenerate")
    return tuple(np.concatenate(arrays) for arrays in zip(*pieces, strict=True))  # type: ignore[return-value]


def nearly_singular_cell_rule(
    rect: Rect, A: MetricMatrix, s: Point, config: SingularQuadConfig
) -> CellRule:
    """Kernel-weighted rule on a cell near, but not containing, ``s``."""
    (u0, u1), (v0, v1) = rect
    distance = distance_to_rect(s, rect)
    nearest = clip_to_rect(s, rect)
    levels = refinement_levels(
        max(u1 - u0, v1 - v0), distance, config.grading, config.radial_subdivisions
    )
    breaks_u = graded_breaks(u0, u1, nearest[0], levels, config.grading)
    breaks_v = graded_breaks(v0, v1, nearest[1], levels, config.grading)
    t1s, t2s, ws = [], [], []
    for a, b in zip(breaks_u[:-1], breaks_u[1:], strict=True):
        for c, d in zip(breaks_v[:-1], breaks_v[1:], strict=True):
            t1, t2, w = tensor_rule(((a, b), (c, d)), config.gauss_order)
            t1s.append(t1)
            t2s.append(t2)
            ws.append(w)
    t1, t2, w = np.concatenate(t1s), np.concatenate(t2s), np.concatenate(ws)
    return t1, t2, w * kernel_K(A, s, t1, t2)


def regular_cell_rule(rect: Rect, A: MetricMatrix, s: Point, config: SingularQuadConfig) -> CellRule:
    t1, t2, w = tensor_rule(rect, config.gauss_order)
    return t1, t2, w * kernel_K(A, s, t1, t2)


def cell_rule(rect: Rect, A: MetricMatrix, s: Point, config: SingularQuadConfig) -> CellRule:
    """Pick the singular, nearly singular or regular rule for ``rect``."""
    distance = distance_to_rect(s, rect)
    diameter = rect_diameter(rect)
    if distance <= _ON_CELL_TOLERANCE * diameter:
        return singular_cell_rule(rect, A, s, config)
    if distance < diameter:
        return nearly_singular_cell_rule(rect, A, s, config)
    return regular_cell_rule(rect, A, s, config)


def singular_cell_integral(
    piece: BernsteinPatch, A: MetricMatrix, s: Point, config: SingularQuadConfig | None = None
) -> float:
    """``int K(s, t) piece(t) dt`` over a cell containing ``s``."""
    config = config or SingularQuadConfig()
    t1, t2, w = singular_cell_rule(piece.rect, A.require_spd(), s, config)
    return float(w @ piece(t1, t2))


def nearly_singular_cell_integral(
    piece: BernsteinPatch, A: MetricMatrix, s: Point, config: SingularQuadConfig | None = None
) -> float:
    """``int K(s, t) piece(t) dt`` over a cell not containing ``s``."""
    config = config or SingularQuadConfig()
    t1, t2, w = cell_rule(piece.rect, A.require_spd(), s, config)
    return float(w @ piece(t1, t2))


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def _gauss_basis(extraction: ElementExtraction, dimension: int, n: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Basis values at every element's Gauss nodes: nodes, weights, matrix ``(n_el * n, dim)``."""
    x, w = gauss_legendre(n)
    q = extraction.degree
    local = bernstein_basis(q, x)
    n_el = extraction.n_elements
    nodes = np.empty(n_el * n)
    weights = np.empty(n_el * n)
    matrix = np.zeros((n_el * n, dimension))
    for e in range(n_el):
        lo, hi = extraction.breaks[e], extraction.breaks[e + 1]
        rows = slice(e * n, (e + 1) * n)
        nodes[rows] = lo + (hi - lo) * x
        weights[rows] = (hi - lo) * w
        first = extraction.first_function(e)
        matrix[rows, first : first + q + 1] = local @ extraction.operators[e]
    return nodes, weights, matrix


def check_source_distance(space: ProductSpace, s: Point, config: SingularQuadConfig) -> float:
    distance = distance_to_rect(s, space.domain)
    limit = config.max_source_distance * space.min_element_size
    if distance > limit * (1 + 1e-12):
        raise SourceTooFarError(
            f"Source {s} is {distance:.3g} away from the support; the limit is {limit:.3g}"
        )
    return distance


def modified_moments(
    space: ProductSpace, A: MetricMatrix, s: Point, config: SingularQuadConfig | None = None
) -> MomentVector:
    """All modified moments of ``space`` for the kernel ``K`` with metric ``A`` at ``s``.

    With ``config.estimate_error`` the moments are recomputed with
    ``ERROR_CHECK_DROP`` fewer Gauss points and ``accuracy_estimate`` is the
    largest difference; otherwise it is NaN.

    Raises:
        DegenerateSurfaceError: If ``A`` is not symmetric positive definite.
        SourceTooFarError: If ``s`` is outside the admissible neighborhood.
    """
    config = config or SingularQuadConfig()
    A.require_spd()
    check_source_distance(space, s, config)
    moments = _moment_grid(space, A, s, config)
    estimate = math.nan
    coarse_order = config.gauss_order - ERROR_CHECK_DROP
    if config.estimate_error and coarse_order >= 2:
        coarse = _moment_grid(space, A, s, dataclasses.replace(config, gauss_order=coarse_order))
        estimate = float(np.abs(moments - coarse).max())
    return MomentVector(
        source=(float(s[0]), float(s[1])),
        metric=A,
        space=space,
        values=moments.ravel(),
        accuracy_estimate=estimate,
    )


def _moment_grid(
    space: ProductSpace, A: MetricMatrix, s: Point, config: SingularQuadConfig
) -> FloatArray:
    eu, ev = space.extraction_u, space.extraction_v
    dim_u, dim_v = space.shape
    n = config.gauss_order
    nodes_u, weights_u, basis_u = _gauss_basis(eu, dim_u, n)
    nodes_v, weights_v, basis_v = _gauss_basis(ev, dim_v, n)

    special: list[tuple[int, int]] = []
    far = np.ones((eu.n_elements, ev.n_elements), dtype=bool)
    for iu in range(eu.n_elements):
        for iv in range(ev.n_elements):
            rect = (
                (float(eu.breaks[iu]), float(eu.breaks[iu + 1])),
                (float(ev.breaks[iv]), float(ev.breaks[iv + 1])),
            )
            if distance_to_rect(s, rect) < rect_diameter(rect):
                far[iu, iv] = False
                special.append((iu, iv))

    mask = np.repeat(np.repeat(far, n, axis=0), n, axis=1)
    form = quadratic_form_grid(A, s, nodes_u, nodes_v)
    kernel = np.zeros_like(form)
    kernel[mask] = 1.0 / np.sqrt(form[mask])
    weighted = np.outer(weights_u, weights_v) * kernel
    moments = basis_u.T @ weighted @ basis_v

    for iu, iv in special:
        rect = (
            (float(eu.breaks[iu]), float(eu.breaks[iu + 1])),
            (float(ev.breaks[iv]), float(ev.breaks[iv + 1])),
        )
        t1, t2, w = cell_rule(rect, A, s, config)
        local_u = eu.local_basis(iu, t1)
        local_v = ev.local_basis(iv, t2)
        fu, fv = eu.first_function(iu), ev.first_function(iv)
        moments[fu : fu + eu.degree + 1, fv : fv + ev.degree + 1] += (
            local_u * w[:, None]
        ).T @ local_v

    log.debug(
        "Moments at s=%s, order %d: %d far cells, %d special cells",
        s,
        n,
        int(far.sum()),
        len(special),
    )
    return moments


def quadratic_form_grid(A: MetricMatrix, s: Point, nodes_u: FloatArray, nodes_v: FloatArray) -> FloatArray:
    dt1 = (nodes_u - s[0])[:, None]
    dt2 = (nodes_v - s[1])[None, :]
    return A.e * dt1 * dt1 + 2.0 * A.f * dt1 * dt2 + A.g * dt2 * dt2

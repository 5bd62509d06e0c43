"""High-accuracy reference integrals by adaptive subdivision.

This module shares no quadrature code with the cubature engine: it builds its
own Gauss and Duffy rules from ``leggauss`` and estimates errors by comparing
two orders on every cell. The singular point is made a corner of the initial
grid, so a cell either has it as a corner (Duffy rule) or stays away from it
(tensor Gauss rule, subdivided until the two orders agree).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

log = logging.getLogger(__name__)

Rect = tuple[tuple[float, float], tuple[float, float]]
OracleIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_LOW_ORDER, _HIGH_ORDER = 10, 20
_DUFFY_LOW, _DUFFY_HIGH = 24, 32
_MAX_ASPECT = 2.0

# Tighter targets are below what double precision can resolve.
MIN_TARGET_ACCURACY = 1e-14

# Relative to the cell size, as in the cubature engine.
_CORNER_TOLERANCE = 1e-12


class OracleConvergenceError(RuntimeError):
    """The adaptive integrator did not reach its target accuracy."""

    def __init__(self, message: str, best_estimate: float, error_estimate: float) -> None:
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class OracleRequest:
    """An integral ``int_domain integrand(t) dt``.

    ``breaks_u`` and ``breaks_v`` are extra grid lines where the integrand has
    kinks (e.g. the knots of a B-spline factor). ``seed`` shuffles the order
    in which cells are processed; the result does not depend on it.
    """

    integrand: OracleIntegrand
    domain: Rect
    singular_point: tuple[float, float] | None = None
    breaks_u: Sequence[float] = ()
    breaks_v: Sequence[float] = ()
    target_accuracy: float = 1e-12
    max_depth: int = 30
    seed: int | None = None

    def __post_init__(self) -> None:
        if not MIN_TARGET_ACCURACY <= self.target_accuracy < 1.0:
            raise ValueError(
                f"target_accuracy must lie in [{MIN_TARGET_ACCURACY:g}, 1), got {self.target_accuracy}"
            )
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be at least 1, got {self.max_depth}")
        (u0, u1), (v0, v1) = self.domain
        if not (np.isfinite([u0, u1, v0, v1]).all() and u0 < u1 and v0 < v1):
            raise ValueError(f"Domain must be a nonempty finite rectangle, got {self.domain}")


@dataclass(frozen=True)
class OracleResult:
    value: float
    error_estimate: float
    n_cells: int = field(default=0)


@lru_cache(maxsize=16)
def _rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _gauss(f: OracleIntegrand, rect: Rect, n: int) -> float:
    (u0, u1), (v0, v1) = rect
    x, w = _rule(n)
    t1, t2 = np.meshgrid(u0 + (u1 - u0) * x, v0 + (v1 - v0) * x, indexing="ij")
    values = np.asarray(f(t1, t2), dtype=np.float64)
    return float(np.einsum("i,ij,j->", w, values, w) * (u1 - u0) * (v1 - v0))


def _duffy(f: OracleIntegrand, rect: Rect, corner: tuple[float, float], n: int) -> float:
    (u0, u1), (v0, v1) = rect
    ou = u1 if corner[0] == u0 else u0
    ov = v1 if corner[1] == v0 else v0
    x, w = _rule(n)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    weights = np.outer(w, w) * xi
    total = 0.0
    for p1, p2 in (((ou, corner[1]), (ou, ov)), ((ou, ov), (corner[0], ov))):
        a = (p1[0] - corner[0], p1[1] - corner[1])
        e = (p2[0] - p1[0], p2[1] - p1[1])
        det = abs(a[0] * e[1] - a[1] * e[0])
        t1 = corner[0] + xi * (a[0] + eta * e[0])
        t2 = corner[1] + xi * (a[1] + eta * e[1])
        total += det * float(np.sum(weights * np.asarray(f(t1, t2), dtype=np.float64)))
    return total


def _split(rect: Rect, at: tuple[float, float] | None = None) -> list[Rect]:
    (u0, u1), (v0, v1) = rect
    um, vm = at if at is not None else (0.5 * (u0 + u1), 0.5 * (v0 + v1))
    return [
        ((u0, um), (v0, vm)),
        ((um, u1), (v0, vm)),
        ((u0, um), (vm, v1)),
        ((um, u1), (vm, v1)),
    ]


def _corner(rect: Rect, point: tuple[float, float] | None) -> tuple[float, float] | None:
    """The corner of ``rect`` at ``point`` (within ``_CORNER_TOLERANCE``), if any."""
    if point is None:
        return None
    (u0, u1), (v0, v1) = rect
    tol = _CORNER_TOLERANCE * max(u1 - u0, v1 - v0)
    for cu in (u0, u1):
        for cv in (v0, v1):
            if abs(cu - point[0]) <= tol and abs(cv - point[1]) <= tol:
                return cu, cv
    return None


def _square_split(rect: Rect, corner: tuple[float, float]) -> list[Rect]:
    """Cut an elongated corner cell into a square at the corner and the rest."""
    (u0, u1), (v0, v1) = rect
    side = min(u1 - u0, v1 - v0)
    if u1 - u0 > v1 - v0:
        cut = u0 + side if corner[0] == u0 else u1 - side
        return [((u0, cut), (v0, v1)), ((cut, u1), (v0, v1))]
    cut = v0 + side if corner[1] == v0 else v1 - side
    return [((u0, u1), (v0, cut)), ((u0, u1), (cut, v1))]


def _snap(point: tuple[float, float], request: OracleRequest) -> tuple[float, float]:
    """Move coordinates of ``point`` within ``_CORNER_TOLERANCE`` of a grid line onto it."""
    (u0, u1), (v0, v1) = request.domain
    tol = _CORNER_TOLERANCE * max(u1 - u0, v1 - v0)
    snapped = []
    for x, lines in ((point[0], (u0, u1, *request.breaks_u)), (point[1], (v0, v1, *request.breaks_v))):
        nearest = min(lines, key=lambda line: abs(line - x))
        snapped.append(float(nearest) if abs(nearest - x) <= tol else x)
    return snapped[0], snapped[1]


def _initial_grid(request: OracleRequest, point: tuple[float, float] | None) -> list[Rect]:
    (u0, u1), (v0, v1) = request.domain
    bu = [u0, u1, *request.breaks_u]
    bv = [v0, v1, *request.breaks_v]
    if point is not None:
        bu.append(point[0])
        bv.append(point[1])
    grid_u = np.unique(np.clip(bu, u0, u1))
    grid_v = np.unique(np.clip(bv, v0, v1))
    return [
        ((float(a), float(b)), (float(c), float(d)))
        for a, b in zip(grid_u[:-1], grid_u[1:], strict=True)
        for c, d in zip(grid_v[:-1], grid_v[1:], strict=True)
        if b > a and d > c
    ]


def _estimate(f: OracleIntegrand, rect: Rect, corner: tuple[float, float] | None) -> tuple[float, float]:
    if corner is None:
        low, high = _gauss(f, rect, _LOW_ORDER), _gauss(f, rect, _HIGH_ORDER)
    else:
        low, high = _duffy(f, rect, corner, _DUFFY_LOW), _duffy(f, rect, corner, _DUFFY_HIGH)
    return high, abs(high - low)


def reference_integral(request: OracleRequest) -> OracleResult:
    """Adaptive integral to relative accuracy ``request.target_accuracy``.

    Raises:
        OracleConvergenceError: If some cell still fails after ``max_depth``
            subdivisions.
    """
    f = request.integrand
    (u0, u1), (v0, v1) = request.domain
    total_area = (u1 - u0) * (v1 - v0)
    point = request.singular_point
    if point is not None:
        inside = u0 <= point[0] <= u1 and v0 <= point[1] <= v1
        point = _snap((float(point[0]), float(point[1])), request) if inside else None
    cells = _initial_grid(request, point)

    # A first pass fixes the absolute tolerance, so accepting a cell does not
    # depend on the order in which cells are visited.
    coarse = [_estimate(f, rect, _corner(rect, point))[0] for rect in cells]
    scale = math.fsum(abs(c) for c in coarse)
    if scale == 0.0:
        return OracleResult(value=0.0, error_estimate=0.0, n_cells=len(cells))
    atol = request.target_accuracy * scale

    if request.seed is not None:
        order = np.random.default_rng(request.seed).permutation(len(cells))
        cells = [cells[i] for i in order]
    stack: list[tuple[Rect, int]] = [(rect, 0) for rect in cells]
    values: list[float] = []
    errors: list[float] = []
    while stack:
        rect, depth = stack.pop()
        (a, b), (c, d) = rect
        corner = _corner(rect, point)
        if corner is not None and max(b - a, d - c) > _MAX_ASPECT * min(b - a, d - c):
            stack.extend((child, depth) for child in _square_split(rect, corner))
            continue
        value, error = _estimate(f, rect, corner)
        local_tol = max(atol * (b - a) * (d - c) / total_area, 64 * np.finfo(float).eps * abs(value))
        if error <= local_tol:
            values.append(value)
            errors.append(error)
            continue
        if depth >= request.max_depth:
            best = math.fsum(values) + value + math.fsum(
                _estimate(f, r, _corner(r, point))[0] for r, _ in stack
            )
            raise OracleConvergenceError(
                f"Cell {rect} did not converge after {depth} subdivisions",
                best_estimate=best,
                error_estimate=math.fsum(errors) + error,
            )
        stack.extend((child, depth + 1) for child in _split(rect))

    result = OracleResult(
        value=math.fsum(values), error_estimate=math.fsum(errors), n_cells=len(values)
    )
    log.debug(
        "Oracle: %.16e +- %.2e on %d cells", result.value, result.error_estimate, result.n_cells
    )
    return result

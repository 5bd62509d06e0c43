"""Gauss--Legendre building blocks shared by the moment and regular integrators."""

from __future__ import annotations

from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bspline_core import FloatArray
from .geometry import Point, Rect

Integrand = Callable[[FloatArray, FloatArray], FloatArray]


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[FloatArray, FloatArray]:
    """``n``-point Gauss--Legendre nodes and weights on [0, 1]."""
    if n < 1:
        raise ValueError(f"Gauss order must be positive, got {n}")
    x, w = leggauss(n)
    nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def tensor_rule(rect: Rect, n: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Tensor Gauss rule on a rectangle: flat ``t1``, ``t2`` and weights."""
    (u0, u1), (v0, v1) = rect
    x, w = gauss_legendre(n)
    t1, t2 = np.meshgrid(u0 + (u1 - u0) * x, v0 + (v1 - v0) * x, indexing="ij")
    weights = np.outer(w, w) * ((u1 - u0) * (v1 - v0))
    return t1.ravel(), t2.ravel(), weights.ravel()


def duffy_rule(
    apex: Point, p1: Point, p2: Point, n: int
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Duffy rule on the triangle ``(apex, p1, p2)``, collapsing onto ``apex``.

    ``t = apex + xi ((p1 - apex) + eta (p2 - p1))`` with weight ``xi |det|``,
    which cancels a ``1/r`` singularity at the apex.
    """
    x, w = gauss_legendre(n)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    weights = np.outer(w, w) * xi
    a = np.subtract(p1, apex)
    e = np.subtract(p2, p1)
    det = abs(a[0] * e[1] - a[1] * e[0])
    t1 = apex[0] + xi * (a[0] + eta * e[0])
    t2 = apex[1] + xi * (a[1] + eta * e[1])
    return t1.ravel(), t2.ravel(), (weights * det).ravel()


def corner_duffy_rule(rect: Rect, corner: Point, n: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Two Duffy triangles covering ``rect`` with ``corner`` as common apex."""
    (u0, u1), (v0, v1) = rect
    cu = u1 if abs(corner[0] - u1) < abs(corner[0] - u0) else u0
    cv = v1 if abs(corner[1] - v1) < abs(corner[1] - v0) else v0
    ou, ov = u0 + u1 - cu, v0 + v1 - cv
    parts = [
        duffy_rule((cu, cv), (ou, cv), (ou, ov), n),
        duffy_rule((cu, cv), (ou, ov), (cu, ov), n),
    ]
    return tuple(np.concatenate(arrays) for arrays in zip(*parts, strict=True))  # type: ignore[return-value]


def graded_breaks(lo: float, hi: float, target: float, levels: int, ratio: float) -> FloatArray:
    """Breakpoints of ``[lo, hi]`` refined geometrically toward ``target``.

    Each side of ``target`` is cut at ``target +- L ratio^k`` for
    ``k = 1..levels``, ``L`` being that side's length.
    """
    target = min(max(target, lo), hi)
    points = [lo, hi, target]
    for length, sign in ((hi - target, 1.0), (target - lo, -1.0)):
        if length > 0:
            points.extend(target + sign * length * ratio ** np.arange(1, levels + 1))
    return np.unique(np.asarray(points))


def distance_to_rect(s: Point, rect: Rect) -> float:
    (u0, u1), (v0, v1) = rect
    du = max(u0 - s[0], 0.0, s[0] - u1)
    dv = max(v0 - s[1], 0.0, s[1] - v1)
    return float(np.hypot(du, dv))


def clip_to_rect(s: Point, rect: Rect) -> Point:
    (u0, u1), (v0, v1) = rect
    return float(np.clip(s[0], u0, u1)), float(np.clip(s[1], v0, v1))


def rect_diameter(rect: Rect) -> float:
    (u0, u1), (v0, v1) = rect
    return float(np.hypot(u1 - u0, v1 - v0))


def refinement_levels(size: float, distance: float, ratio: float, minimum: int) -> int:
    """Levels of geometric grading after which the innermost piece is no larger than ``distance``."""
    if distance <= 0:
        return minimum
    needed = int(np.ceil(np.log(size / distance) / np.log(1.0 / ratio)))
    return int(min(max(minimum, needed), 60))

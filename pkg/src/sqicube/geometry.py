"""Parametric surface patches and the kernels built on them.

A patch maps parameters ``t = (t1, t2)`` to points ``X(t)`` in R^3. The exact
kernel is ``G(s, t) = 1 / ||X(t) - X(s)||``; its singular model is
``K(s, t) = 1 / sqrt((t - s)^T A (t - s))`` with ``A`` the first fundamental
form at ``s``. The ratio ``rho = G / K`` is bounded and is what the
multiplicative pipeline feeds to the quasi-interpolant.

All point arguments are arrays whose last axis has length 2 (or broadcastable
pairs ``t1, t2``); functions are vectorized over the leading axes.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .bspline_core import FloatArray

Point = tuple[float, float]
Rect = tuple[tuple[float, float], tuple[float, float]]
PointMap = Callable[[FloatArray, FloatArray], FloatArray]
TangentMap = Callable[[FloatArray, FloatArray], tuple[FloatArray, FloatArray]]

# |t - s| below this fraction of the patch scale counts as coincident.
COINCIDENCE_TOLERANCE = 1e-13

# Supplied tangents must match central differences with this step.
DERIVATIVE_STEP = 1e-5
DERIVATIVE_TOLERANCE = 1e-6


class DegenerateSurfaceError(ValueError):
    """Vanishing or inconsistent tangents, or a metric that is not positive definite."""


class SingularPointError(ArithmeticError):
    """A kernel was evaluated exactly at its singular point."""


@dataclass(frozen=True)
class MetricMatrix:
    """Symmetric 2x2 matrix ``[[e, f], [f, g]]``."""

    e: float
    f: float
    g: float

    @classmethod
    def identity(cls) -> MetricMatrix:
        return cls(1.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, matrix: ArrayLike) -> MetricMatrix:
        a = np.asarray(matrix, dtype=np.float64)
        if a.shape != (2, 2) or not np.isclose(a[0, 1], a[1, 0]):
            raise DegenerateSurfaceError(f"Expected a symmetric 2x2 matrix, got {a.tolist()}")
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 1]))

    @property
    def array(self) -> FloatArray:
        return np.array([[self.e, self.f], [self.f, self.g]])

    @property
    def det(self) -> float:
        return self.e * self.g - self.f * self.f

    @property
    def is_spd(self) -> bool:
        trace = self.e + self.g
        return bool(np.isfinite(trace)) and trace > 0 and self.det > 1e-14 * trace * trace

    def require_spd(self) -> MetricMatrix:
        if not self.is_spd:
            raise DegenerateSurfaceError(f"Metric {self} is not positive definite")
        return self

    def as_tuple(self) -> tuple[float, float, float]:
        return self.e, self.f, self.g


@dataclass(frozen=True)
class SurfacePatch:
    """Smooth patch ``X`` on a parameter rectangle.

    ``tangents`` returns ``(X_t1, X_t2)``; without it, central differences
    are used. Supplied tangents must pass ``check_derivatives``.
    """

    name: str
    domain: Rect
    point: PointMap
    tangents: TangentMap | None = None

    def __post_init__(self) -> None:
        if self.tangents is not None:
            check_derivatives(self)

    @property
    def scale(self) -> float:
        (u0, u1), (v0, v1) = self.domain
        return max(u1 - u0, v1 - v0)

    def __call__(self, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
        return self.point(t1, t2)

    def derivatives(self, t1: ArrayLike, t2: ArrayLike) -> tuple[FloatArray, FloatArray]:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
        if self.tangents is not None:
            return self.tangents(t1, t2)
        h = 1e-6 * self.scale
        d1 = (self.point(t1 + h, t2) - self.point(t1 - h, t2)) / (2 * h)
        d2 = (self.point(t1, t2 + h) - self.point(t1, t2 - h)) / (2 * h)
        return d1, d2


def check_derivatives(surface: SurfacePatch, samples: int = 16, seed: int = 0) -> float:
    """Largest deviation of the supplied tangents from central differences.

    Compared at ``samples`` pseudo-random parameters inside the domain with
    step ``DERIVATIVE_STEP``.

    Raises:
        DegenerateSurfaceError: If the deviation exceeds ``DERIVATIVE_TOLERANCE``.
    """
    if surface.tangents is None:
        return 0.0
    (u0, u1), (v0, v1) = surface.domain
    h = DERIVATIVE_STEP
    rng = np.random.default_rng(seed)
    t1 = rng.uniform(u0 + h, u1 - h, samples)
    t2 = rng.uniform(v0 + h, v1 - h, samples)
    d1, d2 = surface.tangents(t1, t2)
    fd1 = (surface.point(t1 + h, t2) - surface.point(t1 - h, t2)) / (2 * h)
    fd2 = (surface.point(t1, t2 + h) - surface.point(t1, t2 - h)) / (2 * h)
    deviation = float(max(np.abs(fd1 - d1).max(), np.abs(fd2 - d2).max()))
    if not deviation <= DERIVATIVE_TOLERANCE:
        raise DegenerateSurfaceError(
            f"Tangents of {surface.name!r} differ from central differences by {deviation:.3g}"
        )
    return deviation


def _stack(*components: FloatArray) -> FloatArray:
    return np.stack(np.broadcast_arrays(*components), axis=-1)


def plane() -> SurfacePatch:
    return SurfacePatch(
        name="plane",
        domain=((-1.0, 1.0), (-1.0, 1.0)),
        point=lambda t1, t2: _stack(t1, t2, np.zeros_like(t1)),
        tangents=lambda t1, t2: (
            _stack(np.ones_like(t1), np.zeros_like(t1), np.zeros_like(t1)),
            _stack(np.zeros_like(t1), np.ones_like(t1), np.zeros_like(t1)),
        ),
    )


def cylinder(radius: float = 2.0, fraction: float = 1.0) -> SurfacePatch:
    """``(r cos(phi pi t1 / 4), r sin(phi pi t1 / 4), phi t2)``; ``phi`` shrinks the patch."""
    if radius <= 0 or fraction <= 0:
        raise DegenerateSurfaceError(
            f"Cylinder needs positive radius and fraction, got {radius}, {fraction}"
        )
    omega = fraction * np.pi / 4

    def point(t1: FloatArray, t2: FloatArray) -> FloatArray:
        return _stack(radius * np.cos(omega * t1), radius * np.sin(omega * t1), fraction * t2)

    def tangents(t1: FloatArray, t2: FloatArray) -> tuple[FloatArray, FloatArray]:
        zero = np.zeros_like(t1)
        d1 = _stack(-radius * omega * np.sin(omega * t1), radius * omega * np.cos(omega * t1), zero)
        d2 = _stack(zero, zero, np.full_like(t2, fraction))
        return d1, d2

    return SurfacePatch("cylinder", ((-1.0, 1.0), (-1.0, 1.0)), point, tangents)


def hyperboloid(fraction: float = 1.0) -> SurfacePatch:
    """One-sheet hyperboloid ``(cos(a) R, sin(a) R, phi t2)``, ``R = sqrt(1 + (phi t2)^2)``."""
    if fraction <= 0:
        raise DegenerateSurfaceError(f"Hyperboloid fraction must be positive, got {fraction}")
    omega = fraction * np.pi / 4

    def point(t1: FloatArray, t2: FloatArray) -> FloatArray:
        r = np.sqrt(1.0 + (fraction * t2) ** 2)
        return _stack(np.cos(omega * t1) * r, np.sin(omega * t1) * r, fraction * t2)

    def tangents(t1: FloatArray, t2: FloatArray) -> tuple[FloatArray, FloatArray]:
        r = np.sqrt(1.0 + (fraction * t2) ** 2)
        dr = fraction**2 * t2 / r
        c, s = np.cos(omega * t1), np.sin(omega * t1)
        d1 = _stack(-omega * s * r, omega * c * r, np.zeros_like(t1))
        d2 = _stack(c * dr, s * dr, np.full_like(t2, fraction))
        return d1, d2

    return SurfacePatch("hyperboloid", ((-1.0, 1.0), (-1.0, 1.0)), point, tangents)


SURFACES: dict[str, Callable[..., SurfacePatch]] = {
    "plane": plane,
    "cylinder": cylinder,
    "hyperboloid": hyperboloid,
}


def builtin_surface(name: str, params: Sequence[float] = ()) -> SurfacePatch:
    """Look up a named patch; ``params`` are passed positionally to its factory."""
    try:
        factory = SURFACES[name]
    except KeyError:
        raise DegenerateSurfaceError(
            f"Unknown surface {name!r}; choose from {sorted(SURFACES)}"
        ) from None
    try:
        return factory(*params)
    except TypeError as e:
        raise DegenerateSurfaceError(f"Bad parameters {list(params)} for {name!r}: {e}") from e


# ---------------------------------------------------------------------------
# Metric and kernels
# ---------------------------------------------------------------------------


def first_fundamental_form(surface: SurfacePatch, s: Point) -> MetricMatrix:
    """``A(s)`` with entries ``X_ti . X_tj`` at ``s``.

    Raises:
        DegenerateSurfaceError: If the tangents are (nearly) dependent.
    """
    d1, d2 = surface.derivatives(np.array(s[0]), np.array(s[1]))
    metric = MetricMatrix(float(d1 @ d1), float(d1 @ d2), float(d2 @ d2))
    if not metric.is_spd:
        raise DegenerateSurfaceError(f"Surface {surface.name!r} is degenerate at {s}")
    return metric


def jacobian(surface: SurfacePatch, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
    """Area element ``||X_t1 x X_t2||``."""
    d1, d2 = surface.derivatives(t1, t2)
    return np.linalg.norm(np.cross(d1, d2), axis=-1)


def quadratic_form(A: MetricMatrix, s: Point, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
    """``P(s, t) = (t - s)^T A (t - s)``."""
    dt1 = np.asarray(t1, dtype=np.float64) - s[0]
    dt2 = np.asarray(t2, dtype=np.float64) - s[1]
    return A.e * dt1 * dt1 + 2.0 * A.f * dt1 * dt2 + A.g * dt2 * dt2


def kernel_K(A: MetricMatrix, s: Point, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
    """Model kernel ``1 / sqrt(P(s, t))``.

    Raises:
        SingularPointError: If some ``t`` equals ``s``.
    """
    form = quadratic_form(A, s, t1, t2)
    if np.any(form <= 0):
        raise SingularPointError(f"Kernel K evaluated at its singular point {s}")
    return 1.0 / np.sqrt(form)


def kernel_G(surface: SurfacePatch, s: Point, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
    """Exact kernel ``1 / ||X(t) - X(s)||``."""
    distance = np.linalg.norm(surface(t1, t2) - surface(s[0], s[1]), axis=-1)
    if np.any(distance <= 0):
        raise SingularPointError(f"Kernel G evaluated at its singular point {s}")
    return 1.0 / distance


def rho(
    surface: SurfacePatch,
    s: Point,
    t1: ArrayLike,
    t2: ArrayLike,
    A: MetricMatrix | None = None,
) -> FloatArray:
    """``G / K = sqrt(P(s, t)) / ||X(t) - X(s)||``, continuously extended by 1 at ``t = s``."""
    A = first_fundamental_form(surface, s) if A is None else A
    t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
    coincident = np.hypot(t1 - s[0], t2 - s[1]) < COINCIDENCE_TOLERANCE * surface.scale
    distance = np.linalg.norm(surface(t1, t2) - surface(s[0], s[1]), axis=-1)
    form = quadratic_form(A, s, t1, t2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.sqrt(form) / distance
    return np.where(coincident, 1.0, ratio)

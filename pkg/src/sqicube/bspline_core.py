"""Univariate and tensor-product B-splines.

Every spline in the package lives on a ``KnotVector``. Evaluation uses the
Cox--de Boor recurrence; coefficient manipulations (knot insertion, Bezier
extraction, products) all go through the blossom (polar form), which makes
them exact up to rounding.

The module contains no quadrature and no geometry, only piecewise polynomials.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import comb

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.intp]

# Knots closer than this fraction of the knot range are treated as one breakpoint.
KNOT_TOLERANCE = 1e-12


class SplineError(ValueError):
    """Invalid knots, coefficients, indices or evaluation parameters."""


def _frozen(values: ArrayLike) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Degree plus nondecreasing knot sequence ``xi_0 <= ... <= xi_{m+p+1}``."""

    degree: int
    knots: FloatArray

    def __post_init__(self) -> None:
        knots = _frozen(self.knots)
        object.__setattr__(self, "knots", knots)
        p = self.degree
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 0:
            raise SplineError(f"Degree must be a nonnegative integer, got {p!r}")
        object.__setattr__(self, "degree", int(p))
        if knots.ndim != 1 or knots.size < p + 2:
            raise SplineError(f"Degree {p} needs at least {p + 2} knots, got {knots.size}")
        if not np.all(np.isfinite(knots)):
            raise SplineError("Knots must be finite")
        if np.any(np.diff(knots) < 0):
            raise SplineError(f"Knots must be nondecreasing: {knots.tolist()}")
        if np.any(knots[p + 1 :] <= knots[: -p - 1]):
            raise SplineError(f"Knot multiplicity exceeds degree + 1 = {p + 1}: {knots.tolist()}")

    @property
    def dimension(self) -> int:
        """Number of basis functions ``m + 1``."""
        return self.knots.size - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        """The interval ``[xi_p, xi_{m+1}]``."""
        return float(self.knots[self.degree]), float(self.knots[self.dimension])

    @property
    def tolerance(self) -> float:
        return KNOT_TOLERANCE * float(self.knots[-1] - self.knots[0])

    def support(self, j: int) -> tuple[float, float]:
        _check_index(self, j)
        return float(self.knots[j]), float(self.knots[j + self.degree + 1])

    def __repr__(self) -> str:
        return f"KnotVector(degree={self.degree}, knots={self.knots.tolist()})"


@dataclass(frozen=True, eq=False)
class Spline1D:
    basis: KnotVector
    coefficients: FloatArray

    def __post_init__(self) -> None:
        coefficients = _frozen(self.coefficients)
        object.__setattr__(self, "coefficients", coefficients)
        if coefficients.shape != (self.basis.dimension,):
            raise SplineError(
                f"Expected {self.basis.dimension} coefficients, got shape {coefficients.shape}"
            )
        lo, hi = self.basis.domain
        if not lo < hi:
            raise SplineError(f"Knot vector has an empty domain [{lo}, {hi}]")

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def domain(self) -> tuple[float, float]:
        return self.basis.domain

    def __call__(self, t: ArrayLike) -> FloatArray:
        t = _check_in_domain(np.asarray(t, dtype=np.float64), self.domain, self.basis.tolerance)
        return (basis_matrix(self.basis, t.ravel()) @ self.coefficients).reshape(t.shape)


@dataclass(frozen=True, eq=False)
class TensorSpline2D:
    basis_u: KnotVector
    basis_v: KnotVector
    coefficients: FloatArray

    def __post_init__(self) -> None:
        coefficients = _frozen(self.coefficients)
        object.__setattr__(self, "coefficients", coefficients)
        expected = (self.basis_u.dimension, self.basis_v.dimension)
        if coefficients.shape != expected:
            raise SplineError(f"Expected coefficient grid {expected}, got {coefficients.shape}")

    @property
    def domain(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.basis_u.domain, self.basis_v.domain

    def __call__(self, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
        _check_in_domain(t1, self.basis_u.domain, self.basis_u.tolerance)
        _check_in_domain(t2, self.basis_v.domain, self.basis_v.tolerance)
        bu = basis_matrix(self.basis_u, t1.ravel())
        bv = basis_matrix(self.basis_v, t2.ravel())
        return np.einsum("ni,ij,nj->n", bu, self.coefficients, bv).reshape(t1.shape)


@dataclass(frozen=True, eq=False)
class BSplineWeight:
    """A single tensor-product B-spline ``B_{I,d}(t) = B_u(t1) B_v(t2)``.

    Each direction carries exactly ``d + 2`` strictly increasing knots; the
    support rectangle ``R_I`` is the product of the two knot spans.
    """

    degree_u: int
    degree_v: int
    knots_u: FloatArray
    knots_v: FloatArray

    def __post_init__(self) -> None:
        for name, degree in (("knots_u", self.degree_u), ("knots_v", self.degree_v)):
            knots = _frozen(getattr(self, name))
            object.__setattr__(self, name, knots)
            if degree < 0 or knots.shape != (degree + 2,):
                raise SplineError(
                    f"A degree-{degree} B-spline needs exactly {degree + 2} knots, "
                    f"got {knots.size} in {name}"
                )
            if np.any(np.diff(knots) <= 0):
                raise SplineError(f"{name} must be strictly increasing: {knots.tolist()}")

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.degree_u, self.degree_v

    @property
    def support(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """The rectangle ``R_I``."""
        return (
            (float(self.knots_u[0]), float(self.knots_u[-1])),
            (float(self.knots_v[0]), float(self.knots_v[-1])),
        )

    @property
    def min_element_size(self) -> float:
        """Shortest knot interval of the weight in either direction."""
        return float(min(np.diff(self.knots_u).min(), np.diff(self.knots_v).min()))

    @cached_property
    def spline_u(self) -> Spline1D:
        return _single_bspline(self.degree_u, self.knots_u)

    @cached_property
    def spline_v(self) -> Spline1D:
        return _single_bspline(self.degree_v, self.knots_v)

    def __call__(self, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        """Evaluate the weight; zero outside ``R_I``."""
        t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
        return _weight_factor(self.degree_u, self.knots_u, t1) * _weight_factor(
            self.degree_v, self.knots_v, t2
        )


@dataclass(frozen=True, eq=False)
class ElementExtraction:
    """Bezier extraction of a whole basis.

    ``operators[e]`` maps Bernstein polynomials on element ``e`` to the
    ``p + 1`` basis functions that are nonzero there: the local basis at
    reference coordinate ``x`` is ``bernstein_basis(p, x) @ operators[e]``,
    column ``a`` being the global function ``spans[e] - p + a``.
    """

    degree: int
    breaks: FloatArray
    spans: IntArray
    operators: FloatArray

    @property
    def n_elements(self) -> int:
        return self.spans.size

    def local_coordinates(self, e: int, t: ArrayLike) -> FloatArray:
        lo, hi = self.breaks[e], self.breaks[e + 1]
        return (np.asarray(t, np.float64) - lo) / (hi - lo)

    def local_basis(self, e: int, t: ArrayLike) -> FloatArray:
        """Values ``(n, p + 1)`` of the functions supported on element ``e``."""
        return bernstein_basis(self.degree, self.local_coordinates(e, t)) @ self.operators[e]

    def first_function(self, e: int) -> int:
        return int(self.spans[e]) - self.degree


@dataclass(frozen=True, eq=False)
class BernsteinPieces:
    """Piecewise Bernstein form of a univariate spline (one row per element)."""

    degree: int
    breaks: FloatArray
    coefficients: FloatArray

    def __call__(self, t: ArrayLike) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        e = np.clip(np.searchsorted(self.breaks, t, side="right") - 1, 0, self.breaks.size - 2)
        lo, hi = self.breaks[e], self.breaks[e + 1]
        x = (t - lo) / (hi - lo)
        values = bernstein_basis(self.degree, x.ravel()) * self.coefficients[e.ravel()]
        return values.sum(axis=1).reshape(t.shape)


@dataclass(frozen=True, eq=False)
class BernsteinPatch:
    """A tensor Bernstein polynomial on a rectangle."""

    rect: tuple[tuple[float, float], tuple[float, float]]
    coefficients: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", _frozen(self.coefficients))
        if self.coefficients.ndim != 2:
            raise SplineError("Bernstein patch coefficients must form a 2D grid")

    def __call__(self, t1: ArrayLike, t2: ArrayLike) -> FloatArray:
        t1, t2 = np.broadcast_arrays(np.asarray(t1, np.float64), np.asarray(t2, np.float64))
        (u0, u1), (v0, v1) = self.rect
        qu, qv = self.coefficients.shape[0] - 1, self.coefficients.shape[1] - 1
        bu = bernstein_basis(qu, (t1.ravel() - u0) / (u1 - u0))
        bv = bernstein_basis(qv, (t2.ravel() - v0) / (v1 - v0))
        return np.einsum("ni,ij,nj->n", bu, self.coefficients, bv).reshape(t1.shape)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def clamped_knot_vector(
    degree: int,
    breakpoints: ArrayLike,
    multiplicities: Sequence[int] | None = None,
) -> KnotVector:
    """Open knot vector with end multiplicity ``degree + 1``.

    ``multiplicities`` gives the multiplicity of each interior breakpoint
    (default: all simple).
    """
    breaks = np.asarray(breakpoints, dtype=np.float64)
    if breaks.ndim != 1 or breaks.size < 2:
        raise SplineError("At least two breakpoints are required")
    if np.any(np.diff(breaks) <= 0):
        raise SplineError(f"Breakpoints must be strictly increasing: {breaks.tolist()}")
    interior = breaks[1:-1]
    if multiplicities is None:
        multiplicities = [1] * interior.size
    if len(multiplicities) != interior.size:
        raise SplineError(
            f"Got {len(multiplicities)} multiplicities for {interior.size} interior breakpoints"
        )
    for value, mult in zip(interior, multiplicities, strict=True):
        if not 1 <= mult <= degree + 1:
            raise SplineError(f"Multiplicity {mult} at {value} is outside [1, {degree + 1}]")
    knots = np.concatenate(
        [
            np.full(degree + 1, breaks[0]),
            np.repeat(interior, np.asarray(multiplicities, dtype=np.intp)),
            np.full(degree + 1, breaks[-1]),
        ]
    )
    return KnotVector(degree, knots)


def uniform_weight(
    degree: int,
    support: tuple[float, float] = (-1.0, 1.0),
    degree_v: int | None = None,
    support_v: tuple[float, float] | None = None,
) -> BSplineWeight:
    """The B-spline weight with ``d + 2`` uniform simple knots in each direction."""
    degree_v = degree if degree_v is None else degree_v
    support_v = support if support_v is None else support_v
    return BSplineWeight(
        degree_u=degree,
        degree_v=degree_v,
        knots_u=np.linspace(support[0], support[1], degree + 2),
        knots_v=np.linspace(support_v[0], support_v[1], degree_v + 2),
    )


def breakpoints(kv: KnotVector) -> tuple[FloatArray, IntArray]:
    """Distinct knot values and their multiplicities (near-equal knots merged)."""
    values: list[float] = []
    counts: list[int] = []
    for x in kv.knots:
        if values and x - values[-1] <= kv.tolerance:
            counts[-1] += 1
        else:
            values.append(float(x))
            counts.append(1)
    return np.array(values), np.array(counts, dtype=np.intp)


def restrict_knot_vector(kv: KnotVector, lo: float, hi: float) -> KnotVector:
    """Clamped knot vector on ``[lo, hi]`` keeping the interior knots of ``kv``.

    The spline space it spans is the restriction of ``kv``'s space to the
    subinterval; coefficients in it follow from blossoming.
    """
    a, b = kv.domain
    tol = kv.tolerance
    if lo < a - tol or hi > b + tol or not lo < hi:
        raise SplineError(f"[{lo}, {hi}] is not a subinterval of the domain [{a}, {b}]")
    values, counts = breakpoints(kv)
    inside = (values > lo + tol) & (values < hi - tol)
    breaks = np.concatenate([[lo], values[inside], [hi]])
    return clamped_knot_vector(kv.degree, breaks, counts[inside].tolist())


def _single_bspline(degree: int, knots: FloatArray) -> Spline1D:
    # The clamped basis on [knots[0], knots[-1]] with the weight's interior
    # knots contains the weight itself as function number ``degree``.
    basis = clamped_knot_vector(degree, knots)
    coefficients = np.zeros(basis.dimension)
    coefficients[degree] = 1.0
    return Spline1D(basis, coefficients)


def _weight_factor(degree: int, knots: FloatArray, t: FloatArray) -> FloatArray:
    kv = KnotVector(degree, knots)
    inside = (t >= knots[0]) & (t <= knots[-1])
    values = np.zeros(t.shape)
    if np.any(inside):
        values[inside] = basis_matrix(kv, t[inside])[:, 0]
    return values


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _check_index(kv: KnotVector, j: int) -> None:
    if not 0 <= j < kv.dimension:
        raise SplineError(f"Basis index {j} out of range [0, {kv.dimension - 1}]")


def _check_in_domain(t: FloatArray, domain: tuple[float, float], tol: float) -> FloatArray:
    lo, hi = domain
    if np.any(t < lo - tol) or np.any(t > hi + tol) or np.any(np.isnan(t)):
        raise SplineError(f"Parameter outside the domain [{lo}, {hi}]")
    return t


def _spans(xi: FloatArray, t: FloatArray) -> IntArray:
    nonempty = np.flatnonzero(np.diff(xi) > 0)
    spans = np.searchsorted(xi, t, side="right") - 1
    return np.clip(spans, nonempty[0], nonempty[-1])


def _cox_de_boor(p: int, xi: FloatArray, spans: IntArray, t: FloatArray) -> FloatArray:
    n = t.size
    values = np.zeros((n, p + 1))
    values[:, 0] = 1.0
    left = np.empty((n, p + 1))
    right = np.empty((n, p + 1))
    for j in range(1, p + 1):
        left[:, j] = t - xi[spans + 1 - j]
        right[:, j] = xi[spans + j] - t
        saved = np.zeros(n)
        for r in range(j):
            temp = values[:, r] / (right[:, r + 1] + left[:, j - r])
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        values[:, j] = saved
    return values


def find_spans(kv: KnotVector, t: ArrayLike) -> IntArray:
    """Index ``mu`` with ``xi_mu <= t < xi_{mu+1}`` for each ``t``.

    The last nonempty interval is closed on the right, which makes every
    basis function left-continuous at the right end of the knot range.
    """
    return _spans(kv.knots, np.asarray(t, dtype=np.float64))


def basis_funs(kv: KnotVector, spans: ArrayLike, t: ArrayLike) -> FloatArray:
    """The ``p + 1`` basis functions nonzero on each span, shape ``(n, p + 1)``.

    Requires ``p <= span <= m`` (always true for clamped knot vectors).
    """
    spans = np.asarray(spans, dtype=np.intp).ravel()
    t = np.asarray(t, dtype=np.float64).ravel()
    if np.any(spans < kv.degree) or np.any(spans > kv.dimension - 1):
        raise SplineError("Span index outside [p, m]")
    return _cox_de_boor(kv.degree, kv.knots, spans, t)


def basis_matrix(kv: KnotVector, t: ArrayLike) -> FloatArray:
    """Dense collocation matrix ``B[k, j] = B_{j,p}(t_k)`` over the whole knot range."""
    p = kv.degree
    t = np.asarray(t, dtype=np.float64).ravel()
    lo, hi = float(kv.knots[0]), float(kv.knots[-1])
    if np.any(t < lo - kv.tolerance) or np.any(t > hi + kv.tolerance) or np.any(np.isnan(t)):
        raise SplineError(f"Parameter outside the knot range [{lo}, {hi}]")
    t = np.clip(t, lo, hi)
    # p extra end knots leave the original functions untouched and keep span >= p.
    padded = np.concatenate([np.full(p, lo), kv.knots, np.full(p, hi)])
    spans = _spans(padded, t)
    full = np.zeros((t.size, padded.size - p - 1))
    rows = np.arange(t.size)[:, None]
    full[rows, spans[:, None] - p + np.arange(p + 1)] = _cox_de_boor(p, padded, spans, t)
    return full[:, p : p + kv.dimension]


def eval_basis(kv: KnotVector, j: int, t: float) -> float:
    """``B_{j,p}(t)`` by the Cox--de Boor recurrence."""
    _check_index(kv, j)
    return float(basis_matrix(kv, [t])[0, j])


def eval_spline_1d(s: Spline1D, t: float) -> float:
    return float(s(np.array([t]))[0])


def eval_spline_2d(s: TensorSpline2D, t: tuple[float, float]) -> float:
    return float(s(np.array([t[0]]), np.array([t[1]]))[0])


def greville_abscissae(kv: KnotVector) -> FloatArray:
    """Knot averages ``(xi_{j+1} + ... + xi_{j+p}) / p``; midpoints for degree 0."""
    p, xi = kv.degree, kv.knots
    if p == 0:
        return 0.5 * (xi[:-1] + xi[1:])
    windows = np.lib.stride_tricks.sliding_window_view(xi[1:-1], p)
    return windows.mean(axis=1)


# ---------------------------------------------------------------------------
# Blossoms, Bernstein form and extraction
# ---------------------------------------------------------------------------


def bernstein_basis(degree: int, x: ArrayLike) -> FloatArray:
    """Bernstein polynomials of ``degree`` on [0, 1], shape ``(n, degree + 1)``."""
    x = np.asarray(x, dtype=np.float64).ravel()[:, None]
    k = np.arange(degree + 1)
    return comb(degree, k) * x**k * (1.0 - x) ** (degree - k)


def blossom(kv: KnotVector, coefficients: ArrayLike, span: int, args: Sequence[float]) -> FloatArray:
    """Blossom of the polynomial piece on ``span`` evaluated at ``args``.

    De Boor's algorithm with a different abscissa at each level. Trailing axes
    of ``coefficients`` are carried along, so passing an identity matrix
    yields the blossom as a linear functional of the coefficients.
    """
    p, xi = kv.degree, kv.knots
    if len(args) != p:
        raise SplineError(f"A degree-{p} blossom takes {p} arguments, got {len(args)}")
    if not p <= span <= kv.dimension - 1:
        raise SplineError(f"Span {span} outside [{p}, {kv.dimension - 1}]")
    d = np.array(np.asarray(coefficients, dtype=np.float64)[span - p : span + 1], copy=True)
    for r in range(1, p + 1):
        x = args[r - 1]
        for i in range(p, r - 1, -1):
            g = span - p + i
            alpha = (x - xi[g]) / (xi[g + p + 1 - r] - xi[g])
            d[i] = (1.0 - alpha) * d[i - 1] + alpha * d[i]
    return d[p]


def bernstein_blossom(
    coefficients: ArrayLike, lo: float, hi: float, args: Sequence[float]
) -> FloatArray:
    """Blossom of a Bernstein-form polynomial on ``[lo, hi]`` (de Casteljau)."""
    b = np.array(coefficients, dtype=np.float64, copy=True)
    q = b.shape[0] - 1
    if len(args) != q:
        raise SplineError(f"A degree-{q} blossom takes {q} arguments, got {len(args)}")
    for x in args:
        u = (x - lo) / (hi - lo)
        b = (1.0 - u) * b[:-1] + u * b[1:]
    return b[0]


def span_of_interval(kv: KnotVector, lo: float, hi: float) -> int:
    """Span whose closed knot interval contains ``[lo, hi]``."""
    span = int(find_spans(kv, 0.5 * (lo + hi)))
    tol = kv.tolerance
    if lo < kv.knots[span] - tol or hi > kv.knots[span + 1] + tol:
        raise SplineError(f"[{lo}, {hi}] crosses a knot of {kv!r}")
    return span


def bernstein_operator(kv: KnotVector, lo: float, hi: float) -> FloatArray:
    """Matrix ``(p + 1, m + 1)`` taking spline coefficients to Bernstein
    coefficients of the piece on ``[lo, hi]``."""
    p = kv.degree
    span = span_of_interval(kv, lo, hi)
    identity = np.eye(kv.dimension)
    return np.stack(
        [blossom(kv, identity, span, [lo] * (p - k) + [hi] * k) for k in range(p + 1)]
    )


def extraction_operators(kv: KnotVector) -> ElementExtraction:
    """Bezier extraction operators of every nonempty element in the domain."""
    p = kv.degree
    lo, hi = kv.domain
    spans = [
        mu
        for mu in range(p, kv.dimension)
        if kv.knots[mu + 1] - kv.knots[mu] > kv.tolerance
        and kv.knots[mu] >= lo - kv.tolerance
        and kv.knots[mu + 1] <= hi + kv.tolerance
    ]
    breaks = [float(kv.knots[spans[0]])] + [float(kv.knots[mu + 1]) for mu in spans]
    operators = np.stack(
        [
            bernstein_operator(kv, kv.knots[mu], kv.knots[mu + 1])[:, mu - p : mu + 1]
            for mu in spans
        ]
    )
    return ElementExtraction(
        degree=p,
        breaks=_frozen(breaks),
        spans=np.array(spans, dtype=np.intp),
        operators=operators,
    )


def bezier_extract(s: Spline1D) -> BernsteinPieces:
    """Bernstein coefficients of ``s`` on every knot interval of its domain."""
    extraction = extraction_operators(s.basis)
    p = s.degree
    coefficients = np.stack(
        [
            extraction.operators[e] @ s.coefficients[mu - p : mu + 1]
            for e, mu in enumerate(extraction.spans)
        ]
    )
    return BernsteinPieces(degree=p, breaks=extraction.breaks, coefficients=coefficients)


# ---------------------------------------------------------------------------
# Knot merging
# ---------------------------------------------------------------------------


def merge_knot_vectors(a: KnotVector, b: KnotVector, target_degree: int) -> KnotVector:
    """Knot vector of the product space of splines on ``a`` and ``b``.

    At a breakpoint the product is as smooth as its least smooth factor, so the
    merged multiplicity is ``target - min(p_a - mult_a, p_b - mult_b)``, the
    min running over the factors that have a knot there.
    """
    if target_degree != a.degree + b.degree:
        raise SplineError(
            f"Product degree must be {a.degree} + {b.degree}, got {target_degree}"
        )
    (lo, hi), (lo_b, hi_b) = a.domain, b.domain
    tol = KNOT_TOLERANCE * max(hi - lo, hi_b - lo_b)
    if abs(lo - lo_b) > tol or abs(hi - hi_b) > tol:
        raise SplineError(f"Domains differ: [{lo}, {hi}] vs [{lo_b}, {hi_b}]")

    entries: list[tuple[float, int]] = []
    for kv in (a, b):
        values, counts = breakpoints(kv)
        for value, count in zip(values, counts, strict=True):
            if lo + tol < value < hi - tol:
                entries.append((float(value), kv.degree - int(count)))
    entries.sort()

    merged: list[float] = []
    deficits: list[int] = []
    for value, deficit in entries:
        if merged and value - merged[-1] <= tol:
            deficits[-1] = min(deficits[-1], deficit)
        else:
            merged.append(value)
            deficits.append(deficit)
    multiplicities = [target_degree - deficit for deficit in deficits]
    return clamped_knot_vector(target_degree, [lo, *merged, hi], multiplicities)


def elementary_symmetric(args: Sequence[float]) -> FloatArray:
    """``e_0, ..., e_n`` of the arguments."""
    signs = (-1.0) ** np.arange(len(args) + 1)
    return signs * np.poly(np.asarray(args, dtype=np.float64)) if len(args) else np.ones(1)


# ---------------------------------------------------------------------------
# Plain-text form
# ---------------------------------------------------------------------------


def format_knots(kv: KnotVector) -> str:
    """``"<degree>: k0, k1, ..."`` with round-trippable floats."""
    return f"{kv.degree}: " + ", ".join(repr(float(k)) for k in kv.knots)


def parse_knots(text: str) -> KnotVector:
    """Inverse of ``format_knots``.

    Raises:
        SplineError: If the text is not ``<degree>: <comma-separated knots>``.
    """
    degree_text, sep, knots_text = text.partition(":")
    if not sep:
        raise SplineError(f"Expected '<degree>: <knots>', got {text!r}")
    try:
        degree = int(degree_text)
        knots = [float(item) for item in knots_text.split(",") if item.strip()]
    except ValueError as e:
        raise SplineError(f"Malformed knot vector {text!r}: {e}") from e
    return KnotVector(degree, np.array(knots))

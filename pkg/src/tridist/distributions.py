"""Closed-form distance distributions for pairs of equilateral triangles.

Two points are drawn uniformly and independently, each from one triangle of a
pair of congruent equilateral triangles with side ``s``.  Four arrangements are
covered (see :class:`DistanceCase`).  Every density is piecewise analytic in
the normalized distance ``x = d / s`` with breakpoints taken from
``{0, sqrt(3)/2, 1, sqrt(3), 2}``; the branch expressions below are written for
unit side and scaled at the public boundary::

    G_s(d) = G_1(d / s),    g_s(d) = g_1(d / s) / s
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Branch",
    "DistanceCase",
    "TriangleDistribution",
    "branch_table",
    "breakpoints",
    "unit_cdf",
    "unit_pdf",
]

SQRT3 = math.sqrt(3.0)
PI = math.pi
HALF_SQRT3 = SQRT3 / 2.0
PI_SQRT3 = PI / SQRT3  # pi / sqrt(3)
INV_SQRT3 = 1.0 / SQRT3


class DistanceCase(enum.Enum):
    """Where the two endpoints live relative to each other."""

    WITHIN = "within"  # both in the same triangle
    ADJACENT_SIDE = "adjacent"  # two triangles sharing a side
    PARALLEL_VERTEX = "parallel"  # translates sharing one vertex
    DIAGONAL_VERTEX = "diagonal"  # point reflections through a shared vertex

    @property
    def multiplier(self) -> float:
        """Upper end of the support for unit side."""
        return _MULTIPLIER[self]

    @classmethod
    def parse(cls, name: str) -> "DistanceCase":
        try:
            return cls(name.strip().lower())
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise InvalidArgumentError(
                f"unknown distance case {name!r}; expected one of {names}"
            ) from None


_MULTIPLIER = {
    DistanceCase.WITHIN: 1.0,
    DistanceCase.ADJACENT_SIDE: SQRT3,
    DistanceCase.PARALLEL_VERTEX: 2.0,
    DistanceCase.DIAGONAL_VERTEX: 2.0,
}


# Guarded elementary pieces shared by the branches.  Rounding can push the
# arcsine argument slightly above 1 or a radicand slightly below 0 right at a
# breakpoint, so both are clamped.


def _asin_half(x):
    return np.arcsin(np.clip(HALF_SQRT3 / x, -1.0, 1.0))


def _asin_full(x):
    return np.arcsin(np.clip(SQRT3 / x, -1.0, 1.0))


def _root4(x):
    return np.sqrt(np.maximum(4.0 * x * x - 3.0, 0.0))


def _root_quarter(x):
    return np.sqrt(np.maximum(x * x - 0.75, 0.0))


def _root3(x):
    return np.sqrt(np.maximum(x * x - 3.0, 0.0))


# --- within one triangle ---------------------------------------------------


def _within_pdf_1(x):
    return 4.0 * x * ((2.0 + 4.0 * PI_SQRT3 / 3.0) * x**2 - 8.0 * x + 2.0 * PI_SQRT3)


def _within_pdf_2(x):
    return 4.0 * x * (
        2.0 * INV_SQRT3 * (4.0 * x**2 + 6.0) * _asin_half(x)
        + (2.0 - 8.0 * PI_SQRT3 / 3.0) * x**2
        + 6.0 * _root4(x)
        - 8.0 * x
        - 4.0 * PI_SQRT3
    )


def _within_cdf_1(x):
    return 2.0 * (
        (1.0 + 2.0 * PI_SQRT3 / 3.0) * x**4 - 16.0 / 3.0 * x**3 + 2.0 * PI_SQRT3 * x**2
    )


def _within_cdf_2(x):
    return 2.0 * (
        4.0 * x**2 * INV_SQRT3 * (x**2 + 3.0) * _asin_half(x)
        + (26.0 * x**2 / 3.0 + 1.0) * _root_quarter(x)
        + (1.0 - 4.0 * PI_SQRT3 / 3.0) * x**4
        - 16.0 / 3.0 * x**3
        - 4.0 * PI_SQRT3 * x**2
    )


# --- adjacent triangles sharing a side -------------------------------------


def _adjacent_pdf_1(x):
    return 4.0 * x * (8.0 / 3.0 * x - (2.0 / 3.0 + 10.0 * PI_SQRT3 / 9.0) * x**2)


def _adjacent_pdf_2(x):
    return 4.0 * x * (
        -4.0 * INV_SQRT3 * (1.0 + 4.0 * x**2 / 3.0) * _asin_half(x)
        + (14.0 * PI_SQRT3 / 9.0 - 2.0 / 3.0) * x**2
        - 8.0 / 3.0 * _root4(x)
        + 8.0 / 3.0 * x
        + 2.0 * PI_SQRT3
    )


def _adjacent_pdf_3(x):
    return 4.0 * x * (
        4.0 * INV_SQRT3 * (1.0 - x**2 / 3.0) * _asin_half(x)
        + (2.0 * PI_SQRT3 / 9.0 - 2.0 / 3.0) * x**2
        + _root4(x)
        - 2.0 * PI_SQRT3 / 3.0
        - 1.0
    )


def _adjacent_cdf_1(x):
    return 2.0 * (16.0 / 9.0 * x**3 - (1.0 / 3.0 + 5.0 * PI_SQRT3 / 9.0) * x**4)


def _adjacent_cdf_2(x):
    return 2.0 * (
        -4.0 * x**2 * INV_SQRT3 * (1.0 + 2.0 * x**2 / 3.0) * _asin_half(x)
        - 4.0 * x**2 * _root_quarter(x)
        + (7.0 * PI_SQRT3 / 9.0 - 1.0 / 3.0) * x**4
        + 16.0 / 9.0 * x**3
        + 2.0 * PI_SQRT3 * x**2
    )


def _adjacent_cdf_3(x):
    return 2.0 * (
        4.0 * x**2 * INV_SQRT3 * (1.0 - x**2 / 6.0) * _asin_half(x)
        + (11.0 * x**2 / 9.0 + 5.0 / 6.0) * _root_quarter(x)
        + (PI_SQRT3 / 9.0 - 1.0 / 3.0) * x**4
        - (2.0 * PI_SQRT3 / 3.0 + 1.0) * x**2
        - 0.25
    )


# --- parallel triangles sharing a vertex -----------------------------------


def _parallel_pdf_1(x):
    return 4.0 * x * ((4.0 * PI_SQRT3 / 9.0 - 1.0 / 3.0) * x**2)


def _parallel_pdf_2(x):
    return 4.0 * x * (
        -4.0 * INV_SQRT3 * _asin_half(x)
        + (4.0 * PI_SQRT3 / 9.0 - 1.0 / 3.0) * x**2
        - 4.0 / 3.0 * _root4(x)
        + 2.0 * PI_SQRT3
    )


def _parallel_pdf_3(x):
    return 4.0 * x * (
        4.0 * INV_SQRT3 * (x**2 / 3.0 - 1.0) * _asin_half(x)
        + x**2
        - _root4(x)
        - 8.0 / 3.0 * x
        + 2.0 * PI_SQRT3
        + 1.0
    )


def _parallel_pdf_4(x):
    return 4.0 * x * (
        4.0 * INV_SQRT3 * (x**2 / 3.0 + 2.0) * _asin_full(x)
        + (1.0 / 3.0 - 4.0 * PI_SQRT3 / 9.0) * x**2
        + 4.0 * _root3(x)
        - 8.0 / 3.0 * x
        - 8.0 * PI_SQRT3 / 3.0
    )


def _parallel_cdf_1(x):
    return 2.0 * ((2.0 * PI_SQRT3 / 9.0 - 1.0 / 6.0) * x**4)


def _parallel_cdf_2(x):
    return 2.0 * (
        -4.0 * x**2 * INV_SQRT3 * _asin_half(x)
        + (2.0 * PI_SQRT3 / 9.0 - 1.0 / 6.0) * x**4
        - (8.0 * x**2 / 9.0 + 1.0 / 3.0) * _root4(x)
        + 2.0 * PI_SQRT3 * x**2
    )


def _parallel_cdf_3(x):
    return 2.0 * (
        4.0 * x**2 * INV_SQRT3 * (x**2 / 6.0 - 1.0) * _asin_half(x)
        - (11.0 * x**2 / 18.0 + 5.0 / 12.0) * _root4(x)
        + x**4 / 2.0
        - 16.0 / 9.0 * x**3
        + (2.0 * PI_SQRT3 + 1.0) * x**2
        - 1.0 / 12.0
    )


def _parallel_cdf_4(x):
    return 2.0 * (
        4.0 * x**2 * INV_SQRT3 * (x**2 / 6.0 + 2.0) * _asin_full(x)
        + (26.0 * x**2 / 9.0 + 4.0 / 3.0) * _root3(x)
        + (1.0 / 6.0 - 2.0 * PI_SQRT3 / 9.0) * x**4
        - 16.0 / 9.0 * x**3
        - 8.0 * PI_SQRT3 / 3.0 * x**2
        - 5.0 / 6.0
    )


# --- diagonal triangles sharing a vertex -----------------------------------


def _diagonal_pdf_1(x):
    return 4.0 * x * ((2.0 / 3.0 - 2.0 * PI_SQRT3 / 9.0) * x**2)


def _diagonal_pdf_2(x):
    return 4.0 * x * (
        4.0 * INV_SQRT3 * (2.0 * x**2 / 3.0 + 1.0) * _asin_half(x)
        + (2.0 / 3.0 - 14.0 * PI_SQRT3 / 9.0) * x**2
        + 2.0 * _root4(x)
        - 2.0 * PI_SQRT3
    )


def _diagonal_pdf_3(x):
    return 4.0 * x * (
        -4.0 * INV_SQRT3 * (2.0 * x**2 / 3.0 + 1.0) * _asin_half(x)
        + (2.0 * PI_SQRT3 / 9.0 - 2.0 / 3.0) * x**2
        - 2.0 * _root4(x)
        + 16.0 / 3.0 * x
        + 2.0 * PI_SQRT3 / 3.0
    )


def _diagonal_pdf_4(x):
    return 4.0 * x * (
        -4.0 * x**2 * INV_SQRT3 / 3.0 * _asin_full(x)
        + (4.0 * PI_SQRT3 / 9.0 - 4.0 / 3.0) * x**2
        - 4.0 / 3.0 * _root3(x)
        + 16.0 / 3.0 * x
        - 4.0
    )


def _diagonal_cdf_1(x):
    return 2.0 * ((1.0 / 3.0 - PI_SQRT3 / 9.0) * x**4)


def _diagonal_cdf_2(x):
    return 2.0 * (
        4.0 * x**2 * INV_SQRT3 * (x**2 / 3.0 + 1.0) * _asin_half(x)
        + (13.0 * x**2 / 9.0 + 1.0 / 6.0) * _root4(x)
        + (1.0 / 3.0 - 7.0 * PI_SQRT3 / 9.0) * x**4
        - 2.0 * PI_SQRT3 * x**2
    )


def _diagonal_cdf_3(x):
    return 2.0 * (
        -4.0 * x**2 * INV_SQRT3 * (x**2 / 3.0 + 1.0) * _asin_half(x)
        - (13.0 * x**2 / 9.0 + 1.0 / 6.0) * _root4(x)
        + (PI_SQRT3 / 9.0 - 1.0 / 3.0) * x**4
        + 32.0 / 9.0 * x**3
        + 2.0 * PI_SQRT3 / 3.0 * x**2
        + 1.0 / 3.0
    )


def _diagonal_cdf_4(x):
    return 2.0 * (
        -2.0 * x**4 * INV_SQRT3 / 3.0 * _asin_full(x)
        + (4.0 / 3.0 - 10.0 * x**2 / 9.0) * _root3(x)
        + (2.0 * PI_SQRT3 / 9.0 - 2.0 / 3.0) * x**4
        + 32.0 / 9.0 * x**3
        - 4.0 * x**2
        + 11.0 / 6.0
    )


class Branch(NamedTuple):
    """One analytic piece of a density and its CDF on ``[lo, hi]`` (unit side)."""

    lo: float
    hi: float
    pdf: Callable
    cdf: Callable
    name: str


def _table(prefix, bounds, pdfs, cdfs):
    return tuple(
        Branch(lo, hi, p, c, f"{prefix}[{i}]")
        for i, (lo, hi, p, c) in enumerate(zip(bounds[:-1], bounds[1:], pdfs, cdfs))
    )


_TABLES = {
    DistanceCase.WITHIN: _table(
        "within",
        (0.0, HALF_SQRT3, 1.0),
        (_within_pdf_1, _within_pdf_2),
        (_within_cdf_1, _within_cdf_2),
    ),
    DistanceCase.ADJACENT_SIDE: _table(
        "adjacent",
        (0.0, HALF_SQRT3, 1.0, SQRT3),
        (_adjacent_pdf_1, _adjacent_pdf_2, _adjacent_pdf_3),
        (_adjacent_cdf_1, _adjacent_cdf_2, _adjacent_cdf_3),
    ),
    DistanceCase.PARALLEL_VERTEX: _table(
        "parallel",
        (0.0, HALF_SQRT3, 1.0, SQRT3, 2.0),
        (_parallel_pdf_1, _parallel_pdf_2, _parallel_pdf_3, _parallel_pdf_4),
        (_parallel_cdf_1, _parallel_cdf_2, _parallel_cdf_3, _parallel_cdf_4),
    ),
    DistanceCase.DIAGONAL_VERTEX: _table(
        "diagonal",
        (0.0, HALF_SQRT3, 1.0, SQRT3, 2.0),
        (_diagonal_pdf_1, _diagonal_pdf_2, _diagonal_pdf_3, _diagonal_pdf_4),
        (_diagonal_cdf_1, _diagonal_cdf_2, _diagonal_cdf_3, _diagonal_cdf_4),
    ),
}


def branch_table(case: DistanceCase) -> tuple[Branch, ...]:
    """Ordered, contiguous branches covering the unit-side support of ``case``."""
    return _TABLES[case]


def breakpoints(case: DistanceCase) -> tuple[float, ...]:
    """All branch boundaries of ``case`` for unit side, both endpoints included."""
    table = _TABLES[case]
    return tuple(b.lo for b in table) + (table[-1].hi,)


def _as_finite(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError("distance must be finite")
    return arr


def _piecewise(case, x, attr):
    table = _TABLES[case]
    out = np.zeros(x.shape)
    last = len(table) - 1
    for i, br in enumerate(table):
        if i == last:
            mask = (x >= br.lo) & (x <= br.hi)
        else:
            mask = (x >= br.lo) & (x < br.hi)
        if np.any(mask):
            out[mask] = getattr(br, attr)(x[mask])
    return out, x > table[-1].hi


# Close to the upper end of the support the closed-form CDF loses everything
# to cancellation (1 - G falls below 1e-15 while the branch terms are O(10)),
# which breaks monotonicity in floating point.  There the CDF is taken as
# 1 - (integral of the last density branch from x to the end), using a fixed
# Gauss-Legendre rule; the last branch is analytic on that short interval.
_TAIL_WIDTH = 0.05
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _upper_tail(case, x):
    hi = _TABLES[case][-1].hi
    half = 0.5 * (hi - x)
    t = x[:, None] + half[:, None] * (_GL_NODES[None, :] + 1.0)
    g = _TABLES[case][-1].pdf(t)
    return half * (g @ _GL_WEIGHTS)


def _unit_cdf_array(case, x):
    out, above = _piecewise(case, x, "cdf")
    hi = _TABLES[case][-1].hi
    near = (x >= hi - _TAIL_WIDTH) & (x <= hi)
    if np.any(near):
        out[near] = 1.0 - _upper_tail(case, x[near])
    out[above] = 1.0
    return np.clip(out, 0.0, 1.0)


def _unwrap(arr):
    return float(arr) if arr.ndim == 0 else arr


def unit_pdf(case: DistanceCase, x):
    """Density for unit side at normalized distance ``x``; zero off support."""
    x = _as_finite(x)
    out, _ = _piecewise(case, x, "pdf")
    return _unwrap(np.maximum(out, 0.0))


def unit_cdf(case: DistanceCase, x):
    """Distribution function for unit side at normalized distance ``x``."""
    return _unwrap(_unit_cdf_array(case, _as_finite(x)))


@dataclass(frozen=True)
class TriangleDistribution:
    """Distance distribution for one case at side length ``side``.

    ``pdf`` and ``cdf`` accept scalars or arrays and are defined on the whole
    real line (zero density and a clamped CDF outside the support).
    """

    case: DistanceCase
    side: float = 1.0

    def __post_init__(self):
        if not isinstance(self.case, DistanceCase):
            raise InvalidArgumentError(f"not a DistanceCase: {self.case!r}")
        side = float(self.side)
        if not (math.isfinite(side) and side > 0.0):
            raise InvalidArgumentError(f"side must be positive and finite, got {self.side!r}")
        object.__setattr__(self, "side", side)

    @property
    def upper(self) -> float:
        return self.side * self.case.multiplier

    def support(self) -> tuple[float, float]:
        return 0.0, self.upper

    def breakpoints(self) -> tuple[float, ...]:
        """Branch boundaries in length units, including both support ends."""
        return tuple(self.side * b for b in breakpoints(self.case))

    def pdf(self, d):
        x = _as_finite(d) / self.side
        out, _ = _piecewise(self.case, x, "pdf")
        return _unwrap(np.maximum(out, 0.0) / self.side)

    def cdf(self, d):
        return _unwrap(_unit_cdf_array(self.case, _as_finite(d) / self.side))

    def quantile(self, p):
        """Smallest ``d`` with ``cdf(d) >= p``, found by bisection.

        The bracket is refined to ``1e-12 * side``; the upper end of the final
        bracket is returned so that the CDF there is at least ``p``.
        """
        arr = np.asarray(p, dtype=float)
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise InvalidArgumentError("probability must lie in [0, 1]")
        flat = arr.ravel()
        out = np.empty(flat.shape)
        for i, prob in enumerate(flat):
            out[i] = self.side * _bisect_unit(self.case, prob)
        return _unwrap(out.reshape(arr.shape))


def _bisect_unit(case, p, tol=1e-12):
    hi = case.multiplier
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return hi
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if unit_cdf(case, mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi

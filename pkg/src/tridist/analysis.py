"""Moments, polynomial fits and mixture-identity residuals."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy import integrate

from .distributions import DistanceCase, TriangleDistribution, unit_pdf
from .errors import InvalidArgumentError, NumericalFailureError
from .montecarlo import EmpiricalSample

__all__ = [
    "FitGrid",
    "MomentsReport",
    "PolynomialFit",
    "evaluate_polynomial",
    "fit_function",
    "fit_polynomial",
    "identity_residual_parallel",
    "integrate_piecewise",
    "moment",
    "moments_report",
    "total_probability",
    "variance",
]

QUAD_ABS_TOL = 1e-11
DEFAULT_DEGREE = 20
DEFAULT_GRID_POINTS = 1001


def integrate_piecewise(
    func: Callable[[float], float], points: Sequence[float], abs_tol: float = QUAD_ABS_TOL
) -> float:
    """Integrate ``func`` over ``[points[0], points[-1]]``, splitting at every point.

    Each piece is handed to QUADPACK's adaptive Gauss-Kronrod routine with an
    equal share of ``abs_tol``.  Raises :class:`NumericalFailureError` if any
    piece reports non-convergence or an error estimate above its share.
    """
    pts = sorted(float(p) for p in points)
    pieces = [(a, b) for a, b in zip(pts[:-1], pts[1:]) if b > a]
    if not pieces:
        return 0.0
    share = abs_tol / len(pieces)
    total = 0.0
    for a, b in pieces:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            res = integrate.quad(func, a, b, epsabs=share, epsrel=0.0, limit=200, full_output=1)
        value, err = res[0], res[1]
        total += value
        if len(res) > 3 or err > share:
            raise NumericalFailureError(
                f"quadrature on [{a!r}, {b!r}] did not converge (error estimate {err:.3g})",
                estimate=total,
            )
    return total


def total_probability(dist: TriangleDistribution) -> float:
    """Integral of the density over its support; 1 up to quadrature error."""
    return integrate_piecewise(dist.pdf, dist.breakpoints())


def moment(dist: TriangleDistribution, k: int) -> float:
    """Raw moment ``E[D**k]``.

    Integrated in unit-side coordinates branch by branch and rescaled by
    ``side**k``.
    """
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"moment order must be a positive integer, got {k!r}")
    k = int(k)
    case = dist.case
    value = integrate_piecewise(lambda x: x**k * unit_pdf(case, x), _unit_points(case))
    return value * dist.side**k


def _unit_points(case):
    return TriangleDistribution(case, 1.0).breakpoints()


def variance(dist: TriangleDistribution) -> float:
    m1 = moment(dist, 1)
    return moment(dist, 2) - m1 * m1


@dataclass(frozen=True)
class MomentsReport:
    case: DistanceCase
    side: float
    m1: float
    m2: float
    variance: float
    source: str  # "analytic" or "simulated"

    def as_dict(self) -> dict:
        return {
            "case": self.case.value,
            "side": self.side,
            "source": self.source,
            "m1": self.m1,
            "m2": self.m2,
            "variance": self.variance,
        }


def moments_report(case: DistanceCase, side: float = 1.0, sim: Optional[EmpiricalSample] = None):
    """Analytic moments, plus sample moments when ``sim`` is given.

    Returns a single :class:`MomentsReport` without ``sim`` and an
    ``(analytic, simulated)`` pair with it.
    """
    dist = TriangleDistribution(case, side)
    m1 = moment(dist, 1)
    m2 = moment(dist, 2)
    analytic = MomentsReport(case, dist.side, m1, m2, m2 - m1 * m1, "analytic")
    if sim is None:
        return analytic
    if sim.case is not case or not math.isclose(sim.side, dist.side, rel_tol=1e-12):
        raise InvalidArgumentError(
            f"sample is for ({sim.case}, side={sim.side}), not ({case}, side={dist.side})"
        )
    x = sim.distances
    s1 = float(np.mean(x))
    s2 = float(np.mean(x * x))
    simulated = MomentsReport(case, dist.side, s1, s2, float(np.var(x)), "simulated")
    return analytic, simulated


class FitGrid(NamedTuple):
    points: int
    lower: float
    upper: float

    def values(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.points)


@dataclass(frozen=True)
class PolynomialFit:
    """Least-squares polynomial in ``d``; coefficients run from ``d**degree`` to ``d**0``."""

    case: Optional[DistanceCase]
    degree: int
    coefficients: tuple[float, ...]
    grid: FitGrid
    norm_residuals: float

    def __call__(self, d):
        return evaluate_polynomial(self, d)


def evaluate_polynomial(fit: PolynomialFit, d):
    """Horner evaluation of the monomial coefficients."""
    x = np.asarray(d, dtype=float)
    acc = np.zeros_like(x)
    for c in fit.coefficients:
        acc = acc * x + c
    return float(acc) if acc.ndim == 0 else acc


def fit_function(
    func: Callable,
    lower: float,
    upper: float,
    degree: int = DEFAULT_DEGREE,
    grid_points: int = DEFAULT_GRID_POINTS,
    case: Optional[DistanceCase] = None,
) -> PolynomialFit:
    """Fit ``func`` on a uniform grid over ``[lower, upper]``.

    The least-squares problem is solved in a Chebyshev basis on the interval
    mapped to ``[-1, 1]`` and only then converted to monomials in ``d``; the
    reported norm of residuals uses the monomial form actually returned.
    """
    if int(degree) != degree or degree < 1:
        raise InvalidArgumentError(f"degree must be a positive integer, got {degree!r}")
    if int(grid_points) != grid_points or grid_points < degree + 1:
        raise InvalidArgumentError(f"need at least degree+1 = {degree + 1} grid points")
    if not upper > lower:
        raise InvalidArgumentError("fit interval is empty")
    degree = int(degree)
    grid = FitGrid(int(grid_points), float(lower), float(upper))
    x = grid.values()
    y = np.asarray(func(x), dtype=float)
    series, (_, rank, _, _) = Chebyshev.fit(x, y, degree, domain=[lower, upper], full=True)
    if rank < degree + 1:
        raise NumericalFailureError(f"rank-deficient fit (rank {rank} < {degree + 1})")
    power = series.convert(kind=Polynomial)
    coef = np.zeros(degree + 1)
    coef[: power.coef.size] = power.coef
    fit = PolynomialFit(case, degree, tuple(float(c) for c in coef[::-1]), grid, 0.0)
    resid = evaluate_polynomial(fit, x) - y
    norm = float(np.sqrt(np.sum(resid * resid)))
    return PolynomialFit(case, degree, fit.coefficients, grid, norm)


def fit_polynomial(
    dist: TriangleDistribution,
    degree: int = DEFAULT_DEGREE,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> PolynomialFit:
    """Degree-``degree`` least-squares fit of ``dist.pdf`` over its full support."""
    lo, hi = dist.support()
    return fit_function(dist.pdf, lo, hi, degree, grid_points, case=dist.case)


def identity_residual_parallel(d):
    """Residual of the side-2 triangle decomposition (unit side).

    ``g_I(d/2)/2 - [g_I(d)/4 + 3 g_A(d)/8 + 3 g_P(d)/8]``; vanishes identically.
    """
    d = np.asarray(d, dtype=float)
    lhs = 0.5 * unit_pdf(DistanceCase.WITHIN, d / 2.0)
    rhs = (
        0.25 * unit_pdf(DistanceCase.WITHIN, d)
        + 0.375 * unit_pdf(DistanceCase.ADJACENT_SIDE, d)
        + 0.375 * unit_pdf(DistanceCase.PARALLEL_VERTEX, d)
    )
    out = np.asarray(lhs - rhs)
    return float(out) if out.ndim == 0 else out

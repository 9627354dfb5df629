import math

import numpy as np
import pytest

from tridist.analysis import (
    FitGrid,
    MomentsReport,
    PolynomialFit,
    evaluate_polynomial,
    fit_function,
    fit_polynomial,
    identity_residual_parallel,
    integrate_piecewise,
    moment,
    moments_report,
    total_probability,
    variance,
)
from tridist.distributions import DistanceCase, TriangleDistribution
from tridist.errors import InvalidArgumentError, NumericalFailureError
from tridist.montecarlo import sample_distances

CASES = list(DistanceCase)
W, A, P, D = CASES

# Analytic rows of the published moments table (unit side).
TABLE_ONE = {
    W: (0.3647918433, 1 / 6, 0.0335935777),
    A: (0.6599648287, 1 / 2, 0.0644464249),
    P: (1.0423971067, 7 / 6, 0.0800749386),
    D: (1.1880379828, 3 / 2, 0.0885657513),
}


def test_moment_examples():
    assert moment(TriangleDistribution(W), 1) == pytest.approx(0.2 + 0.15 * math.log(3), abs=1e-12)
    assert moment(TriangleDistribution(W), 1) == pytest.approx(0.3647918433, abs=1e-10)
    assert moment(TriangleDistribution(W), 2) == pytest.approx(1 / 6, abs=1e-12)
    assert moment(TriangleDistribution(D), 2) == pytest.approx(1.5, abs=1e-12)
    assert moment(TriangleDistribution(P), 2) == pytest.approx(7 / 6, abs=1e-12)


@pytest.mark.parametrize("case", CASES)
def test_table_one(case):
    m1, m2, var = TABLE_ONE[case]
    dist = TriangleDistribution(case)
    assert moment(dist, 1) == pytest.approx(m1, abs=1e-8)
    assert moment(dist, 2) == pytest.approx(m2, abs=1e-10)
    assert variance(dist) == pytest.approx(var, abs=1e-8)


@pytest.mark.parametrize("case", CASES)
def test_moment_scaling(case):
    for k in (1, 2, 3):
        base = moment(TriangleDistribution(case, 1.0), k)
        assert moment(TriangleDistribution(case, 2.5), k) == pytest.approx(base * 2.5**k, rel=1e-12)
    assert variance(TriangleDistribution(case, 2.0)) == pytest.approx(
        4 * variance(TriangleDistribution(case)), rel=1e-12
    )


@pytest.mark.parametrize("case", CASES)
def test_third_moment_against_monte_carlo(case):
    n = 400_000
    x = sample_distances(case, 1.0, n, 31).distances
    se = np.std(x**3) / math.sqrt(n)
    assert abs(np.mean(x**3) - moment(TriangleDistribution(case), 3)) < 5 * se


def test_moment_rejects_bad_order():
    with pytest.raises(InvalidArgumentError):
        moment(TriangleDistribution(W), 0)
    with pytest.raises(InvalidArgumentError):
        moment(TriangleDistribution(W), 1.5)


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("side", [1.0, 0.5, 7.3])
def test_total_probability(case, side):
    assert abs(total_probability(TriangleDistribution(case, side)) - 1.0) <= 1e-9


def test_integrate_piecewise_known_integrals():
    assert integrate_piecewise(np.sin, [0.0, math.pi / 2, math.pi]) == pytest.approx(2.0, abs=1e-12)
    assert integrate_piecewise(abs, [-1.0, 0.0, 1.0]) == pytest.approx(1.0, abs=1e-13)
    assert integrate_piecewise(np.exp, [0.0, 0.0]) == 0.0


def test_integrate_piecewise_reports_failure():
    with pytest.raises(NumericalFailureError) as info:
        integrate_piecewise(lambda x: 1.0 / abs(x - 0.3) ** 0.999 * np.sin(1 / (x - 0.3)) ** 2, [0.0, 1.0])
    assert info.value.estimate is not None


def test_moments_report_analytic():
    rep = moments_report(W, 1.0)
    assert isinstance(rep, MomentsReport)
    assert rep.source == "analytic"
    assert rep.m1 == pytest.approx(0.3647918433, abs=1e-10)
    assert rep.variance == pytest.approx(rep.m2 - rep.m1**2, abs=1e-15)
    assert rep.variance >= 0


def test_moments_report_scales():
    a = moments_report(P, 1.0)
    b = moments_report(P, 3.0)
    assert b.m1 == pytest.approx(3 * a.m1, rel=1e-12)
    assert b.m2 == pytest.approx(9 * a.m2, rel=1e-12)


def test_moments_report_with_simulation():
    n = 1_000_000
    sample = sample_distances(W, 1.0, n, 99)
    analytic, simulated = moments_report(W, 1.0, sample)
    assert simulated.source == "simulated"
    se = math.sqrt(simulated.variance / n)
    assert abs(simulated.m1 - analytic.m1) < 4 * se
    assert simulated.variance == pytest.approx(simulated.m2 - simulated.m1**2, abs=1e-12)


def test_moments_report_mismatch():
    sample = sample_distances(W, 1.0, 10, 1)
    with pytest.raises(InvalidArgumentError):
        moments_report(A, 1.0, sample)
    with pytest.raises(InvalidArgumentError):
        moments_report(W, 2.0, sample)


def test_fit_exact_polynomial():
    coeffs = np.random.default_rng(0).normal(size=21)
    target = np.polynomial.Polynomial(coeffs[::-1])
    fit = fit_function(target, 0.0, 1.0)
    assert fit.norm_residuals <= 1e-8
    assert len(fit.coefficients) == 21
    # monomial coefficients of degree 20 are ill-determined; values are not
    x = np.linspace(0.0, 1.0, 777)
    np.testing.assert_allclose(fit(x), target(x), atol=1e-9)


def test_fit_low_degree_exact():
    fit = fit_function(lambda x: 3 * x**2 - x + 0.5, 0.0, 2.0, degree=2, grid_points=7)
    np.testing.assert_allclose(fit.coefficients, [3.0, -1.0, 0.5], atol=1e-12)
    assert fit.grid == FitGrid(7, 0.0, 2.0)


@pytest.mark.parametrize("case, bound", [(W, 0.01), (A, 0.2), (P, 0.2), (D, 0.2)])
def test_default_fit_quality(case, bound):
    dist = TriangleDistribution(case)
    fit = fit_polynomial(dist)
    assert fit.degree == 20 and len(fit.coefficients) == 21
    assert fit.grid == FitGrid(1001, 0.0, dist.upper)
    assert 0 <= fit.norm_residuals <= bound
    lo, hi = 0.05 * dist.upper, 0.95 * dist.upper
    d = np.linspace(lo, hi, 2001)
    assert np.max(np.abs(fit(d) - dist.pdf(d))) <= 0.05


def test_within_fit_at_half():
    fit = fit_polynomial(TriangleDistribution(W))
    assert abs(evaluate_polynomial(fit, 0.5) - TriangleDistribution(W).pdf(0.5)) <= 0.01


def test_within_norm_residuals_close_to_published():
    # the published NR is 0.002646; the 1001-point grid lands within 1%
    nr = fit_polynomial(TriangleDistribution(W)).norm_residuals
    assert nr == pytest.approx(0.002646, rel=0.01)


def test_fit_rejects_bad_arguments():
    dist = TriangleDistribution(W)
    with pytest.raises(InvalidArgumentError):
        fit_polynomial(dist, degree=0)
    with pytest.raises(InvalidArgumentError):
        fit_polynomial(dist, degree=20, grid_points=20)


def test_evaluate_polynomial_trivial():
    grid = FitGrid(2, 0.0, 1.0)
    zero = PolynomialFit(None, 3, (0.0, 0.0, 0.0, 0.0), grid, 0.0)
    one = PolynomialFit(None, 3, (0.0, 0.0, 0.0, 1.0), grid, 0.0)
    x = np.linspace(-3, 3, 7)
    np.testing.assert_array_equal(evaluate_polynomial(zero, x), 0.0)
    np.testing.assert_array_equal(evaluate_polynomial(one, x), 1.0)
    assert evaluate_polynomial(one, 0.37) == 1.0


def test_identity_residual_examples():
    assert identity_residual_parallel(0.0) == 0.0
    assert abs(identity_residual_parallel(1.2)) <= 1e-11
    assert abs(identity_residual_parallel(1.9)) <= 1e-11


def test_identity_residual_grid():
    d = np.linspace(0.0, 2.0, 2001)
    assert np.max(np.abs(identity_residual_parallel(d))) <= 1e-11


def test_identity_detects_perturbation():
    # sanity: the residual is not identically small for a wrong mixture
    from tridist.distributions import unit_pdf

    d = np.linspace(0.1, 1.9, 50)
    wrong = 0.5 * unit_pdf(W, d / 2) - (0.25 * unit_pdf(W, d) + 0.5 * unit_pdf(A, d) + 0.25 * unit_pdf(P, d))
    assert np.max(np.abs(wrong)) > 0.01

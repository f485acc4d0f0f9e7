import math
from fractions import Fraction

import numpy as np
import pytest

from utilsDegeneracy import difference_scheme, is_degenerate
from utilsFunctions import TestFunction
from utilsPolynomials import Polynomial
from utilsSublevel import (STREAM_SIZE, SublevelProblem,
                           corner_obstruction_check,
                           count_violations, decomposition_functions,
                           polynomial_sublevel_indicator, shear_determinant,
                           shear_lift_check, shear_matrix, sublevel_measure,
                           sublevel_scaling)

EPS_GRID = np.geomspace(1e-1, 1e-3, 5)


@pytest.fixture
def x1x2_problem(axes2):
    return SublevelProblem.unit_box(Polynomial.from_string('x1*x2', 2), axes2)


def _exact_x1x2(eps):
    return eps - eps * math.log(eps)


def _check_scaling(prob, samples, factor):
    result = sublevel_scaling(prob, EPS_GRID, samples, seed=0)
    for e in result.estimates:
        assert abs(e.estimate - _exact_x1x2(e.eps)) <= \
            factor * e.standard_error
    assert result.fit_ok
    assert 0.75 <= result.delta_hat <= 1.0
    return result


def test_x1x2_sublevel_measure_matches_closed_form(x1x2_problem):
    result = _check_scaling(x1x2_problem, 100_000, 4.0)
    frame = result.to_frame()
    assert list(frame.columns) == ['eps', 'estimate', 'stderr', 'hits']
    assert result.summary()['fit_eps'] == pytest.approx(list(EPS_GRID))


@pytest.mark.slow
def test_x1x2_sublevel_measure_full_size(x1x2_problem):
    _check_scaling(x1x2_problem, 1_000_000, 3.0)


def test_hits_are_monotone_in_eps(x1x2_problem):
    result = sublevel_scaling(x1x2_problem, EPS_GRID, 20_000, seed=3)
    hits = [e.hits for e in result.estimates]
    assert hits == sorted(hits, reverse=True)


def test_large_eps_covers_the_box(x1x2_problem):
    estimate = sublevel_measure(x1x2_problem.with_eps(2.0), 10_000, seed=1)
    assert estimate.hits == 10_000
    assert estimate.estimate == 1.0 and estimate.standard_error == 0.0


def test_degenerate_decomposition_fills_the_box(axes2):
    P = Polynomial.from_string('x1 + x2^2', 2)
    _, parts = is_degenerate(P, axes2)
    prob = SublevelProblem(P=P, F=axes2, g=decomposition_functions(parts),
                           region=[[-1.0, 1.0], [0.0, 2.0]], eps=1e-9)
    estimate = sublevel_measure(prob, 10_000, seed=2)
    assert estimate.estimate == pytest.approx(4.0)


def test_residual_subtracts_functions(axes2):
    P = Polynomial.from_string('x1*x2', 2)
    g = (TestFunction.polynomial(Polynomial.from_string('x1', 1)), None)
    prob = SublevelProblem.unit_box(P, axes2, g)
    np.testing.assert_allclose(prob.residual([[0.5, 0.4]]), [0.2 - 0.5])
    assert prob.inside([[0.5, 0.4], [1.5, 0.0]]).tolist() == [True, False]


def test_thread_count_does_not_change_counts(x1x2_problem):
    N = STREAM_SIZE + 1000
    one = sublevel_measure(x1x2_problem, N, seed=5, threads=1)
    two = sublevel_measure(x1x2_problem, N, seed=5, threads=2)
    assert one == two


def test_problem_validation(axes2):
    P = Polynomial.from_string('x1*x2', 2)
    with pytest.raises(ValueError):
        SublevelProblem(P=P, F=axes2, g=(None, None),
                        region=[[0.0, 1.0]], eps=0.1)
    with pytest.raises(ValueError):
        SublevelProblem(P=P, F=axes2, g=(None, None),
                        region=[[1.0, 0.0], [0.0, 1.0]], eps=0.1)
    with pytest.raises(ValueError):
        SublevelProblem.unit_box(P, axes2, (None,))
    with pytest.raises(ValueError):
        SublevelProblem.unit_box(P, axes2, (TestFunction.trig_polynomial(
            1, 2, 0), None))
    with pytest.raises(ValueError):
        SublevelProblem.unit_box(P, axes2, eps=0.0)


def test_scaling_validation(x1x2_problem):
    with pytest.raises(ValueError):
        sublevel_scaling(x1x2_problem, EPS_GRID[:3], 10_000, seed=0)
    with pytest.raises(ValueError):
        sublevel_scaling(x1x2_problem, EPS_GRID[::-1], 10_000, seed=0)
    with pytest.raises(ValueError):
        sublevel_measure(x1x2_problem, 100, seed=0)


def test_scaling_without_enough_hits_has_no_fit(x1x2_problem):
    grid = np.geomspace(1e-6, 1e-8, 4)
    result = sublevel_scaling(x1x2_problem, grid, 10_000, seed=0)
    assert not result.fit_ok and result.delta_hat is None


# %% Corners.
def test_count_violations():
    residuals = [[0.1, 0.2], [0.5, 0.1], [0.1, 0.1]]
    r = [[0.5, 0.6], [0.5, 0.6], [0.3, 0.6]]
    assert count_violations(residuals, r, 0.3, 0.4) == 1


def _corner_report(axes2, trials):
    P = Polynomial.from_string('x1*x2', 2)
    S = difference_scheme(P, axes2)
    g = [TestFunction.trig_polynomial(1, 2, [11, j], real=True)
         for j in range(2)]
    prob = SublevelProblem.unit_box(P, axes2, g, eps=1e-4)
    return corner_obstruction_check(S, prob, trials, seed=0)


def test_corner_configurations_stay_out(axes2):
    report = _corner_report(axes2, 20_000)
    assert report.violations == 0
    assert report.threshold == pytest.approx(2.0 * 1e-2)
    assert report.admissible_trials > 0
    assert report.closest_margin > 0


@pytest.mark.slow
def test_corner_configurations_stay_out_full(axes2):
    assert _corner_report(axes2, 100_000).violations == 0


def test_corner_check_edge_cases(axes2):
    P = Polynomial.from_string('x1*x2', 2)
    prob = SublevelProblem.unit_box(P, axes2, eps=1.0)
    with pytest.raises(ValueError):
        corner_obstruction_check(None, prob, 10, seed=0)
    report = corner_obstruction_check(difference_scheme(P, axes2), prob, 10,
                                      seed=0)
    assert report.trials == 0 and report.closest_margin is None


# %% Shear lifting.
def test_shear_is_unimodular():
    Y = [[1, 2, 0], [Fraction(1, 3), -1, 4]]
    M = shear_matrix(Y)
    assert len(M) == 5 and all(len(row) == 5 for row in M)
    assert shear_determinant(Y) == 1
    assert M[0][3] == -1 and M[2][4] == -4 and M[3][3] == 1


def test_shear_lift_agrees_on_sublevel_set():
    P = Polynomial.from_string('x1*x2', 2)
    E = polynomial_sublevel_indicator(P, Fraction(1, 10),
                                      region=[(-1, 1), (-1, 1)])
    assert shear_lift_check([[0, 1], [1, 0]], E, 300, seed=4)
    with pytest.raises(ValueError):
        shear_lift_check([], E, 10, seed=0)
    with pytest.raises(ValueError):
        shear_lift_check([[0, 1], [1, 0]], E, 10, seed=0,
                         matrix=[[1, 0], [0, 1]])


def test_shear_lift_rejects_wrong_matrix():
    Y = [[0, 1], [1, 0]]
    P = Polynomial.from_string('x1*x2', 2)
    E = polynomial_sublevel_indicator(P, Fraction(1, 10),
                                      region=[(-1, 1), (-1, 1)])
    M = shear_matrix(Y)
    assert shear_lift_check(Y, E, 300, seed=4, matrix=M)
    # Unimodular, but the shear of y_1 = (-1/2, 1).
    skewed = [row[:] for row in M]
    skewed[0][2] = Fraction(1, 2)
    assert shear_determinant([[Fraction(-1, 2), 1], [1, 0]]) == 1
    assert not shear_lift_check(Y, E, 300, seed=4, matrix=skewed)
    stretched = [row[:] for row in M]
    stretched[2][2] = Fraction(2)
    assert not shear_lift_check(Y, E, 10, seed=4, matrix=stretched)


def test_polynomial_sublevel_indicator():
    P = Polynomial.from_string('x1^2 - x2', 2)
    E = polynomial_sublevel_indicator(P, Fraction(1, 4))
    assert E([Fraction(1, 2), Fraction(1, 4)])
    assert not E([1, 0])
    boxed = polynomial_sublevel_indicator(P, 1, region=[(0, 1), (0, 1)])
    assert not boxed([Fraction(-1, 2), Fraction(1, 4)])

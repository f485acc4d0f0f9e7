import numpy as np
import pytest

from utilsFunctions import (CutoffFunction, TestFunction, coordinate_ball,
                            coordinates)
from utilsOscillatory import tensor_gauss
from utilsPolynomials import Polynomial, Subspace, evaluate_array


def test_cutoff_is_one_at_center_and_vanishes_outside():
    eta = CutoffFunction([0.5, -0.5], radius=2.0)
    values = eta.evaluate(np.array([[0.5, -0.5], [2.6, -0.5], [3.0, 3.0]]))
    assert values[0] == pytest.approx(1.0)
    assert values[1] == 0.0 and values[2] == 0.0
    assert np.all(eta.evaluate(np.random.default_rng(0).uniform(
        -1.5, 2.5, (500, 2))) <= 1.0)


def test_cutoff_integral_matches_quadrature():
    eta = CutoffFunction([0.0, 0.0])
    value = tensor_gauss(eta.evaluate, eta.box(), 16, 8)
    assert value.real == pytest.approx(eta.integral(), rel=1e-6)


def test_polynomial_cutoff_integral():
    eta = CutoffFunction([0.0], order=1, kind='polynomial')
    assert eta.integral() == pytest.approx(16 / 15, rel=1e-10)


def test_cutoff_rejects_bad_parameters():
    with pytest.raises(ValueError):
        CutoffFunction([0.0], radius=0.0)
    with pytest.raises(ValueError):
        CutoffFunction([0.0], kind='box')
    with pytest.raises(ValueError):
        CutoffFunction([0.0, 0.0]).evaluate(np.zeros((3, 3)))


def test_cutoff_from_json_defaults_center():
    eta = CutoffFunction.from_json({'radius': 0.5}, dimension=3)
    assert eta.dimension == 3
    assert eta.to_json()['center'] == [0.0, 0.0, 0.0]


def test_trig_polynomial_is_bounded_by_one():
    U = np.random.default_rng(1).uniform(-5, 5, (2000, 2))
    for real in (False, True):
        f = TestFunction.trig_polynomial(2, 3, 42, real=real)
        assert np.max(np.abs(f.evaluate(U))) <= 1.0 + 1e-12
        assert f.is_real == real


def test_trig_polynomial_is_reproducible():
    U = np.linspace(-1, 1, 11)
    a = TestFunction.trig_polynomial(1, 2, [3, 4])
    b = TestFunction.trig_polynomial(1, 2, np.random.SeedSequence([3, 4]))
    np.testing.assert_array_equal(a.evaluate(U), b.evaluate(U))


def test_conjugate_matches_pointwise_conjugate():
    U = np.random.default_rng(2).uniform(-1, 1, (50, 1))
    p = Polynomial.from_string('x1^2 - x1', 1)
    functions = [TestFunction.trig_polynomial(1, 2, 9),
                 TestFunction.modulated_exponential(p),
                 TestFunction.constant(1, 2 - 1j),
                 TestFunction.combination(
                     [TestFunction.trig_polynomial(1, 1, 1),
                      TestFunction.constant_one(1)], [1j, 0.5])]
    for f in functions:
        np.testing.assert_allclose(f.conjugate().evaluate(U, 3.0),
                                   np.conj(f.evaluate(U, 3.0)), atol=1e-14)


def test_modulated_exponential_tracks_lambda():
    p = Polynomial.from_string('x1^2', 1)
    f = TestFunction.modulated_exponential(p, sign=1)
    U = np.array([[0.5]])
    assert f.evaluate(U, 4.0)[0] == pytest.approx(np.exp(1j))
    f.params['fixed_lambda'] = 8.0
    assert f.evaluate(U, 4.0)[0] == pytest.approx(np.exp(2j))
    assert f.bandwidth(100.0, [0.0], 1.0) == pytest.approx(16.0)


def test_polynomial_kind_evaluates_unnormalised():
    p = Polynomial.from_string('3*x1*x2 + 2', 2)
    f = TestFunction.polynomial(p)
    U = np.array([[1.0, 2.0], [-1.0, 0.5]])
    np.testing.assert_allclose(f.evaluate(U), evaluate_array(p, U))
    assert f.is_real and not f.is_zero
    assert TestFunction.polynomial(Polynomial.zero(2)).is_zero


def test_smoothed_indicator():
    f = TestFunction.smoothed_indicator(1, (-0.5, 0.5), 0.01)
    values = f.evaluate(np.array([0.0, 0.9, -0.9]))
    assert values[0] == pytest.approx(1.0)
    assert values[1] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        TestFunction.smoothed_indicator(1, (1, 0), 0.1)


def test_tabulated_interpolates_and_is_zero_outside():
    f = TestFunction.tabulated([np.array([0.0, 1.0])], np.array([0.0, 2.0]))
    values = f.evaluate(np.array([0.25, 1.5]))
    assert values[0] == pytest.approx(0.5)
    assert values[1] == 0.0
    with pytest.raises(ValueError):
        TestFunction.tabulated([np.array([0.0, 1.0])], np.zeros(3))


def test_from_json_kinds():
    f = TestFunction.from_json({'kind': 'trig_polynomial', 'degree': 2,
                                'seed': 5}, 1)
    U = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(
        f.evaluate(U), TestFunction.trig_polynomial(1, 2, 5).evaluate(U))
    g = TestFunction.from_json({'kind': 'modulated_exponential',
                                'phase': 'x1^2', 'sign': 1}, 1)
    assert g.kind == 'modulated_exponential' and g.params['sign'] == 1
    assert TestFunction.from_json({}, 2).kind == 'constant'
    with pytest.raises(ValueError):
        TestFunction.from_json({'kind': 'wavelet'}, 1)


def test_evaluate_checks_dimension():
    with pytest.raises(ValueError):
        TestFunction.constant_one(2).evaluate(np.zeros((4, 3)))


def test_coordinates_of_unnormalised_frame():
    V = Subspace([[1, 0, 1, 0], [0, 1, 0, 1]])
    X = np.array([[1.0, 2.0, 3.0, 4.0]])
    np.testing.assert_allclose(coordinates(V, X), [[4.0, 6.0]])
    center, radius = coordinate_ball(V, [0, 0, 0, 0], 1.0)
    np.testing.assert_allclose(center, [0.0, 0.0])
    assert radius == pytest.approx(np.sqrt(2))

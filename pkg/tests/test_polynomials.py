from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from utilsPolynomials import (Polynomial, Subspace, SubspaceFamily,
                              compose_linear, evaluate, evaluate_array,
                              general_position, gradient_bound,
                              homogeneous_parts, monomial_basis,
                              partial_derivative, pullback)

coefficient = st.integers(min_value=-3, max_value=3)
point = st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=7),
                 min_size=2, max_size=2)


@st.composite
def polynomials(draw, dimension=2, degree=3):
    basis = monomial_basis(dimension, degree)
    values = draw(st.lists(coefficient, min_size=len(basis),
                           max_size=len(basis)))
    return Polynomial.from_coefficients(dimension, basis, values)


def test_canonical_printing():
    P = Polynomial.from_string('x1*x4 - x2*x3', 4)
    assert str(P) == 'x1*x4 - x2*x3'
    Q = Polynomial.from_string('2/3*x1^2 + x2 - 1', 2)
    assert str(Q) == '2/3*x1^2 + x2 - 1'
    assert str(Polynomial.zero(3)) == '0'


def test_from_string_rejects_bad_input():
    with pytest.raises(ValueError):
        Polynomial.from_string('x1 +* x2', 2)
    with pytest.raises(ValueError):
        Polynomial.from_string('x3', 2)
    with pytest.raises(ValueError):
        Polynomial.from_string('sin(x1)', 1)


def test_json_round_trip_preserves_exact_coefficients():
    P = Polynomial.from_string('1/3*x1*x2 - 5/7*x2^3', 2)
    assert Polynomial.from_json(P.to_json()) == P


def test_degree_and_homogeneity():
    P = Polynomial.from_string('x1^2*x2 + x2^3', 2)
    assert P.degree == 3
    assert P.is_homogeneous
    assert Polynomial.zero(2).degree == -1
    assert not Polynomial.from_string('x1 + 1', 2).is_homogeneous


def test_exact_and_float_evaluation_agree():
    P = Polynomial.from_string('x1^2 - 3*x1*x2 + 1/2', 2)
    exact = evaluate(P, [Fraction(1, 3), Fraction(2)])
    assert exact == Fraction(1, 9) - 2 + Fraction(1, 2)
    value = evaluate_array(P, np.array([[1 / 3, 2.0]]))[0]
    assert value == pytest.approx(float(exact), rel=1e-14)


def test_partial_derivative():
    P = Polynomial.from_string('x1^3*x2^2', 2)
    assert partial_derivative(P, (2, 1)) == \
        Polynomial.from_string('12*x1*x2', 2)
    assert partial_derivative(P, (4, 0)).is_zero


def test_gradient_bound_dominates_samples():
    P = Polynomial.from_string('x1^2*x2 - 4*x2^3 + x1', 2)
    bound = gradient_bound(P, [0.5, -0.5], 1.0)
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (2000, 2))
    X = X[np.linalg.norm(X, axis=1) <= 1] + np.array([0.5, -0.5])
    dx = evaluate_array(partial_derivative(P, (1, 0)), X)
    dy = evaluate_array(partial_derivative(P, (0, 1)), X)
    assert np.max(np.hypot(dx, dy)) <= bound


def test_subspace_frame_and_complement():
    V = Subspace([[1, 0, 1, 0], [0, 1, 0, 1]])
    assert V.dimension == 2 and V.ambient == 4
    assert V.contains([2, 3, 2, 3])
    assert not V.contains([1, 0, 0, 0])
    for y in V.complement_basis:
        for v in V.basis:
            assert sum(a * b for a, b in zip(y, v)) == 0
    assert Subspace([[2, 0, 2, 0], [0, 1, 0, 1]]) == V


def test_rank_deficient_basis_rejected():
    with pytest.raises(ValueError):
        Subspace([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        SubspaceFamily([Subspace([[1, 0, 0]]),
                        Subspace([[1, 0, 0], [0, 1, 0]])])


def test_from_linear_map_is_row_space():
    V = Subspace.from_linear_map([[1, 1, 0]])
    assert V == Subspace([[2, 2, 0]])


def test_pullback_is_constant_along_complement():
    V = Subspace([[1, 2]])
    p = Polynomial.from_string('x1^2 - x1', 1)
    lifted = pullback(p, V)
    y = V.complement_basis[0]
    x = [Fraction(1, 3), Fraction(-2, 5)]
    shifted = [a + 7 * b for a, b in zip(x, y)]
    assert evaluate(lifted, x) == evaluate(lifted, shifted)


def test_pullback_with_custom_frame():
    V = Subspace([[1, 1]])
    p = Polynomial.from_string('x1', 1)
    assert pullback(p, V, [[2, 2]]) == Polynomial.from_string('1/4*x1 + '
                                                             '1/4*x2', 2)
    with pytest.raises(ValueError):
        pullback(p, V, [[1, 0]])


def test_general_position():
    assert general_position(SubspaceFamily.axes(3))
    lines = SubspaceFamily([Subspace([[1, 0]]), Subspace([[0, 1]]),
                            Subspace([[1, 1]])])
    assert general_position(lines)
    repeated = SubspaceFamily([Subspace([[1, 0]]), Subspace([[2, 0]])])
    assert not general_position(repeated)


@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials(), point)
def test_evaluation_is_linear(P, Q, x):
    assert evaluate(P + 3 * Q, x) == evaluate(P, x) + 3 * evaluate(Q, x)


@settings(max_examples=40, deadline=None)
@given(polynomials())
def test_homogeneous_parts_reassemble(P):
    total = Polynomial.zero(2)
    for _, part in homogeneous_parts(P):
        assert part.is_homogeneous
        total = total + part
    assert total == P


@settings(max_examples=25, deadline=None)
@given(st.permutations([0, 1, 2]))
def test_general_position_is_permutation_invariant(order):
    spaces = [Subspace([[1, 0, 0], [0, 1, 0]]), Subspace([[0, 1, 0],
                                                          [0, 0, 1]]),
              Subspace([[1, 0, 1], [0, 1, 1]])]
    base = general_position(SubspaceFamily(spaces))
    assert general_position(SubspaceFamily([spaces[k] for k in order])) \
        == base


@settings(max_examples=25, deadline=None)
@given(polynomials(dimension=1, degree=3), point)
def test_pullback_matches_composition(p, x):
    V = Subspace([[3, 4]])
    forms = V.coordinate_forms()
    assert pullback(p, V) == compose_linear(p, forms)
    u = sum(a * b for a, b in zip(forms[0], x))
    assert evaluate(pullback(p, V), x) == evaluate(p, [u])

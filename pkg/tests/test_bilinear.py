from fractions import Fraction

import numpy as np
import pytest

from utilsBilinear import (BilinearPhase, BumpFunction, LinearCombination,
                           NormRatioReport, PrincipalValueSpec, bht_apply,
                           holder_exponent, lp_norm, norm_ratio,
                           norm_ratio_sweep, phase_monomials,
                           quadratic_reduction, random_bump,
                           reduced_norm_ratio, sweep_draw, sweep_phase)
from utilsPolynomials import Polynomial

X_GRID = np.linspace(-1.0, 1.0, 33)


def _phase(text):
    return BilinearPhase(Polynomial.from_string(text, 2), 3)


def _reflect(P):
    """P(x, -t)."""
    terms = {e: c * (-1) ** e[1] for e, c in P.poly.terms.items()}
    return BilinearPhase(Polynomial(2, terms), P.degree_bound)


def _bumps(seed, half_width=1.0):
    rng = np.random.default_rng(seed)
    return random_bump(rng, half_width), random_bump(rng, half_width)


# %% Phases and functions.
def test_phase_validation():
    with pytest.raises(ValueError):
        BilinearPhase(Polynomial.from_string('x1*x3', 3), 2)
    with pytest.raises(ValueError):
        BilinearPhase(Polynomial.from_string('x1^3', 2), 2)
    with pytest.raises(ValueError):
        BilinearPhase.from_coefficients(2, [1, 2])


def test_phase_from_coefficients_and_evaluation():
    assert len(phase_monomials(3)) == 10
    basis = phase_monomials(2)
    coefficients = [int(e == (1, 1)) for e in basis]
    P = BilinearPhase.from_coefficients(2, coefficients)
    assert P.poly == Polynomial.from_string('x1*x2', 2)
    values = P(np.array([[1.0], [2.0]]), np.array([3.0, -1.0]))
    np.testing.assert_allclose(values, [[3.0, -1.0], [6.0, -2.0]])


def test_bump_function():
    f = BumpFunction((0.0, 0.5), (0.25, 0.25), (1.0, 2j), frequency=3.0)
    assert f.support == (-0.25, 0.75)
    values = f(np.array([0.0, 0.3, 0.9]))
    assert values[0] == pytest.approx(np.exp(-1.0))
    assert values[2] == 0
    moved = f.shifted(0.5)
    assert moved.support == (0.25, 1.25)
    with pytest.raises(ValueError):
        BumpFunction((0.0,), (0.0,), (1.0,))


def test_random_bump_stays_inside():
    rng = np.random.default_rng(0)
    for _ in range(20):
        f = random_bump(rng, 0.75)
        lo, hi = f.support
        assert -0.75 - 1e-12 <= lo and hi <= 0.75 + 1e-12
    g = random_bump(rng, 1.0, real=True)
    assert g.frequency == 0.0
    assert all(a.imag == 0 for a in g.amplitudes)


def test_principal_value_spec():
    spec = PrincipalValueSpec()
    intervals = spec.intervals()
    assert intervals[0] == (0.0, spec.eps0)
    assert intervals[-1][1] == spec.R
    assert len(intervals) == spec.shells + 1
    with pytest.raises(ValueError):
        PrincipalValueSpec(eps0=0.003)
    with pytest.raises(ValueError):
        PrincipalValueSpec(eps0=4.0, R=2.0)
    assert PrincipalValueSpec.from_settings({'nodes': 8, 'other': 1}).nodes \
        == 8


# %% Transform.
def test_even_pair_vanishes_at_origin():
    f = BumpFunction((0.0,), (0.5,), (1.0,))
    result = bht_apply(Polynomial.zero(2), f, f, [0.0])
    assert result.all_converged
    assert abs(result.values[0]) < 1e-14


def test_zero_input_gives_zero():
    f, _ = _bumps(1)
    zero = BumpFunction((0.0,), (0.5,), (0.0,))
    result = bht_apply(_phase('x1*x2^2'), f, zero, X_GRID)
    assert np.all(result.values == 0)


def test_refined_quadrature_agrees():
    f, g = _bumps(2)
    P = _phase('x1*x2 + 2*x2^3')
    base = bht_apply(P, f, g, X_GRID)
    fine = bht_apply(P, f, g, X_GRID,
                     PrincipalValueSpec(eps0=2.0 ** -9, nodes=64))
    assert base.all_converged and fine.all_converged
    np.testing.assert_allclose(base.values, fine.values, atol=1e-5)


def test_bilinearity():
    f1, g = _bumps(3)
    f2, _ = _bumps(4)
    P = _phase('x2^3 - x1*x2')
    a, b = 0.5 - 1j, 2.0
    mixed = bht_apply(P, LinearCombination((f1, f2), (a, b)), g, X_GRID)
    parts = [bht_apply(P, f, g, X_GRID).values for f in (f1, f2)]
    np.testing.assert_allclose(mixed.values, a * parts[0] + b * parts[1],
                               atol=1e-8)


def test_translation_covariance_for_t_only_phase():
    f, g = _bumps(5, half_width=0.5)
    P = _phase('x2^3 + x2^2')
    h = 0.25
    original = bht_apply(P, f, g, X_GRID)
    moved = bht_apply(P, f.shifted(h), g.shifted(h), X_GRID + h)
    np.testing.assert_allclose(moved.values, original.values, atol=1e-8)


def test_reflection_antisymmetry():
    f, g = _bumps(6)
    P = _phase('x1^2*x2 + x2^2 - 3*x1*x2')
    forward = bht_apply(P, f, g, X_GRID)
    swapped = bht_apply(_reflect(P), g, f, X_GRID)
    np.testing.assert_allclose(swapped.values, -forward.values, atol=1e-8)


# %% Quadratic reduction.
def test_quadratic_reduction_coefficients():
    r = quadratic_reduction(_phase('x1*x2'))
    assert (r.alpha, r.beta) == (Fraction(-1, 4), Fraction(1, 4))
    r = quadratic_reduction(_phase('x2^2'))
    assert (r.alpha, r.beta) == (Fraction(1, 2), Fraction(1, 2))
    r = quadratic_reduction(_phase('x1 + x2'))
    assert (r.mu, r.nu) == (0, 1)
    r = quadratic_reduction(_phase('3*x1^2 - x2^2 + 5'))
    assert r.psi == Polynomial.from_string('4*x1^2 + 5', 1)
    assert r.to_json()['alpha'] == '-1/2'
    with pytest.raises(ValueError):
        quadratic_reduction(_phase('x1*x2^2'))


def _reduction_error(trial):
    rng = np.random.default_rng(np.random.SeedSequence([17, trial]))
    f, g = random_bump(rng, 1.0), random_bump(rng, 1.0)
    coefficients = [Fraction(int(v), 4) for v in rng.integers(-8, 9, 6)]
    P = BilinearPhase.from_coefficients(2, coefficients)
    r = quadratic_reduction(P)
    direct = bht_apply(P, f, g, X_GRID)
    reduced = bht_apply(Polynomial.zero(2), r.modulate_f(f), r.modulate_g(g),
                        X_GRID)
    assert direct.all_converged and reduced.all_converged
    lifted = np.exp(1j * r.output_phase(X_GRID)) * reduced.values
    return np.linalg.norm(lifted - direct.values) / \
        np.linalg.norm(direct.values)


@pytest.mark.parametrize('trial', range(5))
def test_quadratic_phase_reduces_to_plain_transform(trial):
    assert _reduction_error(trial) < 1e-4


@pytest.mark.slow
def test_quadratic_phase_reduction_full():
    assert max(_reduction_error(trial) for trial in range(20)) < 1e-4


# %% Norms.
def test_holder_exponent():
    assert holder_exponent(2, 2) == pytest.approx(1.0)
    assert holder_exponent(4, 4) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        holder_exponent(1.0, 3.0)
    with pytest.raises(ValueError):
        holder_exponent(1.2, 1.2)


def test_lp_norm():
    x = np.linspace(0.0, 2.0, 101)
    assert lp_norm(np.ones_like(x), x, 2) == pytest.approx(np.sqrt(2.0))
    assert lp_norm(2 * np.ones_like(x), x, 1) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        lp_norm(x, x, 0)


def test_norm_ratio_rejects_vanishing_input():
    f, _ = _bumps(7)
    zero = BumpFunction((0.0,), (0.5,), (0.0,))
    with pytest.raises(ValueError):
        norm_ratio(Polynomial.zero(2), f, zero, 2, 2, X_GRID)


def test_small_sweep():
    report = norm_ratio_sweep(1, 2.0, 2.0, trials=2, seed=3, scale_max=2,
                              grid_points=33)
    frame = report.to_frame()
    assert len(frame) == 2 * 3
    assert {'trial', 'scale', 'ratio', 'converged', 'c_x0t0', 'c_x1t0',
            'c_x0t1'} <= set(frame.columns)
    assert report.envelope == sorted(report.envelope)
    assert report.max_ratio == pytest.approx(frame['ratio'].max())
    per_scale = frame.groupby('scale')['ratio'].max()
    assert report.per_scale_max == pytest.approx(list(per_scale))
    assert report.slope_per_scale_max == pytest.approx(
        np.polyfit(np.log(per_scale.index), np.log(per_scale.values), 1)[0])
    assert report.slope_vs_scale == pytest.approx(
        np.polyfit(np.log(frame['scale']), np.log(frame['ratio']), 1)[0])
    summary = report.summary()
    assert summary['q'] == pytest.approx(1.0)
    again = norm_ratio_sweep(1, 2.0, 2.0, trials=2, seed=3, scale_max=2,
                             grid_points=33, threads=2)
    assert again.rows == report.rows


def test_sweep_validation():
    with pytest.raises(ValueError):
        norm_ratio_sweep(1, 2.0, 2.0, trials=0, seed=0)
    with pytest.raises(ValueError):
        norm_ratio_sweep(1, 1.2, 1.2, trials=1, seed=0)


def _report(rows, scales):
    report = NormRatioReport(degree=1, p1=2.0, p2=2.0, q=1.0, scales=scales,
                             rows=rows)
    return report.finalize()


def test_decreasing_ratios_give_negative_slopes():
    scales = [1.0, 2.0, 4.0, 8.0]
    rows = [{'trial': k, 'scale': s, 'ratio': (k + 1) * s ** -0.5,
             'converged': True} for s in scales for k in range(2)]
    report = _report(rows, scales)
    assert report.slope_per_scale_max == pytest.approx(-0.5)
    assert report.slope_vs_scale == pytest.approx(-0.5)
    assert report.envelope == pytest.approx([2.0] * 4)
    assert report.max_ratio == pytest.approx(2.0)
    with pytest.raises(ValueError):
        _report([], scales)


def test_constant_phase_baseline():
    report = norm_ratio_sweep(0, 2.0, 2.0, trials=20, seed=2, scale_max=1,
                              grid_points=33)
    frame = report.to_frame()
    assert report.all_converged
    assert np.isfinite(report.max_ratio) and report.max_ratio > 0
    by_trial = frame.pivot(index='trial', columns='scale', values='ratio')
    np.testing.assert_allclose(by_trial[2.0], by_trial[1.0], rtol=1e-9)
    assert abs(report.slope_per_scale_max) < 1e-8
    assert abs(report.slope_vs_scale) < 1e-8


def test_quadratic_sweep_matches_reduced_baseline():
    trials, seed, half = 4, 3, PrincipalValueSpec().R / 2
    report = norm_ratio_sweep(2, 2.0, 2.0, trials=trials, seed=seed,
                              scale_max=2, grid_points=33)
    x_grid = np.linspace(-half, half, 33)
    draws = [sweep_draw(2, seed, k, half) for k in range(trials)]
    baseline = []
    for row in report.rows:
        f, g, direction = draws[row['trial']]
        P = sweep_phase(2, direction, row['scale'])
        reduced, ok = reduced_norm_ratio(P, f, g, 2.0, 2.0, x_grid)
        assert ok
        assert row['ratio'] == pytest.approx(reduced, rel=1e-3)
        baseline.append(reduced)
    assert report.max_ratio <= 1.05 * max(baseline)


@pytest.mark.slow
def test_cubic_norm_ratio_is_flat_in_scale():
    report = norm_ratio_sweep(3, 2.0, 2.0, trials=10, seed=0, scale_max=10)
    assert -0.1 <= report.slope_per_scale_max <= 0.1

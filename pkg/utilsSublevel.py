'''
    ---------------------------------------------------------------------------
    oscidecay: utilsSublevel.py
    ---------------------------------------------------------------------------

    Copyright 2024 The oscidecay Authors

    Licensed under the Apache License, Version 2.0 (the "License"); you may not
    use this file except in compliance with the License. You may obtain a copy
    of the License at http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.

    This script contains Monte Carlo estimates of the sublevel sets

        E_eps = {x in B : |P(x) - sum_j g_j(pi_j x)| < eps},

    a log-log fit of their measure against eps, a search for corner
    configurations Y_r of a difference scheme lying inside E_eps with all
    scales large, and an exact check of the shear-lifting equivalence.
'''

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import stats

from utilsDegeneracy import scheme_points
from utilsFunctions import TestFunction, coordinates
from utilsLinearAlgebra import as_matrix, determinant, inverse, matvec
from utilsPolynomials import evaluate_array, evaluate

# Samples per independent random stream.
STREAM_SIZE = 1 << 18
MIN_SAMPLES = 10_000
MIN_FIT_HITS = 100


# %% Problems.
@dataclass(frozen=True)
class SublevelProblem:
    """P, a family, real functions g_j on the V_j, a box B and eps.

    g entries may be TestFunctions (real kinds) or None for g_j = 0.
    """
    P: object
    F: object
    g: tuple
    region: np.ndarray
    eps: float

    def __post_init__(self):
        region = np.asarray(self.region, dtype=float)
        if region.shape != (self.F.ambient, 2) or \
                np.any(region[:, 1] <= region[:, 0]):
            raise ValueError('Region must be an ({}, 2) box with lower < upper.'
                             .format(self.F.ambient))
        object.__setattr__(self, 'region', region)
        if len(self.g) != len(self.F):
            raise ValueError('Got {} functions for {} subspaces.'.format(
                len(self.g), len(self.F)))
        if self.P.dimension != self.F.ambient:
            raise ValueError('P and the family live in different dimensions.')
        for V, gj in zip(self.F, self.g):
            if gj is None:
                continue
            if gj.dimension != V.dimension:
                raise ValueError('Function of {} variables on a {}-dimensional'
                                 ' subspace.'.format(gj.dimension, V.dimension))
            if not gj.is_real:
                raise ValueError('Sublevel functions g_j must be real.')
        if not self.eps > 0:
            raise ValueError('eps must be positive.')

    @classmethod
    def unit_box(cls, P, F, g=None, eps=0.01):
        g = tuple(g) if g is not None else (None,) * len(F)
        return cls(P=P, F=F, g=g, region=[[0.0, 1.0]] * F.ambient, eps=eps)

    @property
    def volume(self):
        return float(np.prod(self.region[:, 1] - self.region[:, 0]))

    def with_eps(self, eps):
        return replace(self, eps=eps)

    def residual(self, X):
        """P(x) - sum_j g_j(pi_j x) on an (N, m) array."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        value = evaluate_array(self.P, X)
        for V, gj in zip(self.F, self.g):
            if gj is not None:
                value = value - np.real(gj.evaluate(coordinates(V, X)))
        return value

    def inside(self, X):
        X = np.atleast_2d(X)
        lo, hi = self.region[:, 0], self.region[:, 1]
        return np.all((X >= lo) & (X <= hi), axis=1)

    def sample(self, rng, count):
        lo, hi = self.region[:, 0], self.region[:, 1]
        return lo + (hi - lo) * rng.random((count, len(lo)))


def decomposition_functions(minimizers):
    """g_j = p_j as real polynomial test functions."""
    return tuple(TestFunction.polynomial(p) for p in minimizers)


# %% Estimates.
@dataclass(frozen=True)
class SublevelEstimate:
    eps: float
    samples: int
    hits: int
    estimate: float
    standard_error: float

    @classmethod
    def from_counts(cls, eps, samples, hits, volume):
        p = hits / samples
        return cls(eps=eps, samples=samples, hits=hits,
                   estimate=volume * p,
                   standard_error=volume * math.sqrt(p * (1 - p) / samples))


def _stream_sizes(N):
    sizes = [STREAM_SIZE] * (N // STREAM_SIZE)
    if N % STREAM_SIZE:
        sizes.append(N % STREAM_SIZE)
    return sizes


def _count_stream(prob, eps_values, seed_sequence, size):
    rng = np.random.default_rng(seed_sequence)
    X = prob.sample(rng, size)
    r = np.abs(prob.residual(X))
    return np.count_nonzero(r[:, None] < eps_values[None, :], axis=0)


def _hit_counts(prob, eps_values, N, seed, threads):
    sizes = _stream_sizes(N)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    counts = Parallel(n_jobs=threads)(
        delayed(_count_stream)(prob, eps_values, ss, size)
        for ss, size in zip(streams, sizes))
    return np.sum(counts, axis=0)


def sublevel_measure(prob, N, seed, threads=1):
    """Uniform Monte Carlo estimate of |E_eps| over the box.

    Samples are split into fixed-size seeded streams, so totals do not
    depend on the thread count.
    """
    if N < MIN_SAMPLES:
        raise ValueError('Need at least {} samples, got {}.'.format(
            MIN_SAMPLES, N))
    hits = int(_hit_counts(prob, np.array([prob.eps]), N, seed, threads)[0])
    estimate = SublevelEstimate.from_counts(prob.eps, N, hits, prob.volume)
    logging.info('eps = {:.3e}: {} hits of {} samples, |E| ~ {:.6e} +- {:.2e}'
                 .format(prob.eps, hits, N, estimate.estimate,
                         estimate.standard_error))
    return estimate


@dataclass
class SublevelScaling:
    estimates: List[SublevelEstimate]
    delta_hat: Optional[float] = None
    intercept: Optional[float] = None
    r2: Optional[float] = None
    fit_ok: bool = False
    fit_eps: List[float] = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame({
            'eps': [e.eps for e in self.estimates],
            'estimate': [e.estimate for e in self.estimates],
            'stderr': [e.standard_error for e in self.estimates],
            'hits': [e.hits for e in self.estimates],
        })

    def summary(self):
        return {'delta_hat': self.delta_hat, 'r2': self.r2,
                'intercept': self.intercept, 'fit_ok': self.fit_ok,
                'fit_eps': list(self.fit_eps)}


def sublevel_scaling(prob, eps_grid, N, seed, threads=1):
    """Estimates of |E_eps| along a decreasing eps grid on one common sample
    stream, and the log-log slope delta_hat over points with >= 100 hits."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    if len(eps_grid) < 4:
        raise ValueError('The eps grid needs at least 4 points.')
    if np.any(np.diff(eps_grid) >= 0) or np.any(eps_grid <= 0):
        raise ValueError('The eps grid must be positive and decreasing.')
    if N < MIN_SAMPLES:
        raise ValueError('Need at least {} samples, got {}.'.format(
            MIN_SAMPLES, N))
    hits = _hit_counts(prob, eps_grid, N, seed, threads)
    estimates = [SublevelEstimate.from_counts(float(e), N, int(h), prob.volume)
                 for e, h in zip(eps_grid, hits)]
    for e in estimates:
        logging.info('eps = {:.3e}: hits = {}, |E| ~ {:.6e}'.format(
            e.eps, e.hits, e.estimate))
    result = SublevelScaling(estimates=estimates)
    usable = [e for e in estimates if e.hits >= MIN_FIT_HITS]
    if len(usable) < 2:
        logging.warning('Fewer than two eps points with {} hits; no fit.'
                        .format(MIN_FIT_HITS))
        return result
    fit = stats.linregress(np.log([e.eps for e in usable]),
                           np.log([e.estimate for e in usable]))
    result.delta_hat = float(fit.slope)
    result.intercept = float(fit.intercept)
    result.r2 = float(fit.rvalue ** 2)
    result.fit_ok = True
    result.fit_eps = [e.eps for e in usable]
    logging.info('delta_hat = {:.4f} (r2 = {:.4f}).'.format(result.delta_hat,
                                                           result.r2))
    return result


# %% Corner configurations.
@dataclass(frozen=True)
class CornerReport:
    trials: int
    violations: int
    threshold: float
    scheme_constant: float
    closest_margin: Optional[float]
    admissible_trials: int

    def to_json(self):
        return {'trials': self.trials, 'violations': self.violations,
                'threshold': self.threshold,
                'scheme_constant': self.scheme_constant,
                'closest_margin': self.closest_margin,
                'admissible_trials': self.admissible_trials}


def count_violations(residuals, r, eps, threshold):
    """Trials with every |residual| < eps and every scale above threshold.

    residuals : (b, K) array of |P - sum g_j o pi_j| at the corner points.
    r : (b, A) scales.
    """
    residuals = np.asarray(residuals, dtype=float)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    inside = np.all(np.abs(residuals) < eps, axis=1)
    large = np.min(r, axis=1) > threshold
    return int(np.count_nonzero(inside & large))


def corner_obstruction_check(S, prob, trials, seed, batch=4096):
    """Search for corner sets x + Y_r inside E_eps with every scale above
    C_S eps^(1/D). Returns the violation count (expected 0) and the
    smallest observed margin max |residual| - eps over admissible trials."""
    if S is None:
        raise ValueError('No difference scheme: P has no nondegenerate '
                         'homogeneous summand relative to the family.')
    D = S.degree
    C_S = S.constant()
    threshold = C_S * prob.eps ** (1.0 / D)
    size = len(S.generators)
    if threshold >= 1.0:
        logging.warning('Scale threshold {:.3e} >= 1: nothing to test.'
                        .format(threshold))
        return CornerReport(trials=0, violations=0, threshold=threshold,
                            scheme_constant=C_S, closest_margin=None,
                            admissible_trials=0)
    rng = np.random.default_rng(seed)
    violations, admissible, margin = 0, 0, None
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        X = prob.sample(rng, b)
        if S.multi_parameter:
            R = threshold + (1.0 - threshold) * (1.0 - rng.random((b, size)))
        else:
            R = threshold + (1.0 - threshold) * (1.0 - rng.random(b))
        points, _ = scheme_points(S, X, R)
        K = points.shape[1]
        flat = points.reshape(b * K, -1)
        residuals = np.abs(prob.residual(flat)).reshape(b, K)
        in_box = np.all(prob.inside(flat).reshape(b, K), axis=1)
        residuals[~in_box] = np.inf
        R2 = R if R.ndim == 2 else np.repeat(R[:, None], size, axis=1)
        violations += count_violations(residuals, R2, prob.eps, threshold)
        if np.any(in_box):
            worst = np.max(residuals[in_box], axis=1) - prob.eps
            low = float(np.min(worst))
            margin = low if margin is None else min(margin, low)
            admissible += int(np.count_nonzero(in_box))
        done += b
    logging.info('Corner check: {} trials, {} inside the box, {} violations '
                 '(threshold {:.3e}).'.format(trials, admissible, violations,
                                              threshold))
    return CornerReport(trials=trials, violations=violations,
                        threshold=threshold, scheme_constant=C_S,
                        closest_margin=margin, admissible_trials=admissible)


# %% Shear lifting.
def shear_matrix(Y):
    """Linear part of T(x, t) = (x - sum_a t_a y_a, t) as an exact matrix."""
    Y = [[Fraction(c) for c in y] for y in Y]
    A, m = len(Y), len(Y[0])
    M = []
    for i in range(m):
        M.append([Fraction(int(i == k)) for k in range(m)] +
                 [-Y[a][i] for a in range(A)])
    for a in range(A):
        M.append([Fraction(0)] * m + [Fraction(int(a == b)) for b in range(A)])
    return M


def shear_determinant(Y):
    return determinant(shear_matrix(Y))


def _random_rational(rng, low, high, denominator=1024):
    k = int(rng.integers(int(low * denominator), int(high * denominator) + 1))
    return Fraction(k, denominator)


def shear_lift_check(Y, E_indicator, trials, seed, region=(-1, 1),
                     matrix=None):
    """Exact check of

        x + sum_a r_a s_a y_a in E  iff  T(x, t) + (0, sum_a r_a s_a e_a)
                                         in T(E x B)

    on random rational (x, t, r, sigma), where T is `matrix` (default
    shear_matrix(Y)) and B is the closed ball of radius 2 sqrt(A) holding
    every t-translate drawn. Membership on the right is decided by pulling
    the point back through T^{-1}. Also requires det T = 1.
    """
    Y = [[Fraction(c) for c in y] for y in Y]
    if not Y:
        raise ValueError('Need at least one generator.')
    A, m = len(Y), len(Y[0])
    T = shear_matrix(Y) if matrix is None else as_matrix(matrix)[0]
    if len(T) != m + A or any(len(row) != m + A for row in T):
        raise ValueError('Shear matrix must be {0} x {0}.'.format(m + A))
    if determinant(T) != 1:
        logging.info('Shear lift check: det T != 1.')
        return False
    T_inv = inverse(T)
    ball_radius_sq = Fraction(4 * A)
    rng = np.random.default_rng(seed)
    agree = 0
    for _ in range(trials):
        x = [_random_rational(rng, *region) for _ in range(m)]
        t = [_random_rational(rng, -1, 1) for _ in range(A)]
        r = [_random_rational(rng, 0, 1) or Fraction(1, 1024)
             for _ in range(A)]
        sigma = [int(v) for v in rng.integers(0, 2, A)]
        step = [ra * sa for ra, sa in zip(r, sigma)]
        left = E_indicator([x[i] + sum(step[a] * Y[a][i] for a in range(A))
                            for i in range(m)])
        z = matvec(T, x + t)
        for a in range(A):
            z[m + a] += step[a]
        back = matvec(T_inv, z)
        right = E_indicator(back[:m]) and \
            sum(v * v for v in back[m:]) <= ball_radius_sq
        agree += int(bool(left) == bool(right))
    logging.info('Shear lift check: {} of {} trials agree.'.format(agree,
                                                                  trials))
    return agree == trials


def polynomial_sublevel_indicator(P, eps, region=None):
    """Exact indicator of {x : |P(x)| < eps} (intersected with a box)."""
    eps = Fraction(eps)

    def indicator(x):
        if region is not None and any(not lo <= v <= hi
                                      for v, (lo, hi) in zip(x, region)):
            return False
        return abs(evaluate(P, x)) < eps
    return indicator

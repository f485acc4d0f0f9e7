'''
    ---------------------------------------------------------------------------
    oscidecay: utilsOscillatory.py
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

    This script contains functions to evaluate the multilinear oscillatory
    functional

        Lambda_lam(f_1, ..., f_n) = int exp(i lam P(x)) prod_j f_j(pi_j x)
                                    eta(x) dx

    by composite tensor-product Gauss-Legendre quadrature, to sweep it over
    a geometric lam grid and fit an empirical decay exponent, to build the
    no-decay inputs of degenerate phases, and to scan a sampled function for
    large generalized Fourier coefficients against polynomial phases.
'''

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import stats

from utilsFunctions import TestFunction, coordinate_ball
from utilsPolynomials import (Polynomial, evaluate_array, gradient_bound,
                              pullback)


# %% Quadrature.
@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_wavelength: int = 8
    base_panels_per_axis: int = 4
    max_refinements: int = 6
    relative_tolerance: float = 1e-8
    absolute_tolerance: float = 1e-12
    gauss_order: int = 8
    max_points: int = 200_000_000
    chunk_points: int = 2_000_000

    def __post_init__(self):
        if self.nodes_per_wavelength < 4:
            raise ValueError('nodes_per_wavelength must be >= 4.')
        if self.base_panels_per_axis < 1 or self.gauss_order < 1:
            raise ValueError('Panel and Gauss counts must be positive.')
        if self.max_refinements < 1:
            raise ValueError('max_refinements must be >= 1.')
        if not self.relative_tolerance > 0:
            raise ValueError('relative_tolerance must be positive.')

    @classmethod
    def from_settings(cls, settings):
        keys = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in settings.items() if k in keys})


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    converged: bool
    panels_per_axis: int
    refinements: int
    change: float

    def __complex__(self):
        return complex(self.value)


def composite_gauss(a, b, panels, order):
    """Nodes and weights of the composite Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def tensor_gauss(func, box, panels, order, chunk_points=2_000_000):
    """Integral of func over an axis-aligned box by the tensor-product rule.

    func maps an (N, m) array of points to N values. Points are generated in
    chunks along the first axis.
    """
    box = np.asarray(box, dtype=float)
    m = box.shape[0]
    rules = [composite_gauss(box[i, 0], box[i, 1], panels, order)
             for i in range(m)]
    rest_nodes = [r[0] for r in rules[1:]]
    rest_weights = [r[1] for r in rules[1:]]
    if m > 1:
        grids = np.meshgrid(*rest_nodes, indexing='ij')
        rest = np.stack([g.ravel() for g in grids], axis=1)
        wgrid = np.meshgrid(*rest_weights, indexing='ij')
        rest_w = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    else:
        rest = np.zeros((1, 0))
        rest_w = np.ones(1)
    first_nodes, first_weights = rules[0]
    step = max(1, chunk_points // max(len(rest_w), 1))
    total = 0.0 + 0.0j
    for start in range(0, len(first_nodes), step):
        xs = first_nodes[start:start + step]
        ws = first_weights[start:start + step]
        points = np.concatenate(
            [np.repeat(xs, len(rest_w))[:, None],
             np.tile(rest, (len(xs), 1))], axis=1)
        weights = np.repeat(ws, len(rest_w)) * np.tile(rest_w, len(xs))
        total += np.sum(func(points) * weights)
    return total


def _folded_phase(P, F, fs, lam):
    """Fold exp(sign i lam_j p_j) factors into the phase.

    Returns (scale, phase polynomial, remaining functions) with the integrand
    phase equal to scale * phase(x); folding is exact in rationals.
    """
    scale = float(lam) if lam != 0 else 1.0
    ratio = Fraction(float(lam)) / Fraction(scale)
    phase = P * ratio
    remaining = []
    for V, f in zip(F, fs):
        if f.kind == 'modulated_exponential':
            lam_j = f.params.get('fixed_lambda', lam)
            weight = f.params['sign'] * Fraction(float(lam_j)) / \
                Fraction(scale)
            phase = phase + pullback(f.params['phase'], V) * weight
            remaining.append(None)
        else:
            remaining.append(f)
    return scale, phase, remaining


def _check_inputs(P, F, fs, eta):
    if len(fs) != len(F):
        raise ValueError('Got {} functions for {} subspaces.'.format(
            len(fs), len(F)))
    if P.dimension != F.ambient or eta.dimension != F.ambient:
        raise ValueError('P, the family and the cutoff must share the ambient '
                         'dimension.')
    for V, f in zip(F, fs):
        if f.dimension != V.dimension:
            raise ValueError('Function of {} variables on a {}-dimensional '
                             'subspace.'.format(f.dimension, V.dimension))


def oscillation_budget(P, F, fs, eta, lam):
    """Conservative count of oscillations of the integrand across the
    support diameter, and the folded integrand pieces."""
    scale, phase, remaining = _folded_phase(P, F, fs, lam)
    omega = abs(scale) * gradient_bound(phase, eta.center, eta.radius)
    for V, f in zip(F, remaining):
        if f is None:
            continue
        uc, ur = coordinate_ball(V, eta.center, eta.radius)
        C = np.array([[float(c) for c in row] for row in V.coordinate_forms()])
        omega += f.bandwidth(lam, uc, ur) * float(np.linalg.norm(C, 2))
    return omega * 2 * eta.radius / (2 * math.pi), (scale, phase, remaining)


def lambda_functional(P, F, fs, eta, lam, spec=None):
    """Estimate Lambda_lam(f_1, ..., f_n) with its convergence flag.

    The per-axis node count is at least max(base panels, nodes_per_wavelength
    x oscillations); panels then double until two successive estimates
    agree to the relative (or absolute) tolerance.
    """
    spec = QuadratureSpec() if spec is None else spec
    _check_inputs(P, F, fs, eta)
    if any(f.is_zero for f in fs):
        return QuadratureResult(0j, True, 0, 0, 0.0)
    oscillations, (scale, phase, remaining) = oscillation_budget(
        P, F, fs, eta, lam)
    order = spec.gauss_order
    needed = spec.nodes_per_wavelength * oscillations
    panels = max(spec.base_panels_per_axis, int(math.ceil(needed / order)))
    m = F.ambient
    frames = [np.array([[float(c) for c in row]
                        for row in V.coordinate_forms()]) for V in F]

    def integrand(X):
        weight = eta.evaluate(X)
        inside = weight > 0
        out = np.zeros(X.shape[0], dtype=complex)
        if not np.any(inside):
            return out
        Y = X[inside]
        value = weight[inside] * np.exp(1j * scale * evaluate_array(phase, Y))
        for C, f in zip(frames, remaining):
            if f is not None:
                value = value * f.evaluate(Y @ C.T, lam)
        out[inside] = value
        return out

    previous, change = None, float('inf')
    value = 0j
    for level in range(spec.max_refinements + 1):
        if (panels * order) ** m > spec.max_points:
            logging.warning('Quadrature stopped at {} panels per axis: point '
                            'budget exhausted (lam={}).'.format(panels, lam))
            break
        value = tensor_gauss(integrand, eta.box(), panels, order,
                             spec.chunk_points)
        if previous is not None:
            change = abs(value - previous)
            if change <= max(spec.relative_tolerance * abs(value),
                             spec.absolute_tolerance):
                return QuadratureResult(value, True, panels, level, change)
        previous = value
        panels *= 2
    logging.warning('Quadrature did not converge at lam={} (last change '
                    '{:.3e}).'.format(lam, change))
    return QuadratureResult(value, False, panels, spec.max_refinements, change)


# %% Decay sweeps.
@dataclass
class DecaySweepResult:
    lambdas: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    fitted_epsilon: Optional[float] = None
    intercept: Optional[float] = None
    fit_r2: Optional[float] = None
    fit_ok: bool = False
    fit_indices: List[int] = field(default_factory=list)
    samples: Optional[pd.DataFrame] = None

    def to_frame(self):
        return pd.DataFrame({
            'lambda': self.lambdas,
            're': np.real(self.values),
            'im': np.imag(self.values),
            'abs': np.abs(self.values),
            'converged': self.converged.astype(bool),
        })

    def summary(self):
        return {'epsilon_hat': self.fitted_epsilon,
                'intercept': self.intercept, 'r2': self.fit_r2,
                'fit_ok': self.fit_ok,
                'fit_lambdas': [float(self.lambdas[i])
                                for i in self.fit_indices]}


def geometric_grid(start, stop, points):
    if points < 2 or not 0 < start < stop:
        raise ValueError('Need 0 < start < stop and at least two points.')
    return np.geomspace(start, stop, points)


def fit_decay_exponent(lambdas, values, converged, fit_fraction=0.5,
                       min_points=4):
    """Least-squares fit of log|value| = intercept - epsilon log(lam).

    Uses converged points with lam > 0 in the top `fit_fraction` of the
    grid, widened downward until `min_points` points are available.

    Returns
    -------
    (epsilon, intercept, r2, indices) or None when fewer than `min_points`
    converged points exist.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    mags = np.abs(np.asarray(values))
    usable = [i for i in range(len(lambdas))
              if converged[i] and lambdas[i] > 0 and mags[i] > 0]
    if len(usable) < min_points:
        return None
    start = int(math.floor(len(lambdas) * (1 - fit_fraction)))
    window = [i for i in usable if i >= start]
    if len(window) < min_points:
        window = usable[-min_points:]
    fit = stats.linregress(np.log(lambdas[window]), np.log(mags[window]))
    return -fit.slope, fit.intercept, fit.rvalue ** 2, window


def worst_case_family(F, degree=3, samples=8, seed=0, real=False):
    """Family callable: for grid index i, `samples` tuples of seeded random
    trig polynomials; tuple t of point i is seeded by (seed, i, t)."""
    def family(lam, index):
        tuples = []
        for t in range(samples):
            children = np.random.SeedSequence([seed, index, t]).spawn(len(F))
            tuples.append([TestFunction.trig_polynomial(V.dimension, degree,
                                                        child, real=real)
                           for V, child in zip(F, children)])
        return tuples
    return family


def _sweep_point(P, F, tuples, eta, lam, spec):
    results = [lambda_functional(P, F, fs, eta, lam, spec) for fs in tuples]
    worst = max(range(len(results)), key=lambda k: abs(results[k].value))
    return results, worst


def decay_sweep(P, F, family, eta, lambdas, spec=None, threads=1,
                fit_fraction=0.5, min_points=6):
    """Evaluate Lambda over a geometric lam grid and fit the decay exponent.

    family is a list of function tuples, a callable (lam, index) -> list of
    tuples, or None for f_j = 1. Per lam the tuple of largest modulus is
    kept (an empirical lower envelope of the worst case).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if len(lambdas) < min_points:
        raise ValueError('The lam grid needs at least {} points, got {}.'
                         .format(min_points, len(lambdas)))
    if np.any(np.diff(lambdas) <= 0) or lambdas[0] < 1:
        raise ValueError('The lam grid must be strictly increasing with '
                         'minimum >= 1.')
    spec = QuadratureSpec() if spec is None else spec
    if family is None:
        family = [[TestFunction.constant_one(V.dimension) for V in F]]
    if callable(family):
        per_point = [family(lam, i) for i, lam in enumerate(lambdas)]
    else:
        per_point = [list(family)] * len(lambdas)
    outputs = Parallel(n_jobs=threads)(
        delayed(_sweep_point)(P, F, per_point[i], eta, lam, spec)
        for i, lam in enumerate(lambdas))
    values = np.zeros(len(lambdas), dtype=complex)
    converged = np.zeros(len(lambdas), dtype=bool)
    rows = []
    for i, (results, worst) in enumerate(outputs):
        values[i] = results[worst].value
        converged[i] = all(r.converged for r in results)
        for t, r in enumerate(results):
            rows.append({'lambda': lambdas[i], 'tuple': t,
                         'abs': abs(r.value), 'converged': r.converged,
                         'panels': r.panels_per_axis})
        logging.info('lam = {:.6g}: |Lambda| = {:.6e} ({} tuples, '
                     'converged={})'.format(lambdas[i], abs(values[i]),
                                            len(results), converged[i]))
    result = DecaySweepResult(lambdas=lambdas, values=values,
                              converged=converged,
                              samples=pd.DataFrame(rows))
    fit = fit_decay_exponent(lambdas, values, converged, fit_fraction)
    if fit is None:
        logging.warning('Fewer than 4 converged points; no decay fit.')
        return result
    result.fitted_epsilon, result.intercept, result.fit_r2, \
        result.fit_indices = fit
    result.fit_ok = True
    logging.info('Fitted epsilon = {:.4f} (r2 = {:.4f}).'.format(
        result.fitted_epsilon, result.fit_r2))
    return result


def adversarial_functions(minimizers, lam=None):
    """f_j = exp(-i lam p_j) on the frame coordinates of V_j.

    With lam None the functions follow the lam of the sweep they are used
    in; otherwise they are frozen at the given lam.
    """
    out = []
    for p in minimizers:
        f = TestFunction.modulated_exponential(p, sign=-1)
        if lam is not None:
            f.params['fixed_lambda'] = float(lam)
        out.append(f)
    return out


# %% Uniformity scan.
@dataclass(frozen=True)
class CoefficientGridSpec:
    extent_factor: float = 3.0
    max_phase_step: float = math.pi / 4
    nodes_per_wavelength: int = 8
    max_phases: int = 50_000_000


@dataclass
class UniformityReport:
    lam: float
    degree: int
    tau: float
    max_coefficient: float
    classification: str
    best_q: Polynomial
    best_c: complex
    f_norm: float
    residual_norm: float
    threshold: float
    phases_scanned: int
    samples: int
    coefficient_grid: List[np.ndarray] = field(default_factory=list)

    def to_json(self):
        return {'lambda': self.lam, 'degree': self.degree, 'tau': self.tau,
                'max_coefficient': self.max_coefficient,
                'classification': self.classification,
                'best_q': self.best_q.to_json(),
                'best_c': [self.best_c.real, self.best_c.imag],
                'f_norm': self.f_norm, 'residual_norm': self.residual_norm,
                'threshold': self.threshold,
                'phases_scanned': self.phases_scanned,
                'samples': self.samples,
                'note': 'scan over a finite phase grid; max_coefficient is a '
                        'lower bound for the supremum over all phases'}


@dataclass(frozen=True)
class AlternatingSteps:
    """+1, -1, +1, ... on `steps` equal cells of the interval, 0 outside."""
    steps: int
    interval: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError('Need at least one step.')

    def __call__(self, y):
        a, b = self.interval
        y = np.asarray(y, dtype=float).ravel()
        cell = np.floor((y - a) / (b - a) * self.steps).astype(int)
        inside = (y >= a) & (y < b)
        return np.where(inside, np.where(cell % 2 == 0, 1.0, -1.0), 0.0)


def _midpoints(interval, count):
    a, b = interval
    dy = (b - a) / count
    return a + dy * (np.arange(count) + 0.5), dy


def fourier_coefficient(f_values, y, dy, coefficients):
    """Midpoint-rule value of int f(y) exp(-i q(y)) dy for
    q(y) = sum_k coefficients[k-1] y^k."""
    q = np.zeros_like(y)
    for k, a in enumerate(coefficients, start=1):
        q = q + a * y ** k
    return np.sum(f_values * np.exp(-1j * q)) * dy


def uniformity_scan(f, interval, lam, degree, tau=0.1, grid=None,
                    samples=None):
    """Scan polynomial phases q of degree <= `degree` for large
    |int_B f exp(-i q)| and classify f as lam-uniform or not.

    f is a callable on arrays (e.g. a one-variable TestFunction) or an array
    of values at the midpoints of `samples` equal cells of the interval.
    The linear coefficient is scanned by FFT; higher coefficients by an
    explicit loop. The constant term is absorbed in c.
    """
    grid = CoefficientGridSpec() if grid is None else grid
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError('Need an interval a < b.')
    if degree < 1:
        raise ValueError('Phase degree must be at least 1.')
    if tau <= 0 or abs(lam) <= 1:
        raise ValueError('Need tau > 0 and |lam| > 1.')
    length = b - a
    reach = max(abs(a), abs(b))
    extent = grid.extent_factor * abs(lam)
    omega = sum(k * extent * reach ** (k - 1) for k in range(1, degree + 1))
    if callable(f):
        bw = f.bandwidth(lam) if isinstance(f, TestFunction) else 0.0
        dy_max = 2 * math.pi / (grid.nodes_per_wavelength * (omega + bw))
        count = int(math.ceil(length / dy_max)) if samples is None \
            else int(samples)
        y, dy = _midpoints((a, b), count)
        values = np.asarray(f(y[:, None]) if isinstance(f, TestFunction)
                            else f(y), dtype=complex)
    else:
        values = np.asarray(f, dtype=complex).ravel()
        count = len(values)
        y, dy = _midpoints((a, b), count)
    if dy * grid.nodes_per_wavelength * omega > 2 * math.pi * (1 + 1e-12):
        raise ValueError('Sampling under-resolves the phase grid: {} samples, '
                         'need at least {}.'.format(
                             count, int(math.ceil(
                                 length * grid.nodes_per_wavelength * omega /
                                 (2 * math.pi)))))
    f_norm = math.sqrt(float(np.sum(np.abs(values) ** 2) * dy))

    # FFT grid for the linear coefficient: spacing 2 pi / (n_fft dy).
    n_fft = 1 << int(math.ceil(math.log2(max(
        count, reach * 2 * math.pi / (grid.max_phase_step * dy)))))
    a1_step = 2 * math.pi / (n_fft * dy)
    freqs = np.fft.fftfreq(n_fft, d=dy) * 2 * math.pi
    keep = np.abs(freqs) <= extent
    a1_grid = freqs[keep]
    higher = []
    for k in range(2, degree + 1):
        step = grid.max_phase_step / reach ** k * 0.999
        half = int(math.floor(extent / step))
        higher.append(np.arange(-half, half + 1) * step)
    total = len(a1_grid) * int(np.prod([len(h) for h in higher]))
    if total > grid.max_phases:
        raise ValueError('Phase grid of {} phases exceeds the limit of {}.'
                         .format(total, grid.max_phases))

    best = (-1.0, None)
    for combo in np.ndindex(*[len(h) for h in higher]):
        coeffs = [higher[k][i] for k, i in enumerate(combo)]
        h = np.zeros_like(y)
        for k, c in enumerate(coeffs, start=2):
            h = h + c * y ** k
        g = values * np.exp(-1j * h)
        # sum_n g_n exp(-i a1 y_n) dy with y_n = y_0 + n dy.
        spectrum = np.fft.fft(g, n_fft) * dy * np.exp(-1j * freqs * y[0])
        mags = np.abs(spectrum[keep])
        j = int(np.argmax(mags))
        if mags[j] > best[0]:
            best = (float(mags[j]), [float(a1_grid[j])] + coeffs,
                    complex(spectrum[keep][j]))
    if f_norm == 0:
        return UniformityReport(lam=lam, degree=degree, tau=tau,
                                max_coefficient=0.0,
                                classification='uniform',
                                best_q=Polynomial.zero(1), best_c=0j,
                                f_norm=0.0, residual_norm=0.0,
                                threshold=0.0, phases_scanned=total,
                                samples=count,
                                coefficient_grid=[a1_grid] + higher)
    M, coeffs, integral = best
    c = integral / length
    residual = math.sqrt(max(f_norm ** 2 - M ** 2 / length, 0.0))
    threshold = (1 - abs(lam) ** (-tau)) * f_norm
    best_q = Polynomial(1, {(k,): Fraction(v)
                            for k, v in enumerate(coeffs, start=1)})
    classification = 'nonuniform' if residual <= threshold else 'uniform'
    logging.info('Uniformity scan: {} phases, max |coefficient| = {:.6e}, '
                 '{}.'.format(total, M, classification))
    return UniformityReport(lam=lam, degree=degree, tau=tau,
                            max_coefficient=M, classification=classification,
                            best_q=best_q, best_c=c, f_norm=f_norm,
                            residual_norm=residual, threshold=threshold,
                            phases_scanned=total, samples=count,
                            coefficient_grid=[a1_grid] + higher)

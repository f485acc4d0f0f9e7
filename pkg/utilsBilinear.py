'''
    ---------------------------------------------------------------------------
    oscidecay: utilsBilinear.py
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

    This script contains the bilinear Hilbert transform with polynomial phase

        T_P(f, g)(x) = p.v. int f(x - t) g(x + t) exp(i P(x, t)) dt / t,

    evaluated by pairing +t and -t nodes on dyadic shells, the exact
    modulation reduction of phases of degree <= 2, and seeded sweeps of the
    ratio ||T_P(f, g)||_q / (||f||_p1 ||g||_p2) over coefficient scales.
'''

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import integrate, stats

from utilsOscillatory import composite_gauss
from utilsPolynomials import (Polynomial, evaluate_array, gradient_bound,
                              monomial_basis)


# %% Phases and functions.
@dataclass(frozen=True)
class BilinearPhase:
    """Real polynomial P(x, t) (variables x1 = x, x2 = t) of degree <= d."""
    poly: Polynomial
    degree_bound: int

    def __post_init__(self):
        if self.poly.dimension != 2:
            raise ValueError('A bilinear phase is a polynomial in (x, t); got '
                             'dimension {}.'.format(self.poly.dimension))
        if self.degree_bound < 0:
            raise ValueError('Degree bound must be nonnegative.')
        if self.poly.degree > self.degree_bound:
            raise ValueError('Phase has degree {} above the bound {}.'.format(
                self.poly.degree, self.degree_bound))

    @classmethod
    def zero(cls, degree_bound=0):
        return cls(Polynomial.zero(2), degree_bound)

    @classmethod
    def from_coefficients(cls, degree_bound, coefficients):
        """coefficients along phase_monomials(degree_bound)."""
        basis = phase_monomials(degree_bound)
        if len(coefficients) != len(basis):
            raise ValueError('Need {} coefficients, got {}.'.format(
                len(basis), len(coefficients)))
        terms = {e: Fraction(c) for e, c in zip(basis, coefficients)}
        return cls(Polynomial(2, terms), degree_bound)

    def __call__(self, x, t):
        X = np.stack(np.broadcast_arrays(x, t), axis=-1)
        shape = X.shape[:-1]
        return evaluate_array(self.poly, X.reshape(-1, 2)).reshape(shape)


def phase_monomials(degree):
    return list(monomial_basis(2, degree))


def _as_phase(P):
    if isinstance(P, BilinearPhase):
        return P
    if isinstance(P, Polynomial):
        return BilinearPhase(P, max(P.degree, 0))
    raise ValueError('Expected a BilinearPhase or a Polynomial in (x, t).')


@dataclass(frozen=True)
class BumpFunction:
    """sum_k a_k exp(-1 / (1 - s_k^2)) exp(i omega y), s_k = (y - c_k) / w_k,
    zero outside |s_k| < 1."""
    centers: tuple
    widths: tuple
    amplitudes: tuple
    frequency: float = 0.0

    def __post_init__(self):
        if not (len(self.centers) == len(self.widths) == len(self.amplitudes)):
            raise ValueError('Centers, widths and amplitudes must match.')
        if any(not w > 0 for w in self.widths):
            raise ValueError('Bump widths must be positive.')

    @property
    def support(self):
        return (min(c - w for c, w in zip(self.centers, self.widths)),
                max(c + w for c, w in zip(self.centers, self.widths)))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape, dtype=complex)
        for c, w, a in zip(self.centers, self.widths, self.amplitudes):
            s = (y - c) / w
            inside = np.abs(s) < 1
            bump = np.zeros(y.shape)
            bump[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
            out = out + a * bump
        if self.frequency:
            out = out * np.exp(1j * self.frequency * y)
        return out

    def shifted(self, h):
        return BumpFunction(tuple(c + h for c in self.centers), self.widths,
                            self.amplitudes, self.frequency)


def random_bump(rng, half_width, bumps=2, max_frequency=4.0, real=False):
    """Seeded bump sum supported inside [-half_width, half_width]."""
    widths, centers, amplitudes = [], [], []
    for _ in range(bumps):
        w = half_width * rng.uniform(0.25, 0.5)
        widths.append(float(w))
        centers.append(float(rng.uniform(-(half_width - w), half_width - w)))
        a = rng.standard_normal() + (0 if real else 1j * rng.standard_normal())
        amplitudes.append(complex(a))
    frequency = 0.0 if real else float(rng.uniform(-max_frequency,
                                                   max_frequency))
    return BumpFunction(tuple(centers), tuple(widths), tuple(amplitudes),
                        frequency)


@dataclass(frozen=True)
class ModulatedFunction:
    """exp(i (alpha y^2 + mu y)) base(y)."""
    base: object
    alpha: float
    mu: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.exp(1j * (self.alpha * y ** 2 + self.mu * y)) * self.base(y)


@dataclass(frozen=True)
class LinearCombination:
    functions: tuple
    weights: tuple

    def __call__(self, y):
        return sum(w * f(y) for f, w in zip(self.functions, self.weights))


# %% Principal value quadrature.
@dataclass(frozen=True)
class PrincipalValueSpec:
    """Dyadic shells [eps0 2^k, eps0 2^(k+1)] covering [eps0, R] plus the
    inner interval [0, eps0], each integrated by adaptive Gauss-Legendre
    panels with paired +t and -t nodes."""
    eps0: float = 2.0 ** -8
    R: float = 2.0
    nodes: int = 16
    nodes_per_wavelength: int = 8
    max_refinements: int = 8
    relative_tolerance: float = 1e-9
    absolute_tolerance: float = 1e-13

    def __post_init__(self):
        if not 0 < self.eps0 < self.R:
            raise ValueError('Need 0 < eps0 < R.')
        if not math.log2(self.eps0).is_integer():
            raise ValueError('eps0 must be a power of two, got {}.'.format(
                self.eps0))
        if self.nodes < 2 or self.nodes_per_wavelength < 4:
            raise ValueError('Need at least 2 nodes per panel and 4 nodes '
                             'per wavelength.')
        if self.max_refinements < 1:
            raise ValueError('max_refinements must be >= 1.')

    @classmethod
    def from_settings(cls, settings):
        keys = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in settings.items() if k in keys})

    @property
    def shells(self):
        return int(math.ceil(math.log2(self.R / self.eps0)))

    def intervals(self):
        edges = [0.0] + [min(self.eps0 * 2.0 ** k, self.R)
                         for k in range(self.shells + 1)]
        return list(zip(edges[:-1], edges[1:]))


@dataclass
class BilinearResult:
    x: np.ndarray
    values: np.ndarray
    converged: np.ndarray

    @property
    def all_converged(self):
        return bool(np.all(self.converged))


def _paired_integrand(phase, f, g, x, t):
    """[K(x, t) - K(x, -t)] / t with K = f(x - t) g(x + t) exp(i P(x, t))."""
    X, T = x[:, None], t[None, :]
    plus = f(X - T) * g(X + T) * np.exp(1j * phase(X, T))
    minus = f(X + T) * g(X - T) * np.exp(1j * phase(X, -T))
    return (plus - minus) / T


def _panel_sum(phase, f, g, x, a, b, panels, order):
    nodes, weights = composite_gauss(a, b, panels, order)
    return _paired_integrand(phase, f, g, x, nodes) @ weights


def _initial_panels(phase, x, a, b, spec):
    reach = max(float(np.max(np.abs(x))) if len(x) else 0.0, b)
    wavelengths = (b - a) * gradient_bound(phase.poly, [0.0, 0.0],
                                           math.sqrt(2) * reach) / (2 * math.pi)
    return max(1, int(math.ceil(wavelengths * spec.nodes_per_wavelength /
                                spec.nodes)))


def _interval_integral(phase, f, g, x, a, b, spec):
    panels = _initial_panels(phase, x, a, b, spec)
    result = _panel_sum(phase, f, g, x, a, b, panels, spec.nodes)
    converged = np.zeros(len(x), dtype=bool)
    active = np.arange(len(x))
    for _ in range(spec.max_refinements):
        panels *= 2
        refined = _panel_sum(phase, f, g, x[active], a, b, panels, spec.nodes)
        change = np.abs(refined - result[active])
        ok = change <= spec.absolute_tolerance + \
            spec.relative_tolerance * np.abs(refined)
        result[active] = refined
        converged[active[ok]] = True
        active = active[~ok]
        if not active.size:
            break
    return result, converged


def bht_apply(P, f, g, x_grid, spec=None):
    """T_P(f, g) on x_grid.

    f and g are callables on arrays, supported in [-R/2, R/2]; then the
    t-integral vanishes beyond |t| = R and the shells are exact truncations.
    converged[i] is False when some shell failed to settle at x_grid[i].
    """
    spec = spec or PrincipalValueSpec()
    phase = _as_phase(P)
    x = np.asarray(x_grid, dtype=float).ravel()
    total = np.zeros(len(x), dtype=complex)
    converged = np.ones(len(x), dtype=bool)
    for a, b in spec.intervals():
        value, ok = _interval_integral(phase, f, g, x, a, b, spec)
        total += value
        converged &= ok
    if not np.all(converged):
        logging.warning('Principal value quadrature unresolved at {} of {} '
                        'points.'.format(int(np.count_nonzero(~converged)),
                                         len(x)))
    return BilinearResult(x=x, values=total, converged=converged)


# %% Quadratic reduction.
@dataclass(frozen=True)
class QuadraticReduction:
    """T_P(f, g)(x) = exp(i psi(x)) T_0(f~, g~)(x) with
    f~(y) = exp(i (alpha y^2 + mu y)) f(y), g~(z) = exp(i (beta z^2 + nu z)) g(z)
    and psi(x) = (a0 - a2) x^2 + c."""
    alpha: Fraction
    beta: Fraction
    mu: Fraction
    nu: Fraction
    psi: Polynomial

    def modulate_f(self, f):
        return ModulatedFunction(f, float(self.alpha), float(self.mu))

    def modulate_g(self, g):
        return ModulatedFunction(g, float(self.beta), float(self.nu))

    def output_phase(self, x):
        return evaluate_array(self.psi, np.asarray(x, dtype=float))

    def to_json(self):
        return {'alpha': str(self.alpha), 'beta': str(self.beta),
                'mu': str(self.mu), 'nu': str(self.nu),
                'psi': self.psi.to_json()}


def quadratic_reduction(P):
    """Modulations reducing a phase a0 x^2 + a1 x t + a2 t^2 + b1 x + b2 t + c
    to P = 0: 2 (beta - alpha) = a1, alpha + beta = a2, nu - mu = b2,
    nu + mu = b1."""
    poly = _as_phase(P).poly
    if poly.degree > 2:
        raise ValueError('Quadratic reduction needs degree <= 2, got {}.'
                         .format(poly.degree))
    c = poly.coefficient
    a0, a1, a2 = c((2, 0)), c((1, 1)), c((0, 2))
    b1, b2, c0 = c((1, 0)), c((0, 1)), c((0, 0))
    alpha = a2 / 2 - a1 / 4
    beta = a2 / 2 + a1 / 4
    mu = (b1 - b2) / 2
    nu = (b1 + b2) / 2
    psi = Polynomial(1, {(2,): a0 - a2, (0,): c0})
    return QuadraticReduction(alpha=alpha, beta=beta, mu=mu, nu=nu, psi=psi)


# %% Norms.
def lp_norm(values, x_grid, p):
    """Discrete L^p norm with trapezoid weights on x_grid."""
    if not p > 0:
        raise ValueError('Exponent must be positive, got {}.'.format(p))
    return float(integrate.trapezoid(np.abs(values) ** p, x_grid) ** (1.0 / p))


def holder_exponent(p1, p2):
    """q with 1/q = 1/p1 + 1/p2, after checking p1, p2 > 1 and q > 2/3."""
    if not (p1 > 1 and p2 > 1):
        raise ValueError('Need p1, p2 > 1; got {}, {}.'.format(p1, p2))
    q = 1.0 / (1.0 / p1 + 1.0 / p2)
    if not q > 2.0 / 3.0:
        raise ValueError('Need q > 2/3; got q = {:.6f}.'.format(q))
    return q


def norm_ratio(P, f, g, p1, p2, x_grid, spec=None):
    """(||T_P(f, g)||_q / (||f||_p1 ||g||_p2), converged)."""
    q = holder_exponent(p1, p2)
    x = np.asarray(x_grid, dtype=float)
    result = bht_apply(P, f, g, x, spec)
    denominator = lp_norm(f(x), x, p1) * lp_norm(g(x), x, p2)
    if denominator == 0:
        raise ValueError('f or g vanishes on the grid.')
    return lp_norm(result.values, x, q) / denominator, result.all_converged


@dataclass
class NormRatioReport:
    degree: int
    p1: float
    p2: float
    q: float
    scales: List[float]
    rows: List[dict] = field(default_factory=list)
    max_ratio: Optional[float] = None
    per_scale_max: List[float] = field(default_factory=list)
    envelope: List[float] = field(default_factory=list)
    slope_vs_scale: Optional[float] = None
    slope_per_scale_max: Optional[float] = None
    all_converged: bool = True

    def __post_init__(self):
        q = holder_exponent(self.p1, self.p2)
        if abs(q - self.q) > 1e-12:
            raise ValueError('q must satisfy 1/q = 1/p1 + 1/p2.')

    def finalize(self):
        """Per-scale maxima, running envelope and log-log slopes from rows.

        slope_vs_scale is the least-squares slope of log ratio against log
        scale over all rows; slope_per_scale_max fits the per-scale maxima.
        Neither is taken from the envelope, which is monotone by
        construction and only feeds max_ratio.
        """
        if not self.rows:
            raise ValueError('No rows to summarise.')
        frame = self.to_frame()
        grouped = frame.groupby('scale')['ratio'].max()
        self.per_scale_max = [float(grouped[s]) for s in self.scales]
        self.envelope = list(np.maximum.accumulate(self.per_scale_max))
        self.max_ratio = float(self.envelope[-1])
        self.all_converged = bool(frame['converged'].all())
        for s, m, e in zip(self.scales, self.per_scale_max, self.envelope):
            logging.info('scale = {:g}: max ratio {:.6e}, envelope {:.6e}'
                         .format(s, m, e))
        if len(self.scales) >= 2:
            self.slope_vs_scale = float(stats.linregress(
                np.log(frame['scale']), np.log(frame['ratio'])).slope)
            self.slope_per_scale_max = float(stats.linregress(
                np.log(self.scales), np.log(self.per_scale_max)).slope)
        return self

    def to_frame(self):
        return pd.DataFrame(self.rows)

    def summary(self):
        return {'max_ratio': self.max_ratio,
                'slope_vs_scale': self.slope_vs_scale,
                'slope_per_scale_max': self.slope_per_scale_max,
                'per_scale_max': list(self.per_scale_max),
                'envelope': list(self.envelope),
                'p1': self.p1, 'p2': self.p2, 'q': self.q,
                'degree': self.degree, 'all_converged': self.all_converged}


def _coefficient_name(e):
    return 'c_x{}t{}'.format(e[0], e[1])


def sweep_draw(degree, seed, trial, half_width):
    """(f, g, unit coefficient direction) for one sweep trial."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    f = random_bump(rng, half_width)
    g = random_bump(rng, half_width)
    direction = rng.standard_normal(len(phase_monomials(degree)))
    direction /= np.linalg.norm(direction)
    return f, g, direction


def sweep_phase(degree, direction, scale):
    coefficients = [Fraction(float(c) * scale) for c in direction]
    return BilinearPhase.from_coefficients(degree, coefficients)


def _sweep_trial(degree, direction, scale, f, g, p1, p2, x_grid, spec):
    return norm_ratio(sweep_phase(degree, direction, scale), f, g, p1, p2,
                      x_grid, spec)


def reduced_norm_ratio(P, f, g, p1, p2, x_grid, spec=None):
    """Norm ratio of T_0 on the pair modulated by quadratic_reduction(P).

    |T_P(f, g)| = |T_0(f~, g~)| and |f~| = |f|, so this equals
    norm_ratio(P, f, g, ...) up to quadrature error.
    """
    r = quadratic_reduction(P)
    return norm_ratio(Polynomial.zero(2), r.modulate_f(f), r.modulate_g(g),
                      p1, p2, x_grid, spec)


def norm_ratio_sweep(degree, p1, p2, trials, seed, scale_max=10,
                     grid_points=257, spec=None, threads=1):
    """Seeded sweep of the norm ratio over coefficient scales 2^0..2^scale_max.

    Trial k takes sweep_draw(degree, seed, k, R / 2) and reuses the pair
    and direction at every scale. See NormRatioReport.finalize for the
    summary statistics.
    """
    if trials < 1:
        raise ValueError('Need at least one trial.')
    if scale_max < 0:
        raise ValueError('scale_max must be nonnegative.')
    spec = spec or PrincipalValueSpec()
    q = holder_exponent(p1, p2)
    basis = phase_monomials(degree)
    half = spec.R / 2
    x_grid = np.linspace(-half, half, grid_points)
    scales = [2.0 ** k for k in range(scale_max + 1)]
    draws = [sweep_draw(degree, seed, k, half) for k in range(trials)]
    jobs = [(k, s) for s in scales for k in range(trials)]
    outcomes = Parallel(n_jobs=threads)(
        delayed(_sweep_trial)(degree, draws[k][2], s, draws[k][0],
                              draws[k][1], p1, p2, x_grid, spec)
        for k, s in jobs)
    report = NormRatioReport(degree=degree, p1=p1, p2=p2, q=q, scales=scales)
    for (k, s), (ratio, ok) in zip(jobs, outcomes):
        row = {'trial': k, 'scale': s}
        for e, c in zip(basis, draws[k][2]):
            row[_coefficient_name(e)] = float(c) * s
        row['ratio'] = ratio
        row['converged'] = ok
        report.rows.append(row)
    report.finalize()
    if not report.all_converged:
        logging.warning('Some norm ratio samples carry quadrature flags.')
    return report

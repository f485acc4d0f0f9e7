'''
    ---------------------------------------------------------------------------
    oscidecay: utilsFunctions.py
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

    This script contains the cutoff functions and the test functions f_j
    (or g_j) that are fed to the oscillatory and sublevel computations.
    Test functions live on the frame coordinates of a subspace and are
    evaluated on (N, kappa) arrays.
'''

import math

import numpy as np
from scipy import integrate, special
from scipy.interpolate import RegularGridInterpolator

from utilsPolynomials import Polynomial, evaluate_array, gradient_bound


# %% Cutoffs.
class CutoffFunction:
    """Compactly supported cutoff eta on the ball B(center, radius).

    kind 'smooth' is e * exp(-1 / (1 - t^2)), t = |x - center| / radius,
    equal to 1 at the center and flat to all orders at the boundary.
    kind 'polynomial' is (1 - t^2)^(order + 1), of class C^order.
    """

    KINDS = ('smooth', 'polynomial')

    def __init__(self, center, radius=1.0, order=6, kind='smooth'):
        center = np.asarray(center, dtype=float).ravel()
        if center.size < 1:
            raise ValueError('Cutoff center needs at least one coordinate.')
        if not radius > 0:
            raise ValueError('Cutoff radius must be positive, got {}.'.format(
                radius))
        if int(order) < 1:
            raise ValueError('Cutoff order must be a positive integer.')
        if kind not in self.KINDS:
            raise ValueError('Unknown cutoff kind "{}".'.format(kind))
        self.center = center
        self.radius = float(radius)
        self.order = int(order)
        self.kind = kind

    @classmethod
    def from_json(cls, data, dimension=None):
        center = data.get('center')
        if center is None:
            if dimension is None:
                raise ValueError('Cutoff needs a center.')
            center = [0.0] * dimension
        return cls(center=[float(c) for c in center],
                   radius=float(data.get('radius', 1.0)),
                   order=int(data.get('order', 6)),
                   kind=data.get('kind', 'smooth'))

    def to_json(self):
        return {'center': self.center.tolist(), 'radius': self.radius,
                'order': self.order, 'kind': self.kind}

    @property
    def dimension(self):
        return self.center.size

    def profile(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = t < 1.0
        if self.kind == 'smooth':
            s = 1.0 - t[inside] ** 2
            with np.errstate(divide='ignore', over='ignore', under='ignore'):
                out[inside] = np.exp(1.0 - 1.0 / s)
        else:
            out[inside] = (1.0 - t[inside] ** 2) ** (self.order + 1)
        return out

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise ValueError('Points have {} columns for a cutoff in R^{}.'
                             .format(X.shape[1], self.dimension))
        t = np.linalg.norm(X - self.center, axis=1) / self.radius
        return self.profile(t)

    __call__ = evaluate

    def box(self):
        """Axis-aligned bounding box of the support, shape (m, 2)."""
        return np.stack([self.center - self.radius,
                         self.center + self.radius], axis=1)

    def integral(self):
        """Reference value of the integral of eta by radial quadrature."""
        m = self.dimension
        sphere = 2 * math.pi ** (m / 2) / math.gamma(m / 2)
        value, _ = integrate.quad(
            lambda t: float(self.profile(np.array([t]))[0]) * t ** (m - 1),
            0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        return sphere * self.radius ** m * value


# %% Test functions.
class TestFunction:
    """A bounded function on the frame coordinates u of a subspace.

    Kinds
    -----
    constant : constant value (constant_one is the value 1).
    trig_polynomial : sum_k a_k exp(i k . u) with sum |a_k| = 1, seeded.
    modulated_exponential : exp(sign * i * lam * p(u)), linked to the
        current lam of a sweep.
    smoothed_indicator : erf-smoothed indicator of the cube interval^kappa.
    polynomial : the real polynomial p(u), unnormalised (for g_j).
    combination : sum_k w_k f_k.
    tabulated : linear interpolation of values on a regular grid, 0 outside.
    """

    __test__ = False

    KINDS = ('constant', 'trig_polynomial', 'modulated_exponential',
             'smoothed_indicator', 'polynomial', 'combination', 'tabulated')

    def __init__(self, kind, dimension, **params):
        if kind not in self.KINDS:
            raise ValueError('Unknown test function kind "{}".'.format(kind))
        if int(dimension) < 1:
            raise ValueError('Test function dimension must be positive.')
        self.kind = kind
        self.dimension = int(dimension)
        self.params = params
        self._interpolator = None

    # Constructors.
    @classmethod
    def constant(cls, dimension, value=1.0):
        return cls('constant', dimension, value=complex(value))

    @classmethod
    def constant_one(cls, dimension):
        return cls.constant(dimension, 1.0)

    @classmethod
    def trig_polynomial(cls, dimension, degree, seed, real=False):
        """Random trigonometric polynomial of the given degree per axis.

        seed may be an int, a sequence of ints, or a numpy SeedSequence.
        """
        if degree < 0:
            raise ValueError('Trig polynomial degree must be nonnegative.')
        rng = np.random.default_rng(seed)
        axes = [np.arange(-degree, degree + 1)] * dimension
        frequencies = np.stack(np.meshgrid(*axes, indexing='ij'),
                               axis=-1).reshape(-1, dimension)
        coefficients = rng.standard_normal(len(frequencies)) + \
            1j * rng.standard_normal(len(frequencies))
        coefficients /= np.sum(np.abs(coefficients))
        return cls('trig_polynomial', dimension, frequencies=frequencies,
                   coefficients=coefficients, real=bool(real))

    @classmethod
    def modulated_exponential(cls, p, sign=-1):
        if sign not in (-1, 1):
            raise ValueError('sign must be -1 or 1.')
        return cls('modulated_exponential', p.dimension, phase=p, sign=sign)

    @classmethod
    def smoothed_indicator(cls, dimension, interval, width):
        a, b = float(interval[0]), float(interval[1])
        if not b > a or not width > 0:
            raise ValueError('Need interval a < b and a positive width.')
        return cls('smoothed_indicator', dimension, interval=(a, b),
                   width=float(width))

    @classmethod
    def polynomial(cls, p):
        return cls('polynomial', p.dimension, poly=p)

    @classmethod
    def combination(cls, functions, weights):
        functions = list(functions)
        weights = [complex(w) for w in weights]
        if not functions or len(functions) != len(weights):
            raise ValueError('Need matching, nonempty functions and weights.')
        if len({f.dimension for f in functions}) != 1:
            raise ValueError('Combined functions must share one dimension.')
        return cls('combination', functions[0].dimension, functions=functions,
                   weights=weights)

    @classmethod
    def tabulated(cls, axes, values):
        axes = [np.asarray(a, dtype=float) for a in axes]
        values = np.asarray(values)
        if values.shape != tuple(len(a) for a in axes):
            raise ValueError('Tabulated values must have shape {}.'.format(
                tuple(len(a) for a in axes)))
        return cls('tabulated', len(axes), axes=axes, values=values)

    @classmethod
    def from_json(cls, data, dimension):
        kind = data.get('kind', 'constant_one')
        if kind == 'constant_one':
            return cls.constant_one(dimension)
        if kind == 'constant':
            return cls.constant(dimension, complex(data.get('value', 1.0)))
        if kind == 'trig_polynomial':
            return cls.trig_polynomial(dimension, int(data['degree']),
                                       int(data['seed']),
                                       real=bool(data.get('real', False)))
        if kind == 'modulated_exponential':
            return cls.modulated_exponential(
                _phase_from_json(data['phase'], dimension),
                int(data.get('sign', -1)))
        if kind == 'smoothed_indicator':
            return cls.smoothed_indicator(dimension, data['interval'],
                                          float(data['width']))
        if kind == 'polynomial':
            return cls.polynomial(_phase_from_json(data['poly'], dimension))
        if kind == 'tabulated':
            return cls.tabulated(data['axes'], data['values'])
        raise ValueError('Unknown test function kind "{}".'.format(kind))

    # Properties.
    @property
    def is_zero(self):
        if self.kind == 'constant':
            return self.params['value'] == 0
        if self.kind == 'polynomial':
            return self.params['poly'].is_zero
        if self.kind == 'combination':
            return all(w == 0 for w in self.params['weights'])
        return False

    @property
    def is_real(self):
        kind = self.kind
        if kind == 'constant':
            return self.params['value'].imag == 0
        if kind == 'trig_polynomial':
            return self.params['real']
        if kind in ('smoothed_indicator', 'polynomial'):
            return True
        if kind == 'tabulated':
            return not np.iscomplexobj(self.params['values'])
        if kind == 'combination':
            return all(w.imag == 0 for w in self.params['weights']) and \
                all(f.is_real for f in self.params['functions'])
        return False

    # Evaluation.
    def evaluate(self, U, lam=0.0):
        U = np.asarray(U, dtype=float)
        if U.ndim == 1:
            U = U[:, None]
        if U.shape[1] != self.dimension:
            raise ValueError('Coordinates have {} columns for a function of '
                             '{} variables.'.format(U.shape[1], self.dimension))
        kind = self.kind
        if kind == 'constant':
            value = self.params['value']
            out = np.full(U.shape[0], value,
                          dtype=float if value.imag == 0 else complex)
            return out
        if kind == 'trig_polynomial':
            phases = U @ self.params['frequencies'].T
            out = np.exp(1j * phases) @ self.params['coefficients']
            return out.real if self.params['real'] else out
        if kind == 'modulated_exponential':
            phase = evaluate_array(self.params['phase'], U)
            lam = self.params.get('fixed_lambda', lam)
            return np.exp(self.params['sign'] * 1j * lam * phase)
        if kind == 'smoothed_indicator':
            a, b = self.params['interval']
            w = self.params['width']
            factors = 0.5 * (special.erf((U - a) / w) -
                             special.erf((U - b) / w))
            return np.prod(factors, axis=1)
        if kind == 'polynomial':
            return evaluate_array(self.params['poly'], U)
        if kind == 'combination':
            total = np.zeros(U.shape[0], dtype=complex)
            for f, w in zip(self.params['functions'], self.params['weights']):
                total = total + w * f.evaluate(U, lam)
            return total.real if self.is_real else total
        if self._interpolator is None:
            self._interpolator = RegularGridInterpolator(
                tuple(self.params['axes']), self.params['values'],
                method='linear', bounds_error=False, fill_value=0.0)
        return self._interpolator(U)

    __call__ = evaluate

    def bandwidth(self, lam=0.0, center=None, radius=1.0):
        """Bound on the local angular frequency of f on the coordinate ball
        B(center, radius); feeds the quadrature node budget."""
        kind = self.kind
        if kind == 'constant':
            return 0.0
        if kind == 'trig_polynomial':
            f = self.params['frequencies']
            return float(np.max(np.linalg.norm(f, axis=1))) if len(f) else 0.0
        if kind == 'modulated_exponential':
            if center is None:
                center = [0.0] * self.dimension
            lam = self.params.get('fixed_lambda', lam)
            return abs(lam) * gradient_bound(self.params['phase'], center,
                                             radius)
        if kind == 'smoothed_indicator':
            return 2 * math.pi / self.params['width']
        if kind == 'polynomial':
            return float(max(self.params['poly'].degree, 0))
        if kind == 'combination':
            return max(f.bandwidth(lam, center, radius)
                       for f in self.params['functions'])
        steps = [np.min(np.diff(a)) for a in self.params['axes'] if len(a) > 1]
        return math.pi / min(steps) if steps else 0.0

    def conjugate(self):
        kind = self.kind
        if kind == 'constant':
            return TestFunction.constant(self.dimension,
                                         self.params['value'].conjugate())
        if kind == 'trig_polynomial':
            if self.params['real']:
                return self
            return TestFunction('trig_polynomial', self.dimension,
                                frequencies=-self.params['frequencies'],
                                coefficients=np.conj(
                                    self.params['coefficients']),
                                real=False)
        if kind == 'modulated_exponential':
            return TestFunction.modulated_exponential(self.params['phase'],
                                                      -self.params['sign'])
        if kind == 'combination':
            return TestFunction.combination(
                [f.conjugate() for f in self.params['functions']],
                [w.conjugate() for w in self.params['weights']])
        if kind == 'tabulated':
            return TestFunction.tabulated(self.params['axes'],
                                          np.conj(self.params['values']))
        return self

    def __repr__(self):
        return 'TestFunction(kind={}, dimension={})'.format(self.kind,
                                                            self.dimension)


def _phase_from_json(data, dimension):
    if isinstance(data, str):
        return Polynomial.from_string(data, dimension)
    return Polynomial.from_json(data)


def coordinates(V, X):
    """Frame coordinates of pi_V(x) for an (N, m) array of points."""
    C = np.array([[float(c) for c in row] for row in V.coordinate_forms()])
    return np.asarray(X, dtype=float) @ C.T


def coordinate_ball(V, center, radius):
    """Center and radius of a ball containing the coordinates of pi_V(B)."""
    C = np.array([[float(c) for c in row] for row in V.coordinate_forms()])
    return C @ np.asarray(center, dtype=float), \
        float(np.linalg.norm(C, 2)) * radius

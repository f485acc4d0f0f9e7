'''
    ---------------------------------------------------------------------------
    oscidecay: utilsPolynomials.py
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

    This script contains classes and functions for exact multivariate
    polynomials with rational coefficients, linear subspaces given by rational
    spanning vectors, their orthogonal projections, and pullbacks of
    polynomials on a subspace to the ambient space.

    Coefficients are Fractions throughout. Floating point only enters through
    evaluate_array, which the numeric modules use on sample grids.
'''

import itertools
import math
from fractions import Fraction

import numpy as np
import sympy

from utilsLinearAlgebra import (to_fraction, fraction_to_string, rank, dot,
                                nullspace, projection_matrix, matvec,
                                gram_schmidt, inverse, independent_columns,
                                transpose)

# Exhaustive subcollection check in general_position.
MAX_GENERAL_POSITION_SUBSPACES = 20


# %% Monomials.
class Monomial(tuple):
    """Exponent vector alpha of the monomial x^alpha."""

    def __new__(cls, exponents):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError('Negative exponent in {}.'.format(exps))
        return super().__new__(cls, exps)

    @property
    def degree(self):
        return sum(self)

    @property
    def dimension(self):
        return len(self)

    def factorial(self):
        return math.prod(math.factorial(e) for e in self)


def graded_lex_key(monomial):
    """Sort key: total degree ascending, then lexicographic with x1 first."""
    return (sum(monomial), tuple(-e for e in monomial))


def homogeneous_monomials(dimension, degree):
    """All monomials of total degree `degree` in graded-lex order."""
    if degree < 0:
        return []
    out = []
    for combo in itertools.combinations_with_replacement(range(dimension),
                                                         degree):
        exps = [0] * dimension
        for i in combo:
            exps[i] += 1
        out.append(Monomial(exps))
    return sorted(out, key=graded_lex_key)


def monomial_basis(dimension, degree):
    """All monomials of total degree <= `degree`, graded-lex order."""
    basis = []
    for k in range(degree + 1):
        basis.extend(homogeneous_monomials(dimension, k))
    return basis


# %% Polynomials.
class Polynomial:
    """Sparse polynomial in `dimension` variables with rational coefficients.

    Instances are immutable. Terms with a zero coefficient are never stored.
    """

    __slots__ = ('_dimension', '_terms', '_hash')

    def __init__(self, dimension, terms=None):
        dimension = int(dimension)
        if dimension < 1:
            raise ValueError('Polynomial dimension must be positive, got {}.'
                             .format(dimension))
        clean = {}
        for exps, coeff in (terms or {}).items():
            mono = Monomial(exps)
            if len(mono) != dimension:
                raise ValueError(
                    'Monomial {} has length {} but the polynomial has '
                    'dimension {}.'.format(tuple(mono), len(mono), dimension))
            c = clean.get(mono, Fraction(0)) + to_fraction(coeff)
            if c == 0:
                clean.pop(mono, None)
            else:
                clean[mono] = c
        self._dimension = dimension
        self._terms = clean
        self._hash = None

    # Constructors.
    @classmethod
    def zero(cls, dimension):
        return cls(dimension)

    @classmethod
    def constant(cls, dimension, value):
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, dimension, index):
        if not 0 <= index < dimension:
            raise ValueError('Variable index {} out of range for dimension {}.'
                             .format(index, dimension))
        exps = [0] * dimension
        exps[index] = 1
        return cls(dimension, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exponents, coeff=1):
        exps = Monomial(exponents)
        return cls(len(exps), {exps: coeff})

    @classmethod
    def linear_form(cls, vector):
        """The polynomial v . x."""
        vector = [to_fraction(c) for c in vector]
        m = len(vector)
        terms = {}
        for i, c in enumerate(vector):
            exps = [0] * m
            exps[i] = 1
            terms[tuple(exps)] = c
        return cls(m, terms)

    @classmethod
    def from_string(cls, text, dimension):
        """Parse e.g. 'x1*x4 - x2*x3' or '2/3*x1^2 + x2' in variables
        x1..x{dimension}."""
        gens = sympy.symbols('x1:{}'.format(dimension + 1))
        local = {str(g): g for g in gens}
        try:
            expr = sympy.sympify(text.replace('^', '**'), locals=local)
            poly = sympy.Poly(expr, *gens, domain=sympy.QQ)
        except Exception as err:
            raise ValueError('Cannot parse polynomial "{}": {}'.format(
                text, err))
        return cls(dimension, {exps: to_fraction(c)
                               for exps, c in poly.terms()})

    @classmethod
    def from_json(cls, data):
        if 'dimension' not in data or 'terms' not in data:
            raise ValueError('Polynomial JSON needs "dimension" and "terms".')
        terms = {}
        for term in data['terms']:
            exps = tuple(term['exponents'])
            terms[exps] = terms.get(exps, Fraction(0)) + \
                to_fraction(term['coeff'])
        return cls(data['dimension'], terms)

    def to_json(self):
        return {'dimension': self._dimension,
                'terms': [{'exponents': list(e),
                           'coeff': fraction_to_string(c)}
                          for e, c in self.sorted_terms()]}

    # Accessors.
    @property
    def dimension(self):
        return self._dimension

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def degree(self):
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    @property
    def is_zero(self):
        return not self._terms

    @property
    def is_homogeneous(self):
        return len({sum(e) for e in self._terms}) <= 1

    def coefficient(self, exponents):
        return self._terms.get(Monomial(exponents), Fraction(0))

    def sorted_terms(self, descending=True):
        """Terms in graded-lex order, highest degree first by default."""
        if descending:
            return sorted(self._terms.items(),
                          key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
        return sorted(self._terms.items(), key=lambda t: graded_lex_key(t[0]))

    def coefficient_vector(self, basis):
        """Coefficients along a list of monomials; terms outside the basis
        raise."""
        index = set(basis)
        for e in self._terms:
            if e not in index:
                raise ValueError('Monomial {} is outside the basis.'.format(
                    tuple(e)))
        return [self._terms.get(e, Fraction(0)) for e in basis]

    @classmethod
    def from_coefficients(cls, dimension, basis, coefficients):
        return cls(dimension, dict(zip(basis, coefficients)))

    def homogeneous_part(self, degree):
        return Polynomial(self._dimension,
                          {e: c for e, c in self._terms.items()
                           if sum(e) == degree})

    # Arithmetic.
    def _check(self, other):
        if other._dimension != self._dimension:
            raise ValueError('Dimension mismatch: {} vs {}.'.format(
                self._dimension, other._dimension))

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self._dimension, to_fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Polynomial(self._dimension, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self._dimension,
                          {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = to_fraction(other)
            return Polynomial(self._dimension,
                              {e: c * v for e, v in self._terms.items()})
        self._check(other)
        terms = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self._dimension, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError('Only nonnegative integer powers are supported.')
        result = Polynomial.constant(self._dimension, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self._dimension == other._dimension
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dimension,
                               frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        if not self._terms:
            return '0'
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append('x{}'.format(i + 1))
                elif k > 1:
                    factors.append('x{}^{}'.format(i + 1, k))
            mono = '*'.join(factors)
            coeff = fraction_to_string(abs(c))
            if not mono:
                body = coeff
            elif abs(c) == 1:
                body = mono
            else:
                body = '{}*{}'.format(coeff, mono)
            sign = '-' if c < 0 else '+'
            parts.append((sign, body))
        text = ('-' if parts[0][0] == '-' else '') + parts[0][1]
        for sign, body in parts[1:]:
            text += ' {} {}'.format(sign, body)
        return text

    def __repr__(self):
        return 'Polynomial({}, "{}")'.format(self._dimension, self)

    # Evaluation.
    def __call__(self, x):
        return evaluate(self, x)


def _is_exact(value):
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def evaluate(P, x):
    """Evaluate P at the point x.

    Exact (a Fraction) when every entry of x is an int or Fraction;
    otherwise computed in floating point (complex entries allowed).
    """
    x = list(x)
    if len(x) != P.dimension:
        raise ValueError('Point has length {} but P has dimension {}.'.format(
            len(x), P.dimension))
    if all(_is_exact(v) for v in x):
        total = Fraction(0)
        for e, c in P.terms.items():
            term = c
            for xi, k in zip(x, e):
                if k:
                    term *= Fraction(xi) ** k
            total += term
        return total
    total = 0.0
    for e, c in P.terms.items():
        term = float(c)
        for xi, k in zip(x, e):
            if k:
                term = term * xi ** k
        total = total + term
    return total


def evaluate_array(P, X):
    """Vectorised floating-point evaluation on an (N, m) array of points."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != P.dimension:
        raise ValueError('Points have {} columns but P has dimension {}.'
                         .format(X.shape[1], P.dimension))
    out = np.zeros(X.shape[0], dtype=np.result_type(X.dtype, float))
    if P.is_zero:
        return out
    max_exp = max(max(e) for e in P.terms)
    # Power tables per axis, shared across terms.
    powers = [[np.ones(X.shape[0], dtype=out.dtype)] for _ in range(P.dimension)]
    for i in range(P.dimension):
        for _ in range(max_exp):
            powers[i].append(powers[i][-1] * X[:, i])
    for e, c in P.terms.items():
        term = np.full(X.shape[0], float(c), dtype=out.dtype)
        for i, k in enumerate(e):
            if k:
                term = term * powers[i][k]
        out = out + term
    return out


# %% Derivatives.
def partial_derivative(P, alpha):
    """The derivative d^alpha P for a multi-index alpha."""
    alpha = Monomial(alpha)
    if len(alpha) != P.dimension:
        raise ValueError('Multi-index has length {} but P has dimension {}.'
                         .format(len(alpha), P.dimension))
    terms = {}
    for e, c in P.terms.items():
        if any(b < a for a, b in zip(alpha, e)):
            continue
        factor = 1
        for a, b in zip(alpha, e):
            factor *= math.perm(b, a)
        new = tuple(b - a for a, b in zip(alpha, e))
        terms[new] = terms.get(new, Fraction(0)) + c * factor
    return Polynomial(P.dimension, terms)


def directional_derivative(P, w):
    """(w . grad) P, exactly."""
    w = [to_fraction(c) for c in w]
    if len(w) != P.dimension:
        raise ValueError('Direction has length {} but P has dimension {}.'
                         .format(len(w), P.dimension))
    result = Polynomial.zero(P.dimension)
    for i, wi in enumerate(w):
        if wi == 0:
            continue
        alpha = [0] * P.dimension
        alpha[i] = 1
        result = result + partial_derivative(P, alpha) * wi
    return result


def gradient_bound(P, center, radius):
    """Upper bound for |grad P| on the closed ball B(center, radius).

    Each partial derivative is bounded termwise by its absolute
    coefficients times (|center_k| + radius) powers.
    """
    reach = [abs(float(c)) + float(radius) for c in center]
    if len(reach) != P.dimension:
        raise ValueError('Center has length {} but P has dimension {}.'
                         .format(len(reach), P.dimension))
    total = 0.0
    for i in range(P.dimension):
        bound = 0.0
        for e, c in P.terms.items():
            if not e[i]:
                continue
            term = abs(float(c)) * e[i]
            for k, ek in enumerate(e):
                term *= reach[k] ** (ek - (k == i))
            bound += term
        total += bound ** 2
    return math.sqrt(total)


# %% Composition.
def substitute(p, polys):
    """Replace variable k of p by the polynomial polys[k]."""
    if len(polys) != p.dimension:
        raise ValueError('Need {} substitutions, got {}.'.format(
            p.dimension, len(polys)))
    if not polys:
        raise ValueError('Nothing to substitute.')
    target = polys[0].dimension
    cache = [{0: Polynomial.constant(target, 1)} for _ in polys]

    def power(k, e):
        if e not in cache[k]:
            cache[k][e] = power(k, e - 1) * polys[k]
        return cache[k][e]

    result = Polynomial.zero(target)
    for e, c in p.terms.items():
        term = Polynomial.constant(target, c)
        for k, ek in enumerate(e):
            if ek:
                term = term * power(k, ek)
        result = result + term
    return result


def compose_linear(p, forms):
    """p(l_1(x), ..., l_k(x)) for linear forms given by coefficient vectors."""
    return substitute(p, [Polynomial.linear_form(f) for f in forms])


# %% Subspaces.
class Subspace:
    """Linear subspace of R^m spanned by rational vectors.

    Stores the exact orthogonal projection, a basis of the orthogonal
    complement and a canonical orthogonal frame used for coordinates.
    """

    def __init__(self, basis):
        rows = [[to_fraction(c) for c in v] for v in basis]
        if not rows:
            raise ValueError('A subspace needs at least one spanning vector.')
        m = len(rows[0])
        if m < 1 or any(len(v) != m for v in rows):
            raise ValueError('Basis vectors must share one positive length.')
        if rank(rows, m) != len(rows):
            raise ValueError('Subspace basis is rank-deficient.')
        self._ambient = m
        self._basis = tuple(tuple(v) for v in rows)
        projection = projection_matrix(rows)
        self._projection = tuple(tuple(r) for r in projection)
        self._complement = tuple(tuple(v) for v in nullspace(rows, m))
        # First independent columns of the projector, then orthogonalised.
        cols = transpose(projection, m)
        keep = independent_columns(projection, m)
        self._frame = tuple(tuple(v) for v in
                            gram_schmidt([cols[k] for k in keep]))

    @classmethod
    def from_linear_map(cls, ell):
        """Subspace V with g(ell x) = f(pi_V x): the row space of ell."""
        return cls(ell)

    @classmethod
    def from_json(cls, data):
        if 'basis' not in data:
            raise ValueError('Subspace JSON needs "basis".')
        return cls(data['basis'])

    def to_json(self):
        return {'basis': [[fraction_to_string(c) for c in v]
                          for v in self._basis]}

    @property
    def ambient(self):
        return self._ambient

    @property
    def dimension(self):
        return len(self._basis)

    @property
    def basis(self):
        return [list(v) for v in self._basis]

    @property
    def projection(self):
        return [list(r) for r in self._projection]

    @property
    def complement_basis(self):
        return [list(v) for v in self._complement]

    @property
    def frame(self):
        return [list(v) for v in self._frame]

    def contains(self, v):
        v = [to_fraction(c) for c in v]
        return matvec(self.projection, v) == v

    def project(self, x):
        return matvec(self.projection, [to_fraction(c) for c in x])

    def vanishing_forms(self):
        """Linear forms y_k whose common zero set is this subspace."""
        return [Polynomial.linear_form(v) for v in self._complement]

    def coordinate_forms(self, frame=None):
        """Rows of (F^T F)^{-1} F^T: frame coordinates of pi_V(x)."""
        frame = self.frame if frame is None else \
            [[to_fraction(c) for c in v] for v in frame]
        gram = [[dot(u, v) for v in frame] for u in frame]
        inv = inverse(gram)
        return [[sum((inv[a][b] * frame[b][i] for b in range(len(frame))),
                     Fraction(0))
                 for i in range(self._ambient)] for a in range(len(frame))]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self._projection == other._projection

    def __hash__(self):
        return hash(self._projection)

    def __repr__(self):
        return 'Subspace(basis={})'.format(
            [[fraction_to_string(c) for c in v] for v in self._basis])


class SubspaceFamily:
    """Ordered family of subspaces of R^m sharing one dimension kappa."""

    def __init__(self, subspaces, ambient=None):
        subspaces = tuple(subspaces)
        if ambient is None:
            if not subspaces:
                raise ValueError('An empty family needs its ambient dimension.')
            ambient = subspaces[0].ambient
        ambient = int(ambient)
        for V in subspaces:
            if V.ambient != ambient:
                raise ValueError('Subspace in R^{} inside a family in R^{}.'
                                 .format(V.ambient, ambient))
        if len({V.dimension for V in subspaces}) > 1:
            raise ValueError('Subspaces in a family must share one dimension.')
        self._ambient = ambient
        self._subspaces = subspaces

    @classmethod
    def axes(cls, m):
        """The coordinate axes of R^m."""
        return cls([Subspace([[int(i == j) for j in range(m)]])
                    for i in range(m)])

    @classmethod
    def from_json(cls, data, ambient=None):
        return cls([Subspace.from_json(s) for s in data], ambient=ambient)

    def to_json(self):
        return [V.to_json() for V in self._subspaces]

    @property
    def ambient(self):
        return self._ambient

    @property
    def dimension(self):
        """Common subspace dimension kappa (None for the empty family)."""
        return self._subspaces[0].dimension if self._subspaces else None

    @property
    def subspaces(self):
        return list(self._subspaces)

    def __len__(self):
        return len(self._subspaces)

    def __iter__(self):
        return iter(self._subspaces)

    def __getitem__(self, j):
        return self._subspaces[j]

    def __repr__(self):
        return 'SubspaceFamily(m={}, n={}, kappa={})'.format(
            self._ambient, len(self), self.dimension)


# %% Pullbacks.
def pullback(p, V, coordinate_frame=None):
    """The ambient polynomial x -> p(coordinates of pi_V(x)).

    Parameters
    ----------
    p : Polynomial in dim(V) variables.
    V : Subspace.
    coordinate_frame : basis of V (defaults to the canonical frame). Not
        required to be orthogonal; coordinates are (F^T F)^{-1} F^T x.
    """
    if p.dimension != V.dimension:
        raise ValueError('p has dimension {} but V has dimension {}.'.format(
            p.dimension, V.dimension))
    if coordinate_frame is not None:
        frame = [[to_fraction(c) for c in v] for v in coordinate_frame]
        if len(frame) != V.dimension:
            raise ValueError('Frame has {} vectors for a {}-dimensional V.'
                             .format(len(frame), V.dimension))
        for v in frame:
            if len(v) != V.ambient or not V.contains(v):
                raise ValueError('Frame vector {} is not inside V.'.format(
                    [fraction_to_string(c) for c in v]))
        if rank(frame, V.ambient) != len(frame):
            raise ValueError('Frame vectors are not linearly independent.')
    else:
        frame = None
    return compose_linear(p, V.coordinate_forms(frame))


def homogeneous_parts(P):
    """[(degree, part)] with nonzero homogeneous parts, degree increasing."""
    degrees = sorted({sum(e) for e in P.terms})
    return [(k, P.homogeneous_part(k)) for k in degrees]


# %% General position.
def general_position(F):
    """True iff every k-subcollection spans dimension min(k kappa, m)."""
    n = len(F)
    if n > MAX_GENERAL_POSITION_SUBSPACES:
        raise ValueError('General position check is exhaustive; {} subspaces '
                         'exceed the limit of {}.'.format(
                             n, MAX_GENERAL_POSITION_SUBSPACES))
    if n == 0:
        return True
    m, kappa = F.ambient, F.dimension
    bases = [V.basis for V in F]
    for k in range(1, n + 1):
        target = min(k * kappa, m)
        for combo in itertools.combinations(range(n), k):
            rows = [v for j in combo for v in bases[j]]
            if rank(rows, m) != target:
                return False
    return True

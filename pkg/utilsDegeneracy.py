'''
    ---------------------------------------------------------------------------
    oscidecay: utilsDegeneracy.py
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

    This script contains functions to decide whether a polynomial P is
    degenerate relative to a family of subspaces {V_j}, i.e. whether
    P = sum_j p_j(pi_j x) for polynomials p_j on V_j, to measure how far it
    is from being so, and to build the operators that certify
    nondegeneracy: constant-coefficient differential operators, products of
    directional derivatives and divided-difference schemes.

    Everything here is exact rational arithmetic.
'''

import itertools
import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from utilsLinearAlgebra import (to_fraction, fraction_to_string, rank, solve,
                                transpose, least_squares,
                                weighted_least_squares, matvec)
from utilsPolynomials import (Polynomial, Monomial, monomial_basis,
                              homogeneous_monomials, pullback,
                              partial_derivative, directional_derivative,
                              homogeneous_parts, compose_linear, evaluate,
                              evaluate_array, general_position,
                              MAX_GENERAL_POSITION_SUBSPACES)


# %% Degenerate basis.
@dataclass(frozen=True)
class DegenerateBasis:
    """Pullbacks of all monomials of degree <= d on every V_j.

    labels[k] = (j, alpha) names the generator pullback(x^alpha, V_j) in the
    canonical frame of V_j. Coefficient vectors are taken along `monomials`,
    the graded-lex basis of the ambient polynomials of degree <= d.
    """
    degree: int
    family: object
    generators: Tuple[Polynomial, ...]
    labels: Tuple[Tuple[int, Monomial], ...]
    monomials: Tuple[Monomial, ...]
    rank: int

    def columns(self):
        return [g.coefficient_vector(self.monomials) for g in self.generators]

    def matrix(self):
        """Rows indexed by monomials, columns by generators."""
        return transpose(self.columns(), len(self.monomials)) \
            if self.generators else [[] for _ in self.monomials]

    def split(self, coefficients):
        """Per-subspace polynomials sum_alpha c_(j, alpha) x^alpha."""
        family = self.family
        parts = [{} for _ in range(len(family))]
        for (j, alpha), c in zip(self.labels, coefficients):
            if c != 0:
                parts[j][alpha] = parts[j].get(alpha, Fraction(0)) + c
        return [Polynomial(V.dimension, terms)
                for V, terms in zip(family, parts)]


def _generators(F, monomials_for):
    generators, labels = [], []
    for j, V in enumerate(F):
        for alpha in monomials_for(V.dimension):
            generators.append(pullback(Polynomial.monomial(alpha), V))
            labels.append((j, alpha))
    return generators, labels


def degenerate_basis(F, d):
    if d < 0:
        raise ValueError('Degree must be nonnegative, got {}.'.format(d))
    monomials = monomial_basis(F.ambient, d)
    generators, labels = _generators(
        F, lambda kappa: monomial_basis(kappa, d))
    columns = [g.coefficient_vector(monomials) for g in generators]
    r = rank(columns, len(monomials)) if columns else 0
    return DegenerateBasis(degree=d, family=F, generators=tuple(generators),
                           labels=tuple(labels), monomials=tuple(monomials),
                           rank=r)


def homogeneous_degenerate_basis(F, D):
    """Pullbacks of the degree-D monomials only (all homogeneous of degree D)."""
    monomials = homogeneous_monomials(F.ambient, D)
    generators, labels = _generators(
        F, lambda kappa: homogeneous_monomials(kappa, D))
    columns = [g.coefficient_vector(monomials) for g in generators]
    r = rank(columns, len(monomials)) if columns else 0
    return DegenerateBasis(degree=D, family=F, generators=tuple(generators),
                           labels=tuple(labels), monomials=tuple(monomials),
                           rank=r)


def _check_dimension(P, F):
    if P.dimension != F.ambient:
        raise ValueError('P lives in R^{} but the family in R^{}.'.format(
            P.dimension, F.ambient))


# %% Degeneracy and relative norm.
def is_degenerate(P, F, basis=None):
    """Decide whether P = sum_j pullback(p_j, V_j).

    Parameters
    ----------
    P : Polynomial.
    F : SubspaceFamily.
    basis : optional precomputed DegenerateBasis of F with degree >= deg P.

    Returns
    -------
    degenerate : bool.
    minimizers : list of p_j (canonical frame coordinates) reconstructing P
        when degenerate, else None. For the empty family a constant P is
        degenerate and the list is empty.
    """
    _check_dimension(P, F)
    if len(F) == 0:
        return (P.degree <= 0, [] if P.degree <= 0 else None)
    d = max(P.degree, 0)
    if basis is None or basis.degree < d or basis.family is not F:
        basis = degenerate_basis(F, d)
    rhs = P.coefficient_vector(basis.monomials)
    x = solve(basis.matrix(), rhs, len(basis.generators))
    if x is None:
        return False, None
    return True, basis.split(x)


def _sqrt_text(square):
    num, den = square.numerator, square.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return fraction_to_string(Fraction(rn, rd))
    with localcontext() as ctx:
        ctx.prec = 20
        value = (Decimal(num) / Decimal(den)).sqrt()
    return '{:f}'.format(value)


@dataclass(frozen=True)
class RelativeNorm:
    """Distance from P to the degenerate polynomials of degree <= d."""
    squared: Fraction
    minimizers: Optional[List[Polynomial]]
    residual: Polynomial

    @property
    def value(self):
        return math.sqrt(self.squared)

    @property
    def text(self):
        return _sqrt_text(self.squared)


def relative_norm(P, F, d=None, basis=None):
    """Euclidean norm (graded-lex coefficients) of P modulo the span of all
    pullbacks of degree <= d. The minimum is attained; the minimizers and
    the residual P - sum_j pullback(p_j) are returned with it."""
    _check_dimension(P, F)
    if d is None:
        d = max(P.degree, 0)
    if d < P.degree:
        raise ValueError('Degree {} is below deg P = {}.'.format(d, P.degree))
    m = F.ambient
    if len(F) == 0:
        # Constants are the degenerate polynomials when n = 0.
        residual = P - P.coefficient((0,) * m)
        return RelativeNorm(
            squared=sum((c * c for c in residual.terms.values()), Fraction(0)),
            minimizers=[], residual=residual)
    if basis is None or basis.degree != d or basis.family is not F:
        basis = degenerate_basis(F, d)
    target = P.coefficient_vector(basis.monomials)
    coefficients, residual = least_squares(basis.columns(), target)
    residual_poly = Polynomial.from_coefficients(m, basis.monomials, residual)
    return RelativeNorm(squared=sum((c * c for c in residual), Fraction(0)),
                        minimizers=basis.split(coefficients),
                        residual=residual_poly)


@dataclass(frozen=True)
class UniformNondegeneracy:
    minimum: RelativeNorm
    index: int
    positive: bool


def uniform_nondegeneracy(polys, F, d=None):
    """Smallest relative norm over a finite family of polynomials."""
    polys = list(polys)
    if not polys:
        raise ValueError('Need at least one polynomial.')
    if d is None:
        d = max(max(P.degree for P in polys), 0)
    basis = degenerate_basis(F, d) if len(F) else None
    best, index = None, -1
    for k, P in enumerate(polys):
        result = relative_norm(P, F, d=d, basis=basis)
        if best is None or result.squared < best.squared:
            best, index = result, k
    return UniformNondegeneracy(minimum=best, index=index,
                                positive=best.squared > 0)


# %% Differential operators.
class DifferentialOperator:
    """Constant-coefficient operator sum_alpha s_alpha d^alpha, identified
    with its symbol sum_alpha s_alpha x^alpha."""

    def __init__(self, symbol):
        if not isinstance(symbol, Polynomial):
            raise ValueError('The symbol must be a Polynomial.')
        self._symbol = symbol

    @property
    def symbol(self):
        return self._symbol

    @property
    def degree(self):
        return self._symbol.degree

    @property
    def is_homogeneous(self):
        return self._symbol.is_homogeneous

    def apply(self, P):
        if P.dimension != self._symbol.dimension:
            raise ValueError('Operator in {} variables applied to a polynomial'
                             ' in {}.'.format(self._symbol.dimension,
                                              P.dimension))
        result = Polynomial.zero(P.dimension)
        for alpha, s in self._symbol.terms.items():
            result = result + partial_derivative(P, alpha) * s
        return result

    __call__ = apply

    def annihilates_pullbacks(self, V):
        """True iff the operator kills f(pi_V x) for every function f, i.e.
        iff the symbol vanishes identically on V."""
        frame = V.basis
        forms = [[frame[k][i] for k in range(V.dimension)]
                 for i in range(V.ambient)]
        return compose_linear(self._symbol, forms).is_zero

    def scaled(self, factor):
        return DifferentialOperator(self._symbol * factor)

    def __eq__(self, other):
        if not isinstance(other, DifferentialOperator):
            return NotImplemented
        return self._symbol == other._symbol

    def __hash__(self):
        return hash(self._symbol)

    def __str__(self):
        return str(self._symbol).replace('x', 'd')

    def __repr__(self):
        return 'DifferentialOperator("{}")'.format(self)


def apolar_pairing(L, Q):
    """<L, Q> = L(Q) for homogeneous L, Q of one degree (a rational)."""
    return sum((c * alpha.factorial() * Q.coefficient(alpha)
                for alpha, c in L.symbol.terms.items()), Fraction(0))


def dual_annihilating_operator(P, F):
    """Homogeneous operator L of degree deg P killing every degree-D
    pullback while L(P) != 0, or None when P is degenerate.

    The symbol is the component of P orthogonal to the homogeneous
    degenerate subspace in the apolar inner product sum_alpha alpha! a_b b_a.
    """
    _check_dimension(P, F)
    if not P.is_homogeneous:
        raise ValueError('P must be homogeneous.')
    if P.is_zero:
        return None
    D = P.degree
    if len(F) == 0 and D == 0:
        return None
    basis = homogeneous_degenerate_basis(F, D)
    target = P.coefficient_vector(basis.monomials)
    weights = [alpha.factorial() for alpha in basis.monomials]
    _, residual = weighted_least_squares(basis.columns(), target, weights)
    if all(c == 0 for c in residual):
        return None
    return DifferentialOperator(Polynomial.from_coefficients(
        F.ambient, basis.monomials, residual))


# %% Simple nondegeneracy.
def directional_product(P, directions):
    """prod_j (w_j . grad) P."""
    for w in directions:
        P = directional_derivative(P, w)
    return P


def _witness_expansion(P, complements):
    """Nonzero terms of prod_j (sum_k t_(j,k) u_(j,k) . grad) P.

    Each term is keyed by the choice k(j) of one complement basis vector
    per subspace; its coefficient is prod_j t_(j,k(j)).
    """
    level = {(): P}
    for U in complements:
        nxt = {}
        for key, Q in level.items():
            for k, u in enumerate(U):
                R = directional_derivative(Q, u)
                if not R.is_zero:
                    nxt[key + (k,)] = R
        level = nxt
        if not level:
            break
    return level


def simple_witness(P, F):
    """Directions w_j in V_j^perp with prod_j (w_j . grad) P != 0, or None.

    The product is expanded with each w_j written in a basis of V_j^perp
    with indeterminate coefficients t; a witness exists iff the expansion is
    not identically zero. A concrete witness is the first point t of the
    grid {1, ..., n + 1}^N where the expansion is nonzero.
    """
    _check_dimension(P, F)
    n = len(F)
    if n == 0:
        return [] if P.degree >= 1 else None
    complements = [V.complement_basis for V in F]
    if any(not U for U in complements):
        return None
    terms = _witness_expansion(P, complements)
    if not terms:
        return None
    sizes = [len(U) for U in complements]
    offsets = list(itertools.accumulate([0] + sizes[:-1]))
    for t in itertools.product(range(1, n + 2), repeat=sum(sizes)):
        total = Polynomial.zero(P.dimension)
        for key, Q in terms.items():
            weight = math.prod(t[offsets[j] + k] for j, k in enumerate(key))
            total = total + Q * weight
        if not total.is_zero:
            witness = []
            for j, U in enumerate(complements):
                w = [sum((t[offsets[j] + k] * U[k][i] for k in range(len(U))),
                         Fraction(0)) for i in range(F.ambient)]
                witness.append(w)
            return witness
    # A nonzero multilinear expansion cannot vanish on the whole grid.
    raise RuntimeError('Witness extraction failed on a nonzero expansion.')


def witness_strength(P, witness, samples=4096, seed=0):
    """max over sampled |x| <= 1 of |prod_j (w_j . grad) P(x)| with unit w_j.

    A sampled lower estimate of the quantity bounded below in the
    quantitative form of simple nondegeneracy.
    """
    L = directional_product(P, witness)
    scale = math.prod(math.sqrt(sum(float(c) ** 2 for c in w))
                      for w in witness)
    rng = np.random.default_rng(seed)
    m = P.dimension
    directions = rng.standard_normal((samples, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.random(samples) ** (1.0 / m)
    X = np.vstack([np.zeros((1, m)), directions * radii[:, None]])
    return float(np.max(np.abs(evaluate_array(L, X)))) / scale


# %% Difference schemes.
@dataclass(frozen=True)
class DifferenceScheme:
    """Finite combination of shifted evaluations annihilating pullbacks.

    The scheme is a sum over blocks (b, A) of b times the product, over the
    generators y_a with a in A, of divided differences
    (g(x + r_a y_a) - g(x)) / r_a. Expanded, it is a sum over sign
    patterns sigma in {0, 1}^|generators| (each supported in one block) of
    c_sigma g(x + sum_a sigma_a r_a y_a) / prod_(a in A) r_a.

    kind is 'directional' (one block along a simple witness followed by
    coordinate directions) or 'dual' (one block per multi-index beta with
    weight b_beta from the apolar dual operator).

    A block of D divided differences maps a polynomial of degree <= D to
    its D-th mixed derivative for any scales, so every scheme may be
    applied to polynomials at unequal scale components. multi_parameter
    records whether unequal scales are also exact for arbitrary functions.
    """
    degree: int
    dimension: int
    generators: Tuple[Tuple[Fraction, ...], ...]
    blocks: Tuple[Tuple[Fraction, Tuple[int, ...]], ...]
    kind: str
    normalization: Fraction
    annihilates_functions: bool = False
    multi_parameter: bool = False
    operator: Optional[DifferentialOperator] = field(default=None,
                                                     compare=False)

    @property
    def coefficients(self):
        """Unit-scale coefficient of each sign pattern."""
        size = len(self.generators)
        out = {}
        for weight, members in self.blocks:
            for k in range(len(members) + 1):
                for subset in itertools.combinations(members, k):
                    sigma = tuple(int(a in subset) for a in range(size))
                    c = weight * (-1) ** (len(members) - k)
                    out[sigma] = out.get(sigma, Fraction(0)) + c
        return {s: c for s, c in out.items() if c != 0}

    def constant(self):
        """C_S = (sum_sigma |c_sigma|)^(1/D)."""
        mass = sum(abs(c) for c in self.coefficients.values())
        return float(mass) ** (1.0 / self.degree)

    def scales(self, r, any_scale=False):
        """Per-generator scale vector from a scalar or a sequence.

        Unequal components need a multi-parameter scheme unless any_scale
        is set (polynomial input).
        """
        size = len(self.generators)
        if np.ndim(r) == 0:
            r = [r] * size
        r = list(r)
        if len(r) != size:
            raise ValueError('Need {} scales, got {}.'.format(size, len(r)))
        if any(not v > 0 for v in r):
            raise ValueError('Scales must be positive.')
        if not (self.multi_parameter or any_scale) and len(set(r)) > 1:
            raise ValueError('A {} scheme is exact for non-polynomial input '
                             'at a single scale only; got unequal scale '
                             'components.'.format(self.kind))
        return r

    def terms(self, r, any_scale=False):
        """[(coefficient, shift)] with divided-difference scaling."""
        r = self.scales(r, any_scale)
        exact = all(isinstance(v, (int, Fraction)) for v in r)
        if exact:
            r = [Fraction(v) for v in r]
            zero = Fraction(0)
        else:
            r = [float(v) for v in r]
            zero = 0.0
        out = []
        for weight, members in self.blocks:
            divisor = math.prod(r[a] for a in members)
            w = weight if exact else float(weight)
            for k in range(len(members) + 1):
                for subset in itertools.combinations(members, k):
                    shift = [zero] * self.dimension
                    for a in subset:
                        y = self.generators[a]
                        shift = [s + r[a] * (c if exact else float(c))
                                 for s, c in zip(shift, y)]
                    sign = (-1) ** (len(members) - k)
                    out.append((sign * w / divisor, shift))
        return out

    def pattern_table(self):
        """Expanded terms as arrays: sign patterns (K, A), signed block
        weights (K,), and block membership masks (K, A) for the divisors."""
        size = len(self.generators)
        sigmas, weights, masks = [], [], []
        for weight, members in self.blocks:
            mask = [a in members for a in range(size)]
            for k in range(len(members) + 1):
                for subset in itertools.combinations(members, k):
                    sigmas.append([int(a in subset) for a in range(size)])
                    weights.append(float(weight) *
                                   (-1) ** (len(members) - k))
                    masks.append(mask)
        return (np.array(sigmas, dtype=float), np.array(weights),
                np.array(masks, dtype=bool))

    def shift_sum(self, P, x, r):
        """sum_beta c_beta P(x + r y_beta) at one scale r, without the
        divided-difference scaling; equals r^D on the normalised P."""
        value = apply_scheme(self, P, x, r)
        return value * r ** self.degree

    def to_json(self):
        return {'kind': self.kind, 'degree': self.degree,
                'generators': [[fraction_to_string(c) for c in y]
                               for y in self.generators],
                'blocks': [{'weight': fraction_to_string(b),
                            'members': list(members)}
                           for b, members in self.blocks],
                'normalization': fraction_to_string(self.normalization),
                'annihilates_functions': self.annihilates_functions,
                'multi_parameter': self.multi_parameter,
                'constant': self.constant()}


def scheme_constant(S):
    return S.constant()


def scheme_annihilates_functions(S, F):
    """Exact check that S kills f(pi_j x) for every function f and every j
    at a single scale: on each V_j, coefficients of shifts with the same
    projection must cancel."""
    coefficients = S.coefficients
    shifts = {}
    for sigma, c in coefficients.items():
        shift = [Fraction(0)] * S.dimension
        for a, s in enumerate(sigma):
            if s:
                shift = [u + v for u, v in zip(shift, S.generators[a])]
        key = tuple(shift)
        shifts[key] = shifts.get(key, Fraction(0)) + c
    for V in F:
        groups = {}
        for shift, c in shifts.items():
            key = tuple(matvec(V.projection, list(shift)))
            groups[key] = groups.get(key, Fraction(0)) + c
        if any(v != 0 for v in groups.values()):
            return False
    return True


def _directional_scheme(P, F, witness):
    D = P.degree
    m = P.dimension
    Q = directional_product(P, witness)
    gamma, q = Q.sorted_terms()[0]
    generators = [tuple(w) for w in witness]
    for i, g in enumerate(gamma):
        e = tuple(Fraction(int(i == k)) for k in range(m))
        generators.extend([e] * g)
    K = q * gamma.factorial()
    scheme = DifferenceScheme(degree=D, dimension=m,
                              generators=tuple(generators),
                              blocks=((1 / K, tuple(range(D))),),
                              kind='directional', normalization=1 / K,
                              multi_parameter=True)
    return scheme


def _dual_scheme(P, F, operator):
    D = P.degree
    m = P.dimension
    value = operator.apply(P).coefficient((0,) * m)
    generators, blocks = [], []
    for beta, s in operator.symbol.sorted_terms():
        members = []
        for i, b in enumerate(beta):
            e = tuple(Fraction(int(i == k)) for k in range(m))
            for _ in range(b):
                members.append(len(generators))
                generators.append(e)
        blocks.append((s / value, tuple(members)))
    return DifferenceScheme(degree=D, dimension=m,
                            generators=tuple(generators), blocks=tuple(blocks),
                            kind='dual', normalization=1 / value,
                            operator=operator)


def difference_scheme(P_D, F, kind='auto'):
    """Divided-difference scheme L with L(P_D + lower order) = 1 and
    L(f o pi_j) = 0, or None when P_D is degenerate.

    kind : 'auto' prefers the directional scheme (exact for every function
    and every multi-parameter scale) and falls back to the dual scheme
    sum_beta b_beta Delta_beta, exact on pullbacks of degree <= D.
    """
    _check_dimension(P_D, F)
    if kind not in ('auto', 'directional', 'dual'):
        raise ValueError('Unknown scheme kind "{}".'.format(kind))
    if not P_D.is_homogeneous:
        raise ValueError('P_D must be homogeneous.')
    if P_D.degree < 1:
        return None
    scheme = None
    if kind in ('auto', 'directional'):
        witness = simple_witness(P_D, F)
        if witness is not None:
            scheme = _directional_scheme(P_D, F, witness)
        elif kind == 'directional':
            return None
    if scheme is None:
        operator = dual_annihilating_operator(P_D, F)
        if operator is None:
            return None
        scheme = _dual_scheme(P_D, F, operator)
    exact = scheme_annihilates_functions(scheme, F)
    logging.info('Difference scheme: kind={}, generators={}, exact for '
                 'functions={}.'.format(scheme.kind, len(scheme.generators),
                                        exact))
    return DifferenceScheme(degree=scheme.degree, dimension=scheme.dimension,
                            generators=scheme.generators, blocks=scheme.blocks,
                            kind=scheme.kind,
                            normalization=scheme.normalization,
                            annihilates_functions=exact,
                            multi_parameter=scheme.multi_parameter and exact,
                            operator=scheme.operator)


def apply_scheme(S, g, x, r):
    """sum_(y in Y_r) c_(y, r) g(x + y).

    g is a Polynomial (exact when x and r are rational) or a callable taking
    an (N, m) array of points and returning N values. Polynomials are
    accepted at unequal scale components by every scheme.
    """
    terms = S.terms(r, any_scale=isinstance(g, Polynomial))
    x = list(x)
    if len(x) != S.dimension:
        raise ValueError('Point has length {} for a scheme in R^{}.'.format(
            len(x), S.dimension))
    exact = isinstance(g, Polynomial) and \
        all(isinstance(v, (int, Fraction)) for v in x) and \
        isinstance(terms[0][0], Fraction)
    if exact:
        return sum((c * evaluate(g, [Fraction(a) + b for a, b in zip(x, s)])
                    for c, s in terms), Fraction(0))
    coefficients = np.array([float(c) for c, _ in terms])
    points = np.asarray([float(v) for v in x])[None, :] + \
        np.array([[float(v) for v in s] for _, s in terms])
    values = evaluate_array(g, points) if isinstance(g, Polynomial) \
        else np.asarray(g(points))
    return np.sum(coefficients * values)


def scheme_points(S, X, R, any_scale=False):
    """Evaluation points and divided coefficients for a batch of trials.

    X is (b, m); R is (b, A) per-generator scales or (b,) single scales.
    any_scale allows unequal scales on single-scale schemes, for
    polynomial input. Returns points (b, K, m) and coefficients (b, K).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    R = np.asarray(R, dtype=float)
    size = len(S.generators)
    if R.ndim == 1:
        R = np.repeat(R[:, None], size, axis=1)
    if R.shape != (X.shape[0], size):
        raise ValueError('Scales must have shape ({}, {}).'.format(
            X.shape[0], size))
    if np.any(R <= 0):
        raise ValueError('Scales must be positive.')
    if not (S.multi_parameter or any_scale) and np.any(R != R[:, :1]):
        raise ValueError('A {} scheme is exact at a single scale only.'
                         .format(S.kind))
    sigmas, weights, masks = S.pattern_table()
    Y = np.array([[float(c) for c in y] for y in S.generators])
    shifts = np.einsum('ka,ba,am->bkm', sigmas, R, Y)
    points = X[:, None, :] + shifts
    divisors = np.prod(np.where(masks[None, :, :], R[:, None, :], 1.0),
                       axis=2)
    return points, weights[None, :] / divisors


def apply_scheme_batch(S, g, X, R):
    """apply_scheme over a batch of (x, r) trials, in floating point."""
    points, coefficients = scheme_points(S, X, R,
                                         any_scale=isinstance(g, Polynomial))
    b, K, m = points.shape
    flat = points.reshape(b * K, m)
    values = evaluate_array(g, flat) if isinstance(g, Polynomial) \
        else np.asarray(g(flat))
    return np.sum(coefficients * values.reshape(b, K), axis=1)


# %% Reduction and ideal generators.
def homogeneous_nondegeneracy_reduction(P, F):
    """Highest-degree homogeneous summand of P that is nondegenerate."""
    _check_dimension(P, F)
    for k, part in reversed(homogeneous_parts(P)):
        if not is_degenerate(part, F)[0]:
            return k, part
    return None


def _as_form(y, m):
    if isinstance(y, Polynomial):
        if y.dimension != m or (not y.is_zero and
                                (y.degree != 1 or not y.is_homogeneous)):
            raise ValueError('{} is not a linear form on R^{}.'.format(y, m))
        return y
    y = [to_fraction(c) for c in y]
    if len(y) != m:
        raise ValueError('Linear form has length {} in R^{}.'.format(len(y), m))
    return Polynomial.linear_form(y)


def verify_monomial_generators(F, linear_forms=None):
    """Check that every product prod_j y_(j, k(j)) vanishes on the union
    of the V_j.

    linear_forms[j] lists forms (vectors or linear Polynomials) vanishing on
    V_j; by default the complement basis of each V_j.
    """
    m = F.ambient
    if linear_forms is None:
        linear_forms = [V.complement_basis for V in F]
    if len(linear_forms) != len(F):
        raise ValueError('Need one list of forms per subspace.')
    forms = [[_as_form(y, m) for y in ys] for ys in linear_forms]
    parametrisations = []
    for j, V in enumerate(F):
        for y in forms[j]:
            for b in V.basis:
                if evaluate(y, b) != 0:
                    raise ValueError('Form {} does not vanish on subspace {}.'
                                     .format(y, j + 1))
        parametrisations.append([[V.basis[k][i] for k in range(V.dimension)]
                                 for i in range(m)])
    count = 0
    for choice in itertools.product(*forms):
        product = Polynomial.constant(m, 1)
        for y in choice:
            product = product * y
        for params in parametrisations:
            if not compose_linear(product, params).is_zero:
                return False
        count += 1
    logging.info('Verified {} monomial generators.'.format(count))
    return True


# %% Report.
def decay_regimes(P, F):
    """Names of the known sufficient conditions for power decay that hold
    for (P, F)."""
    _check_dimension(P, F)
    n, m, kappa = len(F), F.ambient, F.dimension
    if n == 0:
        return ['no_functions'] if P.degree >= 1 else []
    if is_degenerate(P, F)[0]:
        return []
    regimes = []
    gp = general_position(F) if n <= MAX_GENERAL_POSITION_SUBSPACES else False
    if kappa == 1 and n < 2 * m and gp:
        regimes.append('one_dimensional_general_position')
    if kappa == m - 1:
        regimes.append('codimension_one')
    if simple_witness(P, F) is not None:
        regimes.append('simply_nondegenerate')
    if gp and kappa < m and n * kappa < 2 * m:
        regimes.append('general_position_low_multiplicity')
    if gp and kappa < m and n * (m - kappa) <= m:
        regimes.append('general_position_low_codimension')
    return regimes


@dataclass
class NondegeneracyReport:
    degenerate: bool
    relative_norm: RelativeNorm
    minimizers: Optional[List[Polynomial]] = None
    dual_operator: Optional[DifferentialOperator] = None
    simple_witness: Optional[List[List[Fraction]]] = None
    top_summand_degree: Optional[int] = None
    general_position: Optional[bool] = None
    decay_regimes: List[str] = field(default_factory=list)

    def to_json(self):
        return {
            'degenerate': self.degenerate,
            'relative_norm': self.relative_norm.text,
            'minimizers': None if self.minimizers is None else
            [p.to_json() for p in self.minimizers],
            'dual_operator_symbol': None if self.dual_operator is None else
            self.dual_operator.symbol.to_json(),
            'simple_witness': None if self.simple_witness is None else
            [[fraction_to_string(c) for c in w] for w in self.simple_witness],
            'top_summand_degree': self.top_summand_degree,
            'general_position': self.general_position,
            'decay_regimes': list(self.decay_regimes),
        }


def analyze(P, F):
    """Full nondegeneracy report for P relative to F."""
    _check_dimension(P, F)
    degenerate, decomposition = is_degenerate(P, F)
    norm = relative_norm(P, F)
    report = NondegeneracyReport(degenerate=degenerate, relative_norm=norm,
                                 minimizers=decomposition if degenerate
                                 else norm.minimizers)
    if len(F) <= MAX_GENERAL_POSITION_SUBSPACES:
        report.general_position = general_position(F)
    if degenerate:
        logging.info('P is degenerate relative to the family.')
        return report
    top = homogeneous_nondegeneracy_reduction(P, F)
    if top is not None:
        report.top_summand_degree = top[0]
        report.dual_operator = dual_annihilating_operator(top[1], F)
    report.simple_witness = simple_witness(P, F)
    report.decay_regimes = decay_regimes(P, F)
    logging.info('P is nondegenerate; relative norm {}.'.format(norm.text))
    return report

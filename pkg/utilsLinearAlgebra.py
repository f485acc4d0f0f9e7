'''
    ---------------------------------------------------------------------------
    oscidecay: utilsLinearAlgebra.py
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

    This script contains exact linear algebra over the rationals. Matrices are
    plain lists of rows of Fractions; the heavy lifting (row reduction, rank,
    determinants) is delegated to sympy's DomainMatrix over QQ.
'''

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def to_fraction(value):
    """Parse an exact rational from an int, Fraction, or 'p/q' string."""
    if isinstance(value, bool):
        raise ValueError('Booleans are not rational coefficients.')
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError('Cannot parse "{}" as a rational.'.format(value))
    if isinstance(value, float):
        # Decimal literal semantics, not the binary expansion.
        return Fraction(repr(value))
    if hasattr(value, 'p') and hasattr(value, 'q'):
        return Fraction(int(value.p), int(value.q))
    # QQ elements (PythonMPQ or gmpy2.mpq).
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return Fraction(int(value.numerator), int(value.denominator))
    raise ValueError('Unsupported rational value: {!r}.'.format(value))


def fraction_to_string(value):
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return '{}/{}'.format(value.numerator, value.denominator)


def _to_domain(rows, ncols):
    elements = [[QQ(v.numerator, v.denominator) for v in row] for row in rows]
    return DomainMatrix(elements, (len(rows), ncols), QQ)


def _from_domain(matrix):
    sym = matrix.to_Matrix()
    return [[Fraction(int(sym[i, j].p), int(sym[i, j].q))
             for j in range(sym.cols)] for i in range(sym.rows)]


def as_matrix(rows, ncols=None):
    """Copy rows into a list-of-lists of Fractions, checking the shape."""
    out = [[to_fraction(v) for v in row] for row in rows]
    if ncols is None:
        if not out:
            raise ValueError('Number of columns required for an empty matrix.')
        ncols = len(out[0])
    for row in out:
        if len(row) != ncols:
            raise ValueError('Ragged matrix: expected {} columns but got {}.'
                             .format(ncols, len(row)))
    return out, ncols


def transpose(rows, ncols):
    return [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    if len(a[0]) != inner:
        raise ValueError('Shape mismatch in matrix product.')
    ncols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(inner)), Fraction(0))
             for j in range(ncols)] for i in range(len(a))]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def dot(u, v):
    if len(u) != len(v):
        raise ValueError('Vector lengths differ: {} vs {}.'.format(
            len(u), len(v)))
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns
    -------
    reduced : list of rows (Fractions), same shape as the input.
    pivots : tuple of pivot column indices.
    """
    rows, ncols = as_matrix(rows, ncols)
    if not rows or ncols == 0:
        return rows, ()
    reduced, pivots = _to_domain(rows, ncols).rref()
    return _from_domain(reduced), tuple(pivots)


def rank(rows, ncols=None):
    rows, ncols = as_matrix(rows, ncols)
    if not rows or ncols == 0:
        return 0
    return int(_to_domain(rows, ncols).rank())


def determinant(rows):
    rows, ncols = as_matrix(rows)
    if len(rows) != ncols:
        raise ValueError('Determinant of a non-square matrix.')
    det = _to_domain(rows, ncols).det()
    return Fraction(int(QQ.numer(det)), int(QQ.denom(det)))


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}, one vector per free column of the rref."""
    rows, ncols = as_matrix(rows, ncols)
    if not rows:
        return identity(ncols)
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs, ncols=None):
    """One exact solution of A x = b, or None if the system is inconsistent.

    Free variables are set to zero.
    """
    rows, ncols = as_matrix(rows, ncols)
    rhs = [to_fraction(v) for v in rhs]
    if len(rhs) != len(rows):
        raise ValueError('Right-hand side has length {} for {} rows.'.format(
            len(rhs), len(rows)))
    if ncols == 0 or not rows:
        return [Fraction(0)] * ncols if all(v == 0 for v in rhs) else None
    augmented = [row + [b] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][ncols]
    return x


def inverse(rows):
    rows, ncols = as_matrix(rows)
    n = len(rows)
    if n != ncols:
        raise ValueError('Inverse of a non-square matrix.')
    augmented = [row + e for row, e in zip(rows, identity(n))]
    reduced, pivots = rref(augmented, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)) or len(pivots) > n:
        raise ValueError('Matrix is singular.')
    return [row[n:] for row in reduced]


def independent_columns(rows, ncols):
    """Indices of the first maximal set of linearly independent columns."""
    _, pivots = rref(rows, ncols)
    return list(pivots)


def projection_matrix(basis):
    """Orthogonal projector B (B^T B)^{-1} B^T onto the span of the rows of
    `basis` (each row a spanning vector)."""
    basis, m = as_matrix(basis)
    if not basis:
        return [[Fraction(0)] * m for _ in range(m)]
    B = transpose(basis, m)
    gram = matmul(basis, B)
    return matmul(matmul(B, inverse(gram)), basis)


def least_squares(columns, target):
    """Exact orthogonal projection of `target` onto the span of `columns`.

    Parameters
    ----------
    columns : list of vectors (each of the length of `target`).
    target : vector.

    Returns
    -------
    coefficients : one Fraction per column; dependent columns get 0.
    residual : target minus its projection.
    """
    target = [to_fraction(v) for v in target]
    n = len(target)
    if not columns:
        return [], list(target)
    A = transpose([[to_fraction(v) for v in c] for c in columns], n)
    keep = independent_columns(A, len(columns))
    sub = [columns[k] for k in keep]
    gram = [[dot(u, v) for v in sub] for u in sub]
    rhs = [dot(u, target) for u in sub]
    local = solve(gram, rhs, len(sub))
    coefficients = [Fraction(0)] * len(columns)
    for k, c in zip(keep, local):
        coefficients[k] = c
    fitted = [sum((c * u[i] for c, u in zip(local, sub)), Fraction(0))
              for i in range(n)]
    residual = [t - f for t, f in zip(target, fitted)]
    return coefficients, residual


def weighted_least_squares(columns, target, weights):
    """Projection of `target` onto span(columns) in the inner product
    <u, v> = sum_i w_i u_i v_i, with positive rational weights."""
    target = [to_fraction(v) for v in target]
    weights = [to_fraction(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError('Weights must be positive.')
    n = len(target)
    if not columns:
        return [], list(target)
    A = transpose([[to_fraction(v) for v in c] for c in columns], n)
    keep = independent_columns(A, len(columns))
    sub = [columns[k] for k in keep]

    def wdot(u, v):
        return sum((w * a * b for w, a, b in zip(weights, u, v)), Fraction(0))

    gram = [[wdot(u, v) for v in sub] for u in sub]
    rhs = [wdot(u, target) for u in sub]
    local = solve(gram, rhs, len(sub))
    coefficients = [Fraction(0)] * len(columns)
    for k, c in zip(keep, local):
        coefficients[k] = c
    fitted = [sum((c * u[i] for c, u in zip(local, sub)), Fraction(0))
              for i in range(n)]
    return coefficients, [t - f for t, f in zip(target, fitted)]


def gram_schmidt(vectors):
    """Orthogonal (not normalized) rational basis of span(vectors), skipping
    dependent inputs."""
    out = []
    for v in vectors:
        w = [to_fraction(c) for c in v]
        for u in out:
            c = dot(w, u) / dot(u, u)
            w = [a - c * b for a, b in zip(w, u)]
        if any(c != 0 for c in w):
            out.append(w)
    return out

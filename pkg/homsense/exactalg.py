"""
Exact linear algebra over Q and Q[y].

Everything here is a pure function over immutable values:
- rref / rank / kernel_basis / solve_exact: Gauss-Jordan elimination on Fractions
- charpoly: Faddeev-LeVerrier recurrence (exact over Q)
- smith_normal_form: elementary row/column operations over Q[y] with the
  transforms U, V tracked so that U * P * V is diagonal
- squarefree_and_rational_roots: p / gcd(p, p') plus the rational root test on
  the primitive integer form
- nullity_mod_p: rank deficiency over GF(p), a one-sided certificate for a
  trivial rational kernel
"""
from fractions import Fraction
from math import gcd, lcm
from typing import List, Sequence, Tuple

from bittensor.utils.btlogging import logging
from sympy import divisors

from homsense.constants import MODULAR_PRIME
from homsense.domain.matrix import RationalMatrix, Vector
from homsense.domain.poly import PolyMatrix, PolyQ, poly_gcd
from homsense.errors import (
    HomsenseError,
    NonSquareMatrixError,
    ShapeMismatchError,
    ZeroPolynomialError,
)


# Rational matrices

def rref(matrix: RationalMatrix) -> Tuple[RationalMatrix, List[int], int]:
    """
    Reduced row echelon form.

    Args:
        matrix: Any rational matrix

    Returns:
        (R, pivot columns, rank)
    """
    work = matrix.to_rows()
    pivots: List[int] = []
    row = 0
    for col in range(matrix.cols):
        if row == matrix.rows:
            break
        pivot_row = next((r for r in range(row, matrix.rows) if work[r][col] != 0), None)
        if pivot_row is None:
            continue
        work[row], work[pivot_row] = work[pivot_row], work[row]
        pivot = work[row][col]
        if pivot != 1:
            work[row] = [x / pivot for x in work[row]]
        for r in range(matrix.rows):
            if r != row and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [a - factor * b for a, b in zip(work[r], work[row])]
        pivots.append(col)
        row += 1
    reduced = RationalMatrix(matrix.rows, matrix.cols, tuple(x for r in work for x in r))
    return reduced, pivots, len(pivots)


def rank(matrix: RationalMatrix) -> int:
    return rref(matrix)[2]


def kernel_basis(matrix: RationalMatrix) -> RationalMatrix:
    """
    Basis of the right null space as the columns of a cols x k matrix.

    A trivial kernel yields a cols x 0 matrix.
    """
    reduced, pivots, _ = rref(matrix)
    pivot_set = set(pivots)
    basis: List[Vector] = []
    for free in range(matrix.cols):
        if free in pivot_set:
            continue
        vector = [Fraction(0)] * matrix.cols
        vector[free] = Fraction(1)
        for pivot_row, pivot_col in enumerate(pivots):
            vector[pivot_col] = -reduced[pivot_row, free]
        basis.append(tuple(vector))
    return RationalMatrix.from_columns(basis, rows=matrix.cols)


def column_space_basis(matrix: RationalMatrix) -> RationalMatrix:
    """Pivot columns of the matrix itself (a basis of its column space)."""
    _, pivots, _ = rref(matrix)
    return matrix.select_columns(pivots)


def solve_exact(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """
    Solve A X = B exactly.

    Args:
        a: m x k matrix of full column rank
        b: m x q matrix whose columns lie in the column space of A

    Returns:
        The unique k x q solution X

    Raises:
        ShapeMismatchError: when the row counts differ
        HomsenseError: when A is column-rank deficient or the system is inconsistent
    """
    if a.rows != b.rows:
        raise ShapeMismatchError(f"cannot solve {a.shape} system with right-hand side {b.shape}")
    reduced, pivots, _ = rref(a.hstack(b))
    if any(p >= a.cols for p in pivots):
        raise HomsenseError("inconsistent system: right-hand side leaves the column space")
    if len(pivots) < a.cols:
        raise HomsenseError(f"coefficient matrix has rank {len(pivots)} < {a.cols} columns")
    return RationalMatrix(
        a.cols,
        b.cols,
        tuple(reduced[i, a.cols + j] for i in range(a.cols) for j in range(b.cols)),
    )


def inverse(matrix: RationalMatrix) -> RationalMatrix:
    matrix.require_square("inverse input")
    return solve_exact(matrix, RationalMatrix.identity(matrix.rows))


def determinant(matrix: RationalMatrix) -> Fraction:
    matrix.require_square("determinant input")
    work = matrix.to_rows()
    size = matrix.rows
    result = Fraction(1)
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if work[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            result = -result
        pivot = work[col][col]
        result *= pivot
        for r in range(col + 1, size):
            if work[r][col] != 0:
                factor = work[r][col] / pivot
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    return result


def trace(matrix: RationalMatrix) -> Fraction:
    return sum((matrix[i, i] for i in range(min(matrix.rows, matrix.cols))), Fraction(0))


def charpoly(matrix: RationalMatrix) -> PolyQ:
    """
    Characteristic polynomial det(yI - T), monic of degree dim T.

    Raises:
        NonSquareMatrixError: for rectangular input
    """
    if not matrix.is_square:
        raise NonSquareMatrixError(f"charpoly needs a square matrix, got {matrix.rows}x{matrix.cols}")
    size = matrix.rows
    coefficients = [Fraction(0)] * (size + 1)
    coefficients[size] = Fraction(1)
    identity = RationalMatrix.identity(size)
    accumulator = RationalMatrix.zeros(size, size)
    for k in range(1, size + 1):
        accumulator = matrix @ accumulator + identity.scale(coefficients[size - k + 1])
        coefficients[size - k] = -trace(matrix @ accumulator) / k
    return PolyQ(coefficients)


def nullity_mod_p(matrix: RationalMatrix, prime: int = MODULAR_PRIME) -> int:
    """
    Dimension of the kernel over GF(p) after clearing row denominators.

    Rank over GF(p) never exceeds rank over Q, so the result bounds the
    rational nullity from above; 0 proves the rational kernel is trivial.
    A denominator divisible by p makes the bound void, so such rows are
    treated as fully degenerate (the result is then just cols).
    """
    rows = []
    for i in range(matrix.rows):
        row = matrix.row(i)
        scale = lcm(*(x.denominator for x in row)) if row else 1
        if scale % prime == 0:
            return matrix.cols
        rows.append([(x.numerator * (scale // x.denominator)) % prime for x in row])
    rank_p = 0
    for col in range(matrix.cols):
        pivot_row = next((r for r in range(rank_p, len(rows)) if rows[r][col]), None)
        if pivot_row is None:
            continue
        rows[rank_p], rows[pivot_row] = rows[pivot_row], rows[rank_p]
        inv = pow(rows[rank_p][col], -1, prime)
        pivot = [(x * inv) % prime for x in rows[rank_p]]
        rows[rank_p] = pivot
        for r in range(rank_p + 1, len(rows)):
            factor = rows[r][col]
            if factor:
                rows[r] = [(a - factor * b) % prime for a, b in zip(rows[r], pivot)]
        rank_p += 1
    return matrix.cols - rank_p


# Polynomials

def is_squarefree(poly: PolyQ) -> bool:
    if poly.is_zero():
        raise ZeroPolynomialError("squarefree test on the zero polynomial")
    return poly_gcd(poly, poly.derivative()).is_constant()


def primitive_integer_form(poly: PolyQ) -> List[int]:
    """Integer coefficients (ascending) with content 1 and positive leading coefficient."""
    scale = lcm(*(c.denominator for c in poly.coefficients))
    integers = [int(c * scale) for c in poly.coefficients]
    content = 0
    for c in integers:
        content = gcd(content, c)
    if integers[-1] < 0:
        content = -content
    return [c // content for c in integers]


def _cauchy_bound(integers: Sequence[int]) -> Fraction:
    lead = abs(integers[-1])
    return 1 + Fraction(max(abs(c) for c in integers[:-1]), lead)


def _rational_root_candidates(integers: List[int]) -> List[Fraction]:
    constant, lead = integers[0], integers[-1]
    bound = _cauchy_bound(integers)
    at_one = sum(integers)
    at_minus_one = sum(c if i % 2 == 0 else -c for i, c in enumerate(integers))
    candidates = set()
    for e in divisors(abs(lead)):
        for d in divisors(abs(constant)):
            if Fraction(d, e) > bound:
                continue
            for signed in (d, -d):
                if gcd(signed, e) != 1:
                    continue
                # (e*y - d) divides the primitive form, so (e - d) | p(1) and (e + d) | p(-1)
                if at_one and (e - signed) and at_one % (e - signed):
                    continue
                if at_minus_one and (e + signed) and at_minus_one % (e + signed):
                    continue
                candidates.add(Fraction(signed, e))
    return sorted(candidates)


def squarefree_and_rational_roots(poly: PolyQ) -> Tuple[PolyQ, List[Tuple[Fraction, int]]]:
    """
    Squarefree part and the rational roots with multiplicities.

    Args:
        poly: Nonzero polynomial

    Returns:
        (monic p / gcd(p, p'), ascending list of (root, multiplicity))

    Raises:
        ZeroPolynomialError: for the zero polynomial
    """
    if poly.is_zero():
        raise ZeroPolynomialError("squarefree_and_rational_roots needs a nonzero polynomial")
    if poly.is_constant():
        return PolyQ.constant(1), []
    squarefree = (poly // poly_gcd(poly, poly.derivative())).monic()

    roots: List[Fraction] = []
    integers = primitive_integer_form(squarefree)
    if integers[0] == 0:
        # squarefree, so 0 is a simple root
        roots.append(Fraction(0))
        integers = integers[1:]
    if len(integers) > 1:
        reduced = PolyQ(integers)
        roots.extend(r for r in _rational_root_candidates(integers) if reduced.evaluate(r) == 0)

    result = []
    for root in sorted(roots):
        multiplicity, remaining = 0, poly
        factor = PolyQ.linear_root(root)
        while True:
            quotient, remainder = divmod(remaining, factor)
            if not remainder.is_zero():
                break
            multiplicity += 1
            remaining = quotient
        result.append((root, multiplicity))
    return squarefree, result


# Smith normal form over Q[y]

def _swap_rows(rows, i, j):
    rows[i], rows[j] = rows[j], rows[i]


def _swap_cols(rows, i, j):
    for row in rows:
        row[i], row[j] = row[j], row[i]


def _add_row_multiple(rows, target, source, factor: PolyQ):
    """row[target] += factor * row[source]"""
    rows[target] = [a + factor * b for a, b in zip(rows[target], rows[source])]


def _add_col_multiple(rows, target, source, factor: PolyQ):
    """col[target] += factor * col[source]"""
    for row in rows:
        row[target] = row[target] + factor * row[source]


def _min_degree_entry(work, start):
    best = None
    for i in range(start, len(work)):
        for j in range(start, len(work[i])):
            entry = work[i][j]
            if entry.is_zero():
                continue
            if best is None or entry.degree < best[2]:
                best = (i, j, entry.degree)
    return best


def smith_normal_form(matrix: PolyMatrix) -> Tuple[List[PolyQ], PolyMatrix, PolyMatrix]:
    """
    Smith normal form of a square polynomial matrix.

    Pivot: the nonzero entry of minimal degree in the trailing submatrix, ties
    broken in row-major order, scaled to monic. The divisibility condition is
    restored by adding an offending row into the pivot row and reducing again.

    Args:
        matrix: Square matrix over Q[y]

    Returns:
        (diag, U, V) with U * matrix * V = diag(d_1, ..., d_m), each d_i monic or
        zero and d_i | d_{i+1}; U and V have constant nonzero determinant

    Raises:
        NonSquareMatrixError: for rectangular input
    """
    if matrix.rows != matrix.cols:
        raise NonSquareMatrixError(f"smith_normal_form needs a square matrix, got {matrix.rows}x{matrix.cols}")
    size = matrix.rows
    work = matrix.to_rows()
    left = PolyMatrix.identity(size).to_rows()
    right = PolyMatrix.identity(size).to_rows()
    rounds = 0

    for t in range(size):
        while True:
            rounds += 1
            best = _min_degree_entry(work, t)
            if best is None:
                break
            i, j, _ = best
            if i != t:
                _swap_rows(work, t, i)
                _swap_rows(left, t, i)
            if j != t:
                _swap_cols(work, t, j)
                _swap_cols(right, t, j)
            lead = work[t][t].leading
            if lead != 1:
                scale = PolyQ.constant(1 / lead)
                work[t] = [scale * x for x in work[t]]
                left[t] = [scale * x for x in left[t]]
            pivot = work[t][t]

            dirty = False
            for r in range(t + 1, size):
                if work[r][t].is_zero():
                    continue
                quotient, remainder = divmod(work[r][t], pivot)
                _add_row_multiple(work, r, t, -quotient)
                _add_row_multiple(left, r, t, -quotient)
                dirty = dirty or not remainder.is_zero()
            for c in range(t + 1, size):
                if work[t][c].is_zero():
                    continue
                quotient, remainder = divmod(work[t][c], pivot)
                _add_col_multiple(work, c, t, -quotient)
                _add_col_multiple(right, c, t, -quotient)
                dirty = dirty or not remainder.is_zero()
            if dirty:
                continue

            offending = next(
                (r for r in range(t + 1, size) for c in range(t + 1, size) if not pivot.divides(work[r][c])),
                None,
            )
            if offending is None:
                break
            one = PolyQ.constant(1)
            _add_row_multiple(work, t, offending, one)
            _add_row_multiple(left, t, offending, one)

    diagonal = [work[i][i] for i in range(size)]
    logging.debug(f"smith_normal_form: size={size}, rounds={rounds}, diagonal={[str(d) for d in diagonal]}")
    return diagonal, PolyMatrix.from_rows(left), PolyMatrix.from_rows(right)

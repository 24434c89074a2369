"""
Test cases for exact linear algebra and polynomial routines.
"""
import random
import unittest
from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from homsense.domain.matrix import RationalMatrix, to_fraction
from homsense.domain.poly import PolyMatrix, PolyQ, poly_gcd
from homsense.errors import HomsenseError, InputFormatError, NonSquareMatrixError, ZeroPolynomialError
from homsense.exactalg import (
    charpoly,
    determinant,
    inverse,
    is_squarefree,
    kernel_basis,
    nullity_mod_p,
    rank,
    rref,
    smith_normal_form,
    solve_exact,
    squarefree_and_rational_roots,
)
from homsense.sensing import random_unimodular


def square_matrices(max_size=4, bound=5):
    return st.integers(min_value=1, max_value=max_size).flatmap(
        lambda size: st.lists(
            st.lists(st.integers(-bound, bound), min_size=size, max_size=size),
            min_size=size,
            max_size=size,
        )
    )


def sympy_charpoly(rows):
    y = sympy.Symbol("y")
    coefficients = sympy.Matrix(rows).charpoly(y).all_coeffs()
    return PolyQ([Fraction(int(c.p), int(c.q)) for c in reversed(coefficients)])


class TestRationalMatrix(unittest.TestCase):

    def test_fraction_strings_are_reduced(self):
        self.assertEqual(to_fraction("3/6"), Fraction(1, 2))
        self.assertEqual(to_fraction(" -4 "), Fraction(-4))

    def test_zero_denominator_rejected(self):
        with self.assertRaises(InputFormatError):
            to_fraction("1/0")

    def test_shift_and_power(self):
        block = RationalMatrix.jordan_block(2, 3)
        nilpotent = block.shift(2)
        self.assertFalse(nilpotent.power(2).is_zero())
        self.assertTrue(nilpotent.power(3).is_zero())

    def test_companion_has_given_charpoly(self):
        matrix = RationalMatrix.companion([-2, 0, 0])
        self.assertEqual(charpoly(matrix), PolyQ([-2, 0, 0, 1]))


class TestRrefAndKernels(unittest.TestCase):

    def test_rank_of_singular_matrix(self):
        matrix = RationalMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
        reduced, pivots, r = rref(matrix)
        self.assertEqual(r, 2)
        self.assertEqual(pivots, [0, 1])
        self.assertEqual(reduced.row(2), (0, 0, 0))

    def test_trivial_kernel_has_zero_columns(self):
        kernel = kernel_basis(RationalMatrix.identity(3))
        self.assertEqual(kernel.shape, (3, 0))

    @settings(max_examples=60, deadline=None)
    @given(square_matrices())
    def test_kernel_is_annihilated(self, rows):
        matrix = RationalMatrix.from_rows(rows)
        kernel = kernel_basis(matrix)
        self.assertEqual(kernel.cols, matrix.cols - rank(matrix))
        if kernel.cols:
            self.assertTrue((matrix @ kernel).is_zero())

    def test_solve_exact(self):
        a = RationalMatrix.from_rows([[2, 0], [0, 3], [1, 1]])
        x = RationalMatrix.from_rows([[1, "1/2"], [-1, 2]])
        self.assertEqual(solve_exact(a, a @ x), x)

    def test_solve_exact_inconsistent(self):
        a = RationalMatrix.from_rows([[1], [0]])
        b = RationalMatrix.from_rows([[0], [1]])
        with self.assertRaises(HomsenseError):
            solve_exact(a, b)

    def test_inverse_and_determinant(self):
        matrix = RationalMatrix.from_rows([[2, 1], [5, 3]])
        self.assertEqual(determinant(matrix), 1)
        self.assertEqual(matrix @ inverse(matrix), RationalMatrix.identity(2))

    @settings(max_examples=60, deadline=None)
    @given(square_matrices())
    def test_determinant_matches_sympy(self, rows):
        expected = sympy.Matrix(rows).det()
        self.assertEqual(determinant(RationalMatrix.from_rows(rows)), Fraction(int(expected)))

    @settings(max_examples=60, deadline=None)
    @given(square_matrices())
    def test_modular_nullity_bounds_rational_nullity(self, rows):
        matrix = RationalMatrix.from_rows(rows)
        self.assertGreaterEqual(nullity_mod_p(matrix), matrix.cols - rank(matrix))

    def test_modular_nullity_small_prime_collapses(self):
        matrix = RationalMatrix.diag([1, 7])
        self.assertEqual(nullity_mod_p(matrix), 0)
        self.assertEqual(nullity_mod_p(matrix, prime=7), 1)


class TestCharpoly(unittest.TestCase):

    def test_non_square_rejected(self):
        with self.assertRaises(NonSquareMatrixError):
            charpoly(RationalMatrix.zeros(2, 3))

    @settings(max_examples=80, deadline=None)
    @given(square_matrices(max_size=5))
    def test_matches_sympy(self, rows):
        self.assertEqual(charpoly(RationalMatrix.from_rows(rows)), sympy_charpoly(rows))

    @settings(max_examples=40, deadline=None)
    @given(square_matrices(max_size=5), st.integers(0, 10_000))
    def test_similarity_invariant(self, rows, seed):
        """Test that charpoly(S T S^-1) = charpoly(T) for unimodular S"""
        matrix = RationalMatrix.from_rows(rows)
        conjugator = random_unimodular(matrix.rows, random.Random(seed))
        self.assertEqual(charpoly(conjugator @ matrix @ inverse(conjugator)), charpoly(matrix))

    def test_rational_entries(self):
        rows = [["1/2", 1], [0, "-1/3"]]
        self.assertEqual(
            charpoly(RationalMatrix.from_rows(rows)),
            PolyQ.from_roots([Fraction(1, 2), Fraction(-1, 3)]),
        )


class TestRationalRoots(unittest.TestCase):

    def test_roots_with_multiplicity(self):
        poly = PolyQ.from_roots([1, 1, -2]) * PolyQ([1, 0, 1])
        squarefree, roots = squarefree_and_rational_roots(poly)
        self.assertEqual(roots, [(Fraction(-2), 1), (Fraction(1), 2)])
        self.assertEqual(squarefree, PolyQ.from_roots([1, -2]) * PolyQ([1, 0, 1]))

    def test_fractional_and_zero_roots(self):
        poly = PolyQ.from_roots([0, 0, Fraction(2, 3), Fraction(-5, 2)])
        _, roots = squarefree_and_rational_roots(poly * 6)
        self.assertEqual(roots, [(Fraction(-5, 2), 1), (Fraction(0), 2), (Fraction(2, 3), 1)])

    def test_irreducible_cubic_has_no_rational_root(self):
        self.assertEqual(squarefree_and_rational_roots(PolyQ([-2, 0, 0, 1]))[1], [])

    def test_constant_and_zero(self):
        self.assertEqual(squarefree_and_rational_roots(PolyQ.constant(5)), (PolyQ.constant(1), []))
        with self.assertRaises(ZeroPolynomialError):
            squarefree_and_rational_roots(PolyQ())

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=4), min_size=1, max_size=5))
    def test_recovers_every_root(self, values):
        poly = PolyQ.from_roots(values) * PolyQ([3, 0, 1])
        _, roots = squarefree_and_rational_roots(poly)
        expected = sorted((v, values.count(v)) for v in set(values))
        self.assertEqual(roots, expected)

    def test_squarefree_check(self):
        self.assertTrue(is_squarefree(PolyQ([-1, 0, 0, 1])))
        self.assertFalse(is_squarefree(PolyQ.from_roots([2, 2])))


class TestSmithNormalForm(unittest.TestCase):

    def _check(self, matrix: RationalMatrix):
        characteristic = PolyMatrix.characteristic(matrix)
        diagonal, u, v = smith_normal_form(characteristic)
        product = u @ characteristic @ v
        self.assertTrue(product.is_diagonal())
        self.assertEqual(list(product.diagonal()), diagonal)
        for left, right in zip(diagonal, diagonal[1:]):
            self.assertTrue(left.divides(right))
        self.assertTrue(u.determinant().is_constant())
        self.assertTrue(v.determinant().is_constant())
        self.assertFalse(u.determinant().is_zero())
        total = PolyQ.constant(1)
        for d in diagonal:
            total = total * d
        self.assertEqual(total, charpoly(matrix))
        return diagonal

    def test_diagonal_matrix(self):
        diagonal = self._check(RationalMatrix.diag([2, 2, 3]))
        self.assertEqual(diagonal[-2:], [PolyQ.from_roots([2]), PolyQ.from_roots([2, 3])])

    def test_companion_is_cyclic(self):
        diagonal = self._check(RationalMatrix.companion([-2, 0, 0]))
        self.assertEqual(diagonal[-1], PolyQ([-2, 0, 0, 1]))
        self.assertTrue(all(d.is_constant() for d in diagonal[:-1]))

    @settings(max_examples=30, deadline=None)
    @given(square_matrices(max_size=4, bound=3))
    def test_random_matrices(self, rows):
        self._check(RationalMatrix.from_rows(rows))

    def test_gcd_is_monic(self):
        self.assertEqual(poly_gcd(PolyQ([2, 2]), PolyQ([-2, 0, 2])), PolyQ([1, 1]))


if __name__ == "__main__":
    unittest.main()

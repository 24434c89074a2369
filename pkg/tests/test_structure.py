"""
Test cases for invariant factors, multiplicities and Jordan chains.
"""
import random
import unittest
from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from homsense.domain.matrix import RationalMatrix
from homsense.domain.poly import PolyQ, poly_product
from homsense.errors import IrrationalSpectrumError, NonSquareMatrixError, NotAnEigenvalueError
from homsense.exactalg import charpoly, inverse, rank
from homsense.sensing import conjugated_jordan, random_unimodular
from homsense.structure import (
    cyclic_summands,
    geometric_multiplicities,
    has_rational_spectrum,
    invariant_factors,
    jordan_chains,
    max_multiplicity_excluding,
)

jordan_data = st.lists(
    st.tuples(st.integers(-3, 3).map(Fraction), st.integers(1, 3)),
    min_size=1,
    max_size=4,
)


class TestInvariantFactors(unittest.TestCase):

    def test_product_is_charpoly(self):
        matrix = RationalMatrix.from_rows([[2, 1, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 5]])
        data = invariant_factors(matrix)
        self.assertEqual(poly_product(data.invariant_factors), charpoly(matrix))
        self.assertEqual(data.minimal_polynomial, PolyQ.from_roots([2, 2, 5]))
        self.assertEqual(len(data.invariant_factors), 2)

    def test_scalar_matrix(self):
        data = invariant_factors(RationalMatrix.identity(3).scale(4))
        self.assertEqual(data.invariant_factors, (PolyQ.linear_root(4),) * 3)

    def test_rejects_rectangular(self):
        with self.assertRaises(NonSquareMatrixError):
            invariant_factors(RationalMatrix.zeros(2, 3))

    @settings(max_examples=25, deadline=None)
    @given(jordan_data, st.integers(0, 1000))
    def test_matches_jordan_data(self, blocks, seed):
        matrix = conjugated_jordan(blocks, random.Random(seed))
        data = invariant_factors(matrix)
        self.assertEqual(poly_product(data.invariant_factors), charpoly(matrix))
        for left, right in zip(data.invariant_factors, data.invariant_factors[1:]):
            self.assertTrue(left.divides(right))
        # the number of invariant factors is the largest geometric multiplicity
        counts = {}
        for value, _ in blocks:
            counts[value] = counts.get(value, 0) + 1
        self.assertEqual(len(data.invariant_factors), max(counts.values()))


class TestGeometricMultiplicities(unittest.TestCase):

    def test_repeated_eigenvalue(self):
        report = geometric_multiplicities(RationalMatrix.diag([2, 2, 2, 3]))
        self.assertEqual(report.multiplicity_of(Fraction(2)), 3)
        self.assertEqual(report.multiplicity_of(Fraction(3)), 1)
        self.assertEqual(report.multiplicity_of(Fraction(7)), 0)
        self.assertEqual(report.rational_eigenvalues, [Fraction(2), Fraction(3)])

    @settings(max_examples=25, deadline=None)
    @given(jordan_data, st.integers(0, 1000))
    def test_equals_kernel_dimension(self, blocks, seed):
        matrix = conjugated_jordan(blocks, random.Random(seed))
        report = geometric_multiplicities(matrix)
        for value in {v for v, _ in blocks}:
            self.assertEqual(report.multiplicity_of(value), matrix.rows - rank(matrix.shift(value)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5).flatmap(
        lambda size: st.lists(st.lists(st.integers(-3, 3), min_size=size, max_size=size),
                              min_size=size, max_size=size)
    ), st.integers(0, 10_000))
    def test_similarity_invariant(self, rows, seed):
        """Test that conjugating by a unimodular matrix keeps every multiplicity"""
        matrix = RationalMatrix.from_rows(rows)
        conjugator = random_unimodular(matrix.rows, random.Random(seed))
        similar = conjugator @ matrix @ inverse(conjugator)
        self.assertEqual(geometric_multiplicities(similar).to_dict(), geometric_multiplicities(matrix).to_dict())

    def test_irrational_eigenvalues_form_one_tag(self):
        cube_root = RationalMatrix.companion([-2, 0, 0])
        report = geometric_multiplicities(RationalMatrix.block_diag([cube_root, cube_root]))
        self.assertEqual(report.rational_eigenvalues, [])
        self.assertEqual(report.orbit_tags, [PolyQ([-2, 0, 0, 1])])
        self.assertEqual(report.entries[0][1], 2)
        self.assertEqual(report.entries[0][0].degree, 3)

    def test_tags_split_by_multiplicity(self):
        rotation = RationalMatrix.companion([1, 0])
        cube_root = RationalMatrix.companion([-2, 0, 0])
        matrix = RationalMatrix.block_diag([rotation, rotation, cube_root, RationalMatrix.diag([1])])
        report = geometric_multiplicities(matrix)
        by_tag = {str(d.tag): mult for d, mult in report.entries if not d.is_rational}
        self.assertEqual(by_tag[str(PolyQ([1, 0, 1]))], 2)
        self.assertEqual(by_tag[str(PolyQ([-2, 0, 0, 1]))], 1)
        self.assertEqual(report.multiplicity_of(Fraction(1)), 1)

    def test_irrational_multiplicity_matches_sympy(self):
        rotation = RationalMatrix.companion([-2, 0])
        matrix = RationalMatrix.block_diag([rotation, rotation, RationalMatrix.diag([3])])
        symbolic = sympy.Matrix([[int(x) for x in row] for row in matrix.to_rows()])
        for eigenvalue, _, vectors in symbolic.eigenvects():
            if eigenvalue.is_rational:
                self.assertEqual(len(vectors), 1)
            else:
                self.assertEqual(len(vectors), 2)
        self.assertEqual(max_multiplicity_excluding(matrix, []), 2)

    def test_exclusions(self):
        matrix = RationalMatrix.diag([1, 1, 1, -1, -1, 0])
        self.assertEqual(max_multiplicity_excluding(matrix, []), 3)
        self.assertEqual(max_multiplicity_excluding(matrix, [Fraction(1)]), 2)
        self.assertEqual(max_multiplicity_excluding(matrix, [Fraction(1), Fraction(-1), Fraction(0)]), 0)


class TestJordanChains(unittest.TestCase):

    def test_chain_relations(self):
        matrix = RationalMatrix.block_diag([
            RationalMatrix.jordan_block(2, 3),
            RationalMatrix.jordan_block(2, 1),
            RationalMatrix.diag([5]),
        ])
        chain_set = jordan_chains(matrix, Fraction(2))
        self.assertEqual(chain_set.lengths, [3, 1])
        self.assertEqual(chain_set.algebraic_multiplicity, 4)
        self.assertEqual(chain_set.geometric_multiplicity, 2)
        for chain in chain_set.chains:
            self.assertEqual(matrix.apply(chain[0]), tuple(2 * x for x in chain[0]))
            for previous, current in zip(chain, chain[1:]):
                image = matrix.apply(current)
                self.assertEqual(image, tuple(2 * c + p for c, p in zip(current, previous)))

    def test_not_an_eigenvalue(self):
        with self.assertRaises(NotAnEigenvalueError):
            jordan_chains(RationalMatrix.identity(2), Fraction(3))

    @settings(max_examples=20, deadline=None)
    @given(jordan_data, st.integers(0, 1000))
    def test_lengths_match_blocks(self, blocks, seed):
        matrix = conjugated_jordan(blocks, random.Random(seed))
        for value in {v for v, _ in blocks}:
            expected = sorted((size for v, size in blocks if v == value), reverse=True)
            self.assertEqual(jordan_chains(matrix, value).lengths, expected)


class TestCyclicSummands(unittest.TestCase):

    def test_ordering(self):
        matrix = RationalMatrix.block_diag([
            RationalMatrix.jordan_block(3, 2),
            RationalMatrix.jordan_block(-1, 1),
            RationalMatrix.jordan_block(3, 1),
        ])
        summands = cyclic_summands(matrix)
        self.assertEqual([(s.eigenvalue, s.dimension) for s in summands], [(-1, 1), (3, 1), (3, 2)])
        basis = RationalMatrix.from_columns([v for s in summands for v in s.chain], rows=4)
        self.assertEqual(rank(basis), 4)

    def test_truncation_is_invariant(self):
        summand = cyclic_summands(RationalMatrix.jordan_block(1, 3))[0].truncated(2)
        self.assertEqual(summand.dimension, 2)

    def test_irrational_spectrum(self):
        matrix = RationalMatrix.companion([-2, 0, 0])
        self.assertFalse(has_rational_spectrum(matrix))
        with self.assertRaises(IrrationalSpectrumError):
            cyclic_summands(matrix)

    def test_rational_spectrum(self):
        self.assertTrue(has_rational_spectrum(RationalMatrix.jordan_block("1/2", 3)))


if __name__ == "__main__":
    unittest.main()

"""
Endomorphism structure: invariant factors, geometric multiplicities and
Jordan chains.

Irrational eigenvalues are never represented as numbers. The squarefree part
of the minimal polynomial is split into its rational roots and a residual; the
residual is cut into orbit tags tag_j = gcd(res, d_j) / gcd(res, d_{j-1}) over
the invariant factors d_j. All roots of a tag divide exactly the same
invariant factors, so a tag has one well-defined geometric multiplicity.
"""
from fractions import Fraction
from typing import Iterable, List, Tuple

from bittensor.utils.btlogging import logging

from homsense.domain.matrix import RationalMatrix, Vector
from homsense.domain.poly import PolyMatrix, PolyQ, poly_gcd, poly_product
from homsense.domain.structure import (
    CyclicSummand,
    EigenDescriptor,
    EigenMultiplicityReport,
    InvariantFactorData,
    JordanChainSet,
)
from homsense.errors import IrrationalSpectrumError, NotAnEigenvalueError
from homsense.exactalg import charpoly, kernel_basis, rank, smith_normal_form, squarefree_and_rational_roots


def invariant_factors(matrix: RationalMatrix) -> InvariantFactorData:
    """
    Invariant factors of yI - T, ascending under divisibility.

    Raises:
        NonSquareMatrixError: for rectangular input
    """
    matrix.require_square("invariant_factors input")
    diagonal, _, _ = smith_normal_form(PolyMatrix.characteristic(matrix))
    factors = tuple(d for d in diagonal if not d.is_constant())
    return InvariantFactorData(
        matrix_dim=matrix.rows,
        invariant_factors=factors,
        charpoly=charpoly(matrix),
    )


def _orbit_tags(residual: PolyQ, factors: Tuple[PolyQ, ...]) -> List[Tuple[PolyQ, int]]:
    tags = []
    previous = PolyQ.constant(1)
    for factor in factors:
        current = poly_gcd(residual, factor)
        tag = (current // previous).monic()
        if not tag.is_constant():
            tags.append((tag, sum(1 for d in factors if tag.divides(d))))
        previous = current
    return tags


def multiplicity_report(data: InvariantFactorData) -> EigenMultiplicityReport:
    """Geometric multiplicities read off precomputed invariant factors."""
    factors = data.invariant_factors
    if not factors:
        return EigenMultiplicityReport(matrix_dim=data.matrix_dim, entries=())
    squarefree, roots = squarefree_and_rational_roots(data.minimal_polynomial)
    entries = []
    for root, _ in roots:
        count = sum(1 for d in factors if d.evaluate(root) == 0)
        entries.append((EigenDescriptor(value=root), count))
    residual = squarefree // poly_product(PolyQ.linear_root(root) for root, _ in roots)
    if not residual.is_constant():
        for tag, count in _orbit_tags(residual, factors):
            entries.append((EigenDescriptor(tag=tag), count))
    return EigenMultiplicityReport(matrix_dim=data.matrix_dim, entries=tuple(entries))


def geometric_multiplicities(matrix: RationalMatrix) -> EigenMultiplicityReport:
    """
    Geometric multiplicity of every eigenvalue descriptor of T.

    For a rational eigenvalue the count equals dim ker(T - lambda I); for an
    orbit tag it is the number of invariant factors the tag divides.
    """
    report = multiplicity_report(invariant_factors(matrix))
    logging.debug(
        f"geometric_multiplicities: dim={matrix.rows}, "
        f"entries={[(d.label(), mult) for d, mult in report.entries]}"
    )
    return report


def max_multiplicity_in_report(report: EigenMultiplicityReport, excluded: Iterable[Fraction]) -> int:
    excluded = set(excluded)
    values = [
        multiplicity
        for descriptor, multiplicity in report.entries
        if not (descriptor.is_rational and descriptor.value in excluded)
    ]
    return max(values, default=0)


def max_multiplicity_excluding(matrix: RationalMatrix, excluded: Iterable[Fraction]) -> int:
    """
    Largest geometric multiplicity among eigenvalues outside `excluded`.

    Orbit tags never contain rational roots, so only rational descriptors are
    compared with the excluded set. Returns 0 when nothing remains.
    """
    return max_multiplicity_in_report(geometric_multiplicities(matrix), excluded)


def has_rational_spectrum(matrix: RationalMatrix) -> bool:
    matrix.require_square("has_rational_spectrum input")
    if matrix.rows == 0:
        return True
    _, roots = squarefree_and_rational_roots(charpoly(matrix))
    return sum(mult for _, mult in roots) == matrix.rows


def _normalized(chain: List[Vector]) -> Tuple[Vector, ...]:
    top = chain[-1]
    lead = next(x for x in top if x != 0)
    return tuple(tuple(x / lead for x in v) for v in chain)


def jordan_chains(matrix: RationalMatrix, eigenvalue: Fraction) -> JordanChainSet:
    """
    Jordan chains of T for a rational eigenvalue.

    Chain tops are picked from ker N^e minus ker N^(e-1) (N = T - lambda I),
    largest e first, completing to independence modulo ker N^(e-1) plus the
    level-e vectors of the longer chains already chosen. Each chain is scaled
    so the first nonzero entry of its generator is 1; chains are sorted by
    decreasing length, then lexicographically by generator.

    Raises:
        NotAnEigenvalueError: when ker(T - lambda I) = 0
    """
    matrix.require_square("jordan_chains input")
    eigenvalue = Fraction(eigenvalue)
    nilpotent = matrix.shift(eigenvalue)
    kernels = [RationalMatrix.zeros(matrix.rows, 0)]
    power = RationalMatrix.identity(matrix.rows)
    while True:
        power = power @ nilpotent
        kernel = kernel_basis(power)
        if kernel.cols == kernels[-1].cols:
            break
        kernels.append(kernel)
    if len(kernels) == 1:
        raise NotAnEigenvalueError(f"{eigenvalue} is not an eigenvalue of the given matrix")

    # (generator, length) of the chains picked so far
    generators: List[Tuple[Vector, int]] = []
    for level in range(len(kernels) - 1, 0, -1):
        current = kernels[level - 1].columns()
        for generator, length in generators:
            vector = generator
            for _ in range(length - level):
                vector = nilpotent.apply(vector)
            current.append(vector)
        current_rank = rank(RationalMatrix.from_columns(current, rows=matrix.rows))
        for candidate in kernels[level].columns():
            trial = current + [candidate]
            trial_rank = rank(RationalMatrix.from_columns(trial, rows=matrix.rows))
            if trial_rank > current_rank:
                current, current_rank = trial, trial_rank
                generators.append((candidate, level))

    chains = []
    for generator, length in generators:
        chain = [generator]
        for _ in range(length - 1):
            chain.insert(0, nilpotent.apply(chain[0]))
        chains.append(_normalized(chain))
    chains.sort(key=lambda c: (-len(c), c[-1]))
    logging.debug(f"jordan_chains: eigenvalue={eigenvalue}, lengths={[len(c) for c in chains]}")
    return JordanChainSet(eigenvalue=eigenvalue, chains=tuple(chains))


def cyclic_summands(matrix: RationalMatrix) -> List[CyclicSummand]:
    """
    Cyclic summands of Q^m for a matrix with rational spectrum.

    Eigenvalues ascending; per eigenvalue by dimension ascending, ties by the
    generator in lexicographic order.

    Raises:
        IrrationalSpectrumError: when charpoly(T) does not split over Q
    """
    matrix.require_square("cyclic_summands input")
    _, roots = squarefree_and_rational_roots(charpoly(matrix)) if matrix.rows else (None, [])
    if sum(mult for _, mult in roots) != matrix.rows:
        raise IrrationalSpectrumError()
    summands = []
    for root, _ in roots:
        chain_set = jordan_chains(matrix, root)
        ordered = sorted(chain_set.chains, key=lambda c: (len(c), c[-1]))
        summands.extend(CyclicSummand(eigenvalue=root, chain=chain) for chain in ordered)
    return summands

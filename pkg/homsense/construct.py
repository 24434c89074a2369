"""
Witness subspaces V with dim(V + T(V)) = 2 dim V.

The builders work on lists of cyclic summands (Jordan chains with rational
eigenvalues) and only ever sum, select or truncate chain vectors, so every
witness is exact. Three regimes:

- construct_boundary: m = 2n and some eigenvalue has exactly n summands
- construct_half: m = 2n and every eigenvalue has at most n summands;
  peels a 2-dimensional complement per step and recurses
- construct_general: m >= 2n and every multiplicity is at most m - n;
  truncates summands down to a 2n-dimensional invariant subspace first

Each result is checked through verify_witness before it is returned.
"""
from collections import Counter
from fractions import Fraction
from typing import List, Optional, Sequence

from bittensor.utils.btlogging import logging

from homsense.domain.certificate import WitnessSubspace
from homsense.domain.matrix import RationalMatrix, Vector
from homsense.domain.structure import CyclicSummand
from homsense.errors import BoundViolationError, HypothesisError, ShapeMismatchError
from homsense.exactalg import rank
from homsense.structure import cyclic_summands


def _add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _multiplicities(summands: Sequence[CyclicSummand]) -> Counter:
    return Counter(s.eigenvalue for s in summands)


def verify_witness(matrix: RationalMatrix, basis: RationalMatrix) -> int:
    """
    Exact rank of [A | TA].

    Raises:
        ShapeMismatchError: when T is not square or A has the wrong height
    """
    matrix.require_square("T")
    if basis.rows != matrix.rows:
        raise ShapeMismatchError(f"basis has {basis.rows} rows, T is {matrix.rows}x{matrix.cols}")
    if basis.cols == 0:
        return 0
    return rank(basis.hstack(matrix @ basis))


def _finish(matrix: RationalMatrix, vectors: List[Vector], n: int, construction: str) -> WitnessSubspace:
    basis = RationalMatrix.from_columns(vectors, rows=matrix.rows)
    witness_rank = verify_witness(matrix, basis)
    if basis.cols != n or witness_rank != 2 * n:
        logging.error(
            f"{construction}: witness check failed, {basis.cols} vectors, "
            f"rank([A | TA]) = {witness_rank}, expected {2 * n}"
        )
        raise BoundViolationError(f"{construction} produced rank {witness_rank}, expected {2 * n}")
    logging.info(f"{construction}: witness of dimension {n} with rank([A | TA]) = {witness_rank}")
    return WitnessSubspace(basis=basis, certificate_rank=witness_rank, construction=construction)


def _check_n(n: int) -> None:
    if n < 0:
        raise HypothesisError(f"n must be non-negative, got {n}")


# Boundary regime

def _boundary_vectors(summands: List[CyclicSummand], n: int, eigenvalue: Fraction) -> List[Vector]:
    own = sorted(
        (s for s in summands if s.eigenvalue == eigenvalue),
        key=lambda s: (s.dimension, s.chain[-1]),
    )
    others = [s for s in summands if s.eigenvalue != eigenvalue]
    ones = [s.chain[0] for s in own if s.dimension == 1]
    big = [s for s in own if s.dimension > 1]
    r = len(ones)

    if r == 0:
        # every summand is 2-dimensional and the eigenvalue is the only one
        return [s.chain[1] for s in big]

    vectors: List[Vector] = []
    used = 0
    for summand in big:
        chain, d = summand.chain, summand.dimension
        if d - 2 > r - used:
            logging.error(
                f"construct_boundary: summand of dimension {d} needs {d - 2} eigenvectors, "
                f"only {r - used} of {r} left"
            )
            raise HypothesisError(f"boundary construction ran out of eigenvectors at d={d}")
        logging.debug(f"construct_boundary: d={d} <= 2 + {r - used} remaining eigenvectors")
        vectors.append(_add(chain[0], chain[-1]))
        for j in range(1, d - 1):
            vectors.append(_add(ones[used], chain[j]))
            used += 1

    residual = [w for s in others for w in s.chain]
    alpha = r - used
    if len(residual) != alpha:
        raise HypothesisError(
            f"boundary construction has {alpha} unused eigenvectors but {len(residual)} other chain vectors"
        )
    for j in range(alpha):
        vectors.append(_add(ones[used + j], residual[j]))
    return vectors


def _boundary_eigenvalue(summands: List[CyclicSummand], n: int) -> Optional[Fraction]:
    multiplicities = _multiplicities(summands)
    return next((value for value in sorted(multiplicities) if multiplicities[value] == n), None)


def construct_boundary(matrix: RationalMatrix, n: int) -> WitnessSubspace:
    """
    Witness for m = 2n with an eigenvalue of geometric multiplicity exactly n.

    Raises:
        HypothesisError: when m != 2n or no eigenvalue has multiplicity n
        IrrationalSpectrumError: when charpoly(T) does not split over Q
    """
    _check_n(n)
    if matrix.rows != 2 * n:
        raise HypothesisError(f"boundary construction needs m = 2n, got m={matrix.rows}, n={n}")
    summands = cyclic_summands(matrix)
    if n == 0:
        return _finish(matrix, [], 0, "construct_boundary")
    eigenvalue = _boundary_eigenvalue(summands, n)
    if eigenvalue is None:
        raise HypothesisError(f"no eigenvalue has geometric multiplicity exactly {n}")
    return _finish(matrix, _boundary_vectors(summands, n, eigenvalue), n, "construct_boundary")


# Half regime

def _half_vectors(summands: List[CyclicSummand], n: int) -> List[Vector]:
    vectors: List[Vector] = []
    current = list(summands)
    while n > 0:
        eigenvalue = _boundary_eigenvalue(current, n)
        if eigenvalue is not None:
            vectors.extend(_boundary_vectors(current, n, eigenvalue))
            return vectors

        singles = [i for i, s in enumerate(current) if s.dimension == 1]
        pair = next(
            (
                (i, j)
                for a, i in enumerate(singles)
                for j in singles[a + 1:]
                if current[i].eigenvalue != current[j].eigenvalue
            ),
            None,
        )
        if pair is not None:
            i, j = pair
            vectors.append(_add(current[i].chain[0], current[j].chain[0]))
            logging.debug(
                f"construct_half: paired eigenvectors of {current[i].eigenvalue} and {current[j].eigenvalue}"
            )
            current = [s for k, s in enumerate(current) if k not in (i, j)]
        else:
            index = next((k for k, s in enumerate(current) if s.dimension > 1), None)
            if index is None:
                raise HypothesisError("half construction found neither a distinct pair nor a deep chain")
            summand = current[index]
            vectors.append(summand.chain[-1])
            logging.debug(
                f"construct_half: peeled deep chain vector (eigenvalue={summand.eigenvalue}, d={summand.dimension})"
            )
            rest = [summand.truncated(summand.dimension - 2)] if summand.dimension > 2 else []
            current = current[:index] + rest + current[index + 1:]
        n -= 1
    return vectors


def construct_half(matrix: RationalMatrix, n: int) -> WitnessSubspace:
    """
    Witness for m = 2n when every eigenvalue has multiplicity at most n.

    Raises:
        HypothesisError: when m != 2n or some multiplicity exceeds n
        IrrationalSpectrumError: when charpoly(T) does not split over Q
    """
    _check_n(n)
    if matrix.rows != 2 * n:
        raise HypothesisError(f"half construction needs m = 2n, got m={matrix.rows}, n={n}")
    summands = cyclic_summands(matrix)
    worst = max(_multiplicities(summands).values(), default=0)
    if worst > n:
        raise HypothesisError(f"an eigenvalue has geometric multiplicity {worst} > n = {n}")
    return _finish(matrix, _half_vectors(summands, n), n, "construct_half")


# General regime

def _truncate_to_codim(summands: List[CyclicSummand], c: int) -> List[CyclicSummand]:
    """Drop c dimensions when every multiplicity is at most n."""
    if c == 0:
        return summands
    largest = max(range(len(summands)), key=lambda k: (summands[k].dimension, -k))
    if summands[largest].dimension >= c:
        summand = summands[largest]
        keep = [summand.truncated(summand.dimension - c)] if summand.dimension > c else []
        logging.debug(f"construct_general: truncating a summand of dimension {summand.dimension} by {c}")
        return summands[:largest] + keep + summands[largest + 1:]

    order = sorted(range(len(summands)), key=lambda k: (-summands[k].dimension, k))
    family, total = [], 0
    for k in order:
        family.append(k)
        total += summands[k].dimension
        if total >= c:
            break
    ell = total - c
    last = family[-1]
    logging.debug(f"construct_general: dropping a family of {len(family)} summands, keeping {ell} vectors")
    result = []
    for k, summand in enumerate(summands):
        if k == last and ell > 0:
            result.append(summand.truncated(ell))
        elif k not in family:
            result.append(summand)
    return result


def _reduce_dominant(summands: List[CyclicSummand], n: int, eigenvalue: Fraction) -> List[CyclicSummand]:
    """Reduce a list whose top eigenvalue has multiplicity n + c1 > n to dimension 2n."""
    current = list(summands)
    c1 = _multiplicities(current)[eigenvalue] - n
    while True:
        c = sum(s.dimension for s in current) - 2 * n
        if c == c1:
            ones = [k for k, s in enumerate(current) if s.eigenvalue == eigenvalue and s.dimension == 1]
            if len(ones) < c:
                raise HypothesisError(f"need {c} one-dimensional summands of {eigenvalue}, found {len(ones)}")
            dropped = set(ones[:c])
            logging.debug(f"construct_general: dropping {c} eigen-lines of {eigenvalue}")
            return [s for k, s in enumerate(current) if k not in dropped]
        if all(s.dimension == 1 for s in current):
            own = [s for s in current if s.eigenvalue == eigenvalue][:n]
            others = [s for s in current if s.eigenvalue != eigenvalue][:n]
            return own + others
        index = next(k for k, s in enumerate(current) if s.dimension > 1)
        summand = current[index]
        current[index] = summand.truncated(summand.dimension - 1)


def _general_subspace(summands: List[CyclicSummand], n: int) -> List[CyclicSummand]:
    total = sum(s.dimension for s in summands)
    c = total - 2 * n
    multiplicities = _multiplicities(summands)
    mu = max(multiplicities.values(), default=0)
    if c == 0:
        return summands
    if mu == 1 and all(s.dimension == 1 for s in summands):
        return summands[:2 * n]
    if mu <= n:
        return _truncate_to_codim(summands, c)
    dominant = min(value for value, count in multiplicities.items() if count == mu)
    return _reduce_dominant(summands, n, dominant)


def construct_general(matrix: RationalMatrix, n: int) -> WitnessSubspace:
    """
    Witness for m >= 2n when every multiplicity is at most m - n.

    A 2n-dimensional invariant subspace S with multiplicities at most n is
    cut out of the summands, then the half construction runs on S.

    Raises:
        HypothesisError: when m < 2n or some multiplicity exceeds m - n
        IrrationalSpectrumError: when charpoly(T) does not split over Q
    """
    _check_n(n)
    m = matrix.rows
    if m < 2 * n:
        raise HypothesisError(f"general construction needs m >= 2n, got m={m}, n={n}")
    summands = cyclic_summands(matrix)
    worst = max(_multiplicities(summands).values(), default=0)
    if worst > m - n:
        raise HypothesisError(f"an eigenvalue has geometric multiplicity {worst} > m - n = {m - n}")
    subspace = _general_subspace(summands, n)
    return _finish(matrix, _half_vectors(subspace, n), n, "construct_general")


def construct_witness(matrix: RationalMatrix, n: int) -> WitnessSubspace:
    """Run the most specific applicable constructor."""
    m = matrix.rows
    if m == 2 * n:
        summands = cyclic_summands(matrix)
        if n > 0 and _boundary_eigenvalue(summands, n) is not None:
            return construct_boundary(matrix, n)
        return construct_half(matrix, n)
    return construct_general(matrix, n)

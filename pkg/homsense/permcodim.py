"""
Cycle structure of signed permutations and the codimension account behind
the bound dim U <= m - floor(rank(rho2) / 2).

The account works on a single permutation pi against two projections rho1,
rho2 (the pair (rho2 rho1 pi, rho2)). I2 is the kept set of rho2, K1 the
zeroed set of rho1. Zeros seeded on I2 & K1 travel forward along pi while the
image stays inside I2 (the domino effect); fixed points and complete cycles
inside the remainder are counted next; what is left is the incomplete part.
"""
import random
from concurrent.futures import ProcessPoolExecutor
from itertools import islice, permutations, product
from math import factorial
from typing import Iterator, List, Sequence, Tuple

from bittensor.utils.btlogging import logging

from homsense.domain.permutation import (
    CodimAccount,
    CoordinateProjection,
    CycleDecomposition,
    SignedPermutation,
)
from homsense.domain.poly import PolyQ
from homsense.errors import BoundViolationError, ShapeMismatchError
from homsense.exactalg import is_squarefree


def cycle_decomposition(perm: SignedPermutation) -> CycleDecomposition:
    """Orbits of the underlying permutation, fixed points included."""
    seen = set()
    cycles = []
    for start in range(perm.size):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        index = perm(start)
        while index != start:
            cycle.append(index)
            seen.add(index)
            index = perm(index)
        cycles.append(tuple(cycle))
    return CycleDecomposition(cycles=tuple(cycles))


def signed_cycle(signs: Sequence[int]) -> SignedPermutation:
    """The single cycle 0 -> 1 -> ... -> l-1 -> 0 carrying the given signs."""
    length = len(signs)
    return SignedPermutation.from_cycles(length, [list(range(length))], signs)


def signed_cycle_eigen_check(length: int, signs: Sequence[int]) -> Tuple[PolyQ, bool]:
    """
    Characteristic polynomial y^l - prod(signs) of a signed l-cycle and
    whether its roots are distinct.
    """
    if length < 1 or len(signs) != length:
        raise ShapeMismatchError(f"need {length} >= 1 signs, got {len(signs)}")
    product = 1
    for s in signs:
        product *= s
    coefficients = [0] * (length + 1)
    coefficients[0] = -product
    coefficients[length] = 1
    poly = PolyQ(coefficients)
    return poly, is_squarefree(poly)


def _check_sizes(perm: SignedPermutation, rho1: CoordinateProjection, rho2: CoordinateProjection) -> None:
    if not perm.size == rho1.size == rho2.size:
        raise ShapeMismatchError(
            f"size mismatch: pi on {perm.size}, rho1 on {rho1.size}, rho2 on {rho2.size}"
        )


def codim_account(
    perm: SignedPermutation,
    rho1: CoordinateProjection,
    rho2: CoordinateProjection,
) -> CodimAccount:
    """
    Partition I2 into domino / fixed / complete-cycle / incomplete indices.

    Args:
        perm: The single permutation pi (signs are ignored)
        rho1: Inner projection
        rho2: Outer projection

    Returns:
        CodimAccount with codim_bound = |domino| + |fixed| + sum(#C - 1)
        + max(|incomplete| - 1, 0)

    Raises:
        ShapeMismatchError: when the sizes differ
    """
    _check_sizes(perm, rho1, rho2)
    kept = rho2.kept
    seeds = sorted(kept & rho1.zeroed)

    domino = set()
    for seed in seeds:
        index = seed
        while index not in domino:
            domino.add(index)
            image = perm(index)
            if image not in kept:
                break
            index = image

    fixed = {i for i in kept - domino if perm(i) == i}
    remaining = kept - domino - fixed
    complete = tuple(
        cycle
        for cycle in cycle_decomposition(perm).cycles
        if len(cycle) >= 2 and all(i in remaining for i in cycle)
    )
    incomplete = remaining - {i for cycle in complete for i in cycle}
    bound = (
        len(domino)
        + len(fixed)
        + sum(len(cycle) - 1 for cycle in complete)
        + max(len(incomplete) - 1, 0)
    )
    logging.debug(
        f"codim_account: seeds={seeds}, domino={sorted(domino)}, fixed={sorted(fixed)}, "
        f"cycles={[list(c) for c in complete]}, incomplete={sorted(incomplete)}, bound={bound}"
    )
    return CodimAccount(
        size=perm.size,
        kept_count=len(kept),
        domino=frozenset(domino),
        fixed=frozenset(fixed),
        complete_cycles=complete,
        incomplete=frozenset(incomplete),
        codim_bound=bound,
    )


def theorem2_bound(
    perm: SignedPermutation,
    rho1: CoordinateProjection,
    rho2: CoordinateProjection,
) -> int:
    """
    Dimension bound m - codim_bound for the pair (rho2 rho1 pi, rho2).

    Raises:
        BoundViolationError: if the bound exceeds m - floor(rank(rho2) / 2)
    """
    account = codim_account(perm, rho1, rho2)
    bound = account.dimension_bound
    limit = perm.size - rho2.rank // 2
    if bound > limit:
        logging.error(
            f"theorem2_bound: bound {bound} exceeds m - floor(rank/2) = {limit} "
            f"for perm={list(perm.perm)}, kept1={sorted(rho1.kept)}, kept2={sorted(rho2.kept)}"
        )
        raise BoundViolationError(f"dimension bound {bound} exceeds {limit}")
    return bound


def single_permutation(pi1: SignedPermutation, pi2: SignedPermutation) -> SignedPermutation:
    """
    pi = pi1 * pi2^-1.

    The substitution v = pi2^-1 u turns (rho2 rho1 pi1, rho2 pi2) into
    (rho2 rho1 pi, rho2).
    """
    return pi1.compose(pi2.inverse())


def codim_account_enumeration(
    size: int,
    start: int = 0,
    stop: int = None,
) -> Iterator[Tuple[SignedPermutation, CoordinateProjection, CoordinateProjection]]:
    """
    Every (pi, rho1, rho2) on [0, size): permutations in lexicographic order,
    kept sets by bitmask ascending. `start`/`stop` slice the permutation range.
    """
    projections = list(CoordinateProjection.all_with_rank_at_least(size, 0))
    for image in islice(permutations(range(size)), start, stop):
        perm = SignedPermutation(size, image)
        for rho1 in projections:
            for rho2 in projections:
                yield perm, rho1, rho2


def _sign_patterns(size: int, samples: int, rng: random.Random) -> List[Tuple[int, ...]]:
    total = 2 ** size
    if samples >= total:
        return list(product((1, -1), repeat=size))
    return [tuple(-1 if index >> bit & 1 else 1 for bit in range(size)) for index in rng.sample(range(total), samples)]


def _check_range(size: int, start: int, stop: int, sign_samples: int = 0, seed: int = 0) -> Tuple[int, List[dict]]:
    checked, failures = 0, []
    for perm, rho1, rho2 in codim_account_enumeration(size, start, stop):
        checked += 1
        account = codim_account(perm, rho1, rho2)
        failure = None
        if account.codim_bound < rho2.rank // 2:
            failure = {"codim_bound": account.codim_bound}
        elif sign_samples:
            rng = random.Random(f"{seed}:{perm.perm}:{sorted(rho1.kept)}:{sorted(rho2.kept)}")
            for signs in _sign_patterns(size, sign_samples, rng):
                if codim_account(perm.with_signs(signs), rho1, rho2) != account:
                    failure = {"codim_bound": account.codim_bound, "signs": list(signs)}
                    break
        if failure is not None:
            failures.append({
                "perm": list(perm.perm),
                "kept1": sorted(rho1.kept),
                "kept2": sorted(rho2.kept),
                **failure,
            })
    return checked, failures


def check_bound_invariant(
    size: int,
    jobs: int = 1,
    sign_samples: int = 0,
    seed: int = 0,
) -> Tuple[int, List[dict]]:
    """
    Exhaustively check codim_bound >= floor(|I2| / 2) for every
    (pi, rho1, rho2) on [0, size).

    With `sign_samples`, every triple is also re-accounted under that many
    distinct sign patterns on pi (all 2^size of them when fewer exist); each
    must give the unsigned account back.

    Work is split into disjoint permutation index ranges, one per worker.

    Returns:
        (number of triples checked, list of failing triples)
    """
    total = factorial(size)
    jobs = max(1, min(jobs, total))
    step = -(-total // jobs)
    ranges = [(start, min(start + step, total)) for start in range(0, total, step)]
    if jobs == 1:
        results = [_check_range(size, start, stop, sign_samples, seed) for start, stop in ranges]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                _check_range, [size] * len(ranges), *zip(*ranges),
                [sign_samples] * len(ranges), [seed] * len(ranges),
            ))
    checked = sum(r[0] for r in results)
    failures = [f for r in results for f in r[1]]
    logging.info(
        f"check_bound_invariant: m={size}, checked={checked}, sign_samples={sign_samples}, "
        f"failures={len(failures)}"
    )
    return checked, failures

"""
Uniqueness certifiers.

Each certifier checks the hypotheses of one uniqueness result exactly and
returns a UniquenessCertificate. A failed hypothesis yields `undecided`, never
`refuted`: only refute_by_sampling refutes, and only with a concrete
(v1, v2) pair attached.

Routes:
- certify_prop5: single endomorphism, multiplicities outside {1} (or {1, -1})
- certify_thm1: pair (T1, T2) through the reduction to tau_H on a random
  complement H of ker(T2)
- certify_thm2 / certify_cor3: (signed) permutations composed with
  coordinate projections, through the codimension account
- certify_prop4: uniqueness at a general point of V
"""
import random
from fractions import Fraction
from typing import List, Optional, Tuple

from bittensor.utils.btlogging import logging

from homsense.constants import DEFAULT_SAMPLE_BOUND
from homsense.construct import construct_general
from homsense.domain.certificate import EndoPair, Route, SignMode, UniquenessCertificate, Verdict, vector_to_json
from homsense.domain.config import SamplingConfig, get_default_sampling_config
from homsense.domain.matrix import RationalMatrix, Vector
from homsense.domain.permutation import CoordinateProjection, SignedPermutation
from homsense.errors import HomsenseError, HypothesisError, SamplingError, ShapeMismatchError
from homsense.exactalg import rank, rref, solve_exact
from homsense.permcodim import codim_account, single_permutation, theorem2_bound
from homsense.sensing import collision_solve, point_collision_solve, random_subspace
from homsense.structure import geometric_multiplicities, max_multiplicity_in_report


def _excluded_json(sign_mode: SignMode) -> List[str]:
    return sorted(str(value) for value in sign_mode.excluded_eigenvalues)


def _certificate(verdict: Verdict, route: Route, m: int, n: int, sign_mode: SignMode, **evidence):
    return UniquenessCertificate(verdict=verdict, route=route, m=m, n=n, sign_mode=sign_mode, evidence=evidence)


# Single endomorphism

def certify_prop5(matrix: RationalMatrix, n: int, sign_mode: SignMode = SignMode.PLAIN) -> UniquenessCertificate:
    """
    Certify uniqueness for (T, id) on a general n-dimensional V.

    Certified iff every eigenvalue outside the excluded set has geometric
    multiplicity at most m - n.

    Args:
        matrix: Square T
        n: Subspace dimension
        sign_mode: PLAIN excludes {1}, PLUS_MINUS excludes {1, -1}

    Raises:
        NonSquareMatrixError: for rectangular T
        HypothesisError: when n < 1 or m < 2n
    """
    matrix.require_square("T")
    m = matrix.rows
    if n < 1 or m < 2 * n:
        raise HypothesisError(f"certify_prop5 needs n >= 1 and m >= 2n, got m={m}, n={n}")

    report = geometric_multiplicities(matrix)
    excluded_max = max_multiplicity_in_report(report, sign_mode.excluded_eigenvalues)
    limit = m - n
    evidence = {
        "multiplicities": report.to_dict(),
        "excluded": _excluded_json(sign_mode),
        "excluded_max": excluded_max,
        "limit": limit,
    }
    if excluded_max > limit:
        logging.info(f"certify_prop5: excluded-max {excluded_max} > m - n = {limit}, undecided")
        return _certificate(Verdict.UNDECIDED, Route.PROP5_EIGEN, m, n, sign_mode,
                            reason=f"multiplicity {excluded_max} exceeds m - n = {limit}", **evidence)

    fixed_dim = report.multiplicity_of(Fraction(1))
    if fixed_dim >= n:
        evidence.update(branch="jordan_index", dim_E1=fixed_dim, index_set_size=n)
    else:
        evidence.update(branch="transversality", dim_E1=fixed_dim)
        try:
            witness = construct_general(matrix, n)
            evidence["witness"] = witness.to_dict()
        except HypothesisError as e:
            evidence["witness_skipped"] = str(e)
            logging.debug(f"certify_prop5: no explicit witness ({e})")
    logging.info(f"certify_prop5: certified (m={m}, n={n}, branch={evidence['branch']})")
    return _certificate(Verdict.CERTIFIED, Route.PROP5_EIGEN, m, n, sign_mode, **evidence)


# Pair reduction

def _image_projection(t2: RationalMatrix) -> Tuple[RationalMatrix, List[int]]:
    """
    Idempotent rho onto im(T2) along the span of the canonical vectors outside
    the pivot rows of the column echelon form of T2.
    """
    reduced, pivots, ell = rref(t2.transpose())
    echelon = reduced.transpose().select_columns(range(ell))
    selector = RationalMatrix.identity(t2.rows).select_rows(pivots)
    return echelon @ selector, pivots


def _sample_h(t2: RationalMatrix, ell: int, rng: random.Random, trials: int, bound: int) -> RationalMatrix:
    m = t2.cols
    for attempt in range(trials):
        h = RationalMatrix.from_rows(
            [[rng.randint(-bound, bound) for _ in range(ell)] for _ in range(m)],
            cols=ell,
        )
        if rank(t2 @ h) == ell:
            return h
        logging.debug(f"reduce_tauH: degenerate H on attempt {attempt + 1}")
    raise SamplingError(f"no H with H & ker(T2) = 0 in {trials} attempts")


def reduce_tauH(
    t1: RationalMatrix,
    t2: RationalMatrix,
    trials: int,
    seed: int,
    bound: int = DEFAULT_SAMPLE_BOUND,
) -> Tuple[RationalMatrix, RationalMatrix, RationalMatrix]:
    """
    Matrix of tau_H = (T2|_H)^-1 rho T1|_H on a random l-dimensional H.

    Args:
        t1: First endomorphism
        t2: Second endomorphism, rank l >= 1
        trials: Resampling attempts for a degenerate H
        seed: Seed of the H sampler
        bound: Entries of H uniform in [-bound, bound]

    Returns:
        (T_H as an l x l matrix, basis of H as m x l, rho as m x m)

    Raises:
        HypothesisError: when rank(T2) = 0
        SamplingError: when every sampled H meets ker(T2)
    """
    EndoPair(t1, t2)
    ell = rank(t2)
    if ell == 0:
        raise HypothesisError("reduce_tauH needs rank(T2) >= 1")
    rho, _ = _image_projection(t2)
    h = _sample_h(t2, ell, random.Random(seed), trials, bound)
    reduced = solve_exact(t2 @ h, rho @ t1 @ h)
    return reduced, h, rho


def certify_thm1(
    t1: RationalMatrix,
    t2: RationalMatrix,
    n: int,
    seed: int,
    sign_mode: SignMode = SignMode.PLAIN,
    config: Optional[SamplingConfig] = None,
) -> UniquenessCertificate:
    """
    Certify uniqueness for (T1, T2) on a general n-dimensional V.

    Rank gates rank(T2) >= 2n and rank(T1) >= n are checked exactly. The
    dimension hypothesis is replaced by its generic-section consequence:
    for config.samples independent H the multiplicities of tau_H outside the
    excluded set must stay at most l - n. All samples must agree.

    Raises:
        HypothesisError: when n < 1 or n > m / 2
    """
    config = config or get_default_sampling_config()
    m = EndoPair(t1, t2).size
    if n < 1 or 2 * n > m:
        raise HypothesisError(f"certify_thm1 needs 1 <= n <= m/2, got m={m}, n={n}")

    rank1, rank2 = rank(t1), rank(t2)
    evidence = {
        "rank_T1": rank1,
        "rank_T2": rank2,
        "excluded": _excluded_json(sign_mode),
        "note": "certifies the generic-section consequence of the dimension hypothesis, not dim U itself",
    }
    if rank2 < 2 * n:
        return _certificate(Verdict.UNDECIDED, Route.THM1_TAUH, m, n, sign_mode,
                            reason=f"rank(T2) = {rank2} < 2n = {2 * n}", **evidence)
    if rank1 < n:
        return _certificate(Verdict.UNDECIDED, Route.THM1_TAUH, m, n, sign_mode,
                            reason=f"rank(T1) = {rank1} < n = {n}", **evidence)

    limit = rank2 - n
    samples = []
    try:
        for offset in range(config.samples):
            sample_seed = seed + offset
            reduced, h, _ = reduce_tauH(t1, t2, config.trials, sample_seed, config.bound)
            report = geometric_multiplicities(reduced)
            excluded_max = max_multiplicity_in_report(report, sign_mode.excluded_eigenvalues)
            samples.append({
                "seed": sample_seed,
                "excluded_max": excluded_max,
                "holds": excluded_max <= limit,
                "multiplicities": report.to_dict(),
                "H": h.to_json(),
            })
    except SamplingError as e:
        logging.warning(f"certify_thm1: {e}")
        return _certificate(Verdict.UNDECIDED, Route.THM1_TAUH, m, n, sign_mode,
                            reason=str(e), samples=samples, limit=limit, **evidence)

    outcomes = {sample["holds"] for sample in samples}
    evidence.update(limit=limit, samples=samples)
    if outcomes == {True}:
        logging.info(f"certify_thm1: certified over {len(samples)} H samples (limit {limit})")
        return _certificate(Verdict.CERTIFIED, Route.THM1_TAUH, m, n, sign_mode, **evidence)
    if len(outcomes) > 1:
        logging.warning("certify_thm1: H samples disagree, undecided")
        return _certificate(Verdict.UNDECIDED, Route.THM1_TAUH, m, n, sign_mode,
                            reason="H samples disagree", **evidence)
    return _certificate(Verdict.UNDECIDED, Route.THM1_TAUH, m, n, sign_mode,
                        reason=f"tau_H multiplicity exceeds l - n = {limit}", **evidence)


# Permutations and projections

def _certify_permutation(
    pi1: SignedPermutation,
    pi2: SignedPermutation,
    rho1: CoordinateProjection,
    rho2: CoordinateProjection,
    n: int,
    route: Route,
    sign_mode: SignMode,
) -> UniquenessCertificate:
    sizes = {pi1.size, pi2.size, rho1.size, rho2.size}
    if len(sizes) != 1:
        raise ShapeMismatchError(f"sizes differ: pi1={pi1.size}, pi2={pi2.size}, rho1={rho1.size}, rho2={rho2.size}")
    if n < 1:
        raise HypothesisError(f"n must be at least 1, got {n}")
    m = pi1.size

    # u = pi2 v turns (rho1 pi1, rho2 pi2) into (rho1 pi, rho2)
    pi = single_permutation(pi1, pi2)
    account = codim_account(pi, rho1, rho2)
    bound = theorem2_bound(pi, rho1, rho2)
    inner_rank = len(rho1.kept & rho2.kept)
    evidence = {
        "account": account.to_dict(),
        "composite_perm": list(pi.perm),
        "rank_rho1": rho1.rank,
        "rank_rho2": rho2.rank,
        "rank_rho2_rho1_pi1": inner_rank,
        "dimension_bound": bound,
        "limit": m - n,
        "excluded": _excluded_json(sign_mode),
    }
    gates = [
        (rho2.rank >= 2 * n, f"rank(rho2) = {rho2.rank} < 2n = {2 * n}"),
        (inner_rank >= n, f"rank(rho2 rho1 pi1) = {inner_rank} < n = {n}"),
        (bound <= m - n, f"dimension bound {bound} > m - n = {m - n}"),
    ]
    failed = [reason for holds, reason in gates if not holds]
    if failed:
        logging.info(f"{route.value}: undecided ({failed[0]})")
        return _certificate(Verdict.UNDECIDED, route, m, n, sign_mode, reason=failed[0], **evidence)
    logging.info(f"{route.value}: certified (m={m}, n={n}, bound={bound})")
    return _certificate(Verdict.CERTIFIED, route, m, n, sign_mode, **evidence)


def certify_thm2(
    pi1: SignedPermutation,
    pi2: SignedPermutation,
    rho1: CoordinateProjection,
    rho2: CoordinateProjection,
    n: int,
) -> UniquenessCertificate:
    """
    Certify uniqueness for (rho1 pi1, rho2 pi2) on a general n-dimensional V.

    Signed input (any sign -1) is handed to certify_cor3, which identifies
    v1 with +/- v2.

    Raises:
        ShapeMismatchError: when the sizes differ
    """
    if not (pi1.is_unsigned and pi2.is_unsigned):
        return certify_cor3(pi1, pi2, rho1, rho2, n)
    return _certify_permutation(pi1, pi2, rho1, rho2, n, Route.THM2_PERMUTATION, SignMode.PLAIN)


def certify_cor3(
    pi1: SignedPermutation,
    pi2: SignedPermutation,
    rho1: CoordinateProjection,
    rho2: CoordinateProjection,
    n: int,
) -> UniquenessCertificate:
    """Signed variant of certify_thm2: certifies v1 = v2 or v1 = -v2."""
    return _certify_permutation(pi1, pi2, rho1, rho2, n, Route.COR3_SIGNED, SignMode.PLUS_MINUS)


# General point

def _independent_images(t1: RationalMatrix, t2: RationalMatrix, seed: int, attempts: int = 32) -> Optional[Vector]:
    m = t1.cols
    units = [tuple(Fraction(int(i == j)) for i in range(m)) for j in range(m)]
    candidates = list(units)
    candidates += [tuple(a + b for a, b in zip(units[i], units[j])) for i in range(m) for j in range(i + 1, m)]
    rng = random.Random(seed)
    candidates += [tuple(Fraction(rng.randint(-10, 10)) for _ in range(m)) for _ in range(attempts)]
    for v in candidates:
        images = RationalMatrix.from_columns([t1.apply(v), t2.apply(v)], rows=t1.rows)
        if rank(images) == 2:
            return v
    return None


def _general_point_witness(t1: RationalMatrix, t2: RationalMatrix, n: int, v: Vector) -> Tuple[RationalMatrix, int]:
    """
    V = V1 + span(v) with T1(V1) independent of span(T1 v, T2 v), so that
    rank([T1 A | T2 v]) = n + 1 where v is the last column of A.
    """
    m = t1.rows
    columns = [t1.apply(v), t2.apply(v)]
    current = rank(RationalMatrix.from_columns(columns, rows=m))
    chosen: List[int] = []
    for j in range(m):
        if len(chosen) == n - 1:
            break
        trial = columns + [t1.column(j)]
        trial_rank = rank(RationalMatrix.from_columns(trial, rows=m))
        if trial_rank > current:
            columns, current = trial, trial_rank
            chosen.append(j)
    if len(chosen) < n - 1:
        raise HomsenseError(f"found only {len(chosen)} of {n - 1} directions of im(T1) independent of the images of v")
    units = [tuple(Fraction(int(i == j)) for i in range(m)) for j in chosen]
    basis = RationalMatrix.from_columns(units + [v], rows=m)
    last = RationalMatrix.from_columns([t2.apply(v)], rows=m)
    return basis, rank((t1 @ basis).hstack(last))


def certify_prop4(t1: RationalMatrix, t2: RationalMatrix, n: int, seed: int = 0) -> UniquenessCertificate:
    """
    Certify that a general point v of a general V has no other preimage:
    T1 v = T2 v' with v' in V only if v' = v.

    Certified iff rank(T1) >= n + 1, rank(T2) >= n + 1 and T1 is not a scalar
    multiple of T2. Evidence carries an explicit V and v with
    rank([T1 A | T2 v]) = n + 1.
    """
    m = EndoPair(t1, t2).size
    rank1, rank2 = rank(t1), rank(t2)
    evidence = {"rank_T1": rank1, "rank_T2": rank2, "required_rank": n + 1}
    for name, value in (("T1", rank1), ("T2", rank2)):
        if value < n + 1:
            return _certificate(Verdict.UNDECIDED, Route.PROP4_GENERAL_POINT, m, n, SignMode.PLAIN,
                                reason=f"rank({name}) = {value} < n + 1 = {n + 1}", **evidence)

    anchor = next(k for k, x in enumerate(t2.entries) if x != 0)
    ratio = t1.entries[anchor] / t2.entries[anchor]
    if t1 == t2.scale(ratio):
        return _certificate(Verdict.UNDECIDED, Route.PROP4_GENERAL_POINT, m, n, SignMode.PLAIN,
                            reason=f"T1 = {ratio} * T2", scalar_ratio=str(ratio), **evidence)

    v = _independent_images(t1, t2, seed)
    if v is None:
        return _certificate(Verdict.UNDECIDED, Route.PROP4_GENERAL_POINT, m, n, SignMode.PLAIN,
                            reason="no v found with T1 v and T2 v independent", **evidence)
    evidence["v"] = vector_to_json(v)
    if n >= 1:
        basis, witness_rank = _general_point_witness(t1, t2, n, v)
        xi = tuple(Fraction(int(i == n - 1)) for i in range(n))
        collisions = point_collision_solve(t2, t1, basis, xi)
        evidence.update(
            witness_basis=basis.to_json(),
            witness_rank=witness_rank,
            point_collisions=len(collisions),
        )
        if witness_rank != n + 1 or collisions:
            logging.error(f"certify_prop4: witness rank {witness_rank}, {len(collisions)} point collisions")
            return _certificate(Verdict.UNDECIDED, Route.PROP4_GENERAL_POINT, m, n, SignMode.PLAIN,
                                reason="witness check failed", **evidence)
    logging.info(f"certify_prop4: certified (m={m}, n={n})")
    return _certificate(Verdict.CERTIFIED, Route.PROP4_GENERAL_POINT, m, n, SignMode.PLAIN, **evidence)


# Refutation

def refute_by_sampling(
    t1: RationalMatrix,
    t2: RationalMatrix,
    n: int,
    route: Route,
    sign_mode: SignMode = SignMode.PLAIN,
    seed: int = 0,
    config: Optional[SamplingConfig] = None,
) -> UniquenessCertificate:
    """
    Search for a counterexample on random V.

    A general-V claim fails only if a whole dense set of V collides, so the
    verdict is `refuted` when every sampled V shows a violation; the first
    (v1, v2) is attached. Otherwise `undecided`.
    """
    config = config or get_default_sampling_config()
    m = t1.rows
    if config.refute_samples < 1:
        return _certificate(Verdict.UNDECIDED, route, m, n, sign_mode, reason="no V samples requested")
    first: Optional[Tuple[Vector, Vector]] = None
    for offset in range(config.refute_samples):
        basis = random_subspace(m, n, config.bound, seed + offset)
        collisions = collision_solve(t1, t2, basis, sign_mode)
        if not collisions:
            logging.info(f"refute_by_sampling: V sample {offset} has no collision, undecided")
            return _certificate(Verdict.UNDECIDED, route, m, n, sign_mode,
                                reason=f"sampled V {offset} shows no collision", refute_samples=offset + 1)
        first = first or collisions[0]
    logging.info(f"refute_by_sampling: all {config.refute_samples} sampled V collide, refuted")
    return UniquenessCertificate(
        verdict=Verdict.REFUTED,
        route=route,
        m=m,
        n=n,
        sign_mode=sign_mode,
        evidence={"refute_samples": config.refute_samples},
        counterexample=first,
    )

"""
Desk-scale ground truth for uniqueness claims.

collision_solve decides, for one pair (tau1, tau2) and a basis A of V, whether
tau1(v1) = tau2(v2) with v1, v2 in V forces v1 = v2 (or v1 = +/- v2): it
solves [T1 A | -T2 A] (xi1; xi2) = 0 and checks that the null space lies in
the diagonal {xi1 = xi2} (or in one of the diagonal / anti-diagonal).

exhaustive_oracle runs collision_solve over every pair of a class. With
symmetry reduction on, both maps are left-multiplied by the inverse of the
second signed permutation, which leaves every collision unchanged; the
enumeration then fixes pi2 = id with all signs on tau1, and each solved
system stands for |G| pairs of the class (G = permutations, or signed
permutations for the signed kinds).
"""
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice, permutations, product
from math import factorial
from typing import List, Optional, Sequence, Tuple

from bittensor.utils.btlogging import logging

from homsense.constants import DEFAULT_SUBSPACE_ATTEMPTS
from homsense.domain.certificate import SignMode
from homsense.domain.config import OracleConfig, get_default_oracle_config
from homsense.domain.instance import ClassKind, ClassSpec, CollisionReport, SensingInstance, Violation
from homsense.domain.matrix import RationalMatrix, Vector
from homsense.errors import BudgetExceededError, SamplingError, ShapeMismatchError
from homsense.exactalg import inverse, kernel_basis, nullity_mod_p, rank, rref

Collision = Tuple[Vector, Vector]


# Instance generation

def _random_integer_matrix(rng: random.Random, rows: int, cols: int, bound: int) -> RationalMatrix:
    return RationalMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)],
        cols=cols,
    )


def random_subspace(m: int, n: int, bound: int, seed: int) -> RationalMatrix:
    """
    m x n integer matrix of full column rank, entries uniform in [-bound, bound].

    Raises:
        ShapeMismatchError: when n > m
        SamplingError: when every attempt is rank deficient
    """
    if n > m:
        raise ShapeMismatchError(f"cannot sample a {n}-dimensional subspace of Q^{m}")
    if bound < 1:
        raise SamplingError(f"entry bound must be at least 1, got {bound}")
    rng = random.Random(seed)
    for attempt in range(DEFAULT_SUBSPACE_ATTEMPTS):
        basis = _random_integer_matrix(rng, m, n, bound)
        if rank(basis) == n:
            if attempt:
                logging.debug(f"random_subspace: full rank after {attempt + 1} draws (m={m}, n={n})")
            return basis
    raise SamplingError(f"no full-rank {m}x{n} draw in {DEFAULT_SUBSPACE_ATTEMPTS} attempts")


def random_unimodular(size: int, rng: random.Random, steps: Optional[int] = None) -> RationalMatrix:
    """Integer matrix of determinant 1 built from random elementary row additions."""
    rows = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    if size < 2:
        return RationalMatrix.from_rows(rows, cols=size)
    for _ in range(steps if steps is not None else 2 * size):
        target, source = rng.sample(range(size), 2)
        factor = rng.choice((-2, -1, 1, 2))
        rows[target] = [a + factor * b for a, b in zip(rows[target], rows[source])]
    return RationalMatrix.from_rows(rows, cols=size)


def conjugated_jordan(blocks: Sequence[Tuple[Fraction, int]], rng: random.Random) -> RationalMatrix:
    """U J U^-1 for J the direct sum of Jordan blocks (eigenvalue, size) and a random unimodular U."""
    jordan = RationalMatrix.block_diag(RationalMatrix.jordan_block(value, size) for value, size in blocks)
    change = random_unimodular(jordan.rows, rng)
    return change @ jordan @ inverse(change)


JordanBlocks = List[Tuple[Fraction, int]]


def _eigenvalues(rng: random.Random, count: int, avoid: Sequence[Fraction] = ()) -> List[Fraction]:
    pool = [Fraction(k, d) for k in range(-4, 5) for d in (1, 2) if Fraction(k, d) not in avoid]
    return rng.sample(sorted(set(pool)), count)


def _split_into_blocks(rng: random.Random, dim: int, values: List[Fraction], cap: int) -> JordanBlocks:
    """Random blocks of total size dim, each value used for at most cap blocks."""
    blocks: JordanBlocks = []
    used = {value: 0 for value in values}
    remaining = dim
    while remaining:
        open_values = [v for v in values if used[v] < cap]
        value = rng.choice(open_values)
        size = rng.randint(1, remaining)
        blocks.append((value, size))
        used[value] += 1
        remaining -= size
    return blocks


def random_regime_blocks(regime: str, rng: random.Random, max_dim: int = 10) -> Tuple[JordanBlocks, int]:
    """
    Jordan data (blocks, n) satisfying the hypotheses of one witness regime.

    boundary: m = 2n and one eigenvalue with exactly n blocks
    half: m = 2n and every eigenvalue with at most n blocks
    general: m >= 2n and every eigenvalue with at most m - n blocks
    """
    if regime == "boundary":
        n = rng.randint(1, max_dim // 2)
        ones = rng.randint(0, n)
        value = _eigenvalues(rng, 1)[0]
        spare = ones
        blocks: JordanBlocks = [(value, 1)] * ones
        for _ in range(n - ones):
            extra = rng.randint(0, spare) if ones else 0
            spare -= extra
            blocks.append((value, 2 + extra))
        if spare:
            blocks += _split_into_blocks(rng, spare, _eigenvalues(rng, 3, avoid=[value]), spare)
        return blocks, n
    if regime == "half":
        n = rng.randint(1, max_dim // 2)
        return _split_into_blocks(rng, 2 * n, _eigenvalues(rng, 3), n), n
    if regime == "general":
        m = rng.randint(2, max_dim)
        n = rng.randint(1, m // 2)
        return _split_into_blocks(rng, m, _eigenvalues(rng, 3), m - n), n
    raise ValueError(f"unknown regime '{regime}'")


# Collision systems

def _split(vector: Vector, n: int) -> Tuple[Vector, Vector]:
    return vector[:n], vector[n:]


def _in_diagonal(vector: Vector, n: int, sign: int) -> bool:
    first, second = _split(vector, n)
    return all(a == sign * b for a, b in zip(first, second))


def _collisions_from_products(
    left: RationalMatrix,
    right: RationalMatrix,
    basis: RationalMatrix,
    sign_mode: SignMode,
    fast_path: bool = True,
) -> List[Collision]:
    """Violations of T1 A xi1 = T2 A xi2 given left = T1 A and right = T2 A."""
    n = basis.cols
    system = left.hstack(-right)
    if fast_path and nullity_mod_p(system) == 0:
        return []
    kernel = kernel_basis(system).columns()
    if not kernel:
        return []

    on_diagonal = [_in_diagonal(b, n, 1) for b in kernel]
    if all(on_diagonal):
        return []
    if sign_mode is SignMode.PLUS_MINUS:
        on_anti = [_in_diagonal(b, n, -1) for b in kernel]
        if all(on_anti):
            return []
        outside = next((b for b, d, a in zip(kernel, on_diagonal, on_anti) if not d and not a), None)
        if outside is None:
            diagonal_vector = kernel[on_diagonal.index(True)]
            anti_vector = kernel[on_anti.index(True)]
            outside = tuple(a + b for a, b in zip(diagonal_vector, anti_vector))
        representative = outside
    else:
        representative = kernel[on_diagonal.index(False)]

    xi1, xi2 = _split(representative, n)
    return [(basis.apply(xi1), basis.apply(xi2))]


def collision_solve(
    t1: RationalMatrix,
    t2: RationalMatrix,
    basis: RationalMatrix,
    sign_mode: SignMode = SignMode.PLAIN,
) -> List[Collision]:
    """
    Pairs (v1, v2) in V with T1 v1 = T2 v2 that break the identification.

    Args:
        t1: First map (m' x m)
        t2: Second map (m' x m)
        basis: m x n basis A of V
        sign_mode: PLAIN requires v1 = v2, PLUS_MINUS allows v1 = -v2

    Returns:
        Empty list when every collision is identified, otherwise one
        representative (A xi1, A xi2)

    Raises:
        ShapeMismatchError: when the shapes are incompatible
    """
    if t1.shape != t2.shape or t1.cols != basis.rows:
        raise ShapeMismatchError(f"T1 {t1.shape}, T2 {t2.shape} and basis {basis.shape} do not fit")
    return _collisions_from_products(t1 @ basis, t2 @ basis, basis, sign_mode)


def point_collision_solve(
    t1: RationalMatrix,
    t2: RationalMatrix,
    basis: RationalMatrix,
    xi: Sequence[Fraction],
) -> List[Collision]:
    """
    Collisions at the point v = A xi: every eta with T2 A eta = T1 A xi must
    equal xi. Returns one (v, v') with v' != v when that fails.
    """
    if t1.shape != t2.shape or t1.cols != basis.rows or len(xi) != basis.cols:
        raise ShapeMismatchError("point_collision_solve: incompatible shapes")
    xi = tuple(Fraction(x) for x in xi)
    image = RationalMatrix.from_columns([(t1 @ basis).apply(xi)], rows=t1.rows)
    right = t2 @ basis
    reduced, pivots, _ = rref(right.hstack(image))
    if basis.cols in pivots:
        return []
    eta = [Fraction(0)] * basis.cols
    for row, col in enumerate(pivots):
        eta[col] = reduced[row, basis.cols]
    eta = tuple(eta)
    if eta == xi:
        kernel = kernel_basis(right).columns()
        if not kernel:
            return []
        eta = tuple(a + b for a, b in zip(eta, kernel[0]))
    return [(basis.apply(xi), basis.apply(eta))]


# Exhaustive oracle

def _signed_projection_rows(
    perm: Tuple[int, ...],
    signs: Tuple[int, ...],
    kept: frozenset,
    basis_rows: List[Tuple[Fraction, ...]],
) -> RationalMatrix:
    """rho * Sigma * Pi * A without forming the m x m matrices."""
    size = len(perm)
    width = len(basis_rows[0]) if basis_rows else 0
    rows = [(Fraction(0),) * width] * size
    for i, target in enumerate(perm):
        if target in kept:
            sign = signs[target]
            rows[target] = basis_rows[i] if sign == 1 else tuple(-x for x in basis_rows[i])
    return RationalMatrix(size, width, tuple(x for row in rows for x in row))


def _kept_sets(size: int, minimum: int) -> List[frozenset]:
    return [
        frozenset(i for i in range(size) if mask >> i & 1)
        for mask in range(1 << size)
        if bin(mask).count("1") >= minimum
    ]


def _describe(perm, signs, kept) -> dict:
    return {"perm": list(perm), "signs": list(signs), "kept": sorted(kept)}


@dataclass(frozen=True)
class _OracleTask:
    basis: RationalMatrix
    sign_mode: SignMode
    signs: Tuple[Tuple[int, ...], ...]
    kept1: Tuple[frozenset, ...]
    kept2: Tuple[frozenset, ...]
    reduce_symmetry: bool
    start: int
    stop: int
    trial: int


def _run_oracle_task(task: _OracleTask) -> Tuple[List[Violation], int]:
    size = task.basis.rows
    basis_rows = [task.basis.row(i) for i in range(size)]
    identity = tuple(range(size))
    plus = (1,) * size
    second_maps = (
        [(identity, plus)]
        if task.reduce_symmetry
        else [(p, s) for p in permutations(range(size)) for s in task.signs]
    )
    violations: List[Violation] = []
    solved = 0
    for perm1 in islice(permutations(range(size)), task.start, task.stop):
        for signs1 in task.signs:
            for perm2, signs2 in second_maps:
                for kept1 in task.kept1:
                    left = _signed_projection_rows(perm1, signs1, kept1, basis_rows)
                    for kept2 in task.kept2:
                        right = _signed_projection_rows(perm2, signs2, kept2, basis_rows)
                        solved += 1
                        for v1, v2 in _collisions_from_products(left, right, task.basis, task.sign_mode):
                            violations.append(Violation(
                                tau1=_describe(perm1, signs1, kept1),
                                tau2=_describe(perm2, signs2, kept2),
                                v1=v1,
                                v2=v2,
                                trial=task.trial,
                            ))
    return violations, solved


def _plan_signs(inst: SensingInstance, config: OracleConfig) -> Tuple[Tuple[int, ...], ...]:
    size = inst.m
    spec = inst.class_spec
    if not spec.kind.is_signed:
        return ((1,) * size,)
    every = tuple(product((1, -1), repeat=size))
    if _systems(inst, len(every), config.reduce_symmetry) <= config.budget:
        return every
    # distinct patterns, without replacement
    rng = random.Random(config.seed)
    sampled = tuple(every[index] for index in rng.sample(range(len(every)), min(config.sign_samples, len(every))))
    logging.warning(
        f"exhaustive_oracle: {len(every)} sign patterns exceed the budget, sampling {len(sampled)}"
    )
    return sampled


def _kept_counts(inst: SensingInstance) -> Tuple[int, int]:
    spec = inst.class_spec
    if not spec.kind.has_projections:
        return 1, 1
    return len(_kept_sets(inst.m, spec.r1)), len(_kept_sets(inst.m, spec.r2))


def _systems(inst: SensingInstance, sign_patterns: int, reduce_symmetry: bool) -> int:
    kept1, kept2 = _kept_counts(inst)
    first = factorial(inst.m) * sign_patterns
    second = 1 if reduce_symmetry else first
    return first * second * kept1 * kept2


def _group_order(inst: SensingInstance) -> int:
    signs = 2 ** inst.m if inst.class_spec.kind.is_signed else 1
    return factorial(inst.m) * signs


def exhaustive_oracle(
    inst: SensingInstance,
    config: Optional[OracleConfig] = None,
    trial: int = 0,
) -> CollisionReport:
    """
    Run collision_solve over every (tau1, tau2) of the instance's class.

    Args:
        inst: Instance with basis A of V and the class to enumerate
        config: Oracle settings (budget, jobs, symmetry reduction, sign sampling)
        trial: Index recorded on each violation

    Returns:
        CollisionReport over the whole class

    Raises:
        BudgetExceededError: when the enumeration would exceed config.budget
    """
    config = config or get_default_oracle_config()
    spec = inst.class_spec

    if spec.kind is ClassKind.ENDO_PAIR:
        collisions = collision_solve(spec.t1, spec.t2, inst.basis, inst.sign_mode)
        violations = tuple(
            Violation(tau1={"map": "T1"}, tau2={"map": "T2"}, v1=v1, v2=v2, trial=trial)
            for v1, v2 in collisions
        )
        return CollisionReport(violations, 1, 1, inst.sign_mode, parameters=_parameters(inst))

    signs = _plan_signs(inst, config)
    systems = _systems(inst, len(signs), config.reduce_symmetry)
    if systems > config.budget:
        raise BudgetExceededError(systems, config.budget)

    size = inst.m
    kept1 = tuple(_kept_sets(size, spec.r1)) if spec.kind.has_projections else (frozenset(range(size)),)
    kept2 = tuple(_kept_sets(size, spec.r2)) if spec.kind.has_projections else (frozenset(range(size)),)
    total = factorial(size)
    jobs = max(1, min(config.jobs, total))
    step = -(-total // jobs)
    tasks = [
        _OracleTask(inst.basis, inst.sign_mode, signs, kept1, kept2, config.reduce_symmetry,
                    start, min(start + step, total), trial)
        for start in range(0, total, step)
    ]
    if jobs == 1:
        results = [_run_oracle_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_oracle_task, tasks))

    violations = tuple(v for found, _ in results for v in found)
    solved = sum(count for _, count in results)
    pairs = solved * _group_order(inst) if config.reduce_symmetry else solved
    logging.debug(
        f"exhaustive_oracle: m={size}, n={inst.n}, class={spec.kind.value}, "
        f"systems={solved}, pairs={pairs}, violations={len(violations)}"
    )
    return CollisionReport(violations, pairs, solved, inst.sign_mode, parameters=_parameters(inst))


def _parameters(inst: SensingInstance) -> dict:
    return {"m": inst.m, "n": inst.n, "class": inst.class_spec.to_json()}


def _trial_seed(seed: int, trial: int, attempt: int) -> int:
    return (seed * 1_000_003 + trial) * 101 + attempt


def resample_oracle(
    inst: SensingInstance,
    seed: int,
    trial: int = 0,
    config: Optional[OracleConfig] = None,
) -> CollisionReport:
    """
    exhaustive_oracle on `inst`, redrawing V up to config.retries times while
    it shows violations.

    A clean redraw marks the first V as non-generic and drops its violations;
    otherwise the violations of the first V are reported. Redraws are seeded
    from (seed, trial, attempt) with attempt >= 1.
    """
    config = config or get_default_oracle_config()
    attempts = [exhaustive_oracle(inst, config, trial=trial)]
    while not attempts[-1].is_clean and len(attempts) <= config.retries:
        basis = random_subspace(inst.m, inst.n, config.bound, _trial_seed(seed, trial, len(attempts)))
        redrawn = SensingInstance(m=inst.m, n=inst.n, basis=basis,
                                  class_spec=inst.class_spec, sign_mode=inst.sign_mode)
        attempts.append(exhaustive_oracle(redrawn, config, trial=trial))

    first = attempts[0]
    if attempts[-1].is_clean and len(attempts) > 1:
        logging.warning(
            f"oracle_sweep: trial {trial} drew a non-generic V ({len(first.violations)} violations), "
            f"clean after {len(attempts) - 1} resample(s)"
        )
        violations = ()
    else:
        violations = first.violations
        if violations:
            logging.error(f"oracle_sweep: trial {trial} keeps violating after {config.retries} resamples")
    return CollisionReport(
        violations=violations,
        pairs_checked=first.pairs_checked,
        systems_solved=sum(a.systems_solved for a in attempts),
        sign_mode=inst.sign_mode,
        trials=1,
        resamples=len(attempts) - 1,
        parameters=first.parameters,
    )


def _sweep_trial(
    m: int,
    n: int,
    class_spec: ClassSpec,
    sign_mode: SignMode,
    seed: int,
    trial: int,
    config: OracleConfig,
) -> CollisionReport:
    basis = random_subspace(m, n, config.bound, _trial_seed(seed, trial, 0))
    inst = SensingInstance(m=m, n=n, basis=basis, class_spec=class_spec, sign_mode=sign_mode)
    return resample_oracle(inst, seed, trial, config)


def oracle_sweep(
    m: int,
    n: int,
    class_spec: ClassSpec,
    trials: int,
    seed: int,
    config: Optional[OracleConfig] = None,
    sign_mode: Optional[SignMode] = None,
) -> CollisionReport:
    """
    exhaustive_oracle over `trials` random V.

    A V that shows violations is resampled up to config.retries times. A clean
    resample marks the first draw as non-generic and drops its violations;
    otherwise the violations of the first draw are reported. `resamples`
    counts the extra draws.
    """
    config = config or get_default_oracle_config()
    sign_mode = sign_mode or class_spec.default_sign_mode()
    report = CollisionReport((), 0, 0, sign_mode, trials=0, parameters={
        "m": m, "n": n, "class": class_spec.to_json(),
    })
    for trial in range(trials):
        report = report.merged(_sweep_trial(m, n, class_spec, sign_mode, seed, trial, config))
    logging.info(
        f"oracle_sweep: trials={report.trials}, pairs_checked={report.pairs_checked}, "
        f"systems_solved={report.systems_solved}, violations={len(report.violations)}, "
        f"resamples={report.resamples}"
    )
    return report


def point_oracle(
    t1: RationalMatrix,
    t2: RationalMatrix,
    n: int,
    trials: int,
    seed: int,
    config: Optional[OracleConfig] = None,
) -> CollisionReport:
    """
    Endo-pair oracle at a general point: per trial, a random V and a random
    xi with nonzero entries, then point_collision_solve at v = A xi.

    A draw with a collision is redrawn up to config.retries times, as in
    oracle_sweep.
    """
    config = config or get_default_oracle_config()
    spec = ClassSpec(ClassKind.ENDO_PAIR, t1=t1, t2=t2)
    report = CollisionReport((), 0, 0, SignMode.PLAIN, trials=0, parameters={
        "m": t1.rows, "n": n, "class": spec.to_json(), "point": True,
    })
    for trial in range(trials):
        found = []
        for attempt in range(config.retries + 1):
            rng = random.Random(_trial_seed(seed, trial, attempt))
            basis = random_subspace(t1.rows, n, config.bound, rng.randrange(2 ** 31))
            xi = [Fraction(rng.choice((1, -1)) * rng.randint(1, config.bound)) for _ in range(n)]
            found.append(point_collision_solve(t1, t2, basis, xi))
            if not found[-1]:
                break
        violations = () if not found[-1] else tuple(
            Violation(tau1={"map": "T1"}, tau2={"map": "T2"}, v1=v1, v2=v2, trial=trial)
            for v1, v2 in found[0]
        )
        if violations:
            logging.error(f"point_oracle: trial {trial} keeps colliding after {config.retries} resamples")
        report = report.merged(CollisionReport(
            violations, 1, len(found), SignMode.PLAIN, trials=1, resamples=len(found) - 1,
        ))
    logging.info(
        f"point_oracle: trials={report.trials}, systems_solved={report.systems_solved}, "
        f"violations={len(report.violations)}, resamples={report.resamples}"
    )
    return report

"""
Full-size acceptance sweep.

Runs every property check at desk scale and exits non-zero on the first
criterion with a failure. Certified verdicts emitted along the way are
re-validated by the exhaustive oracle.
"""
import argparse
import random
import sys
import time
from fractions import Fraction
from itertools import product
from typing import Callable, List, Tuple

from bittensor.core.config import Config
from bittensor.utils.btlogging import logging

from homsense.certify import certify_prop4, certify_prop5, certify_thm1, certify_thm2
from homsense.construct import construct_boundary, construct_general, construct_half, verify_witness
from homsense.domain.certificate import SignMode, UniquenessCertificate
from homsense.domain.config import available_jobs, get_default_oracle_config
from homsense.domain.instance import ClassKind, ClassSpec
from homsense.domain.matrix import RationalMatrix
from homsense.domain.permutation import CoordinateProjection, SignedPermutation
from homsense.domain.poly import poly_product
from homsense.exactalg import charpoly, rank
from homsense.permcodim import check_bound_invariant, signed_cycle, signed_cycle_eigen_check
from homsense.sensing import (
    conjugated_jordan,
    oracle_sweep,
    point_oracle,
    random_regime_blocks,
)
from homsense.structure import geometric_multiplicities, invariant_factors

CONSTRUCTORS = {
    "boundary": construct_boundary,
    "half": construct_half,
    "general": construct_general,
}

Outcome = Tuple[bool, str]


class AcceptanceSweep:

    def __init__(self, argv: List[str] = None):
        self.config = self._get_config(argv)
        logging(config=self.config)
        self.rng = random.Random(self.config.seed)
        self.oracle_config = get_default_oracle_config(self.config.jobs or available_jobs())
        self.oracle_config.seed = self.config.seed
        self.oracle_config.sign_samples = self.config.sign_samples
        # (T1, T2, n, sign_mode, label) for every certified verdict
        self.certified: List[Tuple[RationalMatrix, RationalMatrix, int, SignMode, str]] = []

    def _get_config(self, argv: List[str]) -> Config:
        parser = argparse.ArgumentParser(prog="acceptance_sweep")
        parser.add_argument("--seed", type=int, default=0, help="Base seed of every random draw.")
        parser.add_argument("--jobs", type=int, default=None, help="Worker processes for the oracle.")
        parser.add_argument("--instances", type=int, default=100, help="Random instances per criterion.")
        parser.add_argument("--oracle-trials", type=int, default=20, help="Random V per oracle class.")
        parser.add_argument("--soundness-trials", type=int, default=3, help="Random V per certified verdict.")
        parser.add_argument("--sign-samples", type=int, default=200, help="Sign patterns for the signed oracle.")
        parser.add_argument("--bound-sign-samples", type=int, default=50,
                            help="Distinct sign patterns per triple in the bound check.")
        logging.add_args(parser)
        return Config(parser, args=argv)

    def signed_cycles(self) -> Outcome:
        checked = 0
        for length in range(1, 9):
            for signs in product((1, -1), repeat=length):
                poly, squarefree = signed_cycle_eigen_check(length, signs)
                if poly != charpoly(signed_cycle(signs).matrix()) or not squarefree:
                    return False, f"signed cycle {list(signs)}: charpoly {poly}, squarefree={squarefree}"
                checked += 1
        return True, f"{checked} signed cycles"

    def bound_invariant(self) -> Outcome:
        checked = 0
        for size in range(1, 6):
            count, failures = check_bound_invariant(
                size, jobs=self.oracle_config.jobs, sign_samples=self.config.bound_sign_samples, seed=self.config.seed,
            )
            if failures:
                return False, f"m={size}: {failures[0]}"
            checked += count
        return True, f"{checked} (pi, rho1, rho2) triples, {self.config.bound_sign_samples} sign patterns each"

    def projection_oracle(self) -> Outcome:
        m, n, r1, r2 = 5, 2, 2, 4
        plain = oracle_sweep(m, n, ClassSpec(ClassKind.PROJ_PERM, r1=r1, r2=r2),
                             self.config.oracle_trials, self.config.seed, self.oracle_config)
        if not plain.is_clean:
            return False, f"proj_perm: {len(plain.violations)} violations, first {plain.violations[0].to_dict()}"

        signed_spec = ClassSpec(ClassKind.SIGNED_PROJ_PERM, r1=r1, r2=r2)
        # 2^5 sign patterns fit the budget, so every pattern is enumerated
        signed = oracle_sweep(m, n, signed_spec, self.config.oracle_trials, self.config.seed, self.oracle_config)
        if not signed.is_clean:
            return False, f"signed_proj_perm: {len(signed.violations)} violations"
        return True, f"pairs checked: {plain.pairs_checked} plain, {signed.pairs_checked} signed"

    def constructions(self) -> Outcome:
        built = 0
        for regime, constructor in CONSTRUCTORS.items():
            for _ in range(self.config.instances):
                blocks, n = random_regime_blocks(regime, self.rng, max_dim=10)
                matrix = conjugated_jordan(blocks, self.rng)
                witness = constructor(matrix, n)
                achieved = verify_witness(matrix, witness.basis)
                if achieved != 2 * n:
                    return False, f"{regime}: rank {achieved} != {2 * n} for blocks {blocks}"
                built += 1
                if 2 * n <= matrix.rows:
                    self._record(certify_prop5(matrix, n), matrix, RationalMatrix.identity(matrix.rows), n)
        return True, f"{built} witnesses"

    def structure(self) -> Outcome:
        for _ in range(self.config.instances):
            count = self.rng.randint(1, 4)
            blocks = [(Fraction(self.rng.randint(-4, 4)), self.rng.randint(1, 3)) for _ in range(count)]
            matrix = conjugated_jordan(blocks, self.rng)
            data = invariant_factors(matrix)
            if poly_product(data.invariant_factors) != charpoly(matrix):
                return False, f"invariant factors of {blocks} do not multiply to the charpoly"
            report = geometric_multiplicities(matrix)
            for value in {value for value, _ in blocks}:
                expected = matrix.rows - rank(matrix.shift(value))
                if report.multiplicity_of(value) != expected:
                    return False, f"multiplicity of {value} in {blocks}: {report.multiplicity_of(value)} != {expected}"
        return True, f"{self.config.instances} conjugated Jordan forms"

    def general_points(self) -> Outcome:
        done = 0
        while done < self.config.instances:
            m = self.rng.randint(3, 6)
            n = self.rng.randint(1, 2)
            t1, t2 = self._integer_matrix(m), self._integer_matrix(m)
            if rank(t1) < n + 1 or rank(t2) < n + 1:
                continue
            certificate = certify_prop4(t1, t2, n, seed=self.rng.randrange(2 ** 31))
            if "scalar_ratio" in certificate.evidence:
                continue
            if not certificate.is_certified:
                return False, f"prop4 undecided: {certificate.evidence.get('reason')}"
            for left, right in ((t1, t2), (t2, t1)):
                report = point_oracle(left, right, n, self.config.soundness_trials,
                                      self.rng.randrange(2 ** 31), self.oracle_config)
                if not report.is_clean:
                    return False, f"prop4 point collision {report.violations[0].to_dict()}"
            done += 1
        return True, f"{done} general-point certificates"

    def tauH_certificates(self) -> Outcome:
        certified = 0
        for _ in range(self.config.instances):
            m = self.rng.randint(2, 6)
            n = self.rng.randint(1, m // 2)
            sign_mode = self.rng.choice((SignMode.PLAIN, SignMode.PLUS_MINUS))
            t1, t2 = self._integer_matrix(m), self._integer_matrix(m)
            certificate = certify_thm1(t1, t2, n, seed=self.rng.randrange(2 ** 31), sign_mode=sign_mode)
            if certificate.is_certified:
                certified += 1
            self._record(certificate, t1, t2, n)
        return True, f"{certified} tau_H certificates collected"

    def permutation_certificates(self) -> Outcome:
        before = len(self.certified)
        for _ in range(self.config.instances):
            m = self.rng.randint(2, 6)
            n = self.rng.randint(1, m // 2)
            signed = self.rng.random() < 0.5
            pi1, pi2 = self._permutation(m, signed), self._permutation(m, signed)
            rho1 = CoordinateProjection.from_mask(m, self.rng.randrange(2 ** m))
            rho2 = CoordinateProjection.from_mask(m, self.rng.randrange(2 ** m))
            if rho1.rank < n or rho2.rank < 2 * n:
                continue
            certificate = certify_thm2(pi1, pi2, rho1, rho2, n)
            self._record(certificate, rho1.matrix() @ pi1.matrix(), rho2.matrix() @ pi2.matrix(), n)
        return True, f"{len(self.certified) - before} permutation certificates collected"

    def soundness(self) -> Outcome:
        runs = 0
        for t1, t2, n, sign_mode, label in self.certified:
            spec = ClassSpec(ClassKind.ENDO_PAIR, t1=t1, t2=t2)
            report = oracle_sweep(t1.rows, n, spec, self.config.soundness_trials,
                                  self.rng.randrange(2 ** 31), self.oracle_config, sign_mode)
            if not report.is_clean:
                return False, f"{label}: {report.violations[0].to_dict()}"
            runs += report.trials + report.resamples
        return True, f"{len(self.certified)} certificates, {runs} oracle runs"

    def _record(self, certificate: UniquenessCertificate, t1: RationalMatrix, t2: RationalMatrix, n: int) -> None:
        if certificate.is_certified and t1.rows <= 6:
            self.certified.append((t1, t2, n, certificate.sign_mode, certificate.route.value))

    def _permutation(self, size: int, signed: bool) -> SignedPermutation:
        perm = list(range(size))
        self.rng.shuffle(perm)
        signs = [self.rng.choice((1, -1)) for _ in range(size)] if signed else None
        return SignedPermutation(size, tuple(perm), signs)

    def _integer_matrix(self, size: int) -> RationalMatrix:
        return RationalMatrix.from_rows([[self.rng.randint(-5, 5) for _ in range(size)] for _ in range(size)])

    def run(self) -> int:
        checks: List[Tuple[str, Callable[[], Outcome]]] = [
            ("signed cycles", self.signed_cycles),
            ("bound invariant", self.bound_invariant),
            ("projection oracle", self.projection_oracle),
            ("constructions", self.constructions),
            ("structure", self.structure),
            ("general points", self.general_points),
            ("tau_H certificates", self.tauH_certificates),
            ("permutation certificates", self.permutation_certificates),
            ("soundness", self.soundness),
        ]
        for name, check in checks:
            start_time = time.time()
            passed, detail = check()
            elapsed = time.time() - start_time
            if not passed:
                logging.error(f"AcceptanceSweep: {name} FAILED after {elapsed:.1f}s: {detail}")
                return 1
            logging.info(f"AcceptanceSweep: {name} passed in {elapsed:.1f}s ({detail})")
        return 0


def main():
    sys.exit(AcceptanceSweep().run())


if __name__ == "__main__":
    main()

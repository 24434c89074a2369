"""
Test cases for the uniqueness certifiers.
"""
import random
import unittest

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from homsense.certify import (
    certify_cor3,
    certify_prop4,
    certify_prop5,
    certify_thm1,
    certify_thm2,
    reduce_tauH,
    refute_by_sampling,
)
from homsense.constants import DEFAULT_SAMPLE_BOUND
from homsense.domain.certificate import Route, SignMode, Verdict
from homsense.domain.config import SamplingConfig, get_default_oracle_config
from homsense.domain.instance import ClassKind, ClassSpec
from homsense.domain.matrix import RationalMatrix
from homsense.domain.permutation import CoordinateProjection, SignedPermutation
from homsense.errors import HypothesisError, ShapeMismatchError
from homsense.exactalg import inverse
from homsense.permcodim import signed_cycle
from homsense.sensing import oracle_sweep, random_unimodular


@st.composite
def signed_permutations(draw, size):
    perm = draw(st.permutations(list(range(size))))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=size, max_size=size))
    return SignedPermutation(size, tuple(perm), tuple(signs))


class TestCertifyProp5(unittest.TestCase):

    def test_identity_is_certified(self):
        certificate = certify_prop5(RationalMatrix.identity(4), 2)
        self.assertIs(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(certificate.evidence["branch"], "jordan_index")
        self.assertEqual(certificate.evidence["excluded_max"], 0)

    def test_large_eigenspace_is_undecided(self):
        certificate = certify_prop5(RationalMatrix.diag([2, 2, 2, 3]), 2)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertEqual(certificate.evidence["excluded_max"], 3)
        self.assertEqual(certificate.evidence["limit"], 2)

    def test_signed_cycle(self):
        matrix = signed_cycle([1, -1, 1, 1, -1, -1]).matrix()
        certificate = certify_prop5(matrix, 3, SignMode.PLUS_MINUS)
        self.assertTrue(certificate.is_certified)
        self.assertEqual(certificate.evidence["excluded"], ["-1", "1"])
        self.assertIn("witness_skipped", certificate.evidence)

    def test_transversality_branch_carries_witness(self):
        certificate = certify_prop5(RationalMatrix.diag([1, 2, 3, 4]), 2)
        self.assertTrue(certificate.is_certified)
        self.assertEqual(certificate.evidence["branch"], "transversality")
        self.assertEqual(certificate.evidence["witness"]["certificate_rank"], 4)

    def test_minus_one_is_excluded_only_with_signs(self):
        matrix = RationalMatrix.diag([-1, -1, -1, 2])
        self.assertIs(certify_prop5(matrix, 2).verdict, Verdict.UNDECIDED)
        self.assertIs(certify_prop5(matrix, 2, SignMode.PLUS_MINUS).verdict, Verdict.CERTIFIED)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6).flatmap(lambda size: st.tuples(
        st.lists(st.tuples(st.integers(-2, 2), st.integers(1, 2)), min_size=1, max_size=size),
        st.integers(1, size // 2),
    )), st.integers(0, 10_000))
    def test_similarity_invariant(self, data, seed):
        """Test that a conjugated matrix gets the same verdict and branch"""
        blocks, n = data
        matrix = RationalMatrix.block_diag([RationalMatrix.jordan_block(value, size) for value, size in blocks])
        assume(2 * n <= matrix.rows)
        conjugator = random_unimodular(matrix.rows, random.Random(seed))
        similar = conjugator @ matrix @ inverse(conjugator)
        for sign_mode in SignMode:
            first, second = certify_prop5(matrix, n, sign_mode), certify_prop5(similar, n, sign_mode)
            self.assertIs(first.verdict, second.verdict)
            self.assertEqual(first.evidence["excluded_max"], second.evidence["excluded_max"])
            self.assertEqual(first.evidence.get("branch"), second.evidence.get("branch"))

    def test_dimension_hypothesis(self):
        with self.assertRaises(HypothesisError):
            certify_prop5(RationalMatrix.identity(3), 2)
        with self.assertRaises(HypothesisError):
            certify_prop5(RationalMatrix.identity(3), 0)

    def test_document(self):
        document = certify_prop5(RationalMatrix.identity(2), 1).to_dict()
        self.assertEqual(document["schema"], "homsense/v1")
        self.assertEqual(document["route"], "prop5_eigen")
        self.assertEqual(document["parameters"], {"m": 2, "n": 1, "sign_mode": "plain"})


class TestCertifyThm1(unittest.TestCase):

    def test_reduction_solves_the_defining_system(self):
        t1 = RationalMatrix.from_rows([[1, 2, 0], [0, 1, 3], [4, 0, 1]])
        t2 = RationalMatrix.diag([1, 1, 0])
        reduced, h, rho = reduce_tauH(t1, t2, trials=8, seed=5)
        self.assertEqual(reduced.shape, (2, 2))
        self.assertEqual(t2 @ h @ reduced, rho @ t1 @ h)
        self.assertEqual(rho @ rho, rho)
        self.assertEqual(rho @ t2, t2)

    def test_reduction_needs_nonzero_t2(self):
        with self.assertRaises(HypothesisError):
            reduce_tauH(RationalMatrix.identity(2), RationalMatrix.zeros(2, 2), trials=4, seed=0)

    def test_identical_maps(self):
        identity = RationalMatrix.identity(4)
        certificate = certify_thm1(identity, identity, 2, seed=1)
        self.assertIs(certificate.verdict, Verdict.CERTIFIED)
        self.assertTrue(all(sample["holds"] for sample in certificate.evidence["samples"]))

    def test_scaled_maps(self):
        identity = RationalMatrix.identity(4)
        certificate = certify_thm1(identity, identity.scale(2), 2, seed=1)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertEqual(certificate.evidence["samples"][0]["excluded_max"], 4)

    def test_default_sample_bound(self):
        t1 = RationalMatrix.from_rows([[1, 2, 0], [0, 1, 3], [4, 0, 1]])
        t2 = RationalMatrix.diag([1, 1, 0])
        self.assertEqual(
            reduce_tauH(t1, t2, trials=8, seed=5),
            reduce_tauH(t1, t2, trials=8, seed=5, bound=DEFAULT_SAMPLE_BOUND),
        )

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 5).flatmap(lambda size: st.tuples(
        st.lists(st.lists(st.integers(-3, 3), min_size=size, max_size=size), min_size=size, max_size=size),
        st.lists(st.lists(st.integers(-3, 3), min_size=size, max_size=size), min_size=size, max_size=size),
        st.integers(1, size // 2),
    )), st.sampled_from(list(SignMode)))
    def test_verdict_agrees_across_seeds(self, data, sign_mode):
        """Test that five H samplers reach the same verdict"""
        rows1, rows2, n = data
        t1, t2 = RationalMatrix.from_rows(rows1), RationalMatrix.from_rows(rows2)
        verdicts = {certify_thm1(t1, t2, n, seed=seed, sign_mode=sign_mode).verdict for seed in range(0, 50, 10)}
        self.assertEqual(len(verdicts), 1)

    def test_rank_gate(self):
        certificate = certify_thm1(RationalMatrix.identity(4), RationalMatrix.diag([1, 1, 1, 0]), 2, seed=0)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertIn("rank(T2)", certificate.evidence["reason"])

    def test_samples_follow_config(self):
        config = SamplingConfig(bound=5, trials=4, samples=2, refute_samples=1)
        identity = RationalMatrix.identity(2)
        certificate = certify_thm1(identity, RationalMatrix.diag([1, 2]), 1, seed=3, config=config)
        self.assertEqual([s["seed"] for s in certificate.evidence["samples"]], [3, 4])

    def test_dimension_hypothesis(self):
        with self.assertRaises(HypothesisError):
            certify_thm1(RationalMatrix.identity(3), RationalMatrix.identity(3), 2, seed=0)


class TestCertifyPermutations(unittest.TestCase):

    def test_identity_projections(self):
        identity = SignedPermutation.identity(6)
        full = CoordinateProjection.identity(6)
        certificate = certify_thm2(identity, identity, full, full, 3)
        self.assertIs(certificate.verdict, Verdict.CERTIFIED)
        self.assertIs(certificate.route, Route.THM2_PERMUTATION)

    def test_cycle_against_identity(self):
        cycle = SignedPermutation.from_cycles(6, [list(range(6))])
        full = CoordinateProjection.identity(6)
        certificate = certify_thm2(cycle, SignedPermutation.identity(6), full, full, 3)
        self.assertTrue(certificate.is_certified)
        self.assertEqual(certificate.evidence["dimension_bound"], 1)

    def test_outer_rank_too_small(self):
        identity = SignedPermutation.identity(6)
        rho2 = CoordinateProjection(6, frozenset(range(5)))
        certificate = certify_thm2(identity, identity, CoordinateProjection.identity(6), rho2, 3)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertIn("rank(rho2)", certificate.evidence["reason"])

    def test_inner_rank_too_small(self):
        identity = SignedPermutation.identity(4)
        rho1 = CoordinateProjection(4, frozenset({0}))
        certificate = certify_thm2(identity, identity, rho1, CoordinateProjection.identity(4), 2)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertEqual(certificate.evidence["rank_rho2_rho1_pi1"], 1)

    def test_signed_input_goes_to_cor3(self):
        negated = SignedPermutation(4, (0, 1, 2, 3), (-1, -1, -1, -1))
        full = CoordinateProjection.identity(4)
        certificate = certify_thm2(negated, SignedPermutation.identity(4), full, full, 2)
        self.assertIs(certificate.route, Route.COR3_SIGNED)
        self.assertIs(certificate.sign_mode, SignMode.PLUS_MINUS)
        self.assertTrue(certificate.is_certified)

    def test_cor3_accepts_unsigned_input(self):
        identity = SignedPermutation.identity(4)
        full = CoordinateProjection.identity(4)
        self.assertIs(certify_cor3(identity, identity, full, full, 2).route, Route.COR3_SIGNED)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 6).flatmap(lambda size: st.tuples(
        signed_permutations(size),
        signed_permutations(size),
        st.integers(0, (1 << size) - 1),
        st.integers(0, (1 << size) - 1),
        st.integers(1, size // 2),
        st.permutations(list(range(size))),
    )))
    def test_common_relabelling(self, data):
        """Test that relabelling pi1, pi2, rho1 and rho2 together keeps the verdict"""
        pi1, pi2, mask1, mask2, n, order = data
        size = pi1.size
        rho1 = CoordinateProjection.from_mask(size, mask1)
        rho2 = CoordinateProjection.from_mask(size, mask2)
        sigma = SignedPermutation(size, tuple(order))

        def conjugate(perm):
            return sigma.compose(perm).compose(sigma.inverse())

        first = certify_thm2(pi1, pi2, rho1, rho2, n)
        second = certify_thm2(conjugate(pi1), conjugate(pi2), rho1.relabel(sigma), rho2.relabel(sigma), n)
        self.assertIs(first.verdict, second.verdict)
        self.assertIs(first.route, second.route)
        self.assertEqual(first.evidence.get("dimension_bound"), second.evidence.get("dimension_bound"))

    def test_size_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            certify_thm2(
                SignedPermutation.identity(4),
                SignedPermutation.identity(3),
                CoordinateProjection.identity(4),
                CoordinateProjection.identity(4),
                1,
            )

    def test_certified_pair_survives_the_oracle(self):
        swap = SignedPermutation.from_cycles(4, [[0, 1], [2, 3]])
        full = CoordinateProjection.identity(4)
        certificate = certify_thm2(swap, SignedPermutation.identity(4), full, full, 2)
        self.assertTrue(certificate.is_certified)
        spec = ClassSpec(ClassKind.ENDO_PAIR, t1=swap.matrix(), t2=RationalMatrix.identity(4))
        report = oracle_sweep(4, 2, spec, trials=3, seed=0, config=get_default_oracle_config())
        self.assertTrue(report.is_clean)


class TestCertifyProp4(unittest.TestCase):

    def test_distinct_maps(self):
        certificate = certify_prop4(RationalMatrix.identity(3), RationalMatrix.diag([1, 2, 3]), 1)
        self.assertIs(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(certificate.evidence["v"], ["1", "1", "0"])
        self.assertEqual(certificate.evidence["witness_rank"], 2)
        self.assertEqual(certificate.evidence["point_collisions"], 0)

    def test_two_dimensional_witness(self):
        certificate = certify_prop4(RationalMatrix.identity(4), RationalMatrix.diag([1, 2, 3, 4]), 2)
        self.assertTrue(certificate.is_certified)
        self.assertEqual(certificate.evidence["witness_rank"], 3)

    def test_proportional_maps(self):
        identity = RationalMatrix.identity(3)
        certificate = certify_prop4(identity, identity.scale(2), 1)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertEqual(certificate.evidence["scalar_ratio"], "1/2")

    def test_rank_gate(self):
        certificate = certify_prop4(RationalMatrix.identity(3), RationalMatrix.diag([1, 0, 0]), 1)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertIn("rank(T2)", certificate.evidence["reason"])


class TestRefuteBySampling(unittest.TestCase):

    def test_scaled_pair_is_refuted(self):
        identity = RationalMatrix.identity(4)
        certificate = refute_by_sampling(identity, identity.scale(2), 2, Route.THM1_TAUH, seed=4)
        self.assertIs(certificate.verdict, Verdict.REFUTED)
        v1, v2 = certificate.counterexample
        self.assertEqual(v1, tuple(2 * x for x in v2))
        self.assertIn("counterexample", certificate.to_dict())

    def test_clean_sample_stays_undecided(self):
        identity = RationalMatrix.identity(4)
        certificate = refute_by_sampling(identity, identity, 2, Route.THM1_TAUH)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)
        self.assertEqual(certificate.evidence["refute_samples"], 1)

    def test_large_eigenspace_is_refuted(self):
        matrix = RationalMatrix.diag([2, 2, 2, 3])
        certificate = refute_by_sampling(matrix, RationalMatrix.identity(4), 2, Route.PROP5_EIGEN)
        self.assertIs(certificate.verdict, Verdict.REFUTED)

    def test_no_samples(self):
        config = SamplingConfig(bound=10, trials=1, samples=1, refute_samples=0)
        identity = RationalMatrix.identity(2)
        certificate = refute_by_sampling(identity, identity.scale(2), 1, Route.THM1_TAUH, config=config)
        self.assertIs(certificate.verdict, Verdict.UNDECIDED)


if __name__ == "__main__":
    unittest.main()

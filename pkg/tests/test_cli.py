"""
Test cases for the command-line runner.
"""
import json
import os
import tempfile
import unittest
from typing import List
from unittest.mock import Mock

from hypothesis import given, settings
from hypothesis import strategies as st

from cli.runner import Runner
from homsense.adapters.job_source import decode_document, parse_matrix_json, parse_permutation, parse_projection
from homsense.adapters.metrics_sink import NullMetricsSink
from homsense.adapters.report_sink import IReportSink
from homsense.constants import EXIT_INPUT_ERROR, EXIT_OK, EXIT_REFUTED, EXIT_UNDECIDED
from homsense.domain.matrix import RationalMatrix
from homsense.domain.permutation import CoordinateProjection, SignedPermutation


def matrix_json(rows) -> dict:
    return {"rows": len(rows), "cols": len(rows[0]), "entries": rows}


def diag_rows(values) -> List[list]:
    return [[value if i == j else 0 for j in range(len(values))] for i, value in enumerate(values)]


class RunnerTestCase(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.sink = Mock(spec=IReportSink)
        self.sink.write.return_value = (True, "captured")

    def tearDown(self):
        self.directory.cleanup()

    def write_input(self, document: dict, name: str = "job.json") -> str:
        path = os.path.join(self.directory.name, name)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump({"schema": "homsense/v1", **document}, handle)
        return path

    def run_cli(self, *argv: str) -> int:
        runner = Runner(list(argv), report_sink=self.sink, metrics_sink=NullMetricsSink())
        return runner.run()

    @property
    def document(self) -> dict:
        return self.sink.write.call_args[0][0]


class TestCertifyCommand(RunnerTestCase):

    def test_identity_is_certified(self):
        """Test that certify prop5 on the identity exits 0."""
        path = self.write_input({"T": matrix_json(diag_rows([1, 1, 1, 1])), "n": 2})
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", path), EXIT_OK)
        self.assertEqual(self.document["verdict"], "certified")

    def test_large_eigenspace_is_undecided(self):
        path = self.write_input({"T": matrix_json(diag_rows([2, 2, 2, 3])), "n": 2})
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", path), EXIT_UNDECIDED)
        self.assertEqual(self.document["verdict"], "undecided")

    def test_refute_flag(self):
        """Test that --refute turns an undecided certificate with a dense collision set into refuted."""
        path = self.write_input({"T": matrix_json(diag_rows([2, 2, 2, 3])), "n": 2})
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", path, "--refute"), EXIT_REFUTED)
        self.assertIn("counterexample", self.document)
        self.assertIn("refutation", self.document["evidence"])

    def test_signed_cycle_through_thm2(self):
        path = self.write_input({"pi1": {"perm": [1, 2, 3, 4, 5, 0], "signs": [1, -1, 1, 1, 1, 1]}, "n": 3})
        self.assertEqual(self.run_cli("certify", "--mode", "thm2", "--input", path), EXIT_OK)
        self.assertEqual(self.document["route"], "cor3_signed")

    def test_thm1_with_samples(self):
        path = self.write_input({
            "T1": matrix_json(diag_rows([1, 1, 1, 1])),
            "T2": matrix_json(diag_rows([1, 2, 3, 4])),
            "n": 2,
        })
        self.assertEqual(
            self.run_cli("certify", "--mode", "thm1", "--input", path, "--samples", "2", "--seed", "5"),
            EXIT_OK,
        )
        self.assertEqual(len(self.document["evidence"]["samples"]), 2)

    def test_bad_entry(self):
        """Test that a zero denominator exits 1 without writing a report."""
        path = self.write_input({"T": matrix_json([[1, "1/0"], [0, 1]]), "n": 1})
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", path), EXIT_INPUT_ERROR)
        self.sink.write.assert_not_called()

    def test_missing_mode(self):
        path = self.write_input({"T": matrix_json(diag_rows([1, 1])), "n": 1})
        self.assertEqual(self.run_cli("certify", "--input", path), EXIT_INPUT_ERROR)

    def test_missing_input_file(self):
        missing = os.path.join(self.directory.name, "missing.json")
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", missing), EXIT_INPUT_ERROR)

    def test_failed_write(self):
        self.sink.write.return_value = (False, "disk full")
        path = self.write_input({"T": matrix_json(diag_rows([1, 1])), "n": 1})
        self.assertEqual(self.run_cli("certify", "--mode", "prop5", "--input", path), EXIT_INPUT_ERROR)


class TestDecomposeAndConstruct(RunnerTestCase):

    def test_decompose_rational(self):
        rows = [[2, 1, 0], [0, 2, 0], [0, 0, 5]]
        path = self.write_input({"T": matrix_json(rows)})
        self.assertEqual(self.run_cli("decompose", "--input", path), EXIT_OK)
        document = self.document
        self.assertTrue(document["rational_spectrum"])
        self.assertEqual(document["jordan_chains"], [
            {"eigenvalue": "2", "lengths": [2]},
            {"eigenvalue": "5", "lengths": [1]},
        ])
        self.assertEqual(len(document["cyclic_summands"]), 2)
        rows_written = self.sink.write.call_args[0][1]
        self.assertEqual(rows_written[0], ["eigenvalue", "degree", "geometric_multiplicity"])

    def test_decompose_irrational(self):
        path = self.write_input({"T": matrix_json([[0, 0, 2], [1, 0, 0], [0, 1, 0]])})
        self.assertEqual(self.run_cli("decompose", "--input", path), EXIT_OK)
        self.assertFalse(self.document["rational_spectrum"])
        self.assertNotIn("cyclic_summands", self.document)

    def test_construct_auto(self):
        path = self.write_input({"T": matrix_json(diag_rows([1, 2, 3, 4])), "n": 2})
        self.assertEqual(self.run_cli("construct", "--input", path), EXIT_OK)
        self.assertEqual(self.document["certificate_rank"], 4)

    def test_construct_refused(self):
        path = self.write_input({"T": matrix_json(diag_rows([1, 1, 1, 2])), "n": 2})
        self.assertEqual(self.run_cli("construct", "--mode", "half", "--input", path), EXIT_UNDECIDED)
        self.assertTrue(self.document["refused"])

    def test_construct_csv_to_file(self):
        """Test the real CSV sink end to end."""
        path = self.write_input({"T": matrix_json(diag_rows([1, 2])), "n": 1})
        out = os.path.join(self.directory.name, "witness.csv")
        runner = Runner(["construct", "--input", path, "--format", "csv", "--out", out],
                        metrics_sink=NullMetricsSink())
        self.assertEqual(runner.run(), EXIT_OK)
        with open(out, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        self.assertEqual(lines[0], "field,value")
        self.assertIn("certificate_rank,2", lines)


class TestOracleCommand(RunnerTestCase):

    def test_perm_class(self):
        code = self.run_cli("oracle", "--m", "4", "--n", "2", "--class", "perm",
                            "--trials", "2", "--seed", "7", "--jobs", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.document["pairs_checked"], 2 * 576)
        self.assertEqual(self.document["violation_count"], 0)

    def test_violations_exit_three(self):
        code = self.run_cli("oracle", "--m", "3", "--n", "2", "--trials", "1", "--jobs", "1")
        self.assertEqual(code, EXIT_REFUTED)
        self.assertGreater(self.document["violation_count"], 0)

    def test_budget(self):
        code = self.run_cli("oracle", "--m", "4", "--n", "2", "--class", "signed-perm",
                            "--budget", "10", "--trials", "1", "--jobs", "1")
        self.assertEqual(code, EXIT_INPUT_ERROR)

    def test_missing_dimensions(self):
        self.assertEqual(self.run_cli("oracle", "--m", "4"), EXIT_INPUT_ERROR)

    def test_endo_pair(self):
        path = self.write_input({
            "T1": matrix_json(diag_rows([1, 1, 1])),
            "T2": matrix_json(diag_rows([1, 2, 3])),
            "n": 1,
        })
        code = self.run_cli("oracle", "--class", "endo-pair", "--input", path, "--trials", "3", "--jobs", "1")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.document["pairs_checked"], 3)


class TestBoundCommand(RunnerTestCase):

    def test_exhaustive_check(self):
        self.assertEqual(self.run_cli("bound", "--m", "3", "--jobs", "1"), EXIT_OK)
        self.assertEqual(self.document["checked"], 6 * 64)
        self.assertEqual(self.document["failures"], [])

    def test_account_of_full_cycle(self):
        path = self.write_input({"pi1": {"perm": [1, 2, 3, 4, 5, 0]}})
        self.assertEqual(self.run_cli("bound", "--input", path), EXIT_OK)
        self.assertEqual(self.document["account"]["codim_bound"], 5)
        self.assertEqual(self.document["theorem2_bound"], 1)

    def test_needs_input_or_size(self):
        self.assertEqual(self.run_cli("bound"), EXIT_INPUT_ERROR)


class TestReproducibleOutput(RunnerTestCase):

    def run_to_file(self, name: str, *argv: str) -> bytes:
        out = os.path.join(self.directory.name, name)
        runner = Runner(list(argv) + ["--out", out], metrics_sink=NullMetricsSink())
        runner.run()
        with open(out, "rb") as handle:
            return handle.read()

    def test_same_seed_same_bytes(self):
        """Test that two runs on the same input and seed write identical files."""
        path = self.write_input({
            "T1": matrix_json([[1, 2, 0, 1], [0, 1, 3, 0], [4, 0, 1, 2], [1, 1, 0, 1]]),
            "T2": matrix_json(diag_rows([1, 2, 3, 4])),
            "n": 2,
            "sign_mode": "plus_minus",
        })
        for argv in (
            ("certify", "--mode", "thm1", "--input", path, "--seed", "11", "--refute"),
            ("oracle", "--class", "endo-pair", "--input", path, "--trials", "3", "--seed", "11", "--jobs", "1"),
            ("oracle", "--m", "4", "--n", "2", "--class", "proj-perm", "--r1", "2", "--r2", "4",
             "--trials", "1", "--seed", "11", "--jobs", "2"),
        ):
            first = self.run_to_file("first.json", *argv)
            second = self.run_to_file("second.json", *argv)
            self.assertTrue(first)
            self.assertEqual(first, second)


matrices = st.integers(1, 4).flatmap(lambda size: st.lists(
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=size, max_size=size),
    min_size=1, max_size=4,
)).map(RationalMatrix.from_rows)


class TestDocumentRoundTrip(unittest.TestCase):

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_matrix(self, matrix):
        self.assertEqual(parse_matrix_json(json.dumps(matrix.to_json()), "T"), matrix)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 6).flatmap(lambda size: st.tuples(
        st.permutations(list(range(size))),
        st.lists(st.sampled_from([1, -1]), min_size=size, max_size=size),
        st.integers(0, (1 << size) - 1),
    )))
    def test_permutation_and_projection(self, data):
        order, signs, mask = data
        perm = SignedPermutation(len(order), tuple(order), tuple(signs))
        projection = CoordinateProjection.from_mask(perm.size, mask)
        decoded = decode_document(json.dumps({
            "schema": "homsense/v1",
            "pi1": perm.to_json(),
            "rho1": projection.to_json(),
        }))
        self.assertEqual(parse_permutation(decoded["pi1"], "pi1"), perm)
        self.assertEqual(parse_projection(decoded["rho1"], "rho1", perm.size), projection)


if __name__ == "__main__":
    unittest.main()

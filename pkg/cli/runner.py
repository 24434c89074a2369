import argparse
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

from bittensor.core.config import Config
from bittensor.utils.btlogging import logging

from homsense import __version__
from homsense.adapters.job_source import (
    IJobSource,
    JsonFileJobSource,
    parse_count,
    parse_matrix_json,
    parse_permutation,
    parse_projection,
    parse_sign_mode,
    require,
)
from homsense.adapters.metrics_sink import IMetricsSink, create_metrics_sink
from homsense.adapters.report_sink import CsvReportSink, IReportSink, JsonReportSink
from homsense.constants import (
    DEFAULT_H_SAMPLES,
    DEFAULT_H_TRIALS,
    DEFAULT_ORACLE_BUDGET,
    DEFAULT_ORACLE_TRIALS,
    DEFAULT_SIGN_SAMPLES,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_REFUTED,
    EXIT_UNDECIDED,
    SCHEMA_TAG,
)
from homsense.domain.config import available_jobs, get_default_oracle_config
from homsense.domain.instance import ClassKind, ClassSpec, CollisionReport
from homsense.domain.job import CERTIFY_MODES, CONSTRUCT_MODES, Command, JobSpec, OutputFormat
from homsense.errors import (
    BoundViolationError,
    BudgetExceededError,
    HomsenseError,
    HypothesisError,
    InputFormatError,
    SamplingError,
)
from homsense.permcodim import check_bound_invariant, codim_account, single_permutation, theorem2_bound
from homsense.resolvers import CertifierResolver, ConstructorResolver, ExitCodeResolver
from homsense.sensing import oracle_sweep
from homsense.structure import (
    cyclic_summands,
    has_rational_spectrum,
    invariant_factors,
    jordan_chains,
    multiplicity_report,
)

Result = Tuple[Dict[str, Any], Optional[List[List[str]]], Any]


class Runner:
    """
    Command-line runner.

    Parses flags into a JobSpec, dispatches to the command handler, writes the
    result document and maps the outcome to an exit code.
    """

    def __init__(
        self,
        argv: Optional[List[str]] = None,
        job_source: Optional[IJobSource] = None,
        report_sink: Optional[IReportSink] = None,
        metrics_sink: Optional[IMetricsSink] = None,
    ):
        """
        Initialize runner.

        Args:
            argv: Command-line arguments (defaults to sys.argv[1:])
            job_source: Input document source (defaults to JSON files)
            report_sink: Output sink (defaults to JSON or CSV per --format)
            metrics_sink: Metrics sink (defaults to the --metrics-file textfile)
        """
        self.config = self._get_config(argv)
        self._setup_logging()
        self.job_source = job_source or JsonFileJobSource()
        self._report_sink = report_sink
        self._metrics_sink = metrics_sink
        self.exit_code_resolver = ExitCodeResolver()
        self.constructor_resolver = ConstructorResolver()

    def _get_config(self, argv: Optional[List[str]]) -> Config:
        """Get runner configuration."""
        parser = argparse.ArgumentParser(prog="homsense", description="Homomorphic sensing certification toolkit.")
        parser.add_argument("command", choices=[c.value for c in Command], help="Job to run.")
        parser.add_argument("--mode", type=str, default=None,
                            help=f"certify: one of {', '.join(CERTIFY_MODES)}; construct: one of {', '.join(CONSTRUCT_MODES)}.")
        parser.add_argument("--input", type=str, default=None, help="Input JSON document.")
        parser.add_argument("--out", type=str, default=None, help="Output path (stdout when omitted).")
        parser.add_argument("--m", type=int, default=None, help="Ambient dimension (oracle, bound).")
        parser.add_argument("--n", type=int, default=None, help="Subspace dimension (oracle).")
        parser.add_argument("--class", dest="class_kind", type=str, default=ClassKind.PERM.value,
                            help="Oracle class: perm, signed-perm, proj-perm, signed-proj-perm, endo-pair.")
        parser.add_argument("--r1", type=int, default=0, help="Minimum rank of rho1 for projection classes.")
        parser.add_argument("--r2", type=int, default=0, help="Minimum rank of rho2 for projection classes.")
        parser.add_argument("--trials", type=int, default=DEFAULT_ORACLE_TRIALS, help="Random V drawn by the oracle.")
        parser.add_argument("--seed", type=int, default=0, help="Base seed of every random draw.")
        parser.add_argument("--bound", type=int, default=None, help="Entry bound of random integer draws.")
        parser.add_argument("--budget", type=int, default=DEFAULT_ORACLE_BUDGET,
                            help="Maximum collision systems the oracle may solve per V.")
        parser.add_argument("--jobs", type=int, default=None, help="Worker processes (default: available CPUs).")
        parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat],
                            default=OutputFormat.JSON.value, help="Output format.")
        parser.add_argument("--refute", action="store_true",
                            help="Search for a counterexample when a certificate is undecided.")
        parser.add_argument("--no-reduce", action="store_true", help="Disable the oracle's symmetry reduction.")
        parser.add_argument("--sign-samples", type=int, default=DEFAULT_SIGN_SAMPLES,
                            help="Sign patterns drawn when a signed class exceeds the budget.")
        parser.add_argument("--samples", type=int, default=DEFAULT_H_SAMPLES,
                            help="Independent H draws that must agree (certify thm1).")
        parser.add_argument("--h-trials", type=int, default=DEFAULT_H_TRIALS,
                            help="Resampling attempts for a degenerate H.")
        parser.add_argument("--metrics-file", type=str, default=None,
                            help="Write Prometheus metrics to this textfile.")

        logging.add_args(parser)

        return Config(parser, args=argv)

    def _setup_logging(self):
        """Set up logging."""
        logging(config=self.config)
        logging.debug(f"homsense {__version__}: command={self.config.command}")

    def _job_spec(self) -> JobSpec:
        config = self.config
        return JobSpec(
            command=Command(config.command),
            input_path=config.input,
            out_path=config.out,
            mode=config.mode,
            seed=config.seed,
            budget=config.budget,
            output_format=OutputFormat(config.output_format),
            m=config.m,
            n=config.n,
            class_kind=ClassKind.parse(config.class_kind),
            r1=config.r1,
            r2=config.r2,
            trials=config.trials,
            bound=config.bound,
            jobs=config.jobs if config.jobs is not None else available_jobs(),
            refute=config.refute,
            reduce_symmetry=not config.no_reduce,
            sign_samples=config.sign_samples,
            samples=config.samples,
            h_trials=config.h_trials,
            metrics_file=config.metrics_file,
        )

    def run(self) -> int:
        """Run the configured job and return the process exit code."""
        start_time = time.time()
        command = str(self.config.command)
        try:
            spec = self._job_spec()
            document, rows, result = self._dispatch(spec)
            exit_code = self.exit_code_resolver(result)
        except BudgetExceededError as e:
            logging.error(f"Runner: {e} (cardinality {e.cardinality})")
            return self._finish(command, start_time, EXIT_INPUT_ERROR)
        except (InputFormatError, BoundViolationError) as e:
            logging.error(f"Runner: {e}")
            return self._finish(command, start_time, EXIT_INPUT_ERROR)
        except SamplingError as e:
            logging.warning(f"Runner: {e}")
            return self._finish(command, start_time, EXIT_UNDECIDED)
        except HomsenseError as e:
            logging.error(f"Runner: {type(e).__name__}: {e}")
            return self._finish(command, start_time, EXIT_INPUT_ERROR)

        success, message = self._sink(spec).write(document, rows)
        if not success:
            logging.error(f"Runner: {message}")
            return self._finish(command, start_time, EXIT_INPUT_ERROR)
        logging.debug(f"Runner: report {message}")
        if isinstance(result, CollisionReport):
            self._metrics(spec).record_oracle(result)
        return self._finish(command, start_time, exit_code, spec)

    def _finish(self, command: str, start_time: float, exit_code: int, spec: Optional[JobSpec] = None) -> int:
        outcome = {EXIT_OK: "ok", EXIT_UNDECIDED: "undecided", EXIT_REFUTED: "refuted"}.get(exit_code, "error")
        metrics = self._metrics(spec)
        metrics.record_job(command, outcome, time.time() - start_time)
        success, message = metrics.flush()
        if not success:
            logging.warning(f"Runner: metrics not written: {message}")
        logging.info(f"Runner: {command} finished with exit code {exit_code} ({outcome})")
        return exit_code

    def _sink(self, spec: JobSpec) -> IReportSink:
        if self._report_sink is None:
            sink_class = CsvReportSink if spec.output_format is OutputFormat.CSV else JsonReportSink
            self._report_sink = sink_class(spec.out_path)
        return self._report_sink

    def _metrics(self, spec: Optional[JobSpec]) -> IMetricsSink:
        if self._metrics_sink is None:
            self._metrics_sink = create_metrics_sink(spec.metrics_file if spec else self.config.metrics_file)
        return self._metrics_sink

    # Commands

    def _dispatch(self, spec: JobSpec) -> Result:
        handlers = {
            Command.CERTIFY: self._certify,
            Command.DECOMPOSE: self._decompose,
            Command.CONSTRUCT: self._construct,
            Command.ORACLE: self._oracle,
            Command.BOUND: self._bound,
        }
        logging.info(f"Runner: running {spec.command.value}" + (f" --mode {spec.mode}" if spec.mode else ""))
        return handlers[spec.command](spec)

    def _certify(self, spec: JobSpec) -> Result:
        document = self.job_source.load(spec.input_path)
        resolver = CertifierResolver(spec.sampling_config(), seed=spec.seed, refute=spec.refute)
        certificate = resolver(spec.mode)(document)
        logging.info(f"Runner: {certificate.route.value} -> {certificate.verdict.value}")
        return certificate.to_dict(), None, certificate

    def _decompose(self, spec: JobSpec) -> Result:
        document = self.job_source.load(spec.input_path)
        matrix = parse_matrix_json(require(document, "T"), "T")
        matrix.require_square("T")
        data = invariant_factors(matrix)
        report = multiplicity_report(data)
        result = {
            "schema": SCHEMA_TAG,
            "command": Command.DECOMPOSE.value,
            "invariant_factors": data.to_dict(),
            "multiplicities": report.to_dict(),
            "rational_spectrum": has_rational_spectrum(matrix),
            "jordan_chains": [
                {"eigenvalue": str(value), "lengths": jordan_chains(matrix, value).lengths}
                for value in report.rational_eigenvalues
            ],
        }
        if result["rational_spectrum"]:
            result["cyclic_summands"] = [s.to_dict() for s in cyclic_summands(matrix)]
        return result, report.to_csv_rows(), None

    def _construct(self, spec: JobSpec) -> Result:
        document = self.job_source.load(spec.input_path)
        matrix = parse_matrix_json(require(document, "T"), "T")
        n = parse_count(document, "n")
        try:
            witness = self.constructor_resolver(spec.mode)(matrix, n)
        except HypothesisError as e:
            logging.warning(f"Runner: construction refused: {e}")
            refused = {
                "schema": SCHEMA_TAG,
                "command": Command.CONSTRUCT.value,
                "mode": spec.mode,
                "refused": True,
                "reason": str(e),
            }
            return refused, None, EXIT_UNDECIDED
        return witness.to_dict(), None, None

    def _oracle(self, spec: JobSpec) -> Result:
        t1 = t2 = sign_mode = None
        m, n = spec.m, spec.n
        if spec.class_kind is ClassKind.ENDO_PAIR:
            document = self.job_source.load(spec.input_path)
            t1 = parse_matrix_json(require(document, "T1"), "T1")
            t2 = parse_matrix_json(require(document, "T2"), "T2")
            m = t1.cols
            n = spec.n if spec.n is not None else parse_count(document, "n")
            sign_mode = parse_sign_mode(document)
        class_spec = ClassSpec(spec.class_kind, r1=spec.r1, r2=spec.r2, t1=t1, t2=t2)
        config = spec.oracle_config(get_default_oracle_config(spec.jobs))
        report = oracle_sweep(m, n, class_spec, spec.trials, spec.seed, config, sign_mode)
        return report.to_dict(), report.to_csv_rows(), report

    def _bound(self, spec: JobSpec) -> Result:
        if spec.input_path is None:
            checked, failures = check_bound_invariant(spec.m, spec.jobs)
            result = {
                "schema": SCHEMA_TAG,
                "command": Command.BOUND.value,
                "m": spec.m,
                "checked": checked,
                "failures": failures,
            }
            return result, None, EXIT_REFUTED if failures else EXIT_OK
        document = self.job_source.load(spec.input_path)
        pi1 = parse_permutation(require(document, "pi1"), "pi1")
        pi2 = parse_permutation(document.get("pi2", {"perm": list(range(pi1.size))}), "pi2")
        rho1 = parse_projection(document.get("rho1"), "rho1", pi1.size)
        rho2 = parse_projection(document.get("rho2"), "rho2", pi1.size)
        pi = single_permutation(pi1, pi2)
        account = codim_account(pi, rho1, rho2)
        result = {
            "schema": SCHEMA_TAG,
            "command": Command.BOUND.value,
            "composite_perm": list(pi.perm),
            "account": account.to_dict(),
            "theorem2_bound": theorem2_bound(pi, rho1, rho2),
        }
        rows = [["field", "value"]] + [[key, str(value)] for key, value in account.to_dict().items()]
        return result, rows, None


def main(argv: Optional[List[str]] = None) -> int:
    return Runner(argv).run()


if __name__ == "__main__":
    sys.exit(main())

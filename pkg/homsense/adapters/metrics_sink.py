"""
Optional Prometheus metrics written to a node-exporter textfile.

If prometheus_client is not installed, metrics are simply disabled.
"""
from abc import ABC, abstractmethod
from typing import Tuple

from bittensor.utils.btlogging import logging

from homsense import __version__, version_as_int
from homsense.domain.instance import CollisionReport

try:
    from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

    _PROMETHEUS_AVAILABLE = True
except ImportError:
    CollectorRegistry = Counter = Gauge = Histogram = write_to_textfile = None  # type: ignore
    _PROMETHEUS_AVAILABLE = False


class IMetricsSink(ABC):
    """Interface for recording run metrics."""

    @abstractmethod
    def record_job(self, command: str, outcome: str, duration: float) -> None:
        """Count one finished job and observe its duration in seconds."""
        pass

    @abstractmethod
    def record_oracle(self, report: CollisionReport) -> None:
        """Add an oracle report's solved systems and violations."""
        pass

    @abstractmethod
    def flush(self) -> Tuple[bool, str]:
        """
        Persist the collected metrics.

        Returns:
            (success, message)
        """
        pass


class NullMetricsSink(IMetricsSink):
    def record_job(self, command: str, outcome: str, duration: float) -> None:
        pass

    def record_oracle(self, report: CollisionReport) -> None:
        pass

    def flush(self) -> Tuple[bool, str]:
        return True, "metrics disabled"


class TextfileMetricsSink(IMetricsSink):
    """
    Metrics in a private registry, written with write_to_textfile on flush.
    """

    def __init__(self, path: str):
        self.path = path
        self.registry = CollectorRegistry()
        self.jobs_total = Counter(
            "homsense_jobs_total",
            "Total number of finished jobs.",
            ["command", "outcome"],
            registry=self.registry,
        )
        self.job_duration = Histogram(
            "homsense_job_duration_seconds",
            "Duration of a job in seconds.",
            ["command"],
            buckets=(0.01, 0.1, 0.5, 1.0, 5.0, 30.0, 120.0, 600.0),
            registry=self.registry,
        )
        self.systems_solved = Counter(
            "homsense_oracle_systems_solved_total",
            "Collision systems solved by the oracle.",
            registry=self.registry,
        )
        self.violations = Counter(
            "homsense_oracle_violations_total",
            "Violations reported by the oracle.",
            registry=self.registry,
        )
        self.version = Gauge(
            "homsense_version",
            "Toolkit version as integer (converted from semantic version string).",
            ["version_string"],
            registry=self.registry,
        ).labels(version_string=__version__)
        self.version.set(version_as_int)

    def record_job(self, command: str, outcome: str, duration: float) -> None:
        self.jobs_total.labels(command=command, outcome=outcome).inc()
        self.job_duration.labels(command=command).observe(duration)

    def record_oracle(self, report: CollisionReport) -> None:
        self.systems_solved.inc(report.systems_solved)
        self.violations.inc(len(report.violations))

    def flush(self) -> Tuple[bool, str]:
        try:
            write_to_textfile(self.path, self.registry)
        except OSError as e:
            logging.warning(f"TextfileMetricsSink: failed to write {self.path}: {e}")
            return False, str(e)
        return True, f"metrics written to {self.path}"


def create_metrics_sink(path: str = None) -> IMetricsSink:
    """Textfile sink when a path is given and prometheus_client is installed."""
    if not path:
        return NullMetricsSink()
    if not _PROMETHEUS_AVAILABLE:
        logging.warning(
            "Prometheus metrics requested but prometheus_client is not installed. "
            "Install prometheus_client to enable metrics or drop --metrics-file."
        )
        return NullMetricsSink()
    return TextfileMetricsSink(path)

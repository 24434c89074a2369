"""
Job description assembled by the runner from its flags.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from homsense.constants import (
    DEFAULT_H_SAMPLES,
    DEFAULT_H_TRIALS,
    DEFAULT_ORACLE_BUDGET,
    DEFAULT_ORACLE_TRIALS,
    DEFAULT_REFUTE_SAMPLES,
    DEFAULT_SAMPLE_BOUND,
    DEFAULT_SIGN_SAMPLES,
)
from homsense.domain.config import OracleConfig, SamplingConfig
from homsense.domain.instance import ClassKind
from homsense.errors import InputFormatError


class Command(str, Enum):
    CERTIFY = "certify"
    DECOMPOSE = "decompose"
    CONSTRUCT = "construct"
    ORACLE = "oracle"
    BOUND = "bound"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


CERTIFY_MODES = ("prop5", "thm1", "thm2", "cor3", "prop4")
CONSTRUCT_MODES = ("auto", "boundary", "half", "general")


@dataclass
class JobSpec:
    command: Command
    input_path: Optional[str] = None
    out_path: Optional[str] = None
    mode: Optional[str] = None
    seed: int = 0
    budget: int = DEFAULT_ORACLE_BUDGET
    output_format: OutputFormat = OutputFormat.JSON
    m: Optional[int] = None
    n: Optional[int] = None
    class_kind: ClassKind = ClassKind.PERM
    r1: int = 0
    r2: int = 0
    trials: int = DEFAULT_ORACLE_TRIALS
    bound: Optional[int] = None  # None: oracle and sampler keep their own defaults
    jobs: int = 1
    refute: bool = False
    reduce_symmetry: bool = True
    sign_samples: int = DEFAULT_SIGN_SAMPLES
    samples: int = DEFAULT_H_SAMPLES
    h_trials: int = DEFAULT_H_TRIALS
    metrics_file: Optional[str] = None

    def __post_init__(self):
        if self.command is Command.CERTIFY and self.mode not in CERTIFY_MODES:
            raise InputFormatError(f"certify needs --mode in {CERTIFY_MODES}, got {self.mode!r}")
        if self.command is Command.CONSTRUCT:
            self.mode = self.mode or "auto"
            if self.mode not in CONSTRUCT_MODES:
                raise InputFormatError(f"construct needs --mode in {CONSTRUCT_MODES}, got {self.mode!r}")
        if self.command is Command.ORACLE and self.class_kind is not ClassKind.ENDO_PAIR:
            if self.m is None or self.n is None:
                raise InputFormatError("oracle needs --m and --n")
        if self.command is Command.BOUND and self.input_path is None and self.m is None:
            raise InputFormatError("bound needs --input or --m")
        needs_input = self.command not in (Command.ORACLE, Command.BOUND) or (
            self.command is Command.ORACLE and self.class_kind is ClassKind.ENDO_PAIR
        )
        if needs_input and not self.input_path:
            raise InputFormatError(f"{self.command.value} needs --input")
        for name in ("budget", "trials", "jobs", "sign_samples", "samples", "h_trials"):
            if getattr(self, name) < 1:
                raise InputFormatError(f"--{name.replace('_', '-')} must be at least 1")
        if self.bound is not None and self.bound < 1:
            raise InputFormatError("--bound must be at least 1")

    def sampling_config(self) -> SamplingConfig:
        return SamplingConfig(
            bound=self.bound or DEFAULT_SAMPLE_BOUND,
            trials=self.h_trials,
            samples=self.samples,
            refute_samples=DEFAULT_REFUTE_SAMPLES,
        )

    def oracle_config(self, defaults: OracleConfig) -> OracleConfig:
        return OracleConfig(
            bound=self.bound or defaults.bound,
            budget=self.budget,
            jobs=self.jobs,
            sign_samples=self.sign_samples,
            retries=defaults.retries,
            reduce_symmetry=self.reduce_symmetry,
            seed=self.seed,
        )

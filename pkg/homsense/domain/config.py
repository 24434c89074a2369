"""
Run-time configuration objects.
"""
import os
from dataclasses import dataclass
from typing import Optional

from homsense.constants import (
    DEFAULT_H_SAMPLES,
    DEFAULT_H_TRIALS,
    DEFAULT_NONGENERIC_RETRIES,
    DEFAULT_ORACLE_BOUND,
    DEFAULT_ORACLE_BUDGET,
    DEFAULT_REFUTE_SAMPLES,
    DEFAULT_SAMPLE_BOUND,
    DEFAULT_SIGN_SAMPLES,
)


@dataclass
class SamplingConfig:
    """Random sampling used by the certifiers."""
    bound: int  # integer entries uniform in [-bound, bound]
    trials: int  # resampling attempts for a degenerate H
    samples: int  # independent H draws that must agree
    refute_samples: int  # random V draws tried by refute_by_sampling


@dataclass
class OracleConfig:
    """Exhaustive oracle settings."""
    bound: int  # entry bound for random V
    budget: int  # maximum collision systems solved per V
    jobs: int  # worker processes; 1 runs inline
    sign_samples: int  # sign patterns drawn when the signed class is too large
    retries: int  # resample-and-retry attempts for a non-generic V
    reduce_symmetry: bool
    seed: int = 0


def available_jobs() -> int:
    return os.cpu_count() or 1


def get_default_sampling_config() -> SamplingConfig:
    return SamplingConfig(
        bound=DEFAULT_SAMPLE_BOUND,
        trials=DEFAULT_H_TRIALS,
        samples=DEFAULT_H_SAMPLES,
        refute_samples=DEFAULT_REFUTE_SAMPLES,
    )


def get_default_oracle_config(jobs: Optional[int] = 1) -> OracleConfig:
    return OracleConfig(
        bound=DEFAULT_ORACLE_BOUND,
        budget=DEFAULT_ORACLE_BUDGET,
        jobs=jobs if jobs is not None else available_jobs(),
        sign_samples=DEFAULT_SIGN_SAMPLES,
        retries=DEFAULT_NONGENERIC_RETRIES,
        reduce_symmetry=True,
    )

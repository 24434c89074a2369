"""
Constants used throughout the toolkit.

All defaults are centralized here; the runner exposes each of them as a flag.
"""

# Document schema tag written to and required from every JSON document
SCHEMA_TAG = "homsense/v1"

# Random sampling defaults (integer entries uniform in [-bound, bound])
DEFAULT_SAMPLE_BOUND = 100
DEFAULT_H_TRIALS = 16  # resampling attempts for a degenerate H
DEFAULT_H_SAMPLES = 3  # independent H draws that must agree in certify_thm1
DEFAULT_SUBSPACE_ATTEMPTS = 64  # random_subspace gives up after this many rank-deficient draws

# Oracle defaults
DEFAULT_ORACLE_BUDGET = 50_000_000  # maximum number of collision systems solved per V
DEFAULT_SIGN_SAMPLES = 200
DEFAULT_NONGENERIC_RETRIES = 5
DEFAULT_ORACLE_TRIALS = 20
DEFAULT_ORACLE_BOUND = 10

# Refutation search
DEFAULT_REFUTE_SAMPLES = 8

# Prime used by the modular fast path of the oracle (2^61 - 1)
MODULAR_PRIME = 2305843009213693951

# Process exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_UNDECIDED = 2
EXIT_REFUTED = 3

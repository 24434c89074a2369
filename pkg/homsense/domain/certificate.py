"""
Certificates, endomorphism pairs and witness subspaces.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from homsense.constants import SCHEMA_TAG
from homsense.domain.matrix import RationalMatrix, Vector, format_fraction
from homsense.errors import ShapeMismatchError


class Verdict(str, Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    UNDECIDED = "undecided"


class Route(str, Enum):
    PROP5_EIGEN = "prop5_eigen"
    THM1_TAUH = "thm1_tauH"
    THM2_PERMUTATION = "thm2_permutation"
    COR3_SIGNED = "cor3_signed"
    PROP4_GENERAL_POINT = "prop4_general_point"


class SignMode(str, Enum):
    PLAIN = "plain"  # identification v1 = v2
    PLUS_MINUS = "plus_minus"  # identification v1 = +/- v2

    @property
    def excluded_eigenvalues(self) -> frozenset:
        if self is SignMode.PLUS_MINUS:
            return frozenset({Fraction(1), Fraction(-1)})
        return frozenset({Fraction(1)})


def vector_to_json(vector: Vector) -> list:
    return [format_fraction(x) for x in vector]


@dataclass(frozen=True)
class UniquenessCertificate:
    """
    Verdict plus the evidence it rests on.

    `evidence` holds JSON-ready values only (rationals already rendered as
    "p/q" strings). A refuted certificate always carries a counterexample.
    """

    verdict: Verdict
    route: Route
    m: int
    n: int
    sign_mode: SignMode
    evidence: Dict[str, Any] = field(default_factory=dict)
    counterexample: Optional[Tuple[Vector, Vector]] = None

    def __post_init__(self):
        if self.verdict is Verdict.REFUTED and self.counterexample is None:
            raise ValueError("a refuted certificate needs a concrete (v1, v2) pair")

    @property
    def is_certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def with_verdict(self, verdict: Verdict, counterexample=None, **extra_evidence) -> "UniquenessCertificate":
        evidence = dict(self.evidence)
        evidence.update(extra_evidence)
        return UniquenessCertificate(
            verdict=verdict,
            route=self.route,
            m=self.m,
            n=self.n,
            sign_mode=self.sign_mode,
            evidence=evidence,
            counterexample=counterexample,
        )

    def to_dict(self) -> dict:
        document = {
            "schema": SCHEMA_TAG,
            "verdict": self.verdict.value,
            "route": self.route.value,
            "parameters": {"m": self.m, "n": self.n, "sign_mode": self.sign_mode.value},
            "evidence": self.evidence,
        }
        if self.counterexample is not None:
            v1, v2 = self.counterexample
            document["counterexample"] = {"v1": vector_to_json(v1), "v2": vector_to_json(v2)}
        return document


@dataclass(frozen=True)
class EndoPair:
    """Two endomorphisms of Q^m."""

    t1: RationalMatrix
    t2: RationalMatrix

    def __post_init__(self):
        self.t1.require_square("T1")
        self.t2.require_square("T2")
        if self.t1.shape != self.t2.shape:
            raise ShapeMismatchError(f"T1 is {self.t1.shape} but T2 is {self.t2.shape}")

    @property
    def size(self) -> int:
        return self.t1.rows


@dataclass(frozen=True)
class WitnessSubspace:
    """Basis A (m x n) of V together with rank([A | TA])."""

    basis: RationalMatrix
    certificate_rank: int
    construction: str = ""

    @property
    def n(self) -> int:
        return self.basis.cols

    @property
    def is_transversal(self) -> bool:
        return self.certificate_rank == 2 * self.n

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_TAG,
            "construction": self.construction,
            "n": self.n,
            "certificate_rank": self.certificate_rank,
            "basis": self.basis.to_json(),
        }

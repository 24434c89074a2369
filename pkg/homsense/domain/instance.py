"""
Sensing instances and oracle reports.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from homsense.constants import SCHEMA_TAG
from homsense.domain.certificate import SignMode, vector_to_json
from homsense.domain.matrix import RationalMatrix, Vector
from homsense.errors import InputFormatError


class ClassKind(str, Enum):
    PERM = "perm"
    SIGNED_PERM = "signed_perm"
    PROJ_PERM = "proj_perm"
    SIGNED_PROJ_PERM = "signed_proj_perm"
    ENDO_PAIR = "endo_pair"

    @classmethod
    def parse(cls, text: str) -> "ClassKind":
        try:
            return cls(text.replace("-", "_"))
        except ValueError:
            raise InputFormatError(f"unknown class '{text}'") from None

    @property
    def is_signed(self) -> bool:
        return self in (ClassKind.SIGNED_PERM, ClassKind.SIGNED_PROJ_PERM)

    @property
    def has_projections(self) -> bool:
        return self in (ClassKind.PROJ_PERM, ClassKind.SIGNED_PROJ_PERM)


@dataclass(frozen=True)
class ClassSpec:
    """
    A class of linear maps to enumerate.

    For the projection kinds, tau1 ranges over rho1 * pi1 with rank(rho1) >= r1
    and tau2 over rho2 * pi2 with rank(rho2) >= r2. For endo_pair the class is
    the single pair (t1, t2).
    """

    kind: ClassKind
    r1: int = 0
    r2: int = 0
    t1: Optional[RationalMatrix] = None
    t2: Optional[RationalMatrix] = None

    def default_sign_mode(self) -> SignMode:
        return SignMode.PLUS_MINUS if self.kind.is_signed else SignMode.PLAIN

    def to_json(self) -> dict:
        document = {"kind": self.kind.value}
        if self.kind.has_projections:
            document.update({"r1": self.r1, "r2": self.r2})
        return document


@dataclass(frozen=True)
class SensingInstance:
    m: int
    n: int
    basis: RationalMatrix  # m x n, full column rank
    class_spec: ClassSpec
    sign_mode: SignMode = SignMode.PLAIN

    def __post_init__(self):
        if self.basis.shape != (self.m, self.n):
            raise InputFormatError(f"basis is {self.basis.shape}, expected ({self.m}, {self.n})")
        spec = self.class_spec
        if spec.kind.has_projections and (spec.r2 < 2 * self.n or spec.r1 < self.n):
            raise InputFormatError(
                f"projection ranks r1={spec.r1}, r2={spec.r2} need r1 >= n and r2 >= 2n (n={self.n})"
            )
        if spec.kind.has_projections and max(spec.r1, spec.r2) > self.m:
            raise InputFormatError(f"projection ranks exceed m={self.m}")
        if spec.kind is ClassKind.ENDO_PAIR and (spec.t1 is None or spec.t2 is None):
            raise InputFormatError("endo_pair class needs both T1 and T2")


@dataclass(frozen=True)
class Violation:
    """tau1(v1) = tau2(v2) although the identification fails."""

    tau1: Dict[str, Any]
    tau2: Dict[str, Any]
    v1: Vector
    v2: Vector
    trial: int = 0

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "v1": vector_to_json(self.v1),
            "v2": vector_to_json(self.v2),
        }


@dataclass(frozen=True)
class CollisionReport:
    """
    Outcome of an oracle run.

    `pairs_checked` counts the (tau1, tau2) pairs covered, `systems_solved`
    the collision systems actually solved after symmetry reduction.
    """

    violations: Tuple[Violation, ...]
    pairs_checked: int
    systems_solved: int
    sign_mode: SignMode = SignMode.PLAIN
    trials: int = 1
    resamples: int = 0
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_clean(self) -> bool:
        return not self.violations

    def merged(self, other: "CollisionReport") -> "CollisionReport":
        return CollisionReport(
            violations=self.violations + other.violations,
            pairs_checked=self.pairs_checked + other.pairs_checked,
            systems_solved=self.systems_solved + other.systems_solved,
            sign_mode=self.sign_mode,
            trials=self.trials + other.trials,
            resamples=self.resamples + other.resamples,
            parameters=self.parameters,
        )

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_TAG,
            "sign_mode": self.sign_mode.value,
            "parameters": self.parameters,
            "trials": self.trials,
            "pairs_checked": self.pairs_checked,
            "systems_solved": self.systems_solved,
            "resamples": self.resamples,
            "violation_count": len(self.violations),
            "violations": [v.to_dict() for v in self.violations],
        }

    def to_csv_rows(self) -> List[List[str]]:
        rows = [["row", "trial", "tau1", "tau2", "v1", "v2", "pairs_checked"]]
        for violation in self.violations:
            rows.append([
                "violation",
                str(violation.trial),
                _describe(violation.tau1),
                _describe(violation.tau2),
                " ".join(vector_to_json(violation.v1)),
                " ".join(vector_to_json(violation.v2)),
                "",
            ])
        rows.append(["summary", str(self.trials), "", "", "", "", str(self.pairs_checked)])
        return rows


def _describe(descriptor: Dict[str, Any]) -> str:
    return ";".join(f"{key}={value}" for key, value in descriptor.items())

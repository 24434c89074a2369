"""
Structure data of an endomorphism: invariant factors, eigenvalue
multiplicities and Jordan chains.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from homsense.domain.matrix import Vector, format_fraction
from homsense.domain.poly import PolyQ


@dataclass(frozen=True)
class InvariantFactorData:
    matrix_dim: int
    invariant_factors: Tuple[PolyQ, ...]  # monic, d_1 | d_2 | ...
    charpoly: PolyQ

    @property
    def minimal_polynomial(self) -> PolyQ:
        if not self.invariant_factors:
            return PolyQ.constant(1)
        return self.invariant_factors[-1]

    def to_dict(self) -> dict:
        return {
            "matrix_dim": self.matrix_dim,
            "invariant_factors": [f.to_json() for f in self.invariant_factors],
            "charpoly": self.charpoly.to_json(),
            "minimal_polynomial": self.minimal_polynomial.to_json(),
        }


@dataclass(frozen=True)
class EigenDescriptor:
    """
    Either a rational eigenvalue or an orbit tag.

    An orbit tag is a squarefree polynomial without rational roots standing
    for all of its (irrational) roots at once; every root of a tag has the
    same geometric multiplicity.
    """

    value: Optional[Fraction] = None
    tag: Optional[PolyQ] = None

    @property
    def is_rational(self) -> bool:
        return self.value is not None

    @property
    def degree(self) -> int:
        """Number of eigenvalues this descriptor stands for."""
        return 1 if self.is_rational else self.tag.degree

    def label(self) -> str:
        if self.is_rational:
            return format_fraction(self.value)
        return f"roots({self.tag})"

    def to_json(self) -> dict:
        if self.is_rational:
            return {"kind": "rational", "value": format_fraction(self.value)}
        return {"kind": "orbit_tag", "polynomial": self.tag.to_json(), "degree": self.tag.degree}


@dataclass(frozen=True)
class EigenMultiplicityReport:
    matrix_dim: int
    entries: Tuple[Tuple[EigenDescriptor, int], ...]

    def multiplicity_of(self, value: Fraction) -> int:
        """Geometric multiplicity of a rational value; 0 when it is no eigenvalue."""
        for descriptor, multiplicity in self.entries:
            if descriptor.is_rational and descriptor.value == value:
                return multiplicity
        return 0

    @property
    def rational_eigenvalues(self) -> List[Fraction]:
        return [d.value for d, _ in self.entries if d.is_rational]

    @property
    def orbit_tags(self) -> List[PolyQ]:
        return [d.tag for d, _ in self.entries if not d.is_rational]

    def to_dict(self) -> dict:
        return {
            "matrix_dim": self.matrix_dim,
            "entries": [
                {"eigenvalue": d.to_json(), "geometric_multiplicity": mult}
                for d, mult in self.entries
            ],
        }

    def to_csv_rows(self) -> List[List[str]]:
        rows = [["eigenvalue", "degree", "geometric_multiplicity"]]
        for descriptor, multiplicity in self.entries:
            rows.append([descriptor.label(), str(descriptor.degree), str(multiplicity)])
        return rows


@dataclass(frozen=True)
class JordanChainSet:
    """Chains (w_1, ..., w_d) with T w_1 = lambda w_1 and T w_j = lambda w_j + w_{j-1}."""

    eigenvalue: Fraction
    chains: Tuple[Tuple[Vector, ...], ...]

    @property
    def lengths(self) -> List[int]:
        return [len(c) for c in self.chains]

    @property
    def algebraic_multiplicity(self) -> int:
        return sum(self.lengths)

    @property
    def geometric_multiplicity(self) -> int:
        return len(self.chains)


@dataclass(frozen=True)
class CyclicSummand:
    eigenvalue: Fraction
    chain: Tuple[Vector, ...]

    @property
    def dimension(self) -> int:
        return len(self.chain)

    def truncated(self, keep: int) -> "CyclicSummand":
        """The invariant sub-summand spanned by w_1..w_keep."""
        return CyclicSummand(self.eigenvalue, self.chain[:keep])

    def to_dict(self) -> dict:
        return {
            "eigenvalue": format_fraction(self.eigenvalue),
            "dimension": self.dimension,
            "chain": [[format_fraction(x) for x in v] for v in self.chain],
        }

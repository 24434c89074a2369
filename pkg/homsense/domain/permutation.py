"""
Signed permutations, coordinate projections and the codimension account.

Index convention: 0-based throughout. The matrix of a SignedPermutation sends
e_i to sign[perm[i]] * e_{perm[i]}, so column i of the matrix holds
sign[perm[i]] in row perm[i].
"""
from dataclasses import dataclass, field
from itertools import permutations
from typing import FrozenSet, Iterator, List, Sequence, Tuple

from homsense.domain.matrix import RationalMatrix
from homsense.errors import InputFormatError, ShapeMismatchError


@dataclass(frozen=True)
class SignedPermutation:
    size: int
    perm: Tuple[int, ...]
    signs: Tuple[int, ...] = None

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if len(perm) != self.size or sorted(perm) != list(range(self.size)):
            raise InputFormatError(f"perm {list(self.perm)} is not a bijection on [0, {self.size})")
        signs = (1,) * self.size if self.signs is None else tuple(int(s) for s in self.signs)
        if len(signs) != self.size or any(s not in (1, -1) for s in signs):
            raise InputFormatError(f"signs {list(signs)} must be {self.size} entries of +1/-1")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, size: int) -> "SignedPermutation":
        return cls(size, tuple(range(size)))

    @classmethod
    def from_cycles(cls, size: int, cycles: Sequence[Sequence[int]], signs: Sequence[int] = None) -> "SignedPermutation":
        """Build from disjoint cycles; (a b c) sends a -> b -> c -> a."""
        perm = list(range(size))
        for cycle in cycles:
            for position, index in enumerate(cycle):
                perm[index] = cycle[(position + 1) % len(cycle)]
        return cls(size, tuple(perm), signs)

    @classmethod
    def all_unsigned(cls, size: int) -> Iterator["SignedPermutation"]:
        """Every permutation of [0, size) in lexicographic order of the image array."""
        for image in permutations(range(size)):
            yield cls(size, image)

    def with_signs(self, signs: Sequence[int]) -> "SignedPermutation":
        return SignedPermutation(self.size, self.perm, tuple(signs))

    @property
    def is_unsigned(self) -> bool:
        return all(s == 1 for s in self.signs)

    @property
    def sign_product(self) -> int:
        product = 1
        for s in self.signs:
            product *= s
        return product

    def __call__(self, index: int) -> int:
        return self.perm[index]

    def matrix(self) -> RationalMatrix:
        rows = [[0] * self.size for _ in range(self.size)]
        for i, target in enumerate(self.perm):
            rows[target][i] = self.signs[target]
        return RationalMatrix.from_rows(rows, cols=self.size)

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """Return self * other (apply `other` first)."""
        if other.size != self.size:
            raise ShapeMismatchError(f"cannot compose permutations of sizes {self.size} and {other.size}")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.size))
        inverse = self.inverse_perm()
        signs = tuple(self.signs[j] * other.signs[inverse[j]] for j in range(self.size))
        return SignedPermutation(self.size, perm, signs)

    def inverse_perm(self) -> Tuple[int, ...]:
        inverse = [0] * self.size
        for i, target in enumerate(self.perm):
            inverse[target] = i
        return tuple(inverse)

    def inverse(self) -> "SignedPermutation":
        """Inverse map; its matrix is the transpose."""
        inverse = self.inverse_perm()
        signs = tuple(self.signs[self.perm[i]] for i in range(self.size))
        return SignedPermutation(self.size, inverse, signs)

    def to_json(self) -> dict:
        return {"perm": list(self.perm), "signs": list(self.signs)}


@dataclass(frozen=True)
class CoordinateProjection:
    """Keeps the coordinates in `kept` and zeroes the rest."""

    size: int
    kept: FrozenSet[int]

    def __post_init__(self):
        kept = frozenset(int(k) for k in self.kept)
        if any(k < 0 or k >= self.size for k in kept):
            raise InputFormatError(f"kept indices {sorted(kept)} fall outside [0, {self.size})")
        object.__setattr__(self, "kept", kept)

    @classmethod
    def identity(cls, size: int) -> "CoordinateProjection":
        return cls(size, frozenset(range(size)))

    @classmethod
    def from_mask(cls, size: int, mask: int) -> "CoordinateProjection":
        return cls(size, frozenset(i for i in range(size) if mask >> i & 1))

    @classmethod
    def all_with_rank_at_least(cls, size: int, minimum: int) -> Iterator["CoordinateProjection"]:
        """Kept sets of size >= minimum, by bitmask ascending."""
        for mask in range(1 << size):
            if bin(mask).count("1") >= minimum:
                yield cls.from_mask(size, mask)

    @property
    def rank(self) -> int:
        return len(self.kept)

    @property
    def zeroed(self) -> FrozenSet[int]:
        return frozenset(range(self.size)) - self.kept

    @property
    def mask(self) -> int:
        return sum(1 << k for k in self.kept)

    def matrix(self) -> RationalMatrix:
        return RationalMatrix.diag([1 if i in self.kept else 0 for i in range(self.size)])

    def compose(self, other: "CoordinateProjection") -> "CoordinateProjection":
        return CoordinateProjection(self.size, self.kept & other.kept)

    def relabel(self, perm: SignedPermutation) -> "CoordinateProjection":
        """Image of the kept set under the permutation."""
        return CoordinateProjection(self.size, frozenset(perm(k) for k in self.kept))

    def to_json(self) -> dict:
        return {"size": self.size, "kept": sorted(self.kept)}


@dataclass(frozen=True)
class CycleDecomposition:
    """Orbits of a permutation, each starting at its minimal element."""

    cycles: Tuple[Tuple[int, ...], ...]

    @property
    def lengths(self) -> List[int]:
        return [len(c) for c in self.cycles]


@dataclass(frozen=True)
class CodimAccount:
    """Partition of the kept index set I2 and the codimension bound it yields."""

    size: int
    kept_count: int
    domino: FrozenSet[int]
    fixed: FrozenSet[int]
    complete_cycles: Tuple[Tuple[int, ...], ...]
    incomplete: FrozenSet[int]
    codim_bound: int = field(default=0)

    @property
    def cycle_indices(self) -> FrozenSet[int]:
        return frozenset(i for cycle in self.complete_cycles for i in cycle)

    @property
    def complete_cycle_sizes(self) -> List[int]:
        return [len(c) for c in self.complete_cycles]

    @property
    def dimension_bound(self) -> int:
        return self.size - self.codim_bound

    def to_dict(self) -> dict:
        return {
            "m": self.size,
            "rank_rho2": self.kept_count,
            "I_domino": sorted(self.domino),
            "I_fixed": sorted(self.fixed),
            "I_cycles": [list(c) for c in self.complete_cycles],
            "complete_cycle_sizes": self.complete_cycle_sizes,
            "I_incomplete": sorted(self.incomplete),
            "codim_bound": self.codim_bound,
            "dimension_bound": self.dimension_bound,
        }

"""
Dense matrices over the rationals.

Entries are `fractions.Fraction` values stored row-major in a tuple; every
matrix is immutable once built. Vectors are plain tuples of Fractions.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from homsense.errors import InputFormatError, NonSquareMatrixError, ShapeMismatchError

Scalar = Union[int, Fraction]
Vector = Tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string into a reduced Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputFormatError(f"boolean {value!r} is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            if sep:
                if int(den) == 0:
                    raise InputFormatError(f"zero denominator in {value!r}")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except ValueError:
            raise InputFormatError(f"{value!r} is not of the form p or p/q") from None
    raise InputFormatError(f"unsupported entry type {type(value).__name__}")


def format_fraction(value: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RationalMatrix:
    """Row-major matrix of Fractions with rows x cols entries."""

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeMismatchError(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatchError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    # Construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]], cols: int = None) -> "RationalMatrix":
        if not rows:
            return cls(0, cols or 0, ())
        width = len(rows[0])
        for index, row in enumerate(rows):
            if len(row) != width:
                raise ShapeMismatchError(f"row {index} has {len(row)} entries, expected {width}")
        return cls(len(rows), width, tuple(to_fraction(x) for row in rows for x in row))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], rows: int = None) -> "RationalMatrix":
        """Stack vectors as columns; `rows` fixes the height of an empty stack."""
        if not columns:
            return cls(rows or 0, 0, ())
        height = len(columns[0])
        for column in columns:
            if len(column) != height:
                raise ShapeMismatchError("columns of unequal length")
        return cls(
            height,
            len(columns),
            tuple(to_fraction(columns[j][i]) for i in range(height) for j in range(len(columns))),
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls.diag([1] * size)

    @classmethod
    def diag(cls, values: Sequence[Scalar]) -> "RationalMatrix":
        size = len(values)
        entries = [Fraction(0)] * (size * size)
        for i, value in enumerate(values):
            entries[i * size + i] = to_fraction(value)
        return cls(size, size, tuple(entries))

    @classmethod
    def jordan_block(cls, eigenvalue: Scalar, size: int) -> "RationalMatrix":
        """Upper Jordan block: eigenvalue on the diagonal, ones above it."""
        rows = [[0] * size for _ in range(size)]
        for i in range(size):
            rows[i][i] = eigenvalue
            if i + 1 < size:
                rows[i][i + 1] = 1
        return cls.from_rows(rows, cols=size)

    @classmethod
    def companion(cls, coefficients: Sequence[Scalar]) -> "RationalMatrix":
        """
        Companion matrix of the monic polynomial y^d + c_{d-1} y^{d-1} + ... + c_0.

        Args:
            coefficients: c_0, ..., c_{d-1} in ascending degree (leading 1 omitted)
        """
        size = len(coefficients)
        rows = [[0] * size for _ in range(size)]
        for i in range(1, size):
            rows[i][i - 1] = 1
        for i, c in enumerate(coefficients):
            rows[i][size - 1] = -to_fraction(c)
        return cls.from_rows(rows, cols=size)

    @classmethod
    def block_diag(cls, blocks: Iterable["RationalMatrix"]) -> "RationalMatrix":
        blocks = list(blocks)
        size = sum(b.rows for b in blocks)
        width = sum(b.cols for b in blocks)
        rows = [[Fraction(0)] * width for _ in range(size)]
        r0 = c0 = 0
        for block in blocks:
            for i in range(block.rows):
                for j in range(block.cols):
                    rows[r0 + i][c0 + j] = block[i, j]
            r0 += block.rows
            c0 += block.cols
        return cls(size, width, tuple(x for row in rows for x in row))

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def require_square(self, what: str = "matrix") -> None:
        if not self.is_square:
            raise NonSquareMatrixError(f"{what} must be square, got {self.rows}x{self.cols}")

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    # Arithmetic

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        other_columns = other.columns()
        entries = []
        for i in range(self.rows):
            row = self.row(i)
            for column in other_columns:
                entries.append(sum((a * b for a, b in zip(row, column) if a and b), Fraction(0)))
        return RationalMatrix(self.rows, other.cols, tuple(entries))

    def apply(self, vector: Sequence[Scalar]) -> Vector:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise ShapeMismatchError(f"vector of length {len(vector)} for {self.cols} columns")
        return tuple(
            sum((a * b for a, b in zip(self.row(i), vector) if a and b), Fraction(0))
            for i in range(self.rows)
        )

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def scale(self, factor: Scalar) -> "RationalMatrix":
        factor = to_fraction(factor)
        return RationalMatrix(self.rows, self.cols, tuple(factor * x for x in self.entries))

    def shift(self, value: Scalar) -> "RationalMatrix":
        """Return self - value * I."""
        self.require_square()
        value = to_fraction(value)
        entries = list(self.entries)
        for i in range(self.rows):
            entries[i * self.cols + i] -= value
        return RationalMatrix(self.rows, self.cols, tuple(entries))

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise ShapeMismatchError(f"cannot stack {self.shape} beside {other.shape}")
        entries = []
        for i in range(self.rows):
            entries.extend(self.row(i))
            entries.extend(other.row(i))
        return RationalMatrix(self.rows, self.cols + other.cols, tuple(entries))

    def select_columns(self, indices: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix.from_columns([self.column(j) for j in indices], rows=self.rows)

    def select_rows(self, indices: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(len(indices), self.cols, tuple(x for i in indices for x in self.row(i)))

    def power(self, exponent: int) -> "RationalMatrix":
        self.require_square()
        result = RationalMatrix.identity(self.rows)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[format_fraction(x) for x in self.row(i)] for i in range(self.rows)],
        }

    def __str__(self) -> str:
        body = "; ".join(" ".join(format_fraction(x) for x in self.row(i)) for i in range(self.rows))
        return f"[{body}]"

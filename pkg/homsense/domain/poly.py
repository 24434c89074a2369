"""
Univariate polynomials over the rationals and matrices of them.

`PolyQ` stores coefficients in ascending degree with trailing zeros stripped,
so the zero polynomial has an empty coefficient tuple and `degree is None`.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from homsense.domain.matrix import RationalMatrix, Scalar, format_fraction, to_fraction
from homsense.errors import NonSquareMatrixError, ShapeMismatchError, ZeroPolynomialError


def _strip(coefficients: Iterable) -> Tuple[Fraction, ...]:
    values = [to_fraction(c) for c in coefficients]
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class PolyQ:
    """Polynomial in y with Fraction coefficients, ascending degree."""

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _strip(self.coefficients))

    @classmethod
    def constant(cls, value: Scalar) -> "PolyQ":
        return cls((value,))

    @classmethod
    def y(cls) -> "PolyQ":
        return cls((0, 1))

    @classmethod
    def linear_root(cls, root: Scalar) -> "PolyQ":
        """Return y - root."""
        return cls((-to_fraction(root), 1))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar]) -> "PolyQ":
        result = cls.constant(1)
        for root in roots:
            result = result * cls.linear_root(root)
        return result

    @property
    def degree(self) -> Optional[int]:
        """Degree, or None for the zero polynomial."""
        if not self.coefficients:
            return None
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        if not self.coefficients:
            return Fraction(0)
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_constant(self) -> bool:
        return len(self.coefficients) <= 1

    def is_monic(self) -> bool:
        return self.leading == 1

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coefficients):
            return self.coefficients[power]
        return Fraction(0)

    def __add__(self, other: "PolyQ") -> "PolyQ":
        size = max(len(self.coefficients), len(other.coefficients))
        return PolyQ(self.coefficient(i) + other.coefficient(i) for i in range(size))

    def __neg__(self) -> "PolyQ":
        return PolyQ(-c for c in self.coefficients)

    def __sub__(self, other: "PolyQ") -> "PolyQ":
        return self + (-other)

    def __mul__(self, other) -> "PolyQ":
        if not isinstance(other, PolyQ):
            factor = to_fraction(other)
            return PolyQ(factor * c for c in self.coefficients)
        if self.is_zero() or other.is_zero():
            return PolyQ()
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if not a:
                continue
            for j, b in enumerate(other.coefficients):
                product[i + j] += a * b
        return PolyQ(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "PolyQ":
        result = PolyQ.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, divisor: "PolyQ") -> Tuple["PolyQ", "PolyQ"]:
        if divisor.is_zero():
            raise ZeroPolynomialError("division by the zero polynomial")
        remainder = list(self.coefficients)
        quotient = [Fraction(0)] * max(len(remainder) - len(divisor.coefficients) + 1, 0)
        d = divisor.degree
        lead = divisor.leading
        while len(remainder) - 1 >= d and any(remainder):
            shift = len(remainder) - 1 - d
            factor = remainder[-1] / lead
            quotient[shift] = factor
            for i, c in enumerate(divisor.coefficients):
                remainder[shift + i] -= factor * c
            remainder.pop()
            while remainder and remainder[-1] == 0:
                remainder.pop()
        return PolyQ(quotient), PolyQ(remainder)

    def __floordiv__(self, divisor: "PolyQ") -> "PolyQ":
        return divmod(self, divisor)[0]

    def __mod__(self, divisor: "PolyQ") -> "PolyQ":
        return divmod(self, divisor)[1]

    def divides(self, other: "PolyQ") -> bool:
        """True when self | other."""
        return (other % self).is_zero()

    def monic(self) -> "PolyQ":
        if self.is_zero():
            raise ZeroPolynomialError("the zero polynomial has no monic form")
        return self * (1 / self.leading)

    def derivative(self) -> "PolyQ":
        return PolyQ(i * c for i, c in enumerate(self.coefficients) if i)

    def evaluate(self, value: Scalar) -> Fraction:
        value = to_fraction(value)
        result = Fraction(0)
        for c in reversed(self.coefficients):
            result = result * value + c
        return result

    def __call__(self, value: Scalar) -> Fraction:
        return self.evaluate(value)

    def to_json(self) -> list:
        return [format_fraction(c) for c in self.coefficients]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for power in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[power]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if power == 0:
                body = format_fraction(magnitude)
            else:
                monomial = "y" if power == 1 else f"y^{power}"
                body = monomial if magnitude == 1 else f"{format_fraction(magnitude)}*{monomial}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def poly_gcd(a: PolyQ, b: PolyQ) -> PolyQ:
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    while not b.is_zero():
        a, b = b, a % b
    if a.is_zero():
        return a
    return a.monic()


def poly_product(factors: Iterable[PolyQ]) -> PolyQ:
    result = PolyQ.constant(1)
    for factor in factors:
        result = result * factor
    return result


@dataclass(frozen=True)
class PolyMatrix:
    """Row-major matrix of PolyQ entries."""

    rows: int
    cols: int
    entries: Tuple[PolyQ, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatchError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} polynomial matrix"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[PolyQ]]) -> "PolyMatrix":
        width = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != width:
                raise ShapeMismatchError("ragged polynomial matrix")
        return cls(len(rows), width, tuple(p for row in rows for p in row))

    @classmethod
    def identity(cls, size: int) -> "PolyMatrix":
        one, zero = PolyQ.constant(1), PolyQ()
        return cls(size, size, tuple(one if i == j else zero for i in range(size) for j in range(size)))

    @classmethod
    def characteristic(cls, matrix: RationalMatrix) -> "PolyMatrix":
        """The characteristic matrix yI - T."""
        matrix.require_square("characteristic matrix input")
        entries = []
        for i in range(matrix.rows):
            for j in range(matrix.cols):
                entry = PolyQ.constant(-matrix[i, j])
                if i == j:
                    entry = entry + PolyQ.y()
                entries.append(entry)
        return cls(matrix.rows, matrix.cols, tuple(entries))

    def __getitem__(self, key: Tuple[int, int]) -> PolyQ:
        i, j = key
        return self.entries[i * self.cols + j]

    def to_rows(self):
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def diagonal(self) -> Tuple[PolyQ, ...]:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def is_diagonal(self) -> bool:
        return all(self[i, j].is_zero() for i in range(self.rows) for j in range(self.cols) if i != j)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        entries = []
        for i in range(self.rows):
            for j in range(other.cols):
                total = PolyQ()
                for k in range(self.cols):
                    a, b = self[i, k], other[k, j]
                    if not a.is_zero() and not b.is_zero():
                        total = total + a * b
                entries.append(total)
        return PolyMatrix(self.rows, other.cols, tuple(entries))

    def determinant(self) -> PolyQ:
        """
        Determinant by fraction-free (Bareiss) elimination.

        Every division in the recurrence is exact in Q[y], so the intermediate
        entries stay polynomial.

        Raises:
            NonSquareMatrixError: for rectangular input
        """
        if self.rows != self.cols:
            raise NonSquareMatrixError(f"determinant needs a square matrix, got {self.rows}x{self.cols}")
        size = self.rows
        if size == 0:
            return PolyQ.constant(1)
        work = self.to_rows()
        sign = 1
        previous = PolyQ.constant(1)
        for k in range(size - 1):
            if work[k][k].is_zero():
                swap = next((i for i in range(k + 1, size) if not work[i][k].is_zero()), None)
                if swap is None:
                    return PolyQ()
                work[k], work[swap] = work[swap], work[k]
                sign = -sign
            pivot = work[k][k]
            for i in range(k + 1, size):
                for j in range(k + 1, size):
                    numerator = work[i][j] * pivot - work[i][k] * work[k][j]
                    work[i][j] = numerator // previous
                work[i][k] = PolyQ()
            previous = pivot
        return work[size - 1][size - 1] * sign

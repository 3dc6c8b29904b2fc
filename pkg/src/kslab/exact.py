"""Exact rational scalars and small dense matrices.

Scalars are ``gmpy2.mpq`` values (arbitrary precision, always in lowest
terms).  They compare and hash equal to :class:`fractions.Fraction`, so
callers may pass either.  Nothing in this module touches floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


def Q(x, d=None) -> Rational:
    """Coerce ``x`` (int, Fraction, mpq or "p/q" string) to a Rational."""
    if d is not None:
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return mpq(x, d)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or string")
    return mpq(x)


def parse_rational(text: str) -> Rational:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(num, den)


def format_rational(x) -> str:
    """Render as ``p/q``, or ``p`` when the denominator is 1."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RatMatrix:
    """Immutable dense matrix with Rational entries, stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        ent = tuple(e if type(e) is Rational else mpq(e) for e in entries)
        if len(ent) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries, got {len(ent)}")
        self.rows = rows
        self.cols = cols
        self.entries = ent
        self._hash = None

    @classmethod
    def _raw(cls, rows, cols, entries):
        # entries already a tuple of Rational
        obj = cls.__new__(cls)
        obj.rows = rows
        obj.cols = cols
        obj.entries = entries
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise DimensionError("ragged rows")
        return cls(r, c, [Q(x) for row in rows for x in row])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        ent = [ZERO] * (n * n)
        for i in range(n):
            ent[i * n + i] = ONE
        return cls._raw(n, n, tuple(ent))

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "RatMatrix":
        """The matrix unit E_ij (0-based)."""
        ent = [ZERO] * (n * n)
        ent[i * n + j] = ONE
        return cls._raw(n, n, tuple(ent))

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        n = len(values)
        ent = [ZERO] * (n * n)
        for i, v in enumerate(values):
            ent[i * n + i] = Q(v)
        return cls._raw(n, n, tuple(ent))

    @classmethod
    def column(cls, values: Sequence) -> "RatMatrix":
        return cls(len(values), 1, [Q(v) for v in values])

    @classmethod
    def row_vector(cls, values: Sequence) -> "RatMatrix":
        return cls(1, len(values), [Q(v) for v in values])

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Rational:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def tolist(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_diagonal(self) -> bool:
        n = self.cols
        return all(not e or (k // n == k % n) for k, e in enumerate(self.entries))

    def diagonal(self) -> tuple:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def trace(self) -> Rational:
        if not self.is_square():
            raise DimensionError("trace of a non-square matrix")
        return sum(self.diagonal(), ZERO)

    def transpose(self) -> "RatMatrix":
        r, c = self.rows, self.cols
        e = self.entries
        return RatMatrix._raw(c, r, tuple(e[i * c + j] for j in range(c) for i in range(r)))

    T = property(transpose)

    # -- arithmetic ---------------------------------------------------
    def _check_same(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return RatMatrix._raw(self.rows, self.cols,
                              tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        if self._check_same(other) is NotImplemented:
            return NotImplemented
        return RatMatrix._raw(self.rows, self.cols,
                              tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return RatMatrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def __mul__(self, scalar):
        if isinstance(scalar, RatMatrix):
            raise TypeError("use @ for matrix products")
        s = Q(scalar)
        return RatMatrix._raw(self.rows, self.cols, tuple(a * s for a in self.entries))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = Q(scalar)
        return RatMatrix._raw(self.rows, self.cols, tuple(a / s for a in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if not isinstance(other, RatMatrix):
            return NotImplemented
        n, m, p = self.rows, self.cols, other.cols
        if m != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self.entries, other.entries
        out = [ZERO] * (n * p)
        for i in range(n):
            base = i * p
            for k in range(m):
                aik = a[i * m + k]
                if not aik:
                    continue
                off = k * p
                for j in range(p):
                    bkj = b[off + j]
                    if bkj:
                        out[base + j] += aik * bkj
        return RatMatrix._raw(n, p, tuple(out))

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in self.row(i)) for i in range(self.rows))
        return f"RatMatrix[{body}]"


def bracket(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Commutator ab - ba."""
    return a @ b - b @ a


def vec(m: RatMatrix) -> tuple:
    return m.entries


def stack_columns(columns: Sequence[Sequence], rows: int | None = None) -> RatMatrix:
    """Matrix whose j-th column is ``columns[j]``."""
    if not columns:
        return RatMatrix.zeros(rows or 0, 0)
    r = len(columns[0])
    c = len(columns)
    return RatMatrix(r, c, [columns[j][i] for i in range(r) for j in range(c)])


# -- elimination --------------------------------------------------------

def _rref(A: RatMatrix, track: bool):
    """Reduced row echelon form by Gauss-Jordan with first-nonzero pivoting.

    Returns (R rows, pivot columns, T rows) where T @ A == R when ``track``.
    """
    r, c = A.rows, A.cols
    R = [list(A.row(i)) for i in range(r)]
    T = [[ONE if i == j else ZERO for j in range(r)] for i in range(r)] if track else None
    pivots = []
    prow = 0
    for col in range(c):
        if prow >= r:
            break
        piv = next((i for i in range(prow, r) if R[i][col]), None)
        if piv is None:
            continue
        if piv != prow:
            R[prow], R[piv] = R[piv], R[prow]
            if track:
                T[prow], T[piv] = T[piv], T[prow]
        inv = 1 / R[prow][col]
        if inv != 1:
            R[prow] = [x * inv for x in R[prow]]
            if track:
                T[prow] = [x * inv for x in T[prow]]
        for i in range(r):
            if i != prow:
                f = R[i][col]
                if f:
                    Ri, Rp = R[i], R[prow]
                    R[i] = [x - f * y for x, y in zip(Ri, Rp)]
                    if track:
                        T[i] = [x - f * y for x, y in zip(T[i], T[prow])]
        pivots.append(col)
        prow += 1
    return R, pivots, T


def rank(A: RatMatrix) -> int:
    return len(_rref(A, False)[1])


def _kernel_from_rref(R, pivots, cols):
    free = [j for j in range(cols) if j not in set(pivots)]
    basis = []
    for fj in free:
        v = [ZERO] * cols
        v[fj] = ONE
        for i, pj in enumerate(pivots):
            v[pj] = -R[i][fj]
        basis.append(RatMatrix.column(v))
    return tuple(basis)


def mat_kernel(A: RatMatrix) -> tuple[RatMatrix, ...]:
    """Basis of ker A as column matrices; its size is cols - rank(A)."""
    R, pivots, _ = _rref(A, False)
    return _kernel_from_rref(R, pivots, A.cols)


def left_null_space(A: RatMatrix) -> tuple[RatMatrix, ...]:
    """Row covectors y with y @ A == 0, forming a basis."""
    return tuple(k.transpose() for k in mat_kernel(A.transpose()))


@dataclass(frozen=True)
class SolveResult:
    """Fredholm certificate for A x = b.

    Exactly one of ``solution`` / ``witness`` is set.  ``witness`` is a row
    covector y with y @ A == 0 and y @ b != 0.
    """

    solution: RatMatrix | None
    kernel: tuple[RatMatrix, ...]
    witness: RatMatrix | None

    @property
    def solvable(self) -> bool:
        return self.solution is not None


def mat_solve(A: RatMatrix, b) -> SolveResult:
    """Solve A x = b exactly.

    The particular solution sets every free variable to zero.
    """
    if not isinstance(b, RatMatrix):
        b = RatMatrix.column(list(b))
    if b.cols != 1:
        raise DimensionError("right-hand side must be a single column")
    if A.rows != b.rows:
        raise DimensionError(f"A has {A.rows} rows but b has {b.rows}")
    R, pivots, T = _rref(A, True)
    tb = [sum((t * bi for t, bi in zip(T[i], b.entries) if t), ZERO) for i in range(A.rows)]
    kernel = _kernel_from_rref(R, pivots, A.cols)
    for i in range(len(pivots), A.rows):
        if tb[i]:
            return SolveResult(None, kernel, RatMatrix.row_vector(T[i]))
    x = [ZERO] * A.cols
    for i, pj in enumerate(pivots):
        x[pj] = tb[i]
    return SolveResult(RatMatrix.column(x), kernel, None)


def mat_inverse(A: RatMatrix) -> RatMatrix:
    """Exact inverse of a square matrix; raises ZeroDivisionError when singular."""
    if not A.is_square():
        raise DimensionError("inverse of a non-square matrix")
    R, pivots, T = _rref(A, True)
    if len(pivots) != A.rows:
        raise ZeroDivisionError("matrix is singular")
    return RatMatrix.from_rows(T)

"""Truncated formal Laurent series in 1/z.

A :class:`Series` is a finite sparse map exponent -> coefficient plus a
``floor``: every exponent below ``floor`` is unknown (truncated), every
stored coefficient at or above it is exact.  ``floor=None`` marks a series
that is known exactly (a Laurent polynomial).  Coefficients are Rationals
(scalar series, ``dim is None``) or ``dim x dim`` :class:`RatMatrix` values.

Each operation computes the weakest floor that is still honest: a
coefficient is only reported when no unknown input coefficient can reach it.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .exact import ONE, ZERO, DimensionError, Q, RatMatrix, Rational

DEFAULT_FLOOR = -16


class TruncationError(LookupError):
    """A coefficient below the floor was requested; its value is unknown."""


class NotInvertibleError(ValueError):
    pass


class ContractError(ValueError):
    pass


def _max_floor(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class Series:
    __slots__ = ("_c", "floor", "dim")

    def __init__(self, coeffs: Mapping[int, object] | None = None, floor: int | None = None,
                 dim: int | None = None):
        self.floor = floor
        self.dim = dim
        c = {}
        for k, v in (coeffs or {}).items():
            k = int(k)
            if floor is not None and k < floor:
                continue
            if dim is None:
                v = Q(v)
                if v:
                    c[k] = v
            else:
                if not isinstance(v, RatMatrix) or v.shape != (dim, dim):
                    raise DimensionError(f"coefficient at z^{k} is not {dim}x{dim}")
                if not v.is_zero():
                    c[k] = v
        self._c = c

    @classmethod
    def _raw(cls, c, floor, dim):
        obj = cls.__new__(cls)
        obj._c = c
        obj.floor = floor
        obj.dim = dim
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def scalar(cls, coeffs: Mapping[int, object] | None = None, floor: int | None = None):
        return cls(coeffs, floor, None)

    @classmethod
    def matrix(cls, dim: int, coeffs: Mapping[int, RatMatrix] | None = None,
               floor: int | None = None):
        return cls(coeffs, floor, dim)

    @classmethod
    def monomial(cls, coeff, exponent: int = 0, floor: int | None = None):
        if isinstance(coeff, RatMatrix):
            return cls({exponent: coeff}, floor, coeff.rows)
        return cls({exponent: coeff}, floor, None)

    @classmethod
    def one(cls, dim: int | None = None, floor: int | None = None):
        if dim is None:
            return cls._raw({0: ONE}, floor, None)
        return cls._raw({0: RatMatrix.identity(dim)}, floor, dim)

    @classmethod
    def zero(cls, dim: int | None = None, floor: int | None = None):
        return cls._raw({}, floor, dim)

    # -- inspection ---------------------------------------------------
    @property
    def is_matrix(self) -> bool:
        return self.dim is not None

    @property
    def exact(self) -> bool:
        return self.floor is None

    def terms(self) -> list[tuple[int, object]]:
        """(exponent, coefficient) pairs, highest exponent first."""
        return sorted(self._c.items(), key=lambda kv: -kv[0])

    def exponents(self) -> list[int]:
        return sorted(self._c, reverse=True)

    def top(self) -> int | None:
        return max(self._c) if self._c else None

    def bottom(self) -> int | None:
        return min(self._c) if self._c else None

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self._c

    def _zero_coeff(self):
        return ZERO if self.dim is None else RatMatrix.zeros(self.dim)

    def coeff(self, k: int):
        if self.floor is not None and k < self.floor:
            raise TruncationError(f"coefficient of z^{k} lies below the floor {self.floor}")
        v = self._c.get(k)
        return self._zero_coeff() if v is None else v

    def __getitem__(self, k: int):
        return self.coeff(k)

    def __len__(self):
        return len(self._c)

    def _effective_top(self):
        """Largest exponent that can carry a nonzero (known or unknown) value."""
        t = self.top()
        if self.floor is not None:
            return self.floor - 1 if t is None else max(t, self.floor - 1)
        return t

    # -- structural ---------------------------------------------------
    def truncate(self, floor: int | None) -> "Series":
        """Forget everything below ``floor`` (never makes a floor finer)."""
        if floor is None:
            return self
        nf = _max_floor(self.floor, floor)
        if nf == self.floor:
            return self
        return Series._raw({k: v for k, v in self._c.items() if k >= nf}, nf, self.dim)

    def with_floor(self, floor: int | None) -> "Series":
        return self.truncate(floor)

    def map_coeffs(self, fn) -> "Series":
        out = {}
        dim = self.dim
        for k, v in self._c.items():
            w = fn(v)
            if isinstance(w, RatMatrix):
                dim = w.rows
                if not w.is_zero():
                    out[k] = w
            elif w:
                out[k] = Q(w)
        return Series._raw(out, self.floor, dim)

    def shift(self, m: int) -> "Series":
        """Multiply by z^m."""
        fl = None if self.floor is None else self.floor + m
        return Series._raw({k + m: v for k, v in self._c.items()}, fl, self.dim)

    def restrict(self, lo: int | None = None, hi: int | None = None) -> "Series":
        """Keep exponents in [lo, hi]; the result is known exactly where it lives."""
        out = {k: v for k, v in self._c.items()
               if (lo is None or k >= lo) and (hi is None or k <= hi)}
        fl = self.floor
        if fl is not None and lo is not None and lo >= fl:
            fl = None
        return Series._raw(out, fl, self.dim)

    def entry(self, i: int, j: int) -> "Series":
        if self.dim is None:
            raise DimensionError("entry() needs a matrix series")
        n = self.dim
        return Series._raw({k: v.entries[i * n + j] for k, v in self._c.items()
                            if v.entries[i * n + j]}, self.floor, None)

    def trace(self) -> "Series":
        if self.dim is None:
            raise DimensionError("trace() needs a matrix series")
        return Series._raw({k: v.trace() for k, v in self._c.items() if v.trace()},
                           self.floor, None)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Series):
            return other
        if isinstance(other, RatMatrix):
            return Series.monomial(other, 0)
        return Series.monomial(Q(other), 0) if self.dim is None else \
            Series.monomial(RatMatrix.identity(self.dim) * Q(other), 0)

    def _check_add(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"cannot add series of dims {self.dim} and {other.dim}")

    def __add__(self, other):
        other = self._coerce(other)
        self._check_add(other)
        fl = _max_floor(self.floor, other.floor)
        c = {k: v for k, v in self._c.items() if fl is None or k >= fl}
        for k, v in other._c.items():
            if fl is not None and k < fl:
                continue
            if k in c:
                s = c[k] + v
                if (s.is_zero() if self.dim is not None else not s):
                    del c[k]
                else:
                    c[k] = s
            else:
                c[k] = v
        return Series._raw(c, fl, self.dim)

    __radd__ = __add__

    def __neg__(self):
        return Series._raw({k: -v for k, v in self._c.items()}, self.floor, self.dim)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def _product_floor(self, other):
        fl = None
        if self.floor is not None:
            t = other._effective_top()
            if t is not None:
                fl = self.floor + t
        if other.floor is not None:
            t = self._effective_top()
            if t is not None:
                fl = _max_floor(fl, other.floor + t)
        return fl

    def __mul__(self, other):
        if not isinstance(other, Series):
            if isinstance(other, RatMatrix):
                other = Series.monomial(other, 0)
            else:
                s = Q(other)
                if not s:
                    return Series._raw({}, self.floor, self.dim)
                return Series._raw({k: v * s for k, v in self._c.items()}, self.floor, self.dim)
        if self.dim is not None and other.dim is not None and self.dim != other.dim:
            raise DimensionError(f"cannot multiply series of dims {self.dim} and {other.dim}")
        dim = self.dim if self.dim is not None else other.dim
        if (self.exact and not self._c) or (other.exact and not other._c):
            return Series._raw({}, None, dim)
        fl = self._product_floor(other)
        out = {}
        a_items = list(self._c.items())
        b_items = list(other._c.items())
        both_matrix = self.dim is not None and other.dim is not None
        left_matrix = self.dim is not None
        for i, a in a_items:
            for j, b in b_items:
                k = i + j
                if fl is not None and k < fl:
                    continue
                if both_matrix:
                    p = a @ b
                elif left_matrix:
                    p = a * b
                else:
                    p = b * a
                if k in out:
                    out[k] = out[k] + p
                else:
                    out[k] = p
        if dim is None:
            out = {k: v for k, v in out.items() if v}
        else:
            out = {k: v for k, v in out.items() if not v.is_zero()}
        return Series._raw(out, fl, dim)

    def __rmul__(self, other):
        if isinstance(other, RatMatrix):
            return Series.monomial(other, 0) * self
        return self * other

    def __truediv__(self, scalar):
        return self * (1 / Q(scalar))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("use invert() for negative powers")
        out = Series.one(self.dim)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.dim == other.dim and self.floor == other.floor and self._c == other._c

    def __hash__(self):
        return hash((self.dim, self.floor, frozenset(self._c.items())))

    def agrees_with(self, other: "Series", floor: int | None = None) -> bool:
        """Equality of all coefficients both sides know (and at or above ``floor``)."""
        diff = (self - other).truncate(floor)
        return diff.is_zero()

    def __repr__(self):
        from .textio import render_series
        return f"Series({render_series(self)!r})"


# -- the operations of the contract -----------------------------------

def mul(a: Series, b: Series) -> Series:
    return a * b


def coeff(f: Series, k: int):
    return f.coeff(k)


def d_dz(a: Series) -> Series:
    """Termwise derivative; the floor drops by one."""
    out = {}
    for k, v in a._c.items():
        if k:
            out[k - 1] = v * k
    fl = None if a.floor is None else a.floor - 1
    return Series._raw(out, fl, a.dim)


def split_at(f: Series, a: int) -> tuple[Series, Series, Series]:
    """(part below z^a, the z^a term, part above z^a)."""
    below = {k: v for k, v in f._c.items() if k < a}
    at = {k: v for k, v in f._c.items() if k == a}
    above = {k: v for k, v in f._c.items() if k > a}
    F = f.floor
    return (
        Series._raw(below, F, f.dim),
        Series._raw(at, None if F is None or a >= F else F, f.dim),
        Series._raw(above, None if F is None or a + 1 >= F else F, f.dim),
    )


def _resolve_floor(a: Series, floor: int | None) -> int:
    if a.floor is not None:
        return a.floor if floor is None else max(a.floor, floor)
    return DEFAULT_FLOOR if floor is None else floor


def invert(a: Series, floor: int | None = None) -> Series:
    """Multiplicative inverse.

    Scalar: a must be c z^e (1 + lower terms) with c != 0.  Matrix: a must be
    id + (terms with negative exponents).  ``floor`` bounds the work for
    exact inputs whose inverse is an infinite series.
    """
    if a.is_zero():
        raise NotInvertibleError("zero series has no inverse")
    e = a.top()
    lead = a._c[e]
    if a.dim is not None:
        if e != 0 or lead != RatMatrix.identity(a.dim):
            raise NotInvertibleError("matrix series must be id + negative-exponent tail")
        lead_inv = None
    else:
        lead_inv = 1 / lead
    # relative tail u with a = lead z^e (1 + u)
    tail = {k - e: (v if lead_inv is None else v * lead_inv) for k, v in a._c.items() if k != e}
    if not tail:
        inv = lead_inv if lead_inv is not None else lead
        return Series._raw({-e: inv}, None if a.floor is None else a.floor - 2 * e, a.dim)
    if a.floor is not None:
        rel_floor = a.floor - e
        if floor is not None:
            rel_floor = max(rel_floor, floor + e)
    else:
        rel_floor = (DEFAULT_FLOOR if floor is None else floor) + e
    depth = -rel_floor
    ident = ONE if a.dim is None else RatMatrix.identity(a.dim)
    b = [ident]
    tail_items = sorted(tail.items(), key=lambda kv: -kv[0])
    for k in range(1, depth + 1):
        acc = None
        for i, t in tail_items:
            if -i > k:
                break
            term = t @ b[k + i] if a.dim is not None else t * b[k + i]
            acc = term if acc is None else acc + term
        b.append(-acc if acc is not None else (ZERO if a.dim is None else RatMatrix.zeros(a.dim)))
    out = {}
    for k, v in enumerate(b):
        if a.dim is None:
            if v:
                out[-k - e] = v * lead_inv
        elif not v.is_zero():
            out[-k - e] = v
    return Series._raw(out, rel_floor - e, a.dim)


def _check_negative(A: Series, what: str):
    t = A.top()
    if t is not None and t >= 0:
        raise ContractError(f"{what} needs support in exponents <= -1, found z^{t}")


def exp_neg(A: Series, floor: int | None = None) -> Series:
    """exp(A) for A supported in exponents <= -1, as a finite sum."""
    _check_negative(A, "exp_neg")
    ident = Series.one(A.dim)
    if A.is_zero() and A.exact:
        return ident
    F = _resolve_floor(A, floor)
    exact = A.exact
    total = ident if exact else ident.truncate(F)
    term = ident
    k = 0
    while True:
        k += 1
        term = (term * A) * Q(1, k)
        if term.is_zero() and term.exact:
            break
        if exact and term.bottom() < F:
            exact = False
            total = total.truncate(F)
        if not exact:
            term = term.truncate(F)
            if term.is_zero():
                break
        total = total + term
    return total if exact else total.truncate(F)


def log_neg(G: Series, floor: int | None = None) -> Series:
    """Inverse of :func:`exp_neg`: log(1 + T) for T supported in exponents <= -1."""
    T = G - Series.one(G.dim)
    _check_negative(T, "log_neg")
    if T.is_zero() and T.exact:
        return Series.zero(G.dim)
    F = _resolve_floor(G, floor)
    T = T.truncate(F)
    total = Series.zero(G.dim, F)
    power = Series.one(G.dim)
    k = 0
    while True:
        k += 1
        power = (power * T).truncate(F)
        if power.is_zero():
            break
        sign = 1 if k % 2 else -1
        total = total + power * Q(sign, k)
    return total


def matvec(M: Series, v: tuple[Series, ...]) -> tuple[Series, ...]:
    """Apply a matrix series to a column of scalar series."""
    n = M.dim
    if n is None or len(v) != n:
        raise DimensionError("matvec needs an n x n matrix series and n components")
    out = []
    for i in range(n):
        acc = Series.zero()
        for j in range(n):
            e = M.entry(i, j)
            if e.is_zero() and e.exact:
                continue
            acc = acc + e * v[j]
        out.append(acc)
    return tuple(out)


def from_entries(rows: Iterable[Iterable[Series]]) -> Series:
    """Assemble a matrix series from an n x n grid of scalar series."""
    grid = [list(r) for r in rows]
    n = len(grid)
    fl = None
    exps = set()
    for r in grid:
        for s in r:
            fl = _max_floor(fl, s.floor)
            exps.update(s._c)
    out = {}
    for k in exps:
        if fl is not None and k < fl:
            continue
        m = RatMatrix(n, n, [grid[i][j]._c.get(k, ZERO) for i in range(n) for j in range(n)])
        if not m.is_zero():
            out[k] = m
    return Series._raw(out, fl, n)


def z(dim: int | None = None) -> Series:
    return Series.monomial(ONE if dim is None else RatMatrix.identity(dim), 1)

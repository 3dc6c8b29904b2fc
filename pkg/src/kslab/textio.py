"""Text and JSON forms of rationals, series and operators.

Series grammar::

    series := term (('+' | '-') term)*
    term   := [rational | matrix] [var ['^' int]]  |  'O(' var '^' int ')'
    matrix := '[' '[' rational (',' rational)* ']' (',' '[' ... ']')* ']'

``var`` is ``z`` or ``zeta``.  ``O(z^k)`` records truncation: exponents
``<= k`` are unknown, i.e. the series floor is ``k + 1``.  Rendering is
canonical, so ``render(parse(s))`` is a fixed point after one pass.
"""

from __future__ import annotations

import re

from .exact import ONE, Q, RatMatrix, format_rational
from .laurent import Series


class SeriesSyntaxError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos


# -- rendering -----------------------------------------------------------

def render_matrix(m: RatMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(format_rational(x) for x in m.row(i)) + "]"
                           for i in range(m.rows)) + "]"


def _power(var: str, k: int) -> str:
    return var if k == 1 else f"{var}^{k}"


def render_series(f: Series, var: str = "z") -> str:
    parts: list[tuple[str, str]] = []  # (sign, body)
    for k, c in f.terms():
        if f.dim is not None:
            body = render_matrix(c)
            parts.append(("+", body if k == 0 else f"{body} {_power(var, k)}"))
            continue
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if k == 0:
            body = format_rational(a)
        elif a == ONE:
            body = _power(var, k)
        else:
            body = f"{format_rational(a)} {_power(var, k)}"
        parts.append((sign, body))
    if f.floor is not None:
        parts.append(("+", f"O({var}^{f.floor - 1})"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<O>O\()
  | (?P<var>zeta|z)
  | (?P<num>\d+(?:\s*/\s*\d+)?)
  | (?P<op>[-+^\[\](),])
""", re.VERBOSE)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SeriesSyntaxError("unexpected character", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group(kind)
            toks.append((kind, val, pos))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, var: str | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.var = var

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        t = self.toks[self.i]
        if (kind and t[0] != kind) or (val is not None and t[1] != val):
            want = val or kind
            raise SeriesSyntaxError(f"expected {want!r}, found {t[1] or 'end'!r}", self.text, t[2])
        self.i += 1
        return t

    def at(self, kind, val=None):
        t = self.peek()
        return t[0] == kind and (val is None or t[1] == val)

    def signed_int(self):
        neg = False
        if self.at("op", "-"):
            self.take()
            neg = True
        elif self.at("op", "+"):
            self.take()
        t = self.take("num")
        if "/" in t[1]:
            raise SeriesSyntaxError("exponent must be an integer", self.text, t[2])
        return -int(t[1]) if neg else int(t[1])

    def rational(self):
        neg = False
        if self.at("op", "-"):
            self.take()
            neg = True
        t = self.take("num")
        q = Q(t[1].replace(" ", ""))
        return -q if neg else q

    def matrix(self):
        self.take("op", "[")
        rows = []
        while True:
            self.take("op", "[")
            row = [self.rational()]
            while self.at("op", ","):
                self.take()
                row.append(self.rational())
            self.take("op", "]")
            rows.append(row)
            if self.at("op", ","):
                self.take()
                continue
            break
        self.take("op", "]")
        try:
            return RatMatrix.from_rows(rows)
        except ValueError as exc:
            raise SeriesSyntaxError(str(exc), self.text, self.peek()[2]) from None

    def variable(self):
        t = self.take("var")
        if self.var is None:
            self.var = t[1]
        elif t[1] != self.var:
            raise SeriesSyntaxError(f"mixed variables {self.var!r} and {t[1]!r}", self.text, t[2])
        if self.at("op", "^"):
            self.take()
            return self.signed_int()
        return 1

    def parse(self):
        coeffs: dict[int, object] = {}
        floor = None
        dim = None
        sign = 1
        if self.at("op", "-"):
            self.take()
            sign = -1
        elif self.at("op", "+"):
            self.take()
        while True:
            t = self.peek()
            if t[0] == "O":
                self.take()
                k = self.variable()
                self.take("op", ")")
                floor = k + 1 if floor is None else max(floor, k + 1)
            else:
                coef = None
                if t[0] == "num":
                    coef = self.rational()
                elif t[0] == "op" and t[1] == "[":
                    coef = self.matrix()
                    if dim is None:
                        dim = coef.rows
                    elif coef.rows != dim:
                        raise SeriesSyntaxError("matrix coefficients of different sizes",
                                                self.text, t[2])
                k = 0
                if self.at("var"):
                    k = self.variable()
                elif coef is None:
                    raise SeriesSyntaxError("expected a term", self.text, t[2])
                if coef is None:
                    coef = ONE
                coef = coef * sign
                if k in coeffs:
                    coeffs[k] = coeffs[k] + coef
                else:
                    coeffs[k] = coef
            if self.at("op", "+") or self.at("op", "-"):
                sign = 1 if self.take()[1] == "+" else -1
                continue
            break
        self.take("end")
        if dim is not None:
            if any(not isinstance(v, RatMatrix) for v in coeffs.values()):
                bad = next(k for k, v in coeffs.items() if not isinstance(v, RatMatrix))
                if coeffs[bad] == 0:
                    coeffs[bad] = RatMatrix.zeros(dim)
                else:
                    raise SeriesSyntaxError("scalar term in a matrix series", self.text, 0)
            return Series(coeffs, floor, dim)
        return Series(coeffs, floor, None)


def parse_series(text: str, var: str | None = None) -> Series:
    """Parse the series grammar; ``var`` pins the variable name if given."""
    return _Parser(text, var).parse()


# -- JSON ------------------------------------------------------------------

def series_to_json(f: Series) -> dict:
    terms = {}
    for k, c in f.terms():
        if f.dim is None:
            terms[str(k)] = format_rational(c)
        else:
            terms[str(k)] = [[format_rational(x) for x in c.row(i)] for i in range(c.rows)]
    return {"dim": f.dim, "floor": f.floor, "terms": terms}


def series_from_json(obj: dict) -> Series:
    dim = obj.get("dim")
    coeffs = {}
    for k, v in obj["terms"].items():
        if dim is None:
            coeffs[int(k)] = Q(v)
        else:
            coeffs[int(k)] = RatMatrix.from_rows([[Q(x) for x in row] for row in v])
    return Series(coeffs, obj.get("floor"), dim)


def matrix_to_json(m: RatMatrix) -> list:
    return [[format_rational(x) for x in m.row(i)] for i in range(m.rows)]


def matrix_from_json(rows: list) -> RatMatrix:
    return RatMatrix.from_rows([[Q(x) for x in row] for row in rows])

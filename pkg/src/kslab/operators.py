"""First-order operators a(z) d/dz + P(z) and the actions on them.

``conjugate`` is the gauge action op -> g^-1 op g, ``kp_flow_apply`` the
KP-flow shift of a scalar potential, ``gauge_fix`` the degree recursion
that removes the part of a scalar potential below z^-h, and ``derivation``
returns the concrete operators z^(i+1) d/dz and d/dz + rho/(h z).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .exact import ONE, ZERO, Q, RatMatrix, Rational
from .laurent import DEFAULT_FLOOR, DimensionError, Series, d_dz, invert, matvec, split_at
from .lie import AlgebraData, in_loop_span


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class KSOperator:
    """a(z) D + P(z) with a scalar series ``deriv_coeff`` and a scalar or
    matrix ``potential``.

    ``h_s`` and ``normalization`` are bookkeeping for derivations: the
    Witt-normalized operator is ``normalization`` times this one.
    """

    deriv_coeff: Series
    potential: Series
    h_s: int | None = None
    normalization: Rational | None = None

    def __post_init__(self):
        if self.deriv_coeff.dim is not None:
            raise OperatorError("deriv_coeff must be a scalar series")
        if self.deriv_coeff.is_zero() and self.deriv_coeff.exact:
            raise OperatorError("deriv_coeff must be nonzero")

    @property
    def mode(self) -> str:
        return "scalar" if self.potential.dim is None else "matrix"

    @property
    def dim(self) -> int | None:
        return self.potential.dim

    def __add__(self, other: Series) -> "KSOperator":
        """Add a multiplication operator to the potential."""
        return KSOperator(self.deriv_coeff, self.potential + other)

    def __sub__(self, other: Series) -> "KSOperator":
        return KSOperator(self.deriv_coeff, self.potential - other)

    def __call__(self, f):
        return apply(self, f)


def scalar_operator(h: int, potential: Series) -> KSOperator:
    """(1/(h z^(h-1))) D + potential."""
    return KSOperator(Series.monomial(Q(1, h), 1 - h), potential)


def matrix_operator(potential: Series) -> KSOperator:
    """D + potential (matrix mode)."""
    return KSOperator(Series.one(), potential)


def apply(op: KSOperator, f):
    """Apply the operator to a scalar series or to a column of scalar series."""
    a, P = op.deriv_coeff, op.potential
    if P.dim is None:
        if isinstance(f, tuple):
            raise DimensionError("scalar operator applied to a vector")
        return a * d_dz(f) + P * f
    if not isinstance(f, tuple) or len(f) != P.dim:
        raise DimensionError(f"matrix operator needs a {P.dim}-component vector")
    Pf = matvec(P, f)
    return tuple(a * d_dz(fi) + pfi for fi, pfi in zip(f, Pf))


def _top0(s: Series) -> int:
    t = s.top()
    return max(0, t) if t is not None else 0


def conjugate(op: KSOperator, gamma: Series, floor: int | None = None,
              gamma_inv: Series | None = None) -> KSOperator:
    """gamma^-1 op gamma = a D + (gamma^-1 P gamma + a gamma^-1 gamma').

    ``floor`` is the floor wanted for the new potential; by default that of
    the old potential (or the default working floor when everything is exact).
    """
    P, a = op.potential, op.deriv_coeff
    if gamma.dim != P.dim and gamma.dim is not None:
        raise DimensionError("gauge element and potential have different dims")
    target = floor if floor is not None else P.floor
    monomial_gamma = len(gamma) == 1 and gamma.exact
    if target is None and not monomial_gamma:
        target = gamma.floor if gamma.floor is not None else DEFAULT_FLOOR
    if gamma_inv is None:
        inv_floor = None if target is None else target - _top0(P) - _top0(a) - 1
        gamma_inv = invert(gamma, floor=inv_floor)
    gauge = a * (gamma_inv * d_dz(gamma))
    # a scalar gauge element commutes with the potential
    body = P if gamma.dim is None else gamma_inv * P * gamma
    if P.dim is not None and gauge.dim is None:
        gauge = gauge * RatMatrix.identity(P.dim)
    return KSOperator(a, (body + gauge).truncate(target))


def gauge_term(op: KSOperator, gamma: Series, floor: int | None = None) -> Series:
    """a gamma^-1 gamma' alone."""
    a = op.deriv_coeff
    fl = floor if floor is not None else (gamma.floor if gamma.floor is not None else DEFAULT_FLOOR)
    ginv = invert(gamma, floor=fl - _top0(a) - 1)
    return (a * (ginv * d_dz(gamma))).truncate(fl)


# -- scalar gauge fixing and flows ------------------------------------------

class GaugeFix(NamedTuple):
    gamma: Series
    operator: KSOperator
    steps: tuple[tuple[int, Rational], ...]


def _check_scalar_form(op: KSOperator, h: int):
    if op.mode != "scalar":
        raise OperatorError("scalar-mode operator expected")
    want = Series.monomial(Q(1, h), 1 - h)
    if not op.deriv_coeff.agrees_with(want) or not op.deriv_coeff.exact:
        raise OperatorError(f"deriv_coeff must be 1/({h} z^{h - 1})")


def gauge_fix(op: KSOperator, h: int, floor: int | None = None) -> GaugeFix:
    """Find gamma = 1 + sum d_i z^i making the potential vanish below z^-h.

    Works from z^(-h-1) downwards: at the highest remaining bad exponent j
    the new coefficient d_(j+h) = -h c_j / (j + h) is forced, and the whole
    conjugation is recomputed from the original operator before moving on.
    """
    _check_scalar_form(op, h)
    F = op.potential.floor if op.potential.floor is not None else (
        DEFAULT_FLOOR if floor is None else floor)
    if floor is not None:
        F = max(F, floor)
    gamma = Series.one()
    current = KSOperator(op.deriv_coeff, op.potential.truncate(F))
    steps = []
    for j in range(-h - 1, F - 1, -1):
        c = current.potential.coeff(j)
        if not c:
            continue
        i = j + h
        d = -h * c / i
        steps.append((i, d))
        gamma = gamma + Series.monomial(d, i)
        current = conjugate(op, gamma, floor=F)
    below, _, _ = split_at(current.potential, -h)
    if not below.is_zero():
        raise OperatorError("internal: gauge fixing left terms below z^-h")
    return GaugeFix(gamma, current, tuple(steps))


def kp_flow_apply(op: KSOperator, times: Mapping[int, object], h: int) -> KSOperator:
    """potential -> potential - sum_i (i/h) t_i z^(i-h)."""
    if op.mode != "scalar":
        raise OperatorError("KP flows act on scalar operators")
    shift = {}
    for i, t in times.items():
        if int(i) < 1:
            raise OperatorError("flow indices start at 1")
        v = Q(int(i), h) * Q(t)
        if v:
            shift[int(i) - h] = shift.get(int(i) - h, ZERO) + v
    return KSOperator(op.deriv_coeff, op.potential - Series.scalar(shift))


def add_times(t1: Mapping[int, object], t2: Mapping[int, object]) -> dict[int, Rational]:
    out = {int(k): Q(v) for k, v in t1.items()}
    for k, v in t2.items():
        out[int(k)] = out.get(int(k), ZERO) + Q(v)
    return {k: v for k, v in out.items() if v}


# -- derivations ---------------------------------------------------------------

def derivation(i: int, s: str, alg: AlgebraData | None = None, dim: int | None = None) -> KSOperator:
    """Concrete derivation operators.

    ``s="hom"``: the raw z^(i+1) D with h_s = 1 and Witt normalization -1.
    ``s="pri"``, i = -1: D + rho/(h z), which is already the normalized one.
    """
    if s == "hom":
        n = alg.n if alg is not None else dim
        pot = Series.zero(n)
        return KSOperator(Series.monomial(ONE, i + 1), pot, h_s=1, normalization=Q(-1))
    if s == "pri":
        if i != -1:
            raise OperatorError("principal derivations are implemented for i = -1 only")
        if alg is None:
            raise OperatorError("the principal derivation needs an algebra")
        h = alg.coxeter
        pot = Series.monomial(alg.rho_vee * Q(1, h), -1)
        return KSOperator(Series.one(), pot, h_s=h, normalization=ONE)
    raise OperatorError(f"unknown gradation {s!r} (expected 'hom' or 'pri')")


def commutator_apply(A: KSOperator, B: KSOperator, f):
    """[A, B] f = A(B f) - B(A f)."""
    x = apply(A, apply(B, f))
    y = apply(B, apply(A, f))
    if isinstance(x, tuple):
        return tuple(u - v for u, v in zip(x, y))
    return x - y


def witt_check(i: int, j: int, test_exponents=range(-6, 7), floor: int = DEFAULT_FLOOR) -> bool:
    """[z^(i+1) D, z^(j+1) D] = (j - i) z^(i+j+1) D on monomials z^m."""
    Di, Dj, Dij = derivation(i, "hom", dim=None), derivation(j, "hom", dim=None), \
        derivation(i + j, "hom", dim=None)
    for m in test_exponents:
        f = Series.monomial(ONE, m, floor=floor)
        lhs = commutator_apply(Di, Dj, f)
        rhs = apply(Dij, f) * (j - i)
        if not lhs.agrees_with(rhs):
            return False
    return True


def witt_loop_check(i: int, j: int, X: RatMatrix, test_exponents=range(-4, 5),
                    floor: int = DEFAULT_FLOOR) -> bool:
    """[z^(i+1) D, X z^j] = j X z^(i+j) as operators on vectors of monomials."""
    n = X.rows
    Di = derivation(i, "hom", dim=n)
    mult = Series.monomial(X, j)
    for m in test_exponents:
        for c in range(n):
            v = tuple(Series.monomial(ONE if r == c else ZERO, m, floor=floor) for r in range(n))
            x = apply(Di, matvec(mult, v))
            y = matvec(mult, apply(Di, v))
            rhs = matvec(Series.monomial(X * j, i + j), v)
            if not all((a - b).agrees_with(r) for a, b, r in zip(x, y, rhs)):
                return False
    return True


@dataclass(frozen=True)
class GaugeTermReport:
    gauge_term: Series
    highest_exponent: int | None
    bound: int
    in_span: bool
    ok: bool
    offending: tuple[int, RatMatrix] | None


def gauge_term_degree_check(A: Series, alg: AlgebraData, floor: int | None = None) -> GaugeTermReport:
    """For gamma = exp(A), check gamma^-1 gamma' lives in exponents <= -1 - k a0
    with every coefficient in the algebra."""
    from .laurent import exp_neg
    k, a0 = alg.twist_k, alg.kac_a0
    bound = -1 - k * a0
    F = floor if floor is not None else (A.floor if A.floor is not None else DEFAULT_FLOOR)
    gamma = exp_neg(A, floor=F)
    a = Series.monomial(Q(1, k * a0), 1 - k * a0)
    gt = gauge_term(KSOperator(a, Series.zero(alg.n)), gamma, floor=F)
    top = gt.top()
    offending = None
    for e, M in gt.terms():
        if e > bound:
            offending = (e, M)
            break
        if not alg.contains(M):
            offending = (e, M)
            break
    span_ok = in_loop_span(gt, alg)
    return GaugeTermReport(gt, top, bound, span_ok, offending is None, offending)

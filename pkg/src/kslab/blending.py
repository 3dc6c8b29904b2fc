"""The blending map between series in zeta and h-vectors of series in z = zeta^h.

zeta^(h-i) f_i(zeta^h)  <->  f_i(z) in component i (1-based).  Under it
multiplication by zeta becomes the cyclic element Lambda, zeta^h becomes z,
and d/d(zeta^h) becomes d/dz + diag(h - i)/(h z).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from .exact import ONE, Q, RatMatrix, Rational
from .laurent import Series
from .lie import build_algebra
from .operators import KSOperator, OperatorError, apply, matrix_operator


class BlendError(AssertionError):
    """The structural derivative or the intertwining identity failed."""


@dataclass(frozen=True)
class BlendContext:
    h: int

    def __post_init__(self):
        if self.h < 2:
            raise ValueError("blending needs h >= 2")

    @property
    def dim(self) -> int:
        return self.h


def _ctx(ctx) -> BlendContext:
    return ctx if isinstance(ctx, BlendContext) else BlendContext(int(ctx))


def slot(j: int, h: int) -> tuple[int, int]:
    """zeta^j -> (i, q) with zeta^j = zeta^(h-i) (zeta^h)^q, 1 <= i <= h."""
    r = j % h
    i = h - r if r else h
    return i, (j - (h - i)) // h


def blend(f: Series, ctx) -> tuple[Series, ...]:
    """Scalar series in zeta -> column of h scalar series in z."""
    h = _ctx(ctx).h
    if f.dim is not None:
        raise ValueError("blend takes a scalar series")
    comps: list[dict[int, Rational]] = [{} for _ in range(h)]
    for j, c in f.terms():
        i, q = slot(j, h)
        comps[i - 1][q] = c
    out = []
    for i in range(1, h + 1):
        fl = None if f.floor is None else ceil(Q(f.floor - (h - i), h))
        out.append(Series.scalar(comps[i - 1], fl))
    return tuple(out)


def unblend(v: tuple[Series, ...], ctx) -> Series:
    h = _ctx(ctx).h
    if len(v) != h:
        raise ValueError(f"expected {h} components, got {len(v)}")
    coeffs = {}
    fl = None
    for i, comp in enumerate(v, start=1):
        for q, c in comp.terms():
            coeffs[h * q + h - i] = c
        if comp.floor is not None:
            # unknown zeta exponents of this class are those <= h*floor - i
            cand = h * comp.floor - i + 1
            fl = cand if fl is None else max(fl, cand)
    return Series.scalar(coeffs, fl)


def m_matrix(c, ctx) -> RatMatrix:
    """diag(h - i + h c), the image of c zeta^-h together with the derivative
    correction, times h z."""
    h = _ctx(ctx).h
    c = Q(c)
    return RatMatrix.diag([h - i + h * c for i in range(1, h + 1)])


def special_value(h: int) -> Rational:
    """The unique c with trace(m_matrix(c, h)) = 0, solved from the linear
    equation h(h-1)/2 + h^2 c = 0."""
    trace_at_0 = m_matrix(0, h).trace()
    slope = m_matrix(1, h).trace() - trace_at_0
    return -trace_at_0 / slope


def cyclic_element(h: int) -> Series:
    """Lambda = sum E_(i,i+1) + z E_(h,1)."""
    return build_algebra("A", h - 1).lambda_cyclic


def zeta_power(j: int, ctx) -> Series:
    """Matrix image of multiplication by zeta^j, i.e. Lambda^j."""
    h = _ctx(ctx).h
    lam = cyclic_element(h)
    q, r = divmod(j, h)
    # Lambda^h = z id, so Lambda^j = z^q Lambda^r
    return (lam ** r).shift(q)


def derivative_correction(ctx) -> RatMatrix:
    """Diagonal D with d/d(zeta^h) <-> d/dz + D/z, read off from the monomials
    zeta^(h-i) (q = 0) and then confirmed on other powers of zeta^h."""
    h = _ctx(ctx).h
    diag = []
    for i in range(1, h + 1):
        j = h - i
        # (1/(h zeta^(h-1))) d/dzeta zeta^j = (j/h) zeta^(j-h)
        img = blend(Series.monomial(Q(j, h), j - h), h)
        # component i holds (j/h) z^-1; nothing else
        diag.append(img[i - 1].coeff(-1))
        for k, comp in enumerate(img):
            if k != i - 1 and not comp.is_zero():
                raise BlendError("derivative of a single slot leaked into another component")
    D = RatMatrix.diag(diag)
    for q in range(-3, 4):
        for i in range(1, h + 1):
            j = h * q + h - i
            lhs = blend(Series.monomial(Q(j, h), j - h), h)
            rhs = Q(q) + D[i - 1, i - 1]
            if lhs[i - 1].coeff(q - 1) != rhs:
                raise BlendError(f"derivative correction fails on zeta^{j}")
    return D


def _scalar_deriv_coeff(h: int) -> Series:
    return Series.monomial(Q(1, h), 1 - h)


def blend_potential(P: Series, ctx) -> Series:
    """Image of multiplication by P(zeta) as a matrix series (a polynomial
    in Lambda and 1/z)."""
    h = _ctx(ctx).h
    out = Series.zero(h)
    for j, c in P.terms():
        out = out + zeta_power(j, h) * c
    if P.floor is not None:
        # unknown zeta^j, j < F, reach z-exponents up to ceil((F-1)/h)
        out = out.truncate(-((-(P.floor - 1)) // h) + 1)
    return out


def blend_operator(op: KSOperator, ctx, check_floor: int = -12) -> KSOperator:
    """Matrix operator O with blend(op f) = O blend(f).

    ``op`` must be (1/(h zeta^(h-1))) d/dzeta + P(zeta).  The identity is
    verified on zeta^j for |j| <= 3h before returning.
    """
    h = _ctx(ctx).h
    if op.mode != "scalar":
        raise OperatorError("blend_operator takes a scalar operator")
    if not op.deriv_coeff.agrees_with(_scalar_deriv_coeff(h)) or not op.deriv_coeff.exact:
        raise OperatorError(f"deriv_coeff must be 1/({h} zeta^{h - 1})")
    D = derivative_correction(h)
    pot = Series.monomial(D, -1) + blend_potential(op.potential, h)
    out = matrix_operator(pot)
    if not intertwining_check(op, out, h, floor=check_floor):
        raise BlendError("blended operator fails the intertwining identity")
    return out


def intertwining_check(op: KSOperator, mop: KSOperator, ctx, floor: int = -12,
                       span: int | None = None) -> bool:
    """blend(op zeta^j) == mop blend(zeta^j) for |j| <= span (default 3h),
    on the coefficients both sides know at or above ``floor`` in zeta."""
    h = _ctx(ctx).h
    span = 3 * h if span is None else span
    for j in range(-span, span + 1):
        f = Series.monomial(ONE, j, floor=floor)
        lhs = blend(apply(op, f), h)
        rhs = apply(mop, blend(f, h))
        if not all(a.agrees_with(b) for a, b in zip(lhs, rhs)):
            return False
    return True


def scalar_ks_operator(h: int, c, extra: Series | None = None) -> KSOperator:
    """(1/(h zeta^(h-1))) d/dzeta + c zeta^-h + zeta (+ extra)."""
    pot = Series.scalar({1: ONE, -h: Q(c)})
    if extra is not None:
        pot = pot + extra
    return KSOperator(_scalar_deriv_coeff(h), pot)


def blend_scalar_gauge(gamma: Series, ctx) -> Series:
    """gamma(zeta^h) acts on each component as gamma(z): the blended gauge
    element is gamma(z) id."""
    h = _ctx(ctx).h
    return gamma * RatMatrix.identity(h)


def lift_to_zeta(gamma: Series, h: int) -> Series:
    """gamma(z) -> gamma(zeta^h)."""
    fl = None if gamma.floor is None else h * (gamma.floor - 1) + 1
    return Series.scalar({h * k: c for k, c in gamma.terms()}, fl)


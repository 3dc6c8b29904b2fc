import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kslab.blending import (BlendContext, blend, blend_operator, blend_potential,
                            blend_scalar_gauge, cyclic_element, derivative_correction,
                            intertwining_check, lift_to_zeta, m_matrix, scalar_ks_operator,
                            special_value, unblend, zeta_power)
from kslab.exact import Q, RatMatrix
from kslab.laurent import Series, matvec
from kslab.lie import build_algebra
from kslab.operators import KSOperator, OperatorError, conjugate, matrix_operator
from kslab.textio import parse_series as p

from strategies import rationals, scalar_series


def col(*entries):
    return tuple(Series.scalar(e) for e in entries)


def test_blend_examples_h2():
    assert blend(p("1"), 2) == col({}, {0: 1})
    assert blend(p("z"), 2) == col({0: 1}, {})
    assert blend(p("z^2"), 2) == col({}, {1: 1})
    assert blend(Series.zero(), 2) == col({}, {})


def test_blend_examples_h3():
    # zeta^(h-i) f_i(zeta^h) -> f_i(z) in slot i
    assert blend(p("z^2"), 3) == col({0: 1}, {}, {})
    assert blend(p("z"), 3) == col({}, {0: 1}, {})
    assert blend(p("z^-1"), 3) == col({-1: 1}, {}, {})
    assert blend(p("z^-3 + 7 z^4"), 3) == col({}, {1: 7}, {-1: 1})


def test_context():
    with pytest.raises(ValueError):
        BlendContext(1)
    assert BlendContext(4).dim == 4


@pytest.mark.parametrize("h", [2, 3, 4, 5])
@given(f=scalar_series(lo=-9, hi=6, floor=st.sampled_from([None, -10, -11, -12])))
def test_unblend_blend(h, f):
    v = blend(f, h)
    back = unblend(v, h)
    assert back.agrees_with(f)
    assert back.floor == f.floor


@pytest.mark.parametrize("h", [2, 3, 4])
@given(f=scalar_series(lo=-8, hi=5))
def test_blend_intertwines_zeta_and_lambda(h, f):
    lam = cyclic_element(h)
    assert blend(f * p("z"), h) == matvec(lam, blend(f, h))
    zh = Series.monomial(Q(1), h)
    assert blend(f * zh, h) == tuple(c * p("z") for c in blend(f, h))


@settings(max_examples=30)
@given(f=scalar_series(lo=-8, hi=5), g=scalar_series(lo=-8, hi=5), a=rationals)
def test_blend_linear(f, g, a):
    lhs = blend(f * a + g, 3)
    assert lhs == tuple(x * a + y for x, y in zip(blend(f, 3), blend(g, 3)))


def test_zeta_power_is_lambda_power():
    for h in (2, 3, 4):
        lam = cyclic_element(h)
        assert zeta_power(1, h) == lam
        assert zeta_power(h, h) == Series.monomial(RatMatrix.identity(h), 1)
        assert zeta_power(-1, h) * lam == Series.one(h)
        assert zeta_power(h + 2, h) == lam * lam * zeta_power(h, h)


def test_m_matrix_examples():
    assert m_matrix(Q(-1, 4), 2) == RatMatrix.diag([Q(1, 2), Q(-1, 2)])
    assert m_matrix(Q(-1, 4), 2) == build_algebra("A", 1).rho_vee
    assert m_matrix(Q(-1, 3), 3) == RatMatrix.diag([1, 0, -1])
    assert m_matrix(Q(-1, 3), 3).trace() == 0


@pytest.mark.parametrize("h", [2, 3, 4, 5, 6])
@given(c=rationals)
def test_m_matrix_trace(h, c):
    M = m_matrix(c, h)
    assert M.trace() == Q(h * (h - 1), 2) + h * h * c
    assert (M.trace() == 0) == (c == Q(1 - h, 2 * h))


@pytest.mark.parametrize("h", [2, 3, 4, 5, 6])
def test_special_value(h):
    assert special_value(h) == Q(1 - h, 2 * h)
    assert m_matrix(special_value(h), h) == build_algebra("A", h - 1).rho_vee


def test_special_values_listed():
    assert [special_value(h) for h in range(2, 6)] == [Q(-1, 4), Q(-1, 3), Q(-3, 8), Q(-2, 5)]


@pytest.mark.parametrize("h", [2, 3, 4, 5])
def test_derivative_correction(h):
    D = derivative_correction(h)
    assert D == RatMatrix.diag([Q(h - i, h) for i in range(1, h + 1)])


def test_blend_multiplication_operators():
    h = 3
    deriv = Series.monomial(Q(1, h), 1 - h)
    mult_zeta = KSOperator(deriv, p("z"))
    out = blend_operator(mult_zeta, h)
    assert out.potential == Series.monomial(derivative_correction(h), -1) + cyclic_element(h)
    assert blend_potential(p("z"), h) == cyclic_element(h)
    assert blend_potential(Series.monomial(Q(1), h), h) == Series.monomial(RatMatrix.identity(h), 1)


@pytest.mark.parametrize("h", [2, 3, 4, 5])
def test_special_operator_blends_to_principal_derivation(h):
    alg = build_algebra("A", h - 1)
    op = scalar_ks_operator(h, Q(1 - h, 2 * h))
    out = blend_operator(op, h)
    want = Series.monomial(alg.rho_vee * Q(1, h), -1) + alg.lambda_cyclic
    assert out.potential == want
    assert out.deriv_coeff == Series.one()
    assert intertwining_check(op, out, h, floor=-12)


def test_h2_example():
    op = KSOperator(Series.monomial(Q(1, 2), -1), p("z - 1/4 z^-2"))
    out = blend_operator(op, 2)
    alg = build_algebra("A", 1)
    assert out.potential == Series.monomial(alg.rho_vee * Q(1, 2), -1) + alg.lambda_cyclic


@pytest.mark.parametrize("h", [2, 3])
@given(c=rationals, extra=scalar_series(lo=-7, hi=-1))
@settings(max_examples=15, deadline=None)
def test_intertwining_random(h, c, extra):
    op = scalar_ks_operator(h, c, extra)
    out = blend_operator(op, h)
    assert intertwining_check(op, out, h, floor=-14)
    M = m_matrix(c, h)
    assert out.potential.coeff(-1) * h == M + blend_potential(extra, h).coeff(-1) * h


def test_intertwining_detects_mismatch():
    h = 2
    op = scalar_ks_operator(h, Q(-1, 4))
    wrong = matrix_operator(cyclic_element(h))
    assert not intertwining_check(op, wrong, h)


def test_blend_operator_rejects_other_forms():
    with pytest.raises(OperatorError):
        blend_operator(KSOperator(Series.one(), p("z")), 2)
    with pytest.raises(OperatorError):
        blend_operator(matrix_operator(cyclic_element(2)), 2)


@pytest.mark.parametrize("h", [2, 3])
@given(d=st.lists(rationals, min_size=3, max_size=3))
@settings(max_examples=15, deadline=None)
def test_gauge_compatibility(h, d):
    """Blending the scalar gauge by gamma(zeta^h) equals the matrix gauge by gamma(z) id."""
    gamma = Series.scalar({0: 1, -1: d[0], -2: d[1], -3: d[2]})
    op = scalar_ks_operator(h, Q(1, 5))
    F = -10
    scalar_side = conjugate(op, lift_to_zeta(gamma, h), floor=h * F)
    via_scalar = blend_operator(scalar_side, h, check_floor=h * F + 2 * h)
    via_matrix = conjugate(blend_operator(op, h), blend_scalar_gauge(gamma, h), floor=F)
    assert via_scalar.potential.agrees_with(via_matrix.potential)
    assert via_matrix.potential.floor == F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kslab.exact import Q, RatMatrix
from kslab.laurent import (ContractError, NotInvertibleError, Series, TruncationError, coeff,
                           d_dz, exp_neg, invert, log_neg, mul, split_at)
from kslab.lie import build_algebra, graded_piece
from kslab.textio import parse_series as p

from strategies import matrices, matrix_series, negative_matrix_series, rationals, scalar_series


def test_product_with_floor():
    a = Series.scalar({0: 1, -1: 1}, -10)
    b = Series.scalar({0: 1, -1: -1}, -10)
    prod = mul(a, b)
    # z^-10 only pairs known coefficients, so it is still known
    assert prod.floor == -10
    assert prod.agrees_with(p("1 - z^-2"))
    assert prod.coeff(-10) == 0


def test_lambda_squared_is_z():
    lam = build_algebra("A", 1).lambda_cyclic
    assert lam * lam == Series.monomial(RatMatrix.identity(2), 1)


@given(rationals, rationals)
def test_inverse_of_gauge_element(d1, d2):
    g = Series.scalar({0: 1, -1: d1, -2: d2})
    gi = invert(g, floor=-12)
    assert (g * gi).agrees_with(Series.one())
    assert (g * gi).floor in (None, -12)


def test_invert_examples():
    assert invert(Series.one()) == Series.one()
    g = invert(p("1 + 3 z^-1"), floor=-5)
    assert g.agrees_with(p("1 - 3 z^-1 + 9 z^-2 - 27 z^-3 + 81 z^-4 - 243 z^-5"))
    assert invert(p("2 z^3")) == p("1/2 z^-3")
    with pytest.raises(NotInvertibleError):
        invert(Series.zero())
    with pytest.raises(NotInvertibleError):
        invert(Series.monomial(RatMatrix.diag([2, 1]), 0))


@given(matrices(2))
def test_matrix_inverse_series(A):
    g = Series.one(2) + Series.monomial(A, -1)
    gi = invert(g, floor=-8)
    assert (g * gi).agrees_with(Series.one(2))
    # geometric series: id - A z^-1 + A^2 z^-2 - ...
    assert gi.coeff(-2) == A @ A
    assert gi.coeff(-3) == -(A @ A @ A)


def test_derivative_examples():
    assert d_dz(p("z^3")) == p("3 z^2")
    assert d_dz(p("5")).is_zero()
    f = Series.scalar({0: 1, -3: 2}, -5)
    assert d_dz(f).floor == -6
    assert d_dz(f).agrees_with(Series.scalar({-4: -6}))


@given(scalar_series(floor=st.sampled_from([None, -7])), scalar_series(floor=st.sampled_from([None, -9])))
def test_leibniz(a, b):
    lhs = d_dz(a * b)
    rhs = d_dz(a) * b + a * d_dz(b)
    assert lhs.agrees_with(rhs)


@given(scalar_series(), scalar_series(), scalar_series())
def test_ring_axioms_scalar(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=40)
@given(matrix_series(floor=st.sampled_from([None, -6])), matrix_series(), matrix_series())
def test_ring_axioms_matrix(a, b, c):
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)


@settings(max_examples=60)
@given(scalar_series(floor=st.just(-4)), scalar_series(floor=st.just(-5)),
       st.lists(rationals, min_size=6, max_size=6))
def test_truncation_honesty(a, b, fill):
    """Every coefficient a product reports is independent of the unknown tail."""
    prod = a * b

    def complete(s, vals):
        c = dict(s.terms())
        for i, v in enumerate(vals):
            c[s.floor - 1 - i] = v
        return Series.scalar(c)

    full = complete(a, fill[:3]) * complete(b, fill[3:])
    assert full.agrees_with(prod)
    full2 = complete(a, [0, 0, 0]) * complete(b, [0, 0, 0])
    assert full2.agrees_with(prod)


def test_exp_neg_examples():
    assert exp_neg(Series.zero(2)) == Series.one(2)
    N = RatMatrix.from_rows([[0, 1], [0, 0]])
    e = exp_neg(Series.monomial(N, -1))
    assert e == Series.one(2) + Series.monomial(N, -1)
    assert e.exact
    with pytest.raises(ContractError):
        exp_neg(Series.monomial(N, 0))


def test_log_exp_sl3():
    alg = build_algebra("A", 2)
    import random
    rng = random.Random(3)
    A = Series.zero(3)
    for k in (-1, -2, -3):
        for X, _ in alg.basis:
            A = A + Series.monomial(X * Q(rng.randint(-3, 3), rng.randint(1, 3)), k)
    G = exp_neg(A, floor=-8)
    assert log_neg(G).agrees_with(A)
    assert all(alg.contains(M) for _, M in log_neg(G).terms())


@settings(max_examples=30)
@given(negative_matrix_series())
def test_exp_log_inverse(A):
    G = exp_neg(A, floor=-9)
    assert log_neg(G).agrees_with(A)
    assert (G * exp_neg(-A, floor=-9)).agrees_with(Series.one(2))


def test_split_at_example():
    c2, c5 = Q(3), Q(-7, 2)
    f = Series.scalar({1: 1, -2: c2, -5: c5})
    below, at, above = split_at(f, -2)
    assert below == Series.scalar({-5: c5})
    assert at == Series.scalar({-2: c2})
    assert above == p("z")
    assert all(s.is_zero() for s in split_at(Series.zero(), 4))


@given(scalar_series(floor=st.sampled_from([None, -7])), st.integers(-8, 3))
def test_split_recomposes(f, a):
    parts = split_at(f, a)
    assert (parts[0] + parts[1] + parts[2]).agrees_with(f)
    supports = [set(s.exponents()) for s in parts]
    assert not (supports[0] & supports[1]) and not (supports[1] & supports[2])
    assert supports[1] <= {a}


def test_coeff_contract():
    assert coeff(p("1 + 2 z^-3"), -3) == 2
    assert coeff(p("1 + O(z^-6)"), -1) == 0
    with pytest.raises(TruncationError):
        coeff(p("1 + O(z^-6)"), -7)


def test_dims_never_mix():
    with pytest.raises(ValueError):
        Series.one(2) + Series.one(3)
    with pytest.raises(ValueError):
        Series.one(2) * Series.one(3)


def test_graded_elements_commute_with_scalars():
    alg = build_algebra("C", 2)
    for X in graded_piece(alg, -5).basis:
        assert X * p("1 + z^-1") == p("1 + z^-1") * X

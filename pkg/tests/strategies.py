from fractions import Fraction

from hypothesis import strategies as st

from kslab.exact import Q, RatMatrix
from kslab.laurent import Series

small_ints = st.integers(-9, 9)
rationals = st.builds(lambda p, q: Q(p, q), st.integers(-30, 30), st.integers(1, 12))
big_rationals = st.builds(lambda p, q: Q(p, q), st.integers(-10**40, 10**40),
                          st.integers(1, 10**30))


def matrices(n, m=None, elements=rationals):
    m = n if m is None else m
    return st.lists(elements, min_size=n * m, max_size=n * m).map(lambda e: RatMatrix(n, m, e))


@st.composite
def scalar_series(draw, lo=-6, hi=2, floor=st.none()):
    exps = draw(st.lists(st.integers(lo, hi), max_size=5, unique=True))
    coeffs = {k: draw(rationals) for k in exps}
    return Series.scalar(coeffs, draw(floor))


@st.composite
def matrix_series(draw, n=2, lo=-4, hi=1, floor=st.none()):
    exps = draw(st.lists(st.integers(lo, hi), max_size=4, unique=True))
    coeffs = {k: draw(matrices(n)) for k in exps}
    return Series.matrix(n, coeffs, draw(floor))


@st.composite
def negative_matrix_series(draw, n=2, depth=3):
    """Exact matrix series supported in exponents -depth..-1."""
    exps = draw(st.lists(st.integers(-depth, -1), min_size=1, max_size=depth, unique=True))
    return Series.matrix(n, {k: draw(matrices(n, elements=st.integers(-3, 3).map(Q)))
                             for k in exps})


def fraction(x):
    return Fraction(int(x.numerator), int(x.denominator))

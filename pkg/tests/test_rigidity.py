import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kslab.exact import Q, RatMatrix
from kslab.laurent import Series
from kslab.lie import AlgebraError, build_algebra, graded_piece, principal_degree_split
from kslab.grassmann import stabilization_residual
from kslab.operators import matrix_operator
from kslab.rigidity import (INCONCLUSIVE, OBSTRUCTED, RIGID, random_loop_element,
                            random_perturbation, rigidity_certificate, rigidity_source,
                            scalar_rigidity, trace_law_property)

ALGEBRAS = [("A", 1), ("A", 2), ("A", 3), ("C", 2)]
ORDER = 10


def brute_force_trace(alg, star, g):
    """Trace of the z^-1 coefficient of the potential, read off directly."""
    return rigidity_source(alg, star, g).coeff(-1).trace()


def test_sl2_star_zero():
    alg = build_algebra("A", 1)
    rep = rigidity_certificate(alg, 0, alg.lambda_cyclic, 12)
    assert rep.verdict == RIGID and rep.ok
    assert rep.obstruction_trace == 0
    V = rep.dressing.point(alg)
    source = matrix_operator(rigidity_source(alg, 0, alg.lambda_cyclic))
    assert stabilization_residual(V, source, 12).is_zero
    names = [s.name for s in rep.proof_trace]
    for want in ("trace extraction", "homogeneous/z-degree agreement", "gauge-degree bound"):
        assert want in names


def test_sl2_third():
    alg = build_algebra("A", 1)
    rep = rigidity_certificate(alg, Q(1, 3), alg.lambda_cyclic, 12)
    assert rep.verdict == OBSTRUCTED and rep.ok
    assert rep.obstruction_trace == Q(2, 3) == brute_force_trace(alg, Q(1, 3), alg.lambda_cyclic)
    assert rep.certificate.verify() and rep.certificate.pdeg == -2


def test_sl3_example_and_independence():
    alg = build_algebra("A", 2)
    g = alg.lambda_cyclic + Series.monomial(alg.f[1], -1)
    rep = rigidity_certificate(alg, Q(-1, 4), g, ORDER)
    assert rep.verdict == OBSTRUCTED and rep.obstruction_trace == Q(-3, 4)
    rng = random.Random(2)
    for _ in range(3):
        g2 = alg.lambda_cyclic + random_loop_element(alg, rng, range(-4, -10, -1))
        rep2 = rigidity_certificate(alg, Q(-1, 4), g2, ORDER)
        assert rep2.verdict == OBSTRUCTED and rep2.obstruction_trace == Q(-3, 4)


@pytest.mark.parametrize("t,r", ALGEBRAS)
@pytest.mark.parametrize("star", [Q(-1), Q(-1, 4), Q(1, 3), Q(2), Q(7, 5)])
def test_obstruction_linearity(t, r, star):
    alg = build_algebra(t, r)
    rep = rigidity_certificate(alg, star, alg.lambda_cyclic, ORDER)
    assert rep.verdict == OBSTRUCTED and rep.ok
    assert rep.obstruction_trace == alg.n * star


@pytest.mark.parametrize("t,r", ALGEBRAS)
def test_g_independence(t, r):
    alg = build_algebra(t, r)
    rng = random.Random(17)
    star = Q(2, 7)
    kinds = ["deep", "orbit"] * 5
    for kind in kinds:
        g = random_perturbation(alg, rng, kind, ORDER)
        rep = rigidity_certificate(alg, star, g, ORDER, kind)
        assert rep.verdict == OBSTRUCTED and rep.obstruction_trace == alg.n * star, kind
        assert rep.ok


@pytest.mark.parametrize("t,r", ALGEBRAS)
@pytest.mark.parametrize("sign", [1, -1])
def test_zero_case_completeness(t, r, sign):
    alg = build_algebra(t, r)
    rep = rigidity_certificate(alg, 0, alg.lambda_cyclic * sign, ORDER)
    assert rep.verdict == RIGID and rep.ok
    rng = random.Random(sign + 5)
    g = random_perturbation(alg, rng, "orbit", ORDER, sign)
    rep = rigidity_certificate(alg, 0, g, ORDER)
    assert rep.verdict == RIGID and rep.ok


def test_verdict_matches_trace():
    alg = build_algebra("A", 2)
    for star in (Q(0), Q(3, 2)):
        rep = rigidity_certificate(alg, star, alg.lambda_cyclic, 8)
        assert (rep.verdict == OBSTRUCTED) == (rep.obstruction_trace != 0)


def test_inputs_checked():
    alg = build_algebra("A", 1)
    with pytest.raises(AlgebraError):
        rigidity_certificate(alg, 0, Series.monomial(RatMatrix.identity(2), 0), 8)
    with pytest.raises(AlgebraError):
        rigidity_certificate(alg, 0, Series.monomial(alg.f[0], -1), 8)
    with pytest.raises(Exception):
        rigidity_certificate(alg, 0, alg.lambda_cyclic, 1)


def test_inconclusive_label_exists():
    assert INCONCLUSIVE not in (RIGID, OBSTRUCTED)


def test_trace_law_examples():
    alg = build_algebra("A", 1)
    assert alg.rho_vee.trace() == 0
    assert trace_law_property(alg, 50).ok
    assert trace_law_property(build_algebra("C", 2), 20).ok


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_trace_law_random_seeds(seed):
    assert trace_law_property(build_algebra("A", 2), 3, seed=seed).ok


def test_scalar_examples():
    kdv = scalar_rigidity(2, Q(-1, 4))
    assert kdv.verdict == RIGID and kdv.star == 0 and kdv.m_trace == 0
    assert scalar_rigidity(3, Q(-1, 3)).verdict == RIGID
    zero = scalar_rigidity(2, 0)
    assert zero.verdict == OBSTRUCTED and zero.m_trace == 1
    assert zero.report.obstruction_trace == 2 * zero.star == Q(1, 2)


@pytest.mark.parametrize("h", [2, 3, 4])
@pytest.mark.parametrize("c", [Q(-1, 2), Q(0), Q(1, 4), Q(-2, 3)])
def test_scalar_matches_matrix(h, c):
    rep = scalar_rigidity(h, c, order=8)
    assert rep.m_trace == Q(h * (h - 1), 2) + h * h * c
    assert (rep.verdict == RIGID) == (c == Q(1 - h, 2 * h))
    alg = build_algebra("A", h - 1)
    direct = rigidity_certificate(alg, rep.star, alg.lambda_cyclic, 8)
    assert direct.verdict == rep.verdict
    assert direct.obstruction_trace == rep.report.obstruction_trace == rep.m_trace / h
    assert rep.coprime_leading_power


def test_random_loop_element_degrees():
    alg = build_algebra("C", 2)
    rng = random.Random(0)
    X = random_loop_element(alg, rng, [-5])
    assert len(graded_piece(alg, -5)) > 0
    assert set(principal_degree_split(X, alg)) <= {-5}
    with pytest.raises(ValueError):
        random_perturbation(alg, rng, "sideways", 8)

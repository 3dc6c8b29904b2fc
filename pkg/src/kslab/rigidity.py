"""Rigidity checks for D + rho/(h z) + star id/z + g.

The operator can stabilize a big-cell point only when star = 0.  A run
either produces the dressing (star = 0) or an exact certificate at
principal degree -h whose trace is n * star.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import gcd

from .blending import blend_operator, m_matrix, scalar_ks_operator, special_value
from .exact import ZERO, Q, RatMatrix, Rational
from .grassmann import (Dressing, dress_with_history, exp_nonpositive, stabilization_residual,
                        wk_operator)
from .laurent import ContractError, Series, d_dz
from .lie import (AlgebraData, AlgebraError, ObstructionCertificate, build_algebra, combine,
                  graded_piece, in_loop_span, pdeg_coordinates, principal_component,
                  principal_degree_split)
from .operators import conjugate, gauge_term_degree_check, matrix_operator

RIGID = "rigid-consistent"
OBSTRUCTED = "obstructed"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ProofStep:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class RigidityReport:
    algebra: str
    star: Rational
    g_descriptor: str
    order: int
    verdict: str
    obstruction_trace: Rational
    proof_trace: tuple[ProofStep, ...]
    dressing: Dressing | None = field(default=None, repr=False)
    certificate: ObstructionCertificate | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.proof_trace)


def rigidity_source(alg: AlgebraData, star, g: Series) -> Series:
    """Potential rho/(h z) + star id/z + g."""
    h, n = alg.coxeter, alg.n
    base = Series.monomial(alg.rho_vee * Q(1, h) + RatMatrix.identity(n) * Q(star), -1)
    return base + g


def _leading_part(g: Series, alg: AlgebraData) -> Series:
    """Principal-degree-1 part of g, made exact (its exponents are 0 and 1)."""
    comps = principal_degree_split(g, alg)
    bad = [m for m in comps if m >= 0 and m != 1]
    if bad:
        raise AlgebraError(f"g has components in principal degree {bad[0]}; "
                           "only degree 1 and negative degrees are supported")
    lam = comps.get(1, Series.zero(alg.n))
    lo = min(k for k, _, _ in pdeg_coordinates(alg, 1))
    if lam.floor is not None and lam.floor > lo:
        raise ContractError("degree-1 part of g is not fully known")
    return lam.restrict(lo=lo)


def rigidity_certificate(alg: AlgebraData, star, g: Series, order: int,
                         g_descriptor: str | None = None) -> RigidityReport:
    """Try to dress D + rho/(h z) + star id/z + g to D + lam, lam the
    degree-1 part of g, and record each step of the trace argument."""
    if order < 2:
        raise ContractError("order must be at least 2")
    star = Q(star)
    if g.dim != alg.n or not in_loop_span(g, alg):
        raise AlgebraError("g must lie in the loop algebra")
    h, n = alg.coxeter, alg.n
    lam = _leading_part(g, alg)
    if lam.is_zero():
        raise AlgebraError("g has no degree-1 part to dress towards")
    pot = rigidity_source(alg, star, g)
    source = matrix_operator(pot)
    steps = []

    # the z^-1 trace of the source is n*star: rho and g are trace free
    t_src = pot.coeff(-1).trace()
    steps.append(ProofStep("trace extraction", t_src == n * star,
                           f"trace of the z^-1 coefficient of the potential = {t_src}"))
    # at z^-1 the trace sits entirely in principal degree -h
    comp = principal_component(pot, alg, -h)
    t_deg = comp.coeff(-1).trace()
    steps.append(ProofStep("homogeneous/z-degree agreement", t_deg == t_src,
                           f"trace of the degree -{h} part at z^-1 = {t_deg}"))

    result, history, _ = dress_with_history(source, matrix_operator(lam), alg, order)

    # gauge terms of the gauge elements used never reach z^-1
    A_trial = Series.zero(n)
    for s in history:
        A_trial = A_trial + s.U
    A_trial = A_trial.restrict(hi=-1)
    rep = gauge_term_degree_check(A_trial, alg, floor=-order)
    if not rep.ok:
        detail = f"offending coefficient {rep.offending}"
    elif rep.highest_exponent is None:
        detail = "no graded step was needed; the gauge term vanishes"
    else:
        detail = f"gauge term of the partial dressing has top exponent " \
                 f"{rep.highest_exponent} <= {rep.bound}"
    steps.append(ProofStep("gauge-degree bound", rep.ok, detail))

    if isinstance(result, Dressing):
        V = result.point(alg)
        res = stabilization_residual(V, source, order)
        steps.append(ProofStep("dressing residual", res.is_zero,
                               f"negative part of the conjugated operator: {res.status}"))
        steps.append(ProofStep("star vanishes", star == 0, f"star = {star}"))
        return RigidityReport(alg.label, star, g_descriptor or "g", order, RIGID, ZERO,
                              tuple(steps), dressing=result)

    cert = result
    steps.append(ProofStep("certificate verified", cert.verify(),
                           f"null covector pairs to {cert.pairing} with the degree "
                           f"{cert.pdeg} residue"))
    tv = cert.trace_value
    if tv:
        steps.append(ProofStep("obstruction trace", tv == n * star and cert.pdeg == -h,
                               f"trace {tv} = {n} * {star}"))
        verdict = OBSTRUCTED
    else:
        steps.append(ProofStep("obstruction trace", False,
                               f"unsolvable at degree {cert.pdeg} with zero trace"))
        verdict = INCONCLUSIVE
    return RigidityReport(alg.label, star, g_descriptor or "g", order, verdict, tv,
                          tuple(steps), certificate=cert)


# -- perturbations -------------------------------------------------------------

def _random_rational(rng: random.Random, size: int = 9) -> Rational:
    return Q(rng.randint(-size, size), rng.randint(1, size))


def random_loop_element(alg: AlgebraData, rng: random.Random, degrees) -> Series:
    n = alg.n
    out = Series.zero(n)
    for m in degrees:
        piece = graded_piece(alg, m)
        out = out + combine(piece, [_random_rational(rng) for _ in piece.basis], n)
    return out


def random_perturbation(alg: AlgebraData, rng: random.Random, kind: str, order: int,
                        sign: int = 1) -> Series:
    """g = sign Lambda + p for a random loop element p.

    ``deep``: p has principal degrees -(h+1) .. -3h.
    ``orbit``: D + rho/(h z) + g is a random gauge transform
    mu (D + rho/(h z) + sign Lambda) mu^-1, mu = exp(B), B of degrees -2 .. -2h.
    """
    h = alg.coxeter
    lam = alg.lambda_cyclic * sign
    if kind == "deep":
        return lam + random_loop_element(alg, rng, range(-(h + 1), -3 * h - 1, -1))
    if kind == "orbit":
        B = random_loop_element(alg, rng, range(-2, -2 * h - 1, -1))
        fl = -order - 4
        mu = exp_nonpositive(B, fl - 1)
        mu_inv = exp_nonpositive(-B, fl - 1)
        base = wk_operator(alg, sign)
        moved = conjugate(base, mu_inv, floor=fl, gamma_inv=mu)
        return moved.potential - Series.monomial(alg.rho_vee * Q(1, h), -1)
    if kind == "none":
        return lam
    raise ValueError(f"unknown perturbation kind {kind!r}")


# -- the trace law ---------------------------------------------------------------

@dataclass(frozen=True)
class TraceLawSummary:
    algebra: str
    trials: int
    passed: int
    counterexample: dict | None

    @property
    def ok(self) -> bool:
        return self.passed == self.trials and self.counterexample is None


def trace_law_property(alg: AlgebraData, trials: int, order: int = 8, seed: int = 0) -> TraceLawSummary:
    """For random A (exponents <= -1) and loop g, the z^-1 coefficient of
    gamma^-1 (rho/(h z) + g) gamma + gamma^-1 gamma' is trace free, and the
    gauge part alone has no z^-1 term."""
    from .laurent import exp_neg
    rng = random.Random(seed)
    h, n = alg.coxeter, alg.n
    rho_part = Series.monomial(alg.rho_vee * Q(1, h), -1)
    passed = 0
    for t in range(trials):
        A = random_loop_element(alg, rng, range(-h - 1, -3 * h - 1, -1)).restrict(hi=-1)
        A = A + Series.monomial(alg.f[rng.randrange(alg.rank)] * _random_rational(rng), -1)
        g = Series.zero(n)
        for k in range(-3, 2):
            X = alg.basis[rng.randrange(len(alg.basis))][0]
            g = g + Series.monomial(X * _random_rational(rng), k)
        F = -order
        gamma = exp_neg(A, floor=F - 2)
        gamma_inv = exp_neg(-A, floor=F - 2)
        body = (gamma_inv * (rho_part + g) * gamma).truncate(F)
        gauge = (gamma_inv * d_dz(gamma)).truncate(F)
        tb = body.coeff(-1).trace()
        gm = gauge.coeff(-1)
        if tb or not gm.is_zero():
            return TraceLawSummary(alg.label, trials, passed,
                                   {"trial": t, "A": A, "g": g, "trace": tb, "gauge_at_-1": gm})
        passed += 1
    return TraceLawSummary(alg.label, trials, passed, None)


# -- scalar form -----------------------------------------------------------------

@dataclass(frozen=True)
class ScalarRigidityReport:
    h: int
    c: Rational
    m_trace: Rational
    star: Rational
    verdict: str
    coprime_leading_power: bool
    report: RigidityReport = field(repr=False)


def scalar_rigidity(h: int, c, order: int = 12) -> ScalarRigidityReport:
    """Blend (1/(h zeta^(h-1))) d/dzeta + c zeta^-h + zeta and run the matrix check.

    The blended potential is M/(h z) + Lambda with M/h = rho + star id,
    star = c - (1-h)/(2h).
    """
    if h < 2:
        raise ValueError("h must be at least 2")
    c = Q(c)
    alg = build_algebra("A", h - 1)
    M = m_matrix(c, h)
    mop = blend_operator(scalar_ks_operator(h, c), h)
    star = c - special_value(h)
    want = rigidity_source(alg, star, alg.lambda_cyclic)
    if not mop.potential.agrees_with(want) or mop.potential.floor is not None:
        raise AlgebraError("internal: blended operator is not D + rho/(h z) + star id/z + Lambda")
    if Series.monomial(M * Q(1, h), -1) != Series.monomial(alg.rho_vee * Q(1, h)
                                                           + RatMatrix.identity(h) * star, -1):
        raise AlgebraError("internal: M/h is not rho/h + star id")
    rep = rigidity_certificate(alg, star, alg.lambda_cyclic, order, g_descriptor="Lambda")
    # the leading positive power of the scalar potential is zeta^1
    return ScalarRigidityReport(h, c, M.trace(), star, rep.verdict, gcd(1, h) == 1, rep)

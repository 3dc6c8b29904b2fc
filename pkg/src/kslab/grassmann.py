"""Big-cell points V = gamma H+ and the graded dressing recursion.

A point is stored either by its dressing exponent A (gamma = exp(A), A in
the negative loop algebra) or, for scalar points, by an admissible basis
v_k = zeta^k + lower terms.  ``conjugation_dress`` finds gamma with
gamma^-1 (D + S) gamma = D + lam one principal degree at a time, or returns
an exact certificate that some graded equation has no solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exact import ONE, ZERO, Q, RatMatrix, Rational, mat_solve, stack_columns
from .laurent import ContractError, Series, d_dz, exp_neg, log_neg, split_at
from .lie import (AlgebraData, AlgebraError, ObstructionCertificate, ad_lambda_kernel,
                  ad_matrix, combine, graded_piece, graded_vector, in_loop_span,
                  make_certificate, pdeg_coordinates, principal_component,
                  principal_degree_split)
from .operators import KSOperator, OperatorError, apply, conjugate, matrix_operator

KERNEL_NORMALIZATION = (
    "free kernel coordinates of each graded step set to zero (elimination order: "
    "degree piece basis first, then kernel adjustments)"
)


class DressingObstructed(RuntimeError):
    """A construction that must succeed hit an unsolvable graded step."""

    def __init__(self, msg: str, certificate: ObstructionCertificate):
        super().__init__(msg)
        self.certificate = certificate


# -- representations -----------------------------------------------------------

@dataclass(frozen=True)
class DressingRep:
    """gamma = exp(A); A has coefficients in the algebra at exponents <= -1."""

    A: Series

    def gamma(self, floor: int) -> Series:
        return exp_neg(self.A, floor=floor)


@dataclass(frozen=True)
class BasisRep:
    """Scalar point given by basis vectors with distinct leading exponents
    0..K (each leading coefficient 1) and the rule zeta^h V in V."""

    basis: tuple[Series, ...]
    h: int

    def __post_init__(self):
        leads = []
        for v in self.basis:
            if v.dim is not None:
                raise ValueError("BasisRep holds scalar series only")
            t = v.top()
            if t is None or t < 0 or v.coeff(t) != ONE:
                raise ValueError("each basis vector must be zeta^k + lower terms, k >= 0")
            leads.append(t)
        if sorted(leads) != list(range(len(leads))):
            raise ValueError("leading exponents must be exactly 0..K (big-cell condition)")

    def by_lead(self) -> dict[int, Series]:
        return {v.top(): v for v in self.basis}

    @property
    def size(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class GrassmannPoint:
    rep: DressingRep | BasisRep
    alg: AlgebraData | None
    floor: int
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if isinstance(self.rep, DressingRep):
            if self.alg is None:
                raise ValueError("a dressing point needs its algebra")
            A = self.rep.A
            t = A.top()
            if t is not None and t >= 0:
                raise ValueError("dressing exponent must live in exponents <= -1")
            if not in_loop_span(A, self.alg):
                raise AlgebraError("dressing exponent leaves the algebra")

    @property
    def kind(self) -> str:
        return "dressing" if isinstance(self.rep, DressingRep) else "basis"


def trivial_point(alg: AlgebraData, floor: int) -> GrassmannPoint:
    """H+ itself (gamma = id)."""
    return GrassmannPoint(DressingRep(Series.zero(alg.n)), alg, floor)


# -- residuals ----------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """``status`` is "zero", "nonzero" or "unknown" (nothing trusted to check)."""

    status: str
    residual: object
    floor: int | None
    checked: int = 0

    @property
    def is_zero(self) -> bool:
        return self.status == "zero"


def _verdict(parts: Sequence[Series], floor) -> str:
    if any(not p.is_zero() for p in parts):
        return "nonzero"
    if floor is not None and floor > -1:
        return "unknown"
    return "zero"


def stabilization_residual(V: GrassmannPoint, op: KSOperator, order: int) -> ResidualReport:
    """What keeps ``op V`` from lying in V, down to z^-order.

    Dressing points: the negative-exponent part of gamma^-1 op gamma (zero
    exactly when the conjugated operator preserves H+).  Basis points: each
    op v_k reduced against the basis by leading-term elimination.
    """
    if order < 1:
        raise ContractError("order must be positive")
    if isinstance(V.rep, DressingRep):
        if op.mode != "matrix" or op.dim != V.alg.n:
            raise OperatorError("operator mode does not match the point")
        if V.floor > -order:
            raise ContractError(f"point known only to z^{V.floor}, order {order} requested")
        gamma = V.rep.gamma(-order - 1)
        conj = conjugate(op, gamma, floor=-order)
        if not op.deriv_coeff.agrees_with(Series.one()):
            raise OperatorError("dressing residuals need deriv_coeff 1")
        below, _, _ = split_at(conj.potential, 0)
        return ResidualReport(_verdict([below], below.floor), below, below.floor, 1)
    return _basis_residual(V, lambda v: apply(op, v), order)


def z_stability_residual(V: GrassmannPoint, order: int, columns: int = 2) -> ResidualReport:
    """z V in V.  For a dressing point: z (gamma e_i z^q) - gamma e_i z^(q+1)
    on basis columns q < ``columns``; for a basis point: zeta^h v_k reduced."""
    if isinstance(V.rep, DressingRep):
        n = V.alg.n
        gamma = V.rep.gamma(-order - 1)
        parts = []
        for q in range(columns):
            for i in range(n):
                e = RatMatrix.unit(n, i, i)
                col = gamma * Series.monomial(e, q)
                parts.append((col.shift(1) - gamma * Series.monomial(e, q + 1)).truncate(-order))
        fl = parts[0].floor if parts else None
        return ResidualReport(_verdict(parts, fl), tuple(parts), fl, len(parts))
    h = V.rep.h
    return _basis_residual(V, lambda v: v.shift(h), order)


def reduce_against(f: Series, basis: dict[int, Series]) -> Series:
    """Subtract basis vectors to clear every known term of exponent >= 0.

    A leading exponent with no basis vector is left in place (the result is
    then nonzero, i.e. f is not in the span).
    """
    stuck = {}
    while True:
        hi = [(k, c) for k, c in f.terms() if k >= 0 and k not in stuck]
        if not hi:
            break
        k, c = hi[0]
        v = basis.get(k)
        if v is None:
            stuck[k] = c
            continue
        f = f - v * c
    return f


def _basis_residual(V: GrassmannPoint, image, order: int) -> ResidualReport:
    basis = V.rep.by_lead()
    K = max(basis)
    parts = []
    for k in sorted(basis):
        w = image(basis[k])
        t = w.top()
        if t is not None and t > K:
            continue  # needs basis vectors beyond the stored ones
        r = reduce_against(w, basis).truncate(-order)
        parts.append(r)
    fl = max((p.floor for p in parts if p.floor is not None), default=None)
    return ResidualReport(_verdict(parts, fl), tuple(parts), fl, len(parts))


# -- the graded dressing recursion ----------------------------------------

@dataclass(frozen=True)
class DressingStep:
    pdeg: int
    U: Series
    kernel_adjustment: Series | None


@dataclass(frozen=True)
class Dressing:
    """gamma^-1 (D + source) gamma = D + target up to ``floor``.

    gamma = gamma_minus G0 with G0 its constant (unipotent) part; the point
    V = gamma H+ = gamma_minus H+ is recorded by A = log(gamma_minus).
    """

    gamma: Series
    gamma_inv: Series
    constant_part: RatMatrix
    gamma_minus: Series
    A: Series
    conjugated: KSOperator
    steps: tuple[DressingStep, ...]
    floor: int
    normalization: str = KERNEL_NORMALIZATION

    def point(self, alg: AlgebraData) -> GrassmannPoint:
        return GrassmannPoint(DressingRep(self.A), alg, self.floor,
                              {"normalization": self.normalization})


def exp_nonpositive(Y: Series, floor: int) -> Series:
    """exp(Y) for Y of negative principal degree (support in exponents <= 0
    with nilpotent constant term), truncated at ``floor``."""
    t = Y.top()
    if t is not None and t > 0:
        raise ContractError("exp_nonpositive needs support in exponents <= 0")
    n = Y.dim
    total = Series.one(n, floor)
    term = Series.one(n)
    cap = n + (1 - floor) * (n + 1)
    for k in range(1, cap + 1):
        term = (term * Y).truncate(floor) * Q(1, k)
        if term.is_zero():
            return total
        total = total + term
    raise ContractError("constant part of the exponent is not nilpotent")


def _check_dress_inputs(source: KSOperator, target: KSOperator, alg: AlgebraData):
    for op in (source, target):
        if op.mode != "matrix" or op.dim != alg.n:
            raise OperatorError(f"expected {alg.n}x{alg.n} matrix operators")
        if not op.deriv_coeff.exact or op.deriv_coeff != Series.one():
            raise OperatorError("dressing needs operators of the form D + P")
    lam = target.potential
    if not lam.exact:
        raise OperatorError("target potential must be known exactly")
    comps = principal_degree_split(lam, alg)
    if list(comps) != [1]:
        raise OperatorError("target potential must be homogeneous of principal degree 1")
    diff = source.potential - lam
    degs = principal_degree_split(diff, alg, check_span=False)
    if degs and max(degs) >= 0:
        raise OperatorError(f"source differs from target in principal degree {max(degs)} >= 0")
    return lam


def conjugation_dress(source: KSOperator, target: KSOperator, alg: AlgebraData,
                      order: int) -> Dressing | ObstructionCertificate:
    return dress_with_history(source, target, alg, order)[0]


def dress_with_history(source: KSOperator, target: KSOperator, alg: AlgebraData, order: int):
    """Solve gamma^-1 (D + S) gamma = D + lam up to z^-order.

    At principal degree j the residual component X_j is removed by exp(U)
    with [U, lam] = X_j, U of degree j - 1.  Where X_j has a component
    outside the image of ad lam, an element K of the kernel of ad lam in
    degree j + h (when that degree is negative) is switched on as well: it
    commutes with lam, so its only effect at degree j is d/dz K, and the
    step solves [U, lam] - c d/dz K = X_j.  Anything left over yields an
    :class:`ObstructionCertificate`.

    Returns (result, graded steps taken, gauge element accumulated so far).
    """
    lam = _check_dress_inputs(source, target, alg)
    h, n = alg.coxeter, alg.n
    W = -order
    Wi = W - 2
    Ef = Wi - 1
    S = source.potential
    if S.floor is not None and S.floor > Wi:
        raise ContractError(f"source known to z^{S.floor}; order {order} needs z^{Wi}")
    Qp = S.truncate(Wi)
    gamma = Series.one(n)
    gamma_inv = Series.one(n)
    steps = []
    j_min = h * W - h + 1
    for j in range(-1, j_min - 1, -1):
        coords = pdeg_coordinates(alg, j)
        # every coordinate of this degree sits at or above Wi, so X is exact
        X = principal_component(Qp - lam, alg, j).restrict(lo=coords[0][0])
        if X.is_zero():
            continue
        piece = graded_piece(alg, j - 1)
        cols_u = ad_matrix(alg, j - 1, lam)
        kernel = ad_lambda_kernel(alg, j + h, lam) if j + h <= -1 else ()
        cols = [cols_u.col(c) for c in range(cols_u.cols)]
        cols += [[-v for v in graded_vector(d_dz(K), coords)] for K in kernel]
        system = stack_columns(cols, rows=len(coords))
        res = mat_solve(system, graded_vector(X, coords))
        if not res.solvable:
            cert = make_certificate(alg, j, X, coords, system, res.witness)
            return cert, tuple(steps), gamma
        x = res.solution.entries
        U = combine(piece, x[:len(piece)], n)
        Kc = combine(kernel, x[len(piece):], n) if kernel else Series.zero(n)
        for Y in (Kc, U):
            if Y.is_zero():
                continue
            E = exp_nonpositive(Y, Ef)
            Ei = exp_nonpositive(-Y, Ef)
            Qp = (Ei * Qp * E + Ei * d_dz(E)).truncate(Wi)
            gamma = (gamma * E).truncate(Ef)
            gamma_inv = (Ei * gamma_inv).truncate(Ef)
        if not principal_component(Qp - lam, alg, j).is_zero():
            raise AlgebraError(f"internal: degree {j} survived its own step")
        steps.append(DressingStep(j, U, None if Kc.is_zero() else Kc))
    steps = tuple(steps)
    return _finish(source, lam, alg, gamma, gamma_inv, steps, W), steps, gamma


def _finish(source, lam, alg, gamma, gamma_inv, steps, W) -> Dressing:
    n = alg.n
    conj = conjugate(source, gamma, floor=W, gamma_inv=gamma_inv)
    if not conj.potential.agrees_with(lam):
        raise AlgebraError("internal: re-conjugation does not reproduce the target")
    G0 = gamma.coeff(0)
    G0inv = gamma_inv.coeff(0)
    if G0 @ G0inv != RatMatrix.identity(n):
        raise AlgebraError("internal: constant parts are not inverse")
    gamma_minus = gamma * G0inv
    A = log_neg(gamma_minus, floor=W - 1)
    if not in_loop_span(A, alg):
        raise AlgebraError("dressing exponent left the loop algebra")
    conj_minus = KSOperator(Series.one(), (Series.monomial(G0) * lam * G0inv).truncate(W))
    return Dressing(gamma, gamma_inv, G0, gamma_minus, A, conj_minus, steps, W - 1)


# -- named constructions --------------------------------------------------------

def _is_cartan(H: RatMatrix, alg: AlgebraData) -> bool:
    return H.shape == (alg.n, alg.n) and H.is_diagonal() and alg.contains(H)


def cartan_point(H: RatMatrix, alg: AlgebraData, order: int) -> tuple[GrassmannPoint, Dressing]:
    """A point stabilized by D + H/z + Lambda for H in the Cartan subalgebra."""
    if not _is_cartan(H, alg):
        raise AlgebraError("H is not in the Cartan subalgebra")
    lam = alg.lambda_cyclic
    source = matrix_operator(Series.monomial(H, -1) + lam)
    out = conjugation_dress(source, matrix_operator(lam), alg, order)
    if isinstance(out, ObstructionCertificate):
        raise DressingObstructed("unexpected obstruction for a Cartan element", out)
    return out.point(alg), out


def wk_operator(alg: AlgebraData, sign: int = 1, star=0) -> KSOperator:
    """D + rho/(h z) + star id/z + sign Lambda."""
    h, n = alg.coxeter, alg.n
    pot = Series.monomial(alg.rho_vee * Q(1, h) + RatMatrix.identity(n) * Q(star), -1)
    return matrix_operator(pot + alg.lambda_cyclic * sign)


def wk_point(alg: AlgebraData, sign: int, order: int) -> tuple[GrassmannPoint, Dressing]:
    """A point with z V in V and (D + rho/(h z) + sign Lambda) V in V."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    lam = alg.lambda_cyclic * sign
    out = conjugation_dress(wk_operator(alg, sign), matrix_operator(lam), alg, order)
    if isinstance(out, ObstructionCertificate):
        raise DressingObstructed("unexpected obstruction for the rho-vee operator", out)
    V = out.point(alg)
    for rep, what in ((z_stability_residual(V, order), "z V in V"),
                      (stabilization_residual(V, wk_operator(alg, sign), order), "stabilization")):
        if not rep.is_zero:
            raise AlgebraError(f"internal: {what} fails for the constructed point")
    return V, out


def unblend_point(V: GrassmannPoint, size: int | None = None) -> GrassmannPoint:
    """Scalar point in zeta: v_k = unblend(gamma e_i z^q) for k = h q + h - i."""
    from .blending import unblend
    if not isinstance(V.rep, DressingRep):
        raise ValueError("unblending needs a dressing point")
    h = V.alg.n
    if V.alg.type_label != "A":
        raise AlgebraError("unblending is defined for sl_h only")
    size = 3 * h + 1 if size is None else size
    gamma = V.rep.gamma(V.floor)
    basis = []
    for k in range(size):
        i = h - (k % h)
        q = (k - (h - i)) // h
        col = gamma * Series.monomial(RatMatrix.unit(h, i - 1, i - 1), q)
        vec = tuple(col.entry(r, i - 1) for r in range(h))
        basis.append(unblend(vec, h))
    return GrassmannPoint(BasisRep(tuple(basis), h), None, min(b.floor for b in basis),
                          dict(V.info))

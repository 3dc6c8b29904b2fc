"""Simple Lie algebras in trace-zero defining representations, and the
principal gradation of their loop algebras.

Supported types: ``A_r`` (sl_{r+1}) and ``C_r`` (sp_{2r}, r >= 2).  Every
structural fact (Cartan matrix, rho-check, Coxeter number, exponents) is
recomputed from the matrices at construction time and compared with the
textbook tables, so a convention slip fails loudly instead of propagating.

The loop algebra element ``E_ab z^k`` has principal degree
``(rho_a - rho_b) + k h`` where ``rho`` is the diagonal of rho-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .exact import (ONE, ZERO, Q, RatMatrix, Rational, bracket, left_null_space,
                    mat_kernel, mat_solve, rank, stack_columns)
from .laurent import Series


class AlgebraError(ValueError):
    pass


class ProjectionError(AlgebraError):
    """An element expected in the loop algebra has a component outside it."""

    def __init__(self, msg: str, exponent: int | None = None, residual=None):
        super().__init__(msg)
        self.exponent = exponent
        self.residual = residual


# -- root data tables -----------------------------------------------------

def _simple_roots(type_label: str, r: int) -> list[list[Rational]]:
    if type_label == "A":
        roots = []
        for i in range(r):
            v = [ZERO] * (r + 1)
            v[i], v[i + 1] = ONE, -ONE
            roots.append(v)
        return roots
    roots = []
    for i in range(r - 1):
        v = [ZERO] * r
        v[i], v[i + 1] = ONE, -ONE
        roots.append(v)
    v = [ZERO] * r
    v[r - 1] = Q(2)
    roots.append(v)
    return roots


def expected_cartan_matrix(type_label: str, r: int) -> tuple[tuple[int, ...], ...]:
    """a_ij = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i)."""
    roots = _simple_roots(type_label, r)

    def ip(u, v):
        return sum((a * b for a, b in zip(u, v)), ZERO)

    return tuple(tuple(int(2 * ip(ai, aj) / ip(ai, ai)) for aj in roots) for ai in roots)


def expected_exponents(type_label: str, r: int) -> tuple[int, ...]:
    if type_label == "A":
        return tuple(range(1, r + 1))
    return tuple(range(1, 2 * r, 2))


# -- the algebra record -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraData:
    type_label: str
    rank: int
    n: int
    e: tuple[RatMatrix, ...]
    f: tuple[RatMatrix, ...]
    h: tuple[RatMatrix, ...]
    cartan: tuple[tuple[int, ...], ...]
    rho_vee: RatMatrix
    coxeter: int
    exponents: tuple[int, ...]
    lowest_root: RatMatrix
    lambda_cyclic: Series
    basis: tuple[tuple[RatMatrix, int], ...] = field(repr=False)
    twist_k: int = 1
    kac_a0: int = 1

    @property
    def label(self) -> str:
        return f"{self.type_label}{self.rank}"

    def __repr__(self):
        return f"AlgebraData({self.label}, n={self.n}, h={self.coxeter})"

    @cached_property
    def rho(self) -> tuple[Rational, ...]:
        return self.rho_vee.diagonal()

    @cached_property
    def _basis_matrix(self) -> RatMatrix:
        return stack_columns([X.entries for X, _ in self.basis])

    @cached_property
    def _complement(self) -> tuple[RatMatrix, ...]:
        return left_null_space(self._basis_matrix)

    def contains(self, M: RatMatrix) -> bool:
        """Membership of a constant matrix in the represented algebra."""
        v = M.entries
        return all(not sum((a * b for a, b in zip(y.entries, v) if a), ZERO)
                   for y in self._complement)

    def coordinates(self, M: RatMatrix) -> tuple[Rational, ...] | None:
        res = mat_solve(self._basis_matrix, M.entries)
        return res.solution.entries if res.solvable else None

    def dimension(self) -> int:
        return len(self.basis)

    def identity_series(self) -> Series:
        return Series.one(self.n)


def _normalize(M: RatMatrix) -> RatMatrix:
    lead = next(x for x in M.entries if x)
    return M / lead


def _symplectic_form(n: int) -> RatMatrix:
    r = n // 2
    ent = [ZERO] * (n * n)
    for i in range(n):
        ent[i * n + (n - 1 - i)] = ONE if i < r else -ONE
    return RatMatrix(n, n, ent)


def _closure(gens: list[RatMatrix]) -> list[list[RatMatrix]]:
    """Iterated brackets of ``gens`` grouped by length (height)."""
    levels = [list(gens)]
    while True:
        nxt: list[RatMatrix] = []
        for g in gens:
            for X in levels[-1]:
                Y = bracket(g, X)
                if Y.is_zero():
                    continue
                cand = nxt + [Y]
                if rank(stack_columns([c.entries for c in cand])) == len(cand):
                    nxt.append(Y)
        if not nxt:
            return levels
        levels.append(nxt)


@lru_cache(maxsize=None)
def build_algebra(type_label: str, rank_: int, twist_k: int = 1, kac_a0: int = 1) -> AlgebraData:
    """Construct and self-check the algebra ``type_label`` of rank ``rank_``."""
    type_label = type_label.upper()
    if twist_k != 1 or kac_a0 != 1:
        raise AlgebraError("untwisted only: twist_k and kac_a0 must both be 1")
    if type_label == "A":
        if rank_ < 1:
            raise AlgebraError("type A needs rank >= 1")
        n = rank_ + 1

        def proj(Y):
            return Y
    elif type_label == "C":
        if rank_ < 2:
            raise AlgebraError("type C needs rank >= 2")
        n = 2 * rank_
        omega = _symplectic_form(n)

        def proj(Y):
            return Y + omega @ Y.transpose() @ omega
    else:
        raise AlgebraError(f"unsupported type {type_label!r} (supported: A, C)")

    r = rank_
    U = RatMatrix.unit
    e, f, hs = [], [], []
    for i in range(r):
        ei = _normalize(proj(U(n, i, i + 1)))
        fi = _normalize(proj(U(n, i + 1, i)))
        hi = bracket(ei, fi)
        lam = _eigen_ratio(bracket(hi, ei), ei)
        fi = fi * (Q(2) / lam)
        e.append(ei)
        f.append(fi)
        hs.append(bracket(ei, fi))

    for X in e + f + hs:
        if X.trace():
            raise AlgebraError("generator with nonzero trace")
        if type_label == "C" and not (X.transpose() @ omega + omega @ X).is_zero():
            raise AlgebraError("generator does not preserve the symplectic form")

    cartan = tuple(tuple(int(_eigen_ratio(bracket(hs[i], e[j]), e[j])) for j in range(r))
                   for i in range(r))
    for i in range(r):
        for j in range(r):
            if bracket(e[i], f[j]) != (hs[i] if i == j else RatMatrix.zeros(n)):
                raise AlgebraError(f"[e_{i+1}, f_{j+1}] fails the Chevalley relation")
            if bracket(hs[i], e[j]) != e[j] * cartan[i][j]:
                raise AlgebraError("e_j is not an eigenvector of ad h_i")
            if bracket(hs[i], f[j]) != f[j] * (-cartan[i][j]):
                raise AlgebraError("f_j is not an eigenvector of ad h_i")
    if cartan != expected_cartan_matrix(type_label, r):
        raise AlgebraError(f"Cartan matrix {cartan} disagrees with the {type_label}{r} table")

    # rho-check = sum c_i h_i with [rho, e_j] = e_j, i.e. cartan^T c = (1, ..., 1)
    sol = mat_solve(RatMatrix.from_rows(cartan).transpose(), [ONE] * r)
    if not sol.solvable:
        raise AlgebraError("no rho-check solves [rho, e_i] = e_i")
    rho = RatMatrix.zeros(n)
    for c, hi in zip(sol.solution.entries, hs):
        rho = rho + hi * c
    for ei, fi in zip(e, f):
        if bracket(rho, ei) != ei or bracket(rho, fi) != -fi:
            raise AlgebraError("rho-check eigen-relations fail")
    if not rho.is_diagonal():
        raise AlgebraError("rho-check is expected to be diagonal in this realization")
    if type_label == "A":
        formula = RatMatrix.diag([Q(n + 1 - 2 * i, 2) for i in range(1, n + 1)])
        if rho != formula:
            raise AlgebraError("rho-check differs from diag((h+1-2i)/2)")

    pos = _closure(e)
    neg = _closure(f)
    basis = [(X, k + 1) for k, lvl in enumerate(pos) for X in lvl]
    basis += [(X, -(k + 1)) for k, lvl in enumerate(neg) for X in lvl]
    basis += [(X, 0) for X in hs]
    expected_dim = n * n - 1 if type_label == "A" else r * (2 * r + 1)
    if len(basis) != expected_dim or rank(stack_columns([X.entries for X, _ in basis])) != expected_dim:
        raise AlgebraError(f"basis has wrong dimension {len(basis)} (expected {expected_dim})")
    for X, ht in basis:
        if bracket(rho, X) != X * ht:
            raise AlgebraError("basis element is not homogeneous for ad rho-check")
    coxeter = len(pos) + 1

    E0 = _normalize(proj(U(n, n - 1, 0)))
    if any(not bracket(fi, E0).is_zero() for fi in f):
        raise AlgebraError("E_0 is not a lowest root vector")
    if bracket(rho, E0) != E0 * (1 - coxeter):
        raise AlgebraError("E_0 does not have height 1 - h")

    lam = Series.matrix(n, {0: sum(e[1:], e[0]), 1: E0})

    alg = AlgebraData(
        type_label=type_label, rank=r, n=n, e=tuple(e), f=tuple(f), h=tuple(hs),
        cartan=cartan, rho_vee=rho, coxeter=coxeter, exponents=(),
        lowest_root=E0, lambda_cyclic=lam, basis=tuple(basis),
    )
    exps = []
    for m in range(1, coxeter):
        exps += [m] * len(ad_lambda_kernel(alg, m))
    if tuple(exps) != expected_exponents(type_label, r):
        raise AlgebraError(f"computed exponents {exps} disagree with the table")
    object.__setattr__(alg, "exponents", tuple(exps))
    if set(principal_degree_split(lam, alg)) != {1}:
        raise AlgebraError("Lambda is not homogeneous of principal degree 1")
    if type_label == "A" and lam ** coxeter != Series.monomial(RatMatrix.identity(n), 1):
        raise AlgebraError("Lambda^h != z id")
    return alg


def _eigen_ratio(Y: RatMatrix, X: RatMatrix) -> Rational:
    """The scalar c with Y == c X (raises if there is none)."""
    k = next(i for i, x in enumerate(X.entries) if x)
    c = Y.entries[k] / X.entries[k]
    if Y != X * c:
        raise AlgebraError("not an eigenvector")
    return c


# -- principal gradation ------------------------------------------------------

def principal_degree(alg: AlgebraData, a: int, b: int, k: int) -> int:
    """Principal degree of E_ab z^k."""
    d = alg.rho[a] - alg.rho[b]
    if d.denominator != 1:
        raise AlgebraError("non-integral rho difference")
    return int(d) + k * alg.coxeter


def principal_degree_by_eigenvalue(alg: AlgebraData, X: RatMatrix, k: int) -> int:
    """Same degree computed from [rho, X] = ht X (for homogeneous X)."""
    return int(_eigen_ratio(bracket(alg.rho_vee, X), X)) + k * alg.coxeter


def principal_degree_split(X: Series, alg: AlgebraData, check_span: bool = True) -> dict[int, Series]:
    """Decompose a matrix series into principal-degree components.

    With ``check_span`` every coefficient must lie in the algebra, otherwise
    :class:`ProjectionError` reports the offending exponent and matrix.
    """
    if X.dim != alg.n:
        raise AlgebraError(f"expected a {alg.n}x{alg.n} matrix series")
    n = alg.n
    parts: dict[int, dict[int, list]] = {}
    for k, M in X.terms():
        if check_span and not alg.contains(M):
            raise ProjectionError(f"coefficient of z^{k} lies outside {alg.label}",
                                  exponent=k, residual=M)
        for idx, v in enumerate(M.entries):
            if not v:
                continue
            a, b = divmod(idx, n)
            m = principal_degree(alg, a, b, k)
            parts.setdefault(m, {}).setdefault(k, [ZERO] * (n * n))[idx] = v
    return {m: Series._raw({k: RatMatrix._raw(n, n, tuple(ent)) for k, ent in d.items()},
                           X.floor, n)
            for m, d in sorted(parts.items(), reverse=True)}


def principal_component(X: Series, alg: AlgebraData, m: int) -> Series:
    n = alg.n
    out = {}
    for k, M in X.terms():
        ent = [v if v and principal_degree(alg, idx // n, idx % n, k) == m else ZERO
               for idx, v in enumerate(M.entries)]
        if any(ent):
            out[k] = RatMatrix._raw(n, n, tuple(ent))
    return Series._raw(out, X.floor, n)


def in_loop_span(X: Series, alg: AlgebraData) -> bool:
    return all(alg.contains(M) for _, M in X.terms())


@dataclass(frozen=True)
class GradedPiece:
    """Principal-degree ``pdeg`` piece of the loop algebra, with a basis of
    monomials X z^k (X a homogeneous basis element of the algebra)."""

    algebra: AlgebraData
    pdeg: int
    basis: tuple[Series, ...]

    def __len__(self):
        return len(self.basis)


@lru_cache(maxsize=4096)
def graded_piece(alg: AlgebraData, m: int) -> GradedPiece:
    h = alg.coxeter
    out = []
    for X, ht in alg.basis:
        if (m - ht) % h == 0:
            out.append(Series.monomial(X, (m - ht) // h))
    return GradedPiece(alg, m, tuple(out))


@lru_cache(maxsize=4096)
def pdeg_coordinates(alg: AlgebraData, m: int) -> tuple[tuple[int, int, int], ...]:
    """Coordinates (k, a, b) of the gl_n entries E_ab z^k of principal degree m."""
    h = alg.coxeter
    n = alg.n
    coords = []
    for a in range(n):
        for b in range(n):
            d = int(alg.rho[a] - alg.rho[b])
            if (m - d) % h == 0:
                coords.append(((m - d) // h, a, b))
    return tuple(sorted(coords))


def graded_vector(X: Series, coords) -> list[Rational]:
    """Coordinates of X along ``coords`` (X must be known at those exponents)."""
    n = X.dim
    return [X.coeff(k).entries[a * n + b] for k, a, b in coords]


def from_graded_vector(values, coords, n: int) -> Series:
    out: dict[int, list] = {}
    for v, (k, a, b) in zip(values, coords):
        if v:
            out.setdefault(k, [ZERO] * (n * n))[a * n + b] = v
    return Series._raw({k: RatMatrix._raw(n, n, tuple(e)) for k, e in out.items()}, None, n)


def ad_matrix(alg: AlgebraData, m: int, lam: Series) -> RatMatrix:
    """Matrix of Y -> [Y, lam] from the degree-m piece to degree m + 1 coordinates."""
    coords = pdeg_coordinates(alg, m + 1)
    cols = [graded_vector(b * lam - lam * b, coords) for b in graded_piece(alg, m).basis]
    if not cols:
        return RatMatrix.zeros(len(coords), 0)
    return stack_columns(cols)


def combine(piece: GradedPiece | tuple[Series, ...], values, n: int) -> Series:
    basis = piece.basis if isinstance(piece, GradedPiece) else piece
    out = Series.zero(n)
    for v, b in zip(values, basis):
        if v:
            out = out + b * v
    return out


def ad_lambda_kernel(alg: AlgebraData, m: int, lam: Series | None = None) -> tuple[Series, ...]:
    """Basis of the kernel of ad(lam) on the degree-m piece of the loop algebra."""
    lam = alg.lambda_cyclic if lam is None else lam
    piece = graded_piece(alg, m)
    if not piece.basis:
        return ()
    return tuple(combine(piece, k.entries, alg.n) for k in mat_kernel(ad_matrix(alg, m, lam)))


@dataclass(frozen=True)
class ObstructionCertificate:
    """Witness that a graded equation [Y, Lambda] (+ corrections) = residue
    has no solution: ``null_covector`` annihilates every column of the
    system while pairing to ``pairing != 0`` with the residue."""

    pdeg: int
    residue: Series
    coordinates: tuple[tuple[int, int, int], ...]
    null_covector: tuple[Rational, ...]
    pairing: Rational
    trace_value: Rational
    system: RatMatrix = field(repr=False, default=None)

    def verify(self) -> bool:
        y = self.null_covector
        b = graded_vector(self.residue, self.coordinates)
        pair = sum((u * v for u, v in zip(y, b)), ZERO)
        if pair != self.pairing or not pair:
            return False
        if self.system is not None:
            for j in range(self.system.cols):
                if sum((u * v for u, v in zip(y, self.system.col(j))), ZERO):
                    return False
        return True


def residue_trace(residue: Series, alg: AlgebraData, m: int) -> Rational:
    """Trace of the z^(m/h) coefficient of a degree-m residue (0 if h does not divide m)."""
    if m % alg.coxeter:
        return ZERO
    k = m // alg.coxeter
    if residue.floor is not None and k < residue.floor:
        return ZERO
    return residue.coeff(k).trace()


def make_certificate(alg, m, residue, coords, system, witness) -> ObstructionCertificate:
    y = witness.entries
    b = graded_vector(residue, coords)
    pair = sum((u * v for u, v in zip(y, b)), ZERO)
    return ObstructionCertificate(pdeg=m, residue=residue, coordinates=coords,
                                  null_covector=tuple(y), pairing=pair,
                                  trace_value=residue_trace(residue, alg, m), system=system)


@dataclass(frozen=True)
class AdSolution:
    solution: Series
    kernel: tuple[Series, ...]


def ad_lambda_solve(X: Series, alg: AlgebraData, lam: Series | None = None):
    """Solve [Y, lam] = X for X homogeneous of principal degree m.

    Returns :class:`AdSolution` (Y of degree m - 1, free kernel coordinates
    set to zero) or an :class:`ObstructionCertificate`.
    """
    lam = alg.lambda_cyclic if lam is None else lam
    comps = principal_degree_split(X, alg, check_span=False)
    if not comps:
        return AdSolution(Series.zero(alg.n), ())
    if len(comps) != 1:
        raise AlgebraError(f"X is not homogeneous: degrees {sorted(comps)}")
    (m,) = comps
    coords = pdeg_coordinates(alg, m)
    piece = graded_piece(alg, m - 1)
    system = ad_matrix(alg, m - 1, lam)
    res = mat_solve(system, graded_vector(X, coords))
    kernel = tuple(combine(piece, k.entries, alg.n) for k in res.kernel)
    if not res.solvable:
        return make_certificate(alg, m, X, coords, system, res.witness)
    Y = combine(piece, res.solution.entries, alg.n)
    if not (Y * lam - lam * Y).agrees_with(X):
        raise AlgebraError("internal: ad-Lambda solution fails the recheck")
    return AdSolution(Y, kernel)

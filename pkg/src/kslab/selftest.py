"""Structural invariant suite run by ``ks-lab selftest``."""

from __future__ import annotations

from dataclasses import dataclass

from .exact import RatMatrix, bracket
from .laurent import Series
from .lie import (AlgebraData, ad_lambda_kernel, build_algebra, expected_exponents,
                  principal_degree_split)
from .operators import witt_check
from .rigidity import trace_law_property

ALGEBRAS = (("A", 1), ("A", 2), ("A", 3), ("C", 2))


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def chevalley_relations(alg: AlgebraData) -> Check:
    r = alg.rank
    for i in range(r):
        for j in range(r):
            want = alg.h[i] if i == j else RatMatrix.zeros(alg.n)
            if bracket(alg.e[i], alg.f[j]) != want:
                return Check(f"chevalley {alg.label}", False, f"[e_{i + 1}, f_{j + 1}]")
            if bracket(alg.h[i], alg.e[j]) != alg.e[j] * alg.cartan[i][j]:
                return Check(f"chevalley {alg.label}", False, f"[h_{i + 1}, e_{j + 1}]")
            if bracket(alg.h[i], alg.f[j]) != alg.f[j] * -alg.cartan[i][j]:
                return Check(f"chevalley {alg.label}", False, f"[h_{i + 1}, f_{j + 1}]")
    return Check(f"chevalley {alg.label}", True)


def rho_grading(alg: AlgebraData) -> Check:
    ok = all(bracket(alg.rho_vee, e) == e for e in alg.e) and \
        all(bracket(alg.rho_vee, f) == -f for f in alg.f)
    return Check(f"[rho, e_i] = e_i {alg.label}", ok)


def trace_zero(alg: AlgebraData) -> Check:
    mats = list(alg.e) + list(alg.f) + list(alg.h) + [X for X, _ in alg.basis] + [alg.rho_vee]
    mats += [M for _, M in alg.lambda_cyclic.terms()]
    return Check(f"trace zero {alg.label}", all(M.trace() == 0 for M in mats))


def cyclic_power(alg: AlgebraData) -> Check:
    h = alg.coxeter
    want = Series.monomial(RatMatrix.identity(alg.n), 1)
    comps = principal_degree_split(alg.lambda_cyclic, alg)
    ok = list(comps) == [1]
    if alg.type_label != "A":
        return Check(f"Lambda homogeneous of degree 1 {alg.label}", ok)
    ok = ok and alg.lambda_cyclic ** h == want
    return Check(f"Lambda^h = z id {alg.label}", ok)


def kernel_dimensions(alg: AlgebraData) -> Check:
    h = alg.coxeter
    table = expected_exponents(alg.type_label, alg.rank)
    for m in range(-2 * h - 1, 2 * h + 2):
        want = sum(1 for e in table if (m - e) % h == 0)
        got = len(ad_lambda_kernel(alg, m))
        if got != want:
            return Check(f"ad Lambda kernels {alg.label}", False, f"degree {m}: {got} != {want}")
    return Check(f"ad Lambda kernels {alg.label}", True, f"|m| <= {2 * h + 1}")


def witt_relations(bound: int = 3) -> Check:
    for i in range(-bound, bound + 1):
        for j in range(-bound, bound + 1):
            if not witt_check(i, j):
                return Check("witt relations", False, f"i={i}, j={j}")
    return Check("witt relations", True, f"|i|, |j| <= {bound}")


def run_selftest(seed: int = 0) -> list[Check]:
    out = []
    for t, r in ALGEBRAS:
        alg = build_algebra(t, r)
        out += [chevalley_relations(alg), rho_grading(alg), trace_zero(alg),
                cyclic_power(alg), kernel_dimensions(alg)]
    out.append(witt_relations())
    for (t, r), trials in ((("A", 1), 50), (("C", 2), 20)):
        s = trace_law_property(build_algebra(t, r), trials, seed=seed)
        out.append(Check(f"trace law {s.algebra}", s.ok, f"{s.passed}/{s.trials} trials"))
    return out

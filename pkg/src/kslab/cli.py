"""ks-lab command line.

Exit codes: 0 success, 1 usage or input error, 2 a rigid verdict was
expected but the operator is obstructed, 3 an obstruction was expected
but a dressing was found.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .blending import (blend, blend_operator, intertwining_check, m_matrix, scalar_ks_operator,
                       special_value, zeta_power)
from .exact import Q, RatMatrix, format_rational
from .grassmann import (DressingObstructed, cartan_point, stabilization_residual, wk_operator,
                        wk_point, z_stability_residual)
from .laurent import Series
from .lie import AlgebraError, build_algebra
from .operators import OperatorError, gauge_fix, matrix_operator, scalar_operator, witt_check
from .rigidity import OBSTRUCTED, RIGID, random_perturbation, rigidity_certificate
from .selftest import run_selftest
from .textio import (SeriesSyntaxError, matrix_to_json, parse_series, render_matrix,
                     render_series, series_to_json)

SCHEMA = "ks-lab/1"
DEFAULT_ORDER = 16
DEFAULT_SEED = 20240917


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    default_order: int = DEFAULT_ORDER
    output_format: str = "text"
    seed: int = DEFAULT_SEED

    @classmethod
    def from_env(cls, environ=None) -> "Config":
        env = os.environ if environ is None else environ
        raw = env.get("KS_LAB_ORDER")
        order = DEFAULT_ORDER
        if raw:
            try:
                order = int(raw)
            except ValueError:
                raise UsageError(f"KS_LAB_ORDER must be an integer, got {raw!r}") from None
        if order < 4:
            raise UsageError("default order must be at least 4")
        return cls(default_order=order)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rational(text: str):
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _rational_list(text: str):
    return [_rational(t) for t in text.split(",") if t.strip()]


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError("sign must be + or -")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ks-lab", description="Exact Kac-Schwarz operator lab")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=None)
    common.add_argument("--order", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    alg_args = _Parser(add_help=False)
    alg_args.add_argument("--type", dest="type_label", choices=("A", "C"), default="A")
    alg_args.add_argument("--rank", type=int, default=1)

    sub = p.add_subparsers(dest="group", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("algebra").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    g.add_parser("show", parents=[common, alg_args])

    g = sub.add_parser("blend").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    b = g.add_parser("verify", parents=[common])
    b.add_argument("--h", type=int, default=2)
    b.add_argument("--c", type=_rational, default=None,
                   help="coefficient of zeta^-h (default (1-h)/(2h))")

    g = sub.add_parser("gauge").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    b = g.add_parser("fix", parents=[common])
    b.add_argument("--h", type=int, default=2)
    b.add_argument("--potential", required=True)
    b.add_argument("--floor", type=int, default=None)

    g = sub.add_parser("dress").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    b = g.add_parser("cartan", parents=[common, alg_args])
    b.add_argument("--H", dest="H", type=_rational_list, required=True,
                   help="comma separated diagonal entries")
    b = g.add_parser("wk", parents=[common, alg_args])
    b.add_argument("--sign", type=_sign, default=1)

    g = sub.add_parser("rigidity").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    b = g.add_parser("scan", parents=[common, alg_args])
    b.add_argument("--star-list", type=_rational_list, required=True)
    b.add_argument("--perturb", choices=("none", "deep", "orbit"), default="none")
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--sign", type=_sign, default=1)
    b.add_argument("--expect", choices=("rigid", "obstructed"), default=None)

    g = sub.add_parser("witt").add_subparsers(dest="cmd", parser_class=_Parser)
    g.required = True
    b = g.add_parser("check", parents=[common])
    b.add_argument("--bound", type=int, default=3)

    sub.add_parser("selftest", parents=[common])
    return p


def _emit(obj: dict, lines: list[str], fmt: str, out) -> None:
    if fmt == "json":
        out.write(dump_json({"schema": SCHEMA, **obj}))
    else:
        out.write("\n".join(lines) + "\n")


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _algebra(args):
    try:
        return build_algebra(args.type_label, args.rank)
    except AlgebraError as exc:
        raise UsageError(str(exc)) from None


def _order(args, cfg: Config) -> int:
    order = args.order if args.order is not None else cfg.default_order
    if order < 2:
        raise UsageError("--order must be at least 2")
    return order


# -- subcommands ---------------------------------------------------------------

def cmd_algebra_show(args, cfg):
    alg = _algebra(args)
    obj = {
        "command": "algebra show", "algebra": alg.label, "n": alg.n, "coxeter": alg.coxeter,
        "exponents": list(alg.exponents), "cartan_matrix": [list(r) for r in alg.cartan],
        "rho_vee": [format_rational(x) for x in alg.rho],
        "e": [matrix_to_json(m) for m in alg.e], "f": [matrix_to_json(m) for m in alg.f],
        "lambda": render_series(alg.lambda_cyclic), "dimension": alg.dimension(),
    }
    lines = [f"algebra {alg.label}: n = {alg.n}, h = {alg.coxeter}, dim = {alg.dimension()}",
             f"exponents: {', '.join(map(str, alg.exponents))}",
             f"cartan matrix: {[list(r) for r in alg.cartan]}",
             f"rho_vee: diag({', '.join(obj['rho_vee'])})",
             f"Lambda: {obj['lambda']}"]
    for i, (e, f) in enumerate(zip(alg.e, alg.f), start=1):
        lines.append(f"e_{i} = {render_matrix(e)}   f_{i} = {render_matrix(f)}")
    return obj, lines, 0


def cmd_blend_verify(args, cfg):
    h = args.h
    if h < 2:
        raise UsageError("--h must be at least 2")
    order = _order(args, cfg)
    c = special_value(h) if args.c is None else args.c
    alg = build_algebra("A", h - 1)
    op = scalar_ks_operator(h, c)
    mop = blend_operator(op, h, check_floor=-order)
    star = c - special_value(h)
    want = wk_operator(alg, 1, star).potential
    rows = []
    for j in range(-h, h + 1):
        col = blend(Series.monomial(1, j), h)
        rows.append({"zeta_power": j, "blend": [render_series(s) for s in col]})
    M = m_matrix(c, h)
    checks = {
        "zeta_to_lambda": zeta_power(1, h) == alg.lambda_cyclic,
        "zeta_h_to_z": zeta_power(h, h) == Series.monomial(RatMatrix.identity(h), 1),
        "intertwining": intertwining_check(op, mop, h, floor=-order),
        "matches_rho_form": mop.potential == want,
        "m_trace_zero": M.trace() == 0,
    }
    obj = {"command": "blend verify", "h": h, "c": format_rational(c), "order": order,
           "special_value": format_rational(special_value(h)),
           "m_matrix": matrix_to_json(M), "m_trace": format_rational(M.trace()),
           "blended_potential": render_series(mop.potential), "table": rows, "checks": checks}
    lines = [f"h = {h}, c = {format_rational(c)} (special value {obj['special_value']})",
             f"M = diag({', '.join(format_rational(x) for x in M.diagonal())}), trace {obj['m_trace']}",
             f"blended operator: D + {obj['blended_potential']}"]
    lines += [f"  zeta^{r['zeta_power']} -> ({', '.join(r['blend'])})" for r in rows]
    lines += [f"check {k}: {'ok' if v else 'FAIL'}" for k, v in checks.items()]
    code = 0 if checks["zeta_to_lambda"] and checks["zeta_h_to_z"] and checks["intertwining"] else 1
    return obj, lines, code


def cmd_gauge_fix(args, cfg):
    try:
        pot = parse_series(args.potential)
    except SeriesSyntaxError as exc:
        raise UsageError(str(exc)) from None
    if pot.dim is not None:
        raise UsageError("gauge fix takes a scalar potential")
    floor = args.floor if args.floor is not None else -_order(args, cfg)
    res = gauge_fix(scalar_operator(args.h, pot), args.h, floor)
    obj = {"command": "gauge fix", "h": args.h, "floor": floor,
           "gamma": series_to_json(res.gamma), "fixed_potential": series_to_json(res.operator.potential),
           "steps": [{"exponent": i, "coefficient": format_rational(d)} for i, d in res.steps]}
    lines = [f"gamma = {render_series(res.gamma)}",
             f"fixed potential = {render_series(res.operator.potential)}"]
    lines += [f"  d_{i} = {format_rational(d)}" for i, d in res.steps]
    return obj, lines, 0


def _dressing_obj(V, d, alg, residuals):
    return {"algebra": alg.label, "A": series_to_json(d.A), "floor": d.floor,
            "constant_part": matrix_to_json(d.constant_part),
            "normalization": d.normalization,
            "kernel_adjustments": [s.pdeg for s in d.steps if s.kernel_adjustment is not None],
            "residuals": {k: r.status for k, r in residuals.items()}}


def cmd_dress_cartan(args, cfg):
    alg = _algebra(args)
    order = _order(args, cfg)
    if len(args.H) != alg.n:
        raise UsageError(f"--H needs {alg.n} entries")
    H = RatMatrix.diag(args.H)
    try:
        V, d = cartan_point(H, alg, order)
    except AlgebraError as exc:
        raise UsageError(str(exc)) from None
    op = matrix_operator(Series.monomial(H, -1) + alg.lambda_cyclic)
    res = {"stabilization": stabilization_residual(V, op, order)}
    obj = {"command": "dress cartan", "order": order, "H": [format_rational(x) for x in args.H],
           **_dressing_obj(V, d, alg, res)}
    lines = [f"Cartan point for H = diag({', '.join(obj['H'])}) in {alg.label}, order {order}",
             f"A = {render_series(d.A)}",
             f"stabilization residual: {res['stabilization'].status}"]
    return obj, lines, 0 if res["stabilization"].is_zero else 1


def cmd_dress_wk(args, cfg):
    alg = _algebra(args)
    order = _order(args, cfg)
    V, d = wk_point(alg, args.sign, order)
    res = {"z_stability": z_stability_residual(V, order),
           "stabilization": stabilization_residual(V, wk_operator(alg, args.sign), order)}
    obj = {"command": "dress wk", "order": order, "sign": args.sign, **_dressing_obj(V, d, alg, res)}
    lines = [f"Witten-Kontsevich point of {alg.label}, sign {'+' if args.sign > 0 else '-'}, "
             f"order {order}", f"A = {render_series(d.A)}"]
    lines += [f"{k} residual: {r.status}" for k, r in res.items()]
    return obj, lines, 0 if all(r.is_zero for r in res.values()) else 1


def _report_obj(rep, descriptor):
    obj = {"algebra": rep.algebra, "star": format_rational(rep.star), "verdict": rep.verdict,
           "obstruction_trace": format_rational(rep.obstruction_trace), "order": rep.order,
           "g": descriptor,
           "proof_trace": [{"step": s.name, "ok": s.ok, "detail": s.detail} for s in rep.proof_trace]}
    if rep.dressing is not None:
        obj["dressing"] = {"A": series_to_json(rep.dressing.A)}
    if rep.certificate is not None:
        c = rep.certificate
        obj["certificate"] = {"pdeg": c.pdeg, "pairing": format_rational(c.pairing),
                              "trace_value": format_rational(c.trace_value),
                              "null_covector": [format_rational(x) for x in c.null_covector],
                              "residue": render_series(c.residue)}
    return obj


def cmd_rigidity_scan(args, cfg):
    alg = _algebra(args)
    order = _order(args, cfg)
    seed = args.seed if args.seed is not None else cfg.seed
    rng = random.Random(seed)
    results, lines = [], []
    code = 0
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    for star in args.star_list:
        for t in range(args.trials):
            g = random_perturbation(alg, rng, args.perturb, order, args.sign)
            desc = ("+" if args.sign > 0 else "-") + "Lambda" + \
                ("" if args.perturb == "none" else f" + {args.perturb} perturbation #{t}")
            rep = rigidity_certificate(alg, star, g, order, g_descriptor=desc)
            results.append(_report_obj(rep, desc))
            lines.append(f"{alg.label} star={format_rational(star)} g=[{desc}]: {rep.verdict}, "
                         f"obstruction trace {format_rational(rep.obstruction_trace)}")
            for s in rep.proof_trace:
                lines.append(f"    {'ok ' if s.ok else 'BAD'} {s.name}: {s.detail}")
            if args.expect == "rigid" and rep.verdict != RIGID:
                code = max(code, 2)
            if args.expect == "obstructed" and rep.verdict != OBSTRUCTED:
                code = max(code, 3 if rep.verdict == RIGID else 2)
    obj = {"command": "rigidity scan", "algebra": alg.label, "order": order, "seed": seed,
           "perturbation": args.perturb, "results": results}
    return obj, lines, code


def cmd_witt_check(args, cfg):
    b = args.bound
    table = {f"{i},{j}": witt_check(i, j) for i in range(-b, b + 1) for j in range(-b, b + 1)}
    ok = all(table.values())
    obj = {"command": "witt check", "bound": b, "ok": ok,
           "failures": [k for k, v in table.items() if not v]}
    lines = [f"Witt relations for |i|, |j| <= {b}: {'ok' if ok else 'FAIL'}"]
    return obj, lines, 0 if ok else 1


def cmd_selftest(args, cfg):
    seed = args.seed if args.seed is not None else 0
    checks = run_selftest(seed)
    ok = all(c.ok for c in checks)
    obj = {"command": "selftest", "ok": ok,
           "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks]}
    lines = [f"{'PASS' if c.ok else 'FAIL'} {c.name}" + (f" ({c.detail})" if c.detail else "")
             for c in checks]
    lines.append(f"{sum(c.ok for c in checks)}/{len(checks)} checks passed")
    return obj, lines, 0 if ok else 1


COMMANDS = {
    ("algebra", "show"): cmd_algebra_show,
    ("blend", "verify"): cmd_blend_verify,
    ("gauge", "fix"): cmd_gauge_fix,
    ("dress", "cartan"): cmd_dress_cartan,
    ("dress", "wk"): cmd_dress_wk,
    ("rigidity", "scan"): cmd_rigidity_scan,
    ("witt", "check"): cmd_witt_check,
    ("selftest", None): cmd_selftest,
}


def run(argv=None, out=None, environ=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cfg = Config.from_env(environ)
        args = build_parser().parse_args(argv)
        fmt = args.format or cfg.output_format
        handler = COMMANDS[(args.group, getattr(args, "cmd", None))]
        obj, lines, code = handler(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (OperatorError, AlgebraError, SeriesSyntaxError, DressingObstructed) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    _emit(obj, lines, fmt, out)
    return code


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == "__main__":
    sys.exit(main())

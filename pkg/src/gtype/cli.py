"""Command-line surface.

Exit codes: 0 success (and "in class" for ``check``), 1 negative verdict,
2 parse/IO error, 3 invalid type, 4 budget exceeded or inconclusive,
5 internal inconsistency.  All reports are stable line-oriented text.
"""

from __future__ import annotations

import argparse
import sys

from . import algebra, boundary, core, obstructions, oracle, render, surface
from .errors import (
    BudgetExceeded,
    GTypeError,
    InconsistencyError,
    InvalidTypeError,
    ParseError,
    PreconditionError,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_BUDGET = 4
EXIT_TRIPWIRE = 5


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}")


def _load(path: str) -> core.GeometricType:
    return core.parse_geometric_type(_read_text(path))


def _fmt_cycle(cycle) -> str:
    return "->".join(f"({i},{e:+d})" for i, e in cycle)


def _emit(text: str, out) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def cmd_validate(args, out) -> int:
    try:
        _load(args.file)
    except InvalidTypeError as exc:
        for rule, detail in exc.report.violations:
            _emit(f"violation {rule} {detail}", out)
        return EXIT_INVALID
    _emit("ok", out)
    return EXIT_OK


def cmd_info(args, out) -> int:
    T = _load(args.file)
    A = core.incidence_matrix(T)
    _emit(f"n={T.n}", out)
    _emit("h=" + ",".join(map(str, T.h)), out)
    _emit("v=" + ",".join(map(str, T.v)), out)
    _emit(f"alpha={T.alpha}", out)
    for row in A.rows:
        _emit("A " + " ".join(map(str, row)), out)
    report = algebra.mixing_report(A)
    _emit(f"binary={'yes' if report.binary else 'no'}", out)
    _emit(f"mixing={'yes' if report.mixing else 'no'}", out)
    if report.mixing:
        _emit(f"mixing_witness_exponent={report.witness_exponent}", out)
    db = algebra.has_double_boundary(T)
    _emit(
        "double_boundary_s=" + ("-".join(map(str, db.s_cycle)) if db and db.s_cycle else "none"),
        out,
    )
    _emit(
        "double_boundary_u=" + ("-".join(map(str, db.u_cycle)) if db and db.u_cycle else "none"),
        out,
    )
    if report.mixing:
        _emit(f"perron={algebra.perron_root(A):.12f}", out)
    return EXIT_OK


def cmd_power(args, out) -> int:
    T = _load(args.file)
    Tm = algebra.power(T, args.m)
    out.write(core.serialize(Tm))
    return EXIT_OK


def cmd_invert(args, out) -> int:
    T = _load(args.file)
    out.write(core.serialize(core.invert(T)))
    return EXIT_OK


def cmd_check(args, out) -> int:
    T = _load(args.file)
    if args.verify:
        witness = obstructions.parse_witness(_read_text(args.verify))
        ok = obstructions.verify_witness(T, witness)
        _emit(f"certificate {'valid' if ok else 'invalid'}", out)
        return EXIT_OK if ok else EXIT_NEGATIVE
    if args.max_power is not None:
        db = algebra.has_double_boundary(T)
        if db:
            _emit("verdict not_in_class", out)
            _emit("powers_examined 0", out)
            _emit("reason double_boundary", out)
            return EXIT_NEGATIVE
        report = obstructions.scan_obstructions(T, max_power=args.max_power)
        _emit("verdict scan_only", out)
        _emit(f"powers_examined {report.powers_examined}", out)
        for kind, witness in report.witnesses:
            if witness is not None:
                _emit(obstructions.format_witness(witness), out)
        return EXIT_OK if report.clean else EXIT_NEGATIVE
    verdict = obstructions.is_pseudo_anosov_class(T)
    _emit(f"verdict {verdict.verdict}", out)
    _emit(f"powers_examined {verdict.powers_examined}", out)
    for name, payload in verdict.reasons:
        _emit(f"reason {name}", out)
        if isinstance(payload, obstructions.ConditionWitness):
            _emit(obstructions.format_witness(payload), out)
        elif isinstance(payload, algebra.DoubleBoundaryReport):
            if payload.s_cycle:
                _emit("cycle s " + "-".join(map(str, payload.s_cycle)), out)
            if payload.u_cycle:
                _emit("cycle u " + "-".join(map(str, payload.u_cycle)), out)
    if verdict.verdict == "inconclusive":
        return EXIT_BUDGET
    return EXIT_OK if verdict.in_class else EXIT_NEGATIVE


def cmd_boundary(args, out) -> int:
    T = _load(args.file)
    table = boundary.boundary_code_table(T)
    for lab, (tail, cycle) in table.gamma_orbits:
        i, e = lab
        _emit(f"gamma ({i},{e:+d}) tail={_fmt_cycle(tail) or '.'} cycle={_fmt_cycle(cycle)}", out)
    for lab, (tail, cycle) in table.upsilon_orbits:
        i, e = lab
        _emit(f"upsilon ({i},{e:+d}) tail={_fmt_cycle(tail) or '.'} cycle={_fmt_cycle(cycle)}", out)

    def fmt_one_sided(pre, cyc):
        pre_txt = ",".join(map(str, pre))
        cyc_txt = ",".join(map(str, cyc))
        return (f"[{pre_txt}]" if pre else "") + f"({cyc_txt})^+"

    for lab, (pre, cyc) in table.i_plus:
        i, e = lab
        _emit(f"I+ ({i},{e:+d}) {fmt_one_sided(pre, cyc)}", out)
    for lab, (pre, cyc) in table.j_minus:
        i, e = lab
        _emit(f"J- ({i},{e:+d}) {fmt_one_sided(pre, cyc)}", out)
    for code in table.per_s:
        _emit(f"per_s {boundary.format_code(code)}", out)
    for code in table.per_u:
        _emit(f"per_u {boundary.format_code(code)}", out)
    _emit(f"corner_property={'yes' if set(table.per_s) == set(table.per_u) else 'no'}", out)
    return EXIT_OK


def cmd_related(args, out) -> int:
    T = _load(args.file)
    w = boundary.parse_code(args.code1)
    v = boundary.parse_code(args.code2)
    if args.rel == "s":
        result = boundary.s_related(T, w, v)
    elif args.rel == "u":
        result = boundary.u_related(T, w, v)
    else:
        result = boundary.T_related(T, w, v)
    _emit(f"related {'true' if result.related else 'false'}", out)
    for key, value in result.witness:
        _emit(f"witness {key}={value}", out)
    return EXIT_OK


def cmd_surface(args, out) -> int:
    T = _load(args.file)
    report = surface.surface_report(T)
    seen = set()
    for cls in report.classes:
        key = cls.code_set()
        if key in seen:
            continue
        orbit = {key}
        cur = frozenset(c.shift(1) for c in key)
        while cur != key:
            orbit.add(cur)
            cur = frozenset(c.shift(1) for c in cur)
        seen |= orbit
        codes = ";".join(boundary.format_code(c) for c in cls.codes)
        _emit(f"orbit period={cls.orbit_period} prongs={cls.prongs} codes={codes}", out)
    for warning in report.warnings:
        _emit(f"warning {warning}", out)
    _emit(f"chi={report.chi} genus={report.genus}", out)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    T = _load(args.file)
    disagreements = 0
    for m in range(1, args.m + 1):
        combin = algebra.power(T, m)
        geo = oracle.iterate_type(T, m)
        ok = combin == geo
        disagreements += 0 if ok else 1
        _emit(f"power m={m} combinatorial=geometric {'ok' if ok else 'MISMATCH'}", out)
    for m in range(1, args.m + 1):
        Tm = algebra.power(T, m)
        geo_report = oracle.geometric_obstructions(T, m)
        for kind, checker in (
            ("type1", obstructions.condition_type1),
            ("type2", obstructions.condition_type2),
            ("type3", obstructions.condition_type3),
        ):
            comb_hit = checker(Tm, m) is not None
            geo_hit = geo_report[kind] is not None
            ok = comb_hit == geo_hit
            disagreements += 0 if ok else 1
            _emit(
                f"obstruction {kind} m={m} combinatorial={'yes' if comb_hit else 'no'} "
                f"geometric={'yes' if geo_hit else 'no'} {'ok' if ok else 'MISMATCH'}",
                out,
            )
    comb_imp = None
    for m in range(1, args.m + 1):
        hit = obstructions.impasse_property(algebra.power(T, m), m)
        if hit is not None:
            comb_imp = m
            break
    geo_imp = oracle.geometric_impasse(T, args.m)
    ok = (comb_imp is not None) == (geo_imp is not None)
    disagreements += 0 if ok else 1
    _emit(
        f"impasse up_to={args.m} combinatorial={'yes' if comb_imp else 'no'} "
        f"geometric={'yes' if geo_imp else 'no'} {'ok' if ok else 'MISMATCH'}",
        out,
    )
    if disagreements:
        raise InconsistencyError(f"{disagreements} oracle disagreements")
    return EXIT_OK


def cmd_render(args, out) -> int:
    T = _load(args.file)
    svg = render.render_svg(T, args.m)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    _emit(f"wrote {args.output}", out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtype",
        description="Combinatorial calculus of geometric types of Markov partitions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a geometric-type file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("info", help="basic invariants and incidence data")
    p.add_argument("file")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("power", help="canonical serialization of an iterate")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("invert", help="canonical serialization of the inverse type")
    p.add_argument("file")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("check", help="pseudo-Anosov class verdict")
    p.add_argument("--max-power", type=int, default=None)
    p.add_argument("--verify", metavar="CERT", default=None,
                   help="re-validate a witness certificate file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("boundary", help="boundary orbits, codes, corner property")
    p.add_argument("file")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("related", help="decide a code relation")
    p.add_argument("--rel", choices=("s", "u", "T"), required=True)
    p.add_argument("file")
    p.add_argument("code1")
    p.add_argument("code2")
    p.set_defaults(func=cmd_related)

    p = sub.add_parser("surface", help="sector classes, prongs, chi and genus")
    p.add_argument("file")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("oracle", help="combinatorial vs geometric agreement matrix")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="static SVG figure of the concretization")
    p.add_argument("-m", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_render)
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except InvalidTypeError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=err)
        return EXIT_BUDGET
    except InconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=err)
        return EXIT_TRIPWIRE
    except PreconditionError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except GTypeError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

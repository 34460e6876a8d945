"""Command-line front end: ``n2coset kac|character|fuse|verify|serve``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import gcd

from . import catalog as cat
from . import characters as ch
from . import fusion as fu
from .catalog import Family, MinimalModel
from .errors import LabelParseError, N2CosetError
from .labels import parse_label
from .series import fmt_rational

EXIT_USAGE = 64
SUITES = ("branching", "ses", "magic", "ring", "crossmethod", "orbits")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--u", type=int, required=True)
    common.add_argument("--v", type=int, default=1)
    common.add_argument("--q-order", type=_rational, default=None,
                        help="truncation order in q (default 6 for v >= 2, 8 for v = 1)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--y-window", type=int, default=None)

    p = _Parser(prog="n2coset", description="N=2 minimal model characters, branching and fusion.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kac", parents=[common], help="Kac table of the unitary model M(u, 1)")
    k.add_argument("--reduced", action="store_true")

    c = sub.add_parser("character", parents=[common], help="(super)character of an N2 module")
    c.add_argument("label")
    c.add_argument("--method", type=str.lower, default=None,
                   choices=("residue", "appell-lerch", "resolution", "typical", "spectral-flow"))
    c.add_argument("--super", action="store_true")

    f = sub.add_parser("fuse", parents=[common], help="fusion product of two N2 modules")
    f.add_argument("a")
    f.add_argument("b")
    f.add_argument("--grothendieck", action="store_true")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", choices=SUITES, required=True)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8000)
    return p


_METHODS = {"residue": ch.Method.RESIDUE_EG, "appell-lerch": ch.Method.APPELL_LERCH,
            "resolution": ch.Method.RESOLUTION, "typical": ch.Method.TYPICAL,
            "spectral-flow": ch.Method.SFLOW}


def _model(args) -> MinimalModel:
    if args.u < 2 or args.v < 1:
        raise UsageError("need u >= 2 and v >= 1")
    if gcd(args.u, args.v) != 1:
        raise UsageError("u and v must be coprime")
    if args.q_order is None:
        args.q_order = Fraction(6 if args.v >= 2 else 8)
    if args.q_order <= 0:
        raise UsageError("--q-order must be positive")
    return MinimalModel(args.u, args.v)


def _show(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# kac


def render_kac(u: int, reduced: bool = False) -> str:
    table = cat.kac_table(u)
    cols = list(range(-(u - 1), u if reduced else 2 * u - 1))
    rows = []
    head = ["r\\p"] + [str(p) for p in cols]
    for r in range(1, u):
        row = [str(r)]
        for p in cols:
            if reduced:
                cell = table["reduced"].get((r, p))
                txt = "" if cell is None else f"{_show(cell[0])};{_show(cell[1])}"
                sector = None if cell is None else cell[2]
            else:
                hw = table["full"].get((r, p))
                txt = "" if hw is None else hw.cell()
                sector = None if hw is None else hw.sector
            row.append(txt + ("*" if sector == "R" else ""))
        rows.append(row)
    widths = [max(len(x[j]) for x in [head] + rows) for j in range(len(head))]
    lines = ["  ".join(x.rjust(w) for x, w in zip(line, widths)) for line in [head] + rows]
    lines.append("* Ramond sector")
    return "\n".join(lines)


def kac_json(u: int, reduced: bool) -> dict:
    table = cat.kac_table(u)
    if reduced:
        cells = [{"r": r, "p": p, "j": fmt_rational(j), "delta": fmt_rational(d), "sector": sec}
                 for (r, p), (j, d, sec) in sorted(table["reduced"].items())]
    else:
        cells = [{"r": r, "p": p, "parity": hw.parity, "j": fmt_rational(hw.j),
                  "delta": fmt_rational(hw.delta), "sector": hw.sector}
                 for (r, p), hw in sorted(table["full"].items())]
    return {"u": u, "reduced": reduced, "cells": cells}


# character


def render_series(s) -> str:
    by_q: dict = {}
    for q, z, c in s.items():
        by_q.setdefault(q, []).append((z, c))
    lines = []
    for q in sorted(by_q):
        terms = "  ".join(f"{c}*z^{_show(z)}" for z, c in sorted(by_q[q]))
        lines.append(f"q^{_show(q):>8}: {terms}")
    lines.append(f"+ O(q^{_show(s.N)})")
    return "\n".join(lines)


# verification suites


def suite_branching(m: MinimalModel, N, y_window) -> list[dict]:
    y_window = y_window or (2 * m.u if m.unitary else 6)
    labels = [cat.sl2(Family.L, r) for r in range(1, m.u)]
    if not m.unitary:
        labels += [cat.sl2(fam, r, s) for fam in (Family.DPLUS, Family.DMINUS)
                   for r in range(1, m.u) for s in range(1, m.v)]
    return [ch.branch_verify(m, lab, i, sup, N, y_window)
            for lab in labels for i in range(4) for sup in (False, True)]


def _ses_labels(m: MinimalModel):
    out = []
    for r in range(1, m.u):
        for s in range(1, m.v):
            out.append(cat.n2(Family.EPLUS, 0, m.lam(r, s), r, s))
            out.append(cat.n2(Family.EMINUS, 0, m.lam(m.u - r, m.v - s), r, s))
    return out


def suite_ses(m: MinimalModel, N) -> list[dict]:
    if m.unitary:
        raise UsageError("the ses suite needs v >= 2")
    return [ch.ses_char_check(m, lab, N) for lab in _ses_labels(m)]


def suite_magic() -> list[dict]:
    return [ch.magic_check(samples, identity=name) for name, samples in ch.MAGIC_SAMPLES.items()]


def suite_ring(m: MinimalModel) -> list[dict]:
    if m.unitary:
        return [fu.ring_check(m, cat.unitary_labels(m.u), exact=True)]
    labels = fu.grothendieck_sample(m)
    sl2_labels = [cat.sl2(Family.L, r) for r in range(1, m.u)]
    sl2_labels += [cat.sl2(Family.DPLUS, r, s, flow=f) for r in range(1, m.u)
                   for s in range(1, m.v) for f in (0, 1)]
    return [fu.ring_check(m, labels, p_window=4 * m.t),
            fu.ring_check(m, list(dict.fromkeys(sl2_labels)), flow_window=2)]


def _compare(name, labels, a, b, N) -> dict:
    d = a.first_difference(b, N)
    return {"check": name, "labels": [str(x) for x in labels], "q_order": fmt_rational(N),
            "status": "pass" if d is None else "fail",
            "first_discrepancy": None if d is None else
            {"q": fmt_rational(d[0]), "z": fmt_rational(d[1]), "lhs": str(d[2]), "rhs": str(d[3])}}


def suite_crossmethod(m: MinimalModel, N) -> list[dict]:
    out = []
    if m.unitary:
        for lab in cat.unitary_labels(m.u):
            out.append(_compare("crossmethod:residue-vs-appell-lerch", [lab],
                                ch.char_n2(m, lab, ch.Method.RESIDUE_EG, N=N),
                                ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=N), N))
        return out
    labels = [cat.n2(Family.L, i, m.lam(r, 0) + i, r) for r in range(1, m.u) for i in (0, 1)]
    labels += [cat.n2(Family.DPLUS, i, m.lam(r, s) + i, r, s)
               for r in range(1, m.u) for s in range(1, m.v) for i in (0, 1)]
    for lab in labels:
        base = ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=N)
        if m.k < 0:
            out.append(_compare("crossmethod:resolution-vs-appell-lerch", [lab],
                                ch.char_n2(m, lab, ch.Method.RESOLUTION, N=N), base, N))
        out.append(_compare("crossmethod:spectral-flow-vs-appell-lerch", [lab],
                            ch.char_n2(m, lab, ch.Method.SFLOW, N=N), base, N))
        if lab.family is Family.L:
            out.append(_compare("crossmethod:conjugate-form-vs-appell-lerch", [lab],
                                ch.char_n2_conjugate_form(m, lab, N), base, N))
    return out


def expected_orbit_census(u: int) -> list[int]:
    """Sorted orbit lengths of spectral flow on the irreducibles of M(u, 1)."""
    if u % 2:
        return [4 * u] * ((u - 1) // 2)
    if u % 4 == 0:
        return [2 * u] * (u - 1)
    return sorted([2 * u] * (u - 2) + [u, u])


def suite_orbits(m: MinimalModel) -> list[dict]:
    if not m.unitary:
        raise UsageError("the orbits suite needs v = 1")
    obs = cat.orbits(m.u)
    lengths = sorted(o.length for o in obs)
    want = expected_orbit_census(m.u)
    return [{"check": "orbits", "labels": [str(o.representative) for o in obs], "q_order": None,
             "lengths": lengths, "expected": want,
             "status": "pass" if lengths == want else "fail",
             "first_discrepancy": None if lengths == want else {"observed": lengths, "expected": want}}]


def run_suite(m: MinimalModel, suite: str, N, y_window=None) -> dict:
    if suite == "branching":
        reports = suite_branching(m, N, y_window)
    elif suite == "ses":
        reports = suite_ses(m, N)
    elif suite == "magic":
        reports = suite_magic()
    elif suite == "ring":
        reports = suite_ring(m)
    elif suite == "crossmethod":
        reports = suite_crossmethod(m, N)
    else:
        reports = suite_orbits(m)
    ok = all(r["status"] == "pass" for r in reports)
    return {"suite": suite, "u": m.u, "v": m.v, "status": "pass" if ok else "fail",
            "checks": len(reports), "failed": sum(r["status"] != "pass" for r in reports),
            "reports": reports}


def _summary(result: dict) -> str:
    lines = [f"{r['status'].upper():4}  {r['check']}  {' '.join(r['labels'][:3])}"
             for r in result["reports"]]
    lines.append(f"{result['suite']}: {result['status']} ({result['checks'] - result['failed']}"
                 f"/{result['checks']} passed)")
    return "\n".join(lines)


# dispatch


def _run(args) -> int:
    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    m = _model(args)
    table = args.format == "table"
    if args.command == "kac":
        if not m.unitary:
            raise UsageError("the Kac table is for v = 1")
        print(render_kac(m.u, args.reduced) if table else json.dumps(kac_json(m.u, args.reduced)))
        return 0
    if args.command == "character":
        label = parse_label(args.label)
        method = None if args.method is None else _METHODS[args.method]
        s = ch.char_n2(m, label, method, args.super, args.q_order)
        print(render_series(s) if table else s.to_json())
        return 0
    if args.command == "fuse":
        a, b = parse_label(args.a), parse_label(args.b)
        if m.unitary:
            res = fu.fuse_unitary(m, a, b)
        elif args.grothendieck:
            res = fu.FusionResult(None, fu.groth_fuse_n2(m, a, b), False)
        else:
            res = fu.fuse_exact(m, a, b)
        if table:
            if res.exact is not None:
                print("exact:        " + (" + ".join(f"{n}*{x}" for x, n in res.exact) or "0"))
            print("grothendieck: " + (" + ".join(f"{n}*{x}" for x, n in res.grothendieck) or "0"))
            if res.conjectural:
                print("(conjectural rule)")
        else:
            print(json.dumps(res.to_json_obj()))
        return 0
    result = run_suite(m, args.suite, args.q_order, args.y_window)
    print(_summary(result) if table else json.dumps(result))
    return 0 if result["status"] == "pass" else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except (UsageError, LabelParseError) as exc:
        print(f"n2coset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except N2CosetError as exc:
        print(f"n2coset: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"n2coset: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

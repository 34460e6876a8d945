"""Text grammar for module labels.

    label   := n2 | sl2 | ghost | fock | vir
    n2      := "N2:" family "[" args "]"        family in L D+ D- E E+ E- S
    sl2     := "SL2:" family "[" args "]"       family in L D+ D- E E+ E-
    ghost   := "GH:" int
    fock    := "FOCK:" rational
    vir     := "VIR:[" args "]"
    args    := arg ("," arg)*
    arg     := [name "="] rational              names: i p r s lambda flow

Positional arguments fill the fields in the order i, p, r, s for N2 labels,
r, s, lambda, flow for SL2 labels and r, s for VIR labels.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .catalog import Algebra, Family, ModuleLabel, fock, ghost, n2, sl2, vir
from .errors import LabelParseError

_N2_FAMILIES = {"L", "D+", "D-", "E", "E+", "E-", "S"}
_SL2_FAMILIES = {"L", "D+", "D-", "E", "E+", "E-"}
_ORDER = {"N2": ("i", "p", "r", "s"), "SL2": ("r", "s", "lambda", "flow"), "VIR": ("r", "s")}
_RAT = re.compile(r"\s*(-?\d+(?:/\d+)?)\s*")


def _rational(text: str, pos: int) -> Fraction:
    m = _RAT.fullmatch(text)
    if not m:
        raise LabelParseError(f"expected an exact rational, got {text.strip()!r}", pos)
    return Fraction(m.group(1))


def _integer(x: Fraction, name: str, pos: int) -> int:
    if x.denominator != 1:
        raise LabelParseError(f"{name} must be an integer", pos)
    return int(x)


def _args(body: str, start: int, algebra: str) -> dict[str, Fraction]:
    order = _ORDER[algebra]
    out: dict[str, Fraction] = {}
    if not body.strip():
        return out
    pos = start
    for k, part in enumerate(body.split(",")):
        if "=" in part:
            name, val = part.split("=", 1)
            name = name.strip()
            if name not in order:
                raise LabelParseError(f"unknown field {name!r} for {algebra} labels", pos)
            vpos = pos + len(part.split("=", 1)[0]) + 1
        else:
            if k >= len(order):
                raise LabelParseError("too many positional fields", pos)
            name, val, vpos = order[k], part, pos
        if name in out:
            raise LabelParseError(f"field {name!r} given twice", pos)
        out[name] = _rational(val, vpos)
        pos += len(part) + 1
    return out


def parse_label(text: str) -> ModuleLabel:
    text = text.strip()
    if ":" not in text:
        raise LabelParseError("expected ALGEBRA:..., e.g. N2:L[i=0,p=0,r=1]", 0)
    algebra, rest = text.split(":", 1)
    off = len(algebra) + 1
    algebra = algebra.upper()
    if algebra == "GH":
        return ghost(_integer(_rational(rest, off), "i", off))
    if algebra == "FOCK":
        return fock(_rational(rest, off))
    if algebra not in ("N2", "SL2", "VIR"):
        raise LabelParseError(f"unknown algebra {algebra!r}", 0)
    lb = rest.find("[")
    if lb < 0 or not rest.endswith("]"):
        raise LabelParseError("expected a bracketed argument list", off + max(lb, 0))
    fam = rest[:lb].strip()
    a = _args(rest[lb + 1:-1], off + lb + 1, algebra)
    if algebra == "VIR":
        if fam:
            raise LabelParseError("VIR labels take no family", off)
        return vir(_integer(a.get("r", Fraction(0)), "r", off), _integer(a.get("s", Fraction(0)), "s", off))
    families = _N2_FAMILIES if algebra == "N2" else _SL2_FAMILIES
    if fam not in families:
        raise LabelParseError(f"unknown {algebra} family {fam!r}", off)
    r = _integer(a.get("r", Fraction(0)), "r", off)
    s = _integer(a.get("s", Fraction(0)), "s", off)
    if algebra == "N2":
        if "p" not in a or "r" not in a:
            raise LabelParseError("N2 labels need p and r", off + lb)
        return n2(fam, _integer(a.get("i", Fraction(0)), "i", off), a["p"], r, s)
    if fam == "E" and "lambda" not in a:
        raise LabelParseError("typical sl2 labels need lambda", off + lb)
    return sl2(fam, r, s, a.get("lambda"), _integer(a.get("flow", Fraction(0)), "flow", off))


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_label(x: ModuleLabel) -> str:
    a = x.algebra
    if a is Algebra.GHOST:
        return f"GH:{x.i}"
    if a is Algebra.FOCK:
        return f"FOCK:{_q(x.p)}"
    if a is Algebra.VIR:
        return f"VIR:[r={x.r},s={x.s}]"
    if a is Algebra.N2:
        tail = "" if x.family is Family.L else f",s={x.s}"
        return f"N2:{x.family.value}[i={x.i},p={_q(x.p)},r={x.r}{tail}]"
    parts = [f"r={x.r}"]
    if x.family is not Family.L:
        parts.append(f"s={x.s}")
    if x.family is Family.E:
        parts.append(f"lambda={_q(x.lam)}")
    if x.flow:
        parts.append(f"flow={x.flow}")
    return f"SL2:{x.family.value}[{','.join(parts)}]"

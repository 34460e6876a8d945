"""Module labels, highest-weight dictionaries, automorphisms, Kac tables,
orbits and composition-factor data for the N=2 minimal models M(u, v)."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import gcd

from .errors import LabelOutOfRange, ParityMismatch
from .series import frac

F = Fraction


class Algebra(str, Enum):
    N2 = "N2"
    SL2 = "SL2"
    GHOST = "GH"
    FOCK = "FOCK"
    VIR = "VIR"


class Family(str, Enum):
    L = "L"
    DPLUS = "D+"
    DMINUS = "D-"
    E = "E"
    EPLUS = "E+"
    EMINUS = "E-"
    S = "S"
    GHOST = "GH"
    FOCK = "FOCK"
    VIR = "VIR"


@dataclass(frozen=True)
class MinimalModel:
    u: int
    v: int = 1

    def __post_init__(self):
        if self.u < 2 or self.v < 1 or gcd(self.u, self.v) != 1:
            raise LabelOutOfRange(f"M({self.u},{self.v}) requires u >= 2, v >= 1, gcd(u, v) = 1")

    @property
    def t(self) -> Fraction:
        return F(self.u, self.v)

    @property
    def k(self) -> Fraction:
        return self.t - 2

    @property
    def c(self) -> Fraction:
        """N=2 central charge."""
        return 3 - 6 / self.t

    @property
    def c_sl2(self) -> Fraction:
        return 3 * self.k / self.t

    @property
    def unitary(self) -> bool:
        return self.v == 1

    def lam(self, r: int, s: int) -> Fraction:
        return r - 1 - self.t * s

    def delta(self, r: int, s: int) -> Fraction:
        return (F(r) - self.t * s) ** 2 / (4 * self.t) - 1 / (4 * self.t)

    def h(self, p, r: int, s: int) -> Fraction:
        return self.delta(r, s) - frac(p) ** 2 / (4 * self.t)


@dataclass(frozen=True)
class ModuleLabel:
    algebra: Algebra
    family: Family
    i: int = 0
    p: Fraction = F(0)
    r: int = 0
    s: int = 0
    lam: Fraction | None = None
    flow: int = 0
    parity: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", frac(self.p))
        if self.lam is not None:
            object.__setattr__(self, "lam", frac(self.lam))
        if self.algebra in (Algebra.N2, Algebra.GHOST):
            object.__setattr__(self, "i", self.i % 4)

    def sort_key(self):
        return (self.algebra.value, self.family.value, self.i, self.p, self.r, self.s,
                self.lam if self.lam is not None else F(-1), self.flow, self.parity or "")

    def __str__(self):
        from .labels import format_label
        return format_label(self)

    def to_json_obj(self) -> dict:
        out = {"algebra": self.algebra.value, "family": self.family.value}
        if self.algebra in (Algebra.N2, Algebra.GHOST):
            out["i"] = self.i
        if self.algebra in (Algebra.N2, Algebra.FOCK):
            out["p"] = f"{self.p.numerator}/{self.p.denominator}"
        if self.algebra in (Algebra.N2, Algebra.SL2, Algebra.VIR):
            out["r"], out["s"] = self.r, self.s
        if self.lam is not None:
            out["lambda"] = f"{self.lam.numerator}/{self.lam.denominator}"
        if self.algebra is Algebra.SL2:
            out["flow"] = self.flow
        if self.parity is not None:
            out["parity"] = self.parity
        return out


def n2(family: Family | str, i: int, p, r: int, s: int = 0) -> ModuleLabel:
    family = Family(family)
    p = frac(p)
    lam = ((p - i) % 2) if family is Family.E else None
    return ModuleLabel(Algebra.N2, family, i, p, r, s, lam)


def sl2(family: Family | str, r: int, s: int = 0, lam=None, flow: int = 0) -> ModuleLabel:
    family = Family(family)
    if family is Family.E:
        lam = frac(lam) % 2
    return ModuleLabel(Algebra.SL2, family, 0, F(0), r, s, lam, flow)


def ghost(i: int) -> ModuleLabel:
    return ModuleLabel(Algebra.GHOST, Family.GHOST, i)


def fock(p) -> ModuleLabel:
    return ModuleLabel(Algebra.FOCK, Family.FOCK, 0, frac(p))


def vir(r: int, s: int) -> ModuleLabel:
    return ModuleLabel(Algebra.VIR, Family.VIR, 0, F(0), r, s)


@dataclass(frozen=True)
class HighestWeightData:
    parity: str
    j: Fraction
    delta: Fraction
    sector: str

    def cell(self) -> str:
        return f"{self.parity};{_fmt(self.j)};{_fmt(self.delta)}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# weights


def weights(m: MinimalModel, r: int, s: int, p) -> tuple[Fraction, Fraction, Fraction]:
    if not (1 <= r <= m.u - 1 and 0 <= s <= m.v - 1):
        raise LabelOutOfRange(f"(r,s)=({r},{s}) outside 1..{m.u - 1} x 0..{m.v - 1}")
    return m.lam(r, s), m.delta(r, s), m.h(p, r, s)


# validation


def _is_even(x: Fraction) -> bool:
    return x.denominator == 1 and x.numerator % 2 == 0


def typical_ok(m: MinimalModel, lam: Fraction, r: int, s: int) -> bool:
    return not (_is_even(lam - m.lam(r, s)) or _is_even(lam - m.lam(m.u - r, m.v - s)))


def lattice_weight(m: MinimalModel, label: ModuleLabel) -> Fraction | None:
    """The sl2 weight class (mod 2) that p - i must lie in, or None for typicals."""
    f, r, s = label.family, label.r, label.s
    if f in (Family.L, Family.DPLUS, Family.EPLUS, Family.S):
        return m.lam(r, s)
    if f is Family.DMINUS:
        return -m.lam(r, s)
    if f is Family.EMINUS:
        return m.lam(m.u - r, m.v - s)
    return None


def validate(m: MinimalModel, label: ModuleLabel) -> ModuleLabel:
    a, f = label.algebra, label.family
    u, v = m.u, m.v
    if a is Algebra.N2:
        if not 1 <= label.r <= u - 1:
            raise LabelOutOfRange(f"r={label.r} outside 1..{u - 1}")
        if f is Family.L:
            if label.s != 0:
                raise LabelOutOfRange("L-family labels have s = 0")
        elif f is Family.S:
            if not 0 <= label.s <= v - 1 or v < 2:
                raise LabelOutOfRange(f"staggered s={label.s} outside 0..{v - 1}")
        elif f in (Family.DPLUS, Family.DMINUS, Family.E, Family.EPLUS, Family.EMINUS):
            if v < 2 or not 1 <= label.s <= v - 1:
                raise LabelOutOfRange(f"s={label.s} outside 1..{v - 1} for family {f.value}")
        else:
            raise LabelOutOfRange(f"family {f.value} is not an N=2 family")
        if f is Family.E:
            if not typical_ok(m, label.p - label.i, label.r, label.s):
                raise LabelOutOfRange(
                    f"E label at p={label.p}, i={label.i} is atypical for (r,s)=({label.r},{label.s})")
        else:
            w = lattice_weight(m, label)
            if not _is_even(label.p - label.i - w):
                raise ParityMismatch(
                    f"p - i = {label.p - label.i} is not in {w} + 2Z for {f.value}")
        return label
    if a is Algebra.SL2:
        if not 1 <= label.r <= u - 1:
            raise LabelOutOfRange(f"r={label.r} outside 1..{u - 1}")
        if f is Family.L:
            if label.s != 0:
                raise LabelOutOfRange("L-family labels have s = 0")
        elif f in (Family.DPLUS, Family.DMINUS, Family.EPLUS, Family.EMINUS, Family.E):
            if v < 2 or not 1 <= label.s <= v - 1:
                raise LabelOutOfRange(f"s={label.s} outside 1..{v - 1}")
            if f is Family.E and not typical_ok(m, label.lam, label.r, label.s):
                raise LabelOutOfRange(f"lambda={label.lam} is atypical for ({label.r},{label.s})")
        else:
            raise LabelOutOfRange(f"family {f.value} is not an sl2 family")
        return label
    if a is Algebra.GHOST:
        return label
    if a is Algebra.FOCK:
        return label
    if a is Algebra.VIR:
        if not (1 <= label.r <= u - 1 and 1 <= label.s <= v - 1):
            raise LabelOutOfRange("Virasoro Kac label out of range")
        return label
    raise LabelOutOfRange(f"unknown algebra {a}")


# canonical forms


def _kac_reduce(m: MinimalModel, i: int, p: Fraction, r: int) -> tuple[int, Fraction, int]:
    u = m.u
    i %= 4
    if i >= 2:
        i, p, r = i - 2, p + u, u - r
    p = p - 2 * u * ((p + r) // (2 * u))
    return i, p, r


def canonical_label(m: MinimalModel, label: ModuleLabel) -> ModuleLabel:
    validate(m, label)
    if label.algebra is Algebra.N2:
        if m.unitary and label.family is Family.L:
            i, p, r = _kac_reduce(m, label.i, label.p, label.r)
            return n2(Family.L, i, p, r)
        if label.family is Family.E:
            r, s = min((label.r, label.s), (m.u - label.r, m.v - label.s))
            return n2(Family.E, label.i, label.p, r, s)
        return label
    if label.algebra is Algebra.SL2 and label.family is Family.E:
        r, s = min((label.r, label.s), (m.u - label.r, m.v - label.s))
        return sl2(Family.E, r, s, label.lam % 2, label.flow)
    return label


def normal_form(m: MinimalModel, label: ModuleLabel) -> ModuleLabel:
    """Canonical label after applying every module identification.

    D-type modules at s = v-1 are L-type modules, every D- is a D+ or an L, and
    staggered modules at s = v-1 are staggered modules at s = 0.
    """
    label = canonical_label(m, label)
    if label.algebra is Algebra.N2:
        return _n2_normal(m, label)
    if label.algebra is Algebra.SL2:
        return _sl2_normal(m, label)
    return label


def _n2_normal(m: MinimalModel, x: ModuleLabel) -> ModuleLabel:
    u, v, t = m.u, m.v, m.t
    f = x.family
    if f is Family.DMINUS:
        if x.s == v - 1:
            return canonical_label(m, n2(Family.L, x.i + 2, x.p + t, u - x.r))
        return n2(Family.DPLUS, x.i + 2, x.p + t, u - x.r, v - 1 - x.s)
    if f is Family.DPLUS and x.s == v - 1:
        return canonical_label(m, n2(Family.L, x.i + 2, x.p - t, u - x.r))
    if f is Family.S and x.s == v - 1 and v - 1 > 0:
        return n2(Family.S, x.i - 2, x.p - t, u - x.r, 0)
    return x


def _sl2_normal(m: MinimalModel, x: ModuleLabel) -> ModuleLabel:
    u, v = m.u, m.v
    f = x.family
    if f is Family.DMINUS:
        if x.s == v - 1:
            return sl2(Family.L, u - x.r, 0, flow=x.flow - 1)
        return sl2(Family.DPLUS, u - x.r, v - 1 - x.s, flow=x.flow - 1)
    if f is Family.DPLUS and x.s == v - 1:
        return sl2(Family.L, u - x.r, 0, flow=x.flow + 1)
    return x


def n2_boundary(m: MinimalModel, i: int, p, r: int, s: int) -> ModuleLabel:
    """D-type label with the extended s-range -1..v resolved to a genuine label."""
    u, v, t = m.u, m.v, m.t
    p = frac(p)
    if s == -1:
        return n2_boundary(m, i + 2, p + t, u - r, v - 2)
    if s == v:
        return n2_boundary(m, i - 2, p - t, u - r, 1)
    if s == 0:
        return canonical_label(m, n2(Family.L, i, p, r))
    return n2(Family.DPLUS, i, p, r, s)


# automorphisms


def conjugate(m: MinimalModel, label: ModuleLabel) -> ModuleLabel:
    f = label.family
    if label.algebra is Algebra.N2:
        i, p, r, s = -label.i, -label.p, label.r, label.s
        swap = {Family.DPLUS: Family.DMINUS, Family.DMINUS: Family.DPLUS,
                Family.EPLUS: Family.EMINUS, Family.EMINUS: Family.EPLUS}
        if f is Family.S:
            return canonical_label(m, n2(Family.S, label.i * -1 - 2, -label.p + m.t,
                                         m.u - r, m.v - 1 - s))
        return canonical_label(m, n2(swap.get(f, f), i, p, r, s))
    if label.algebra is Algebra.SL2:
        swap = {Family.DPLUS: Family.DMINUS, Family.DMINUS: Family.DPLUS,
                Family.EPLUS: Family.EMINUS, Family.EMINUS: Family.EPLUS}
        lam = None if label.lam is None else -label.lam
        return canonical_label(m, replace(label, family=swap.get(f, f), lam=lam % 2 if lam is not None else None,
                                          flow=-label.flow))
    if label.algebra is Algebra.GHOST:
        return ghost(-label.i)
    if label.algebra is Algebra.FOCK:
        return fock(-label.p)
    return label


def twist_label(m: MinimalModel, label: ModuleLabel, half_flows: int = 0,
                conjugate_after: bool = False) -> ModuleLabel:
    """Apply sigma^{1/2} `half_flows` times, then optionally conjugate.

    On coset labels each sigma^{1/2} sends (i, p) to (i - 1, p - 1).
    """
    validate(m, label)
    if label.algebra is not Algebra.N2:
        if label.algebra is Algebra.SL2:
            if half_flows % 2:
                raise LabelOutOfRange("sl2 labels only admit integral spectral flow")
            out = replace(label, flow=label.flow + half_flows // 2)
        else:
            out = label
    elif label.family is Family.E:
        out = n2(Family.E, label.i - half_flows, label.p - half_flows, label.r, label.s)
    else:
        out = replace(label, i=(label.i - half_flows) % 4, p=label.p - half_flows)
    out = canonical_label(m, out)
    return conjugate(m, out) if conjugate_after else out


def parity_reverse(m: MinimalModel, label: ModuleLabel) -> ModuleLabel:
    return canonical_label(m, replace(label, i=(label.i + 2) % 4)) if label.family is not Family.E \
        else canonical_label(m, n2(Family.E, label.i + 2, label.p, label.r, label.s))


# dictionaries


def _flip(sign: str) -> str:
    return "-" if sign == "+" else "+"


def dictionary_unitary(m: MinimalModel, i: int, p, r: int) -> HighestWeightData:
    if not m.unitary:
        raise LabelOutOfRange("the unitary dictionary needs v = 1")
    if not 1 <= r <= m.u - 1:
        raise LabelOutOfRange(f"r={r} outside 1..{m.u - 1}")
    p = frac(p)
    if p.denominator != 1 or (p - i - r + 1) % 2:
        raise ParityMismatch(f"p={p} violates p = i + r - 1 mod 2 for i={i}, r={r}")
    u = m.u
    i %= 4
    p = p - 2 * u * ((p + r) // (2 * u))
    base = _dict_L(m, i % 2, p, r)
    if i >= 2:
        return replace(base, parity=_flip(base.parity))
    return base


def _dict_L(m: MinimalModel, i: int, p: Fraction, r: int) -> HighestWeightData:
    t = m.t
    h = m.h(p, r, 0)
    if i == 0:
        if p <= -r - 1:
            return HighestWeightData("-", p / t + 1, h - (p + r) / 2, "NS")
        if p <= r - 1:
            return HighestWeightData("+", p / t, h, "NS")
        return HighestWeightData("-", p / t - 1, h + (p - r) / 2, "NS")
    e = F(1, 8)
    if p <= -r - 2:
        return HighestWeightData("+", p / t + F(3, 2), h + e - (p + r) / 2, "R")
    if p <= r - 2:
        return HighestWeightData("-", p / t + F(1, 2), h + e, "R")
    return HighestWeightData("+", p / t - F(1, 2), h + e + (p - r) / 2, "R")


def _dict_D(m: MinimalModel, i: int, p: Fraction, r: int, s: int) -> HighestWeightData:
    t = m.t
    lam = m.lam(r, s)
    h = m.h(p, r, s)
    if i == 0:
        if p <= lam:
            return HighestWeightData("+", p / t, h, "NS")
        return HighestWeightData("-", p / t - 1, h + (p - lam - 1) / 2, "NS")
    e = F(1, 8)
    if p <= lam - 1:
        return HighestWeightData("-", p / t + F(1, 2), h + e, "R")
    return HighestWeightData("+", p / t - F(1, 2), h + e + (p - lam - 1) / 2, "R")


def _dict_E(m: MinimalModel, i: int, p: Fraction, r: int, s: int) -> HighestWeightData:
    h = m.h(p, r, s)
    if i == 0:
        return HighestWeightData("+", p / m.t, h, "NS")
    return HighestWeightData("-", p / m.t + F(1, 2), h + F(1, 8), "R")


def dictionary_nonunitary(m: MinimalModel, label: ModuleLabel) -> HighestWeightData:
    validate(m, label)
    if label.algebra is not Algebra.N2:
        raise LabelOutOfRange("dictionaries apply to N=2 labels")
    f = label.family
    if f is Family.DMINUS or (f is Family.DPLUS and label.s == m.v - 1):
        return dictionary_nonunitary(m, normal_form(m, label))
    i = label.i
    if f is Family.L:
        base = _dict_L(m, i % 2, label.p, label.r)
    elif f is Family.DPLUS:
        base = _dict_D(m, i % 2, label.p, label.r, label.s)
    elif f is Family.E:
        base = _dict_E(m, i % 2, label.p, label.r, label.s)
    else:
        raise LabelOutOfRange(f"no highest-weight dictionary for family {f.value}")
    if i >= 2:
        return replace(base, parity=_flip(base.parity))
    return base


def highest_weight(m: MinimalModel, label: ModuleLabel) -> HighestWeightData:
    """Dictionary lookup for any irreducible N=2 label of M(u, v)."""
    if m.unitary and label.family is Family.L:
        return dictionary_unitary(m, label.i, label.p, label.r)
    return dictionary_nonunitary(m, label)


def is_highest_weight(m: MinimalModel, label: ModuleLabel) -> bool:
    validate(m, label)
    if label.family is not Family.EPLUS:
        raise LabelOutOfRange("is_highest_weight is defined for E+ labels")
    return label.p >= m.lam(label.r, label.s) + 1


# tables and orbits


def unitary_labels(u: int) -> list[ModuleLabel]:
    """The 2u(u-1) inequivalent irreducibles of M(u, 1), in canonical form."""
    out = []
    for r in range(1, u):
        for p in range(-r, 2 * u - r):
            out.append(n2(Family.L, (p - r + 1) % 2, p, r))
    return out


def kac_table(u: int) -> dict:
    m = MinimalModel(u, 1)
    full = {}
    for r in range(1, u):
        for p in range(-r, 2 * u - r):
            full[(r, p)] = dictionary_unitary(m, (p - r + 1) % 2, p, r)
    reduced = {}
    for r in range(1, u):
        for p in range(-r, r):
            j = F(p, u) + F(1 + (-1) ** (p + r), 4)
            delta = F(r * r - p * p - 1, 4 * u) + F(1 + (-1) ** (p + r), 16)
            reduced[(r, p)] = (j, delta, "NS" if (p + r) % 2 else "R")
    return {"full": full, "reduced": reduced}


@dataclass(frozen=True)
class Orbit:
    representative: ModuleLabel
    length: int
    parity_closed: bool
    members: tuple[ModuleLabel, ...] = field(repr=False, default=())


def orbits(u: int) -> list[Orbit]:
    m = MinimalModel(u, 1)
    remaining = set(unitary_labels(u))
    out = []
    for start in unitary_labels(u):
        if start not in remaining:
            continue
        members = [start]
        x = twist_label(m, start, 1)
        while x != start:
            members.append(x)
            x = twist_label(m, x, 1)
        remaining -= set(members)
        closed = parity_reverse(m, start) in set(members)
        out.append(Orbit(start, len(members), closed, tuple(members)))
    return out


# Grothendieck vectors


class GrothVector:
    """Integer combination of module labels; zero multiplicities are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        c = Counter()
        for k, n in dict(terms or {}).items():
            c[k] += n
        self.terms = {k: n for k, n in c.items() if n}

    @classmethod
    def of(cls, label: ModuleLabel, mult: int = 1) -> GrothVector:
        return cls({label: mult})

    def __add__(self, other: GrothVector) -> GrothVector:
        c = Counter(self.terms)
        for k, n in other.terms.items():
            c[k] += n
        return GrothVector(c)

    def scaled(self, n: int) -> GrothVector:
        return GrothVector({k: n * v for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, GrothVector) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0].sort_key()))

    def __len__(self):
        return len(self.terms)

    def total(self) -> int:
        return sum(self.terms.values())

    def map_labels(self, fn) -> GrothVector:
        c = Counter()
        for k, n in self.terms.items():
            c[fn(k)] += n
        return GrothVector(c)

    def to_json_obj(self) -> list:
        return [{"label": str(k), "mult": n} for k, n in self]

    def __repr__(self):
        return " + ".join(f"{n}*{k}" for k, n in self) or "0"


def groth_decompose(m: MinimalModel, label: ModuleLabel) -> GrothVector:
    validate(m, label)
    u, v, t = m.u, m.v, m.t
    f, i, p, r, s = label.family, label.i, label.p, label.r, label.s
    if label.algebra is not Algebra.N2:
        return GrothVector.of(canonical_label(m, label))
    if f is Family.EPLUS:
        return GrothVector({n2_boundary(m, i, p, r, s): 1}) + \
            GrothVector({n2_boundary(m, i + 2, p + t, r, s - 1): 1})
    if f is Family.EMINUS:
        return GrothVector({n2_boundary(m, i + 2, p + t, u - r, v - s - 1): 1}) + \
            GrothVector({n2_boundary(m, i, p, u - r, v - s): 1})
    if f is Family.S:
        return GrothVector({n2_boundary(m, i, p, r, s): 2}) + \
            GrothVector({n2_boundary(m, i + 2, p + t, r, s - 1): 1}) + \
            GrothVector({n2_boundary(m, i - 2, p - t, r, s + 1): 1})
    return GrothVector.of(canonical_label(m, label))


def irreducible_class(m: MinimalModel, vec: GrothVector) -> GrothVector:
    """Expand composite labels into irreducibles and apply every identification."""
    out = GrothVector()
    for k, n in vec.terms.items():
        if k.algebra is Algebra.N2 and k.family in (Family.EPLUS, Family.EMINUS, Family.S):
            out = out + groth_decompose(m, k).map_labels(lambda x: normal_form(m, x)).scaled(n)
        else:
            out = out + GrothVector({normal_form(m, k): n})
    return out


def atypical_standard(m: MinimalModel, i: int, p, r: int, s: int) -> ModuleLabel:
    """Label for a standard module at (i, p; r, s): E if typical, else the E+ on its lattice."""
    p = frac(p)
    if typical_ok(m, p - i, r, s):
        return canonical_label(m, n2(Family.E, i, p, r, s))
    if _is_even(p - i - m.lam(r, s)):
        return n2(Family.EPLUS, i, p, r, s)
    return n2(Family.EPLUS, i, p, m.u - r, m.v - s)

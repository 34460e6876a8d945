"""Exact truncated bivariate Puiseux series in z and q.

Exponents are stored as integers scaled by per-series denominators ``Dz`` and
``Dq``; the truncation bound ``N`` is inclusive and every coefficient with
q-exponent at most ``N`` is exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping

from .errors import NonIntegralSignExponent, NonInvertibleLeadingTerm, TruncationError

Rational = Fraction


def frac(x) -> Fraction:
    """Coerce ints, Fractions and "n/d" strings to Fraction (never floats)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Monomial:
    coeff: int
    z_exp: Fraction
    q_exp: Fraction

    def __post_init__(self):
        if self.coeff == 0:
            raise ValueError("monomial coefficient must be nonzero")
        object.__setattr__(self, "z_exp", frac(self.z_exp))
        object.__setattr__(self, "q_exp", frac(self.q_exp))


class Series2:
    __slots__ = ("Dz", "Dq", "N", "terms")

    def __init__(self, terms: Mapping[tuple[int, int], int] | None, N, Dz: int = 1, Dq: int = 1):
        N = frac(N)
        if Dz <= 0 or Dq <= 0:
            raise ValueError("lattice denominators must be positive")
        self.Dz = Dz
        self.Dq = Dq
        self.N = N
        cap = N * Dq
        self.terms = {k: c for k, c in (terms or {}).items() if c and k[0] <= cap}

    # construction

    @classmethod
    def zero(cls, N) -> Series2:
        return cls({}, N)

    @classmethod
    def from_terms(cls, items: Iterable[tuple[object, object, int]], N) -> Series2:
        """Build from (q_exp, z_exp, coeff) triples; repeated exponents accumulate."""
        items = [(frac(q), frac(z), int(c)) for q, z, c in items]
        Dq = lcm(1, frac(N).denominator, *(q.denominator for q, _, _ in items))
        Dz = lcm(1, *(z.denominator for _, z, _ in items))
        terms: dict[tuple[int, int], int] = {}
        for q, z, c in items:
            key = (int(q * Dq), int(z * Dz))
            terms[key] = terms.get(key, 0) + c
        return cls(terms, N, Dz, Dq)

    @classmethod
    def monomial(cls, coeff: int, z_exp, q_exp, N) -> Series2:
        return cls.from_terms([(q_exp, z_exp, coeff)], N)

    @classmethod
    def one(cls, N) -> Series2:
        return cls.monomial(1, 0, 0, N)

    # inspection

    @property
    def q_offset(self) -> Fraction:
        if not self.terms:
            return self.N
        return Fraction(min(k[0] for k in self.terms), self.Dq)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[Fraction, Fraction, int]]:
        """(q_exp, z_exp, coeff) triples sorted by (q, z)."""
        for (qi, zi) in sorted(self.terms):
            yield Fraction(qi, self.Dq), Fraction(zi, self.Dz), self.terms[(qi, zi)]

    def as_dict(self) -> dict[tuple[Fraction, Fraction], int]:
        return {(q, z): c for q, z, c in self.items()}

    def coeff(self, q_exp, z_exp) -> int:
        q, z = frac(q_exp), frac(z_exp)
        if q > self.N:
            raise TruncationError(f"q^{q} lies beyond the truncation order {self.N}")
        if (q * self.Dq).denominator != 1 or (z * self.Dz).denominator != 1:
            return 0
        return self.terms.get((int(q * self.Dq), int(z * self.Dz)), 0)

    def z_support(self) -> set[Fraction]:
        return {Fraction(zi, self.Dz) for _, zi in self.terms}

    def q_levels(self) -> list[Fraction]:
        return sorted({Fraction(qi, self.Dq) for qi, _ in self.terms})

    def __repr__(self):
        body = " + ".join(f"{c}*z^({z})*q^({q})" for q, z, c in self.items()) or "0"
        return f"Series2({body}; O(q^{self.N}))"

    def __eq__(self, other):
        if not isinstance(other, Series2):
            return NotImplemented
        return self.N == other.N and self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash((self.N, frozenset(self.as_dict().items())))

    # lattice bookkeeping

    def rescaled(self, Dz: int, Dq: int) -> Series2:
        if Dz % self.Dz or Dq % self.Dq:
            raise ValueError("target lattice must refine the current one")
        fz, fq = Dz // self.Dz, Dq // self.Dq
        if fz == 1 and fq == 1:
            return self
        return Series2({(qi * fq, zi * fz): c for (qi, zi), c in self.terms.items()}, self.N, Dz, Dq)

    def reduced(self) -> Series2:
        """Coarsest lattice carrying every stored exponent and the bound."""
        gq = self.Dq
        gz = self.Dz
        for qi, zi in self.terms:
            gq = gcd(gq, qi)
            gz = gcd(gz, zi)
        if gq == 1 and gz == 1:
            return self
        return Series2({(qi // gq, zi // gz): c for (qi, zi), c in self.terms.items()},
                       self.N, self.Dz // gz, self.Dq // gq)

    def _common(self, other: Series2) -> tuple[Series2, Series2]:
        Dz, Dq = lcm(self.Dz, other.Dz), lcm(self.Dq, other.Dq)
        return self.rescaled(Dz, Dq), other.rescaled(Dz, Dq)

    # arithmetic

    def truncate(self, N) -> Series2:
        N = frac(N)
        if N >= self.N:
            return self
        return Series2(self.terms, N, self.Dz, self.Dq)

    def __add__(self, other: Series2) -> Series2:
        a, b = self._common(other)
        terms = dict(a.terms)
        for k, c in b.terms.items():
            terms[k] = terms.get(k, 0) + c
        return Series2(terms, min(a.N, b.N), a.Dz, a.Dq)

    def __neg__(self) -> Series2:
        return Series2({k: -c for k, c in self.terms.items()}, self.N, self.Dz, self.Dq)

    def __sub__(self, other: Series2) -> Series2:
        return self + (-other)

    def scale(self, k: int) -> Series2:
        return Series2({key: k * c for key, c in self.terms.items()}, self.N, self.Dz, self.Dq)

    def shift(self, z_exp=0, q_exp=0, coeff: int = 1) -> Series2:
        """Multiply by the exact monomial coeff * z^z_exp * q^q_exp."""
        z, q = frac(z_exp), frac(q_exp)
        Dz = lcm(self.Dz, z.denominator)
        Dq = lcm(self.Dq, q.denominator)
        s = self.rescaled(Dz, Dq)
        dz, dq = int(z * Dz), int(q * Dq)
        return Series2({(qi + dq, zi + dz): coeff * c for (qi, zi), c in s.terms.items()},
                       self.N + q, Dz, Dq)

    def _levels(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {}
        for (qi, zi), c in self.terms.items():
            out.setdefault(qi, []).append((zi, c))
        return out

    def __mul__(self, other: Series2) -> Series2:
        a, b = self._common(other)
        N = min(a.N + b.q_offset, b.N + a.q_offset)
        cap = N * a.Dq
        la, lb = a._levels(), b._levels()
        qb_sorted = sorted(lb)
        terms: dict[tuple[int, int], int] = {}
        for qa in sorted(la):
            row_a = la[qa]
            for qb in qb_sorted:
                qs = qa + qb
                if qs > cap:
                    break
                for za, ca in row_a:
                    for zb, cb in lb[qb]:
                        key = (qs, za + zb)
                        terms[key] = terms.get(key, 0) + ca * cb
        return Series2(terms, N, a.Dz, a.Dq)

    def mul_inverse(self) -> Series2:
        if not self.terms:
            raise NonInvertibleLeadingTerm("the zero series has no inverse")
        levels = self._levels()
        q0 = min(levels)
        lead = levels[q0]
        if len(lead) != 1 or lead[0][1] not in (1, -1):
            raise NonInvertibleLeadingTerm(
                "leading q-level must be a single monomial with coefficient +1 or -1")
        z0, c0 = lead[0]
        beta = Fraction(q0, self.Dq)
        # g = a / lead has leading term 1 and order N - beta
        g = {qi - q0: [(zi - z0, c * c0) for zi, c in row] for qi, row in levels.items()}
        cap = int((self.N - beta) * self.Dq // 1)
        inv: dict[int, dict[int, int]] = {0: {0: 1}}
        g_levels = sorted(k for k in g if k > 0)
        for e in range(1, cap + 1):
            acc: dict[int, int] = {}
            for ge in g_levels:
                if ge > e:
                    break
                prev = inv.get(e - ge)
                if not prev:
                    continue
                for zg, cg in g[ge]:
                    for zp, cp in prev.items():
                        acc[zg + zp] = acc.get(zg + zp, 0) - cg * cp
            acc = {z: c for z, c in acc.items() if c}
            if acc:
                inv[e] = acc
        terms = {(e - q0, z - z0): c * c0 for e, row in inv.items() for z, c in row.items()}
        return Series2(terms, self.N - 2 * beta, self.Dz, self.Dq)

    def substitute(self, z_flip: bool = False, z_qshift=0, z_invert: bool = False,
                   q_order=None) -> Series2:
        """Apply z -> (-1)^flip z, then z -> z q^shift, then z -> z^-1 (monomialwise)."""
        shift = frac(z_qshift)
        N = self.N if q_order is None else min(self.N, frac(q_order))
        Dq = lcm(self.Dq, self.Dz * shift.denominator)
        fq = Dq // self.Dq
        step = shift * Dq  # q-shift per unit of scaled z exponent, times Dz
        terms: dict[tuple[int, int], int] = {}
        for (qi, zi), c in self.terms.items():
            if z_flip:
                alpha = Fraction(zi, self.Dz)
                if alpha.denominator % 2 == 0:
                    raise NonIntegralSignExponent(f"(-1)^({alpha}) is not defined")
                if alpha.numerator % 2:
                    c = -c
            nq = qi * fq + int(step * zi / self.Dz)
            key = (nq, -zi if z_invert else zi)
            terms[key] = terms.get(key, 0) + c
        return Series2(terms, N, self.Dz, Dq)

    def coeff_z(self, alpha) -> Series2:
        a = frac(alpha) * self.Dz
        if a.denominator != 1:
            return Series2({}, self.N)
        a = int(a)
        return Series2({(qi, 0): c for (qi, zi), c in self.terms.items() if zi == a},
                       self.N, 1, self.Dq)

    def restrict_z(self, lo=None, hi=None) -> Series2:
        lo = None if lo is None else frac(lo) * self.Dz
        hi = None if hi is None else frac(hi) * self.Dz
        return Series2({(qi, zi): c for (qi, zi), c in self.terms.items()
                        if (lo is None or zi >= lo) and (hi is None or zi <= hi)},
                       self.N, self.Dz, self.Dq)

    def equal_to_order(self, other: Series2, N) -> bool:
        N = frac(N)
        if N > self.N or N > other.N:
            raise TruncationError(
                f"cannot compare to order {N}: operands are exact only to {self.N} and {other.N}")
        return self.truncate(N).as_dict() == other.truncate(N).as_dict()

    def first_difference(self, other: Series2, N) -> tuple[Fraction, Fraction, int, int] | None:
        """Lowest (q, z) where the two series differ up to N, with both coefficients."""
        a = self.truncate(frac(N)).as_dict()
        b = other.truncate(frac(N)).as_dict()
        diffs = sorted(k for k in set(a) | set(b) if a.get(k, 0) != b.get(k, 0))
        if not diffs:
            return None
        q, z = diffs[0]
        return q, z, a.get((q, z), 0), b.get((q, z), 0)

    # serialization

    def to_json_obj(self) -> dict:
        return {
            "Dz": self.Dz,
            "Dq": self.Dq,
            "q_order": fmt_rational(self.N),
            "terms": [{"q": fmt_rational(q), "z": fmt_rational(z), "c": str(c)}
                      for q, z, c in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> Series2:
        Dz, Dq = int(obj["Dz"]), int(obj["Dq"])
        terms = {}
        for t in obj["terms"]:
            q, z = Fraction(t["q"]) * Dq, Fraction(t["z"]) * Dz
            if q.denominator != 1 or z.denominator != 1:
                raise ValueError("term exponent is off the declared lattice")
            terms[(int(q), int(z))] = int(t["c"])
        return cls(terms, Fraction(obj["q_order"]), Dz, Dq)

    @classmethod
    def from_json(cls, text: str) -> Series2:
        return cls.from_json_obj(json.loads(text))


def add(a: Series2, b: Series2) -> Series2:
    return a + b


def mul(a: Series2, b: Series2) -> Series2:
    return a * b


def mul_inverse(a: Series2) -> Series2:
    return a.mul_inverse()


def substitute(a: Series2, z_flip: bool = False, z_qshift=0, z_invert: bool = False) -> Series2:
    return a.substitute(z_flip, z_qshift, z_invert)


def coeff_z(a: Series2, alpha) -> Series2:
    return a.coeff_z(alpha)


def equal_to_order(a: Series2, b: Series2, N) -> bool:
    return a.equal_to_order(b, N)

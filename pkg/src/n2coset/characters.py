"""Characters and supercharacters of N=2 minimal-model modules, the sl2 and
ghost characters they are built from, and the verifiers that cross-check them.

Every N=2 character is a truncated two-variable series in z (charge) and q
(conformal grade).  Several independent evaluation routes are provided so
that they can be compared coefficient by coefficient:

* ``AppellLerch``: theta times higher-level Appell-Lerch sums, with every
  geometric denominator divided exactly into the theta function;
* ``ResidueEG``: the unitary sum over j with each denominator removed as a
  literal factor of the Jacobi triple product;
* ``Resolution``: the Euler-Poincare sum over atypical standards (k < 0);
* ``Typical``: closed form for standard modules;
* ``SpectralFlowTransport``: a character moved along a spectral-flow orbit.
"""
from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor

from . import special
from .catalog import (Algebra, Family, GrothVector, HighestWeightData, MinimalModel, ModuleLabel,
                      _dict_E, conjugate, groth_decompose, highest_weight, n2, validate)
from .errors import (DivergentResolution, LabelOutOfRange, NonTerminating, RegimeMismatch,
                     RegimeViolation)
from .series import Monomial, Series2, fmt_rational, frac

F = Fraction


class Regime(str, Enum):
    INNER = "InnerAnnulus"
    OUTER = "OuterAnnulus"


class Method(str, Enum):
    RESIDUE_EG = "ResidueEG"
    APPELL_LERCH = "AppellLerch"
    RESOLUTION = "Resolution"
    TYPICAL = "Typical"
    SFLOW = "SpectralFlowTransport"


@dataclass(frozen=True)
class DeltaChar:
    """w^lam * body(q) * delta(w^2), where delta(x) = sum_n x^n."""

    lam: Fraction
    body: Series2

    def coeff_z(self, alpha) -> Series2:
        if ((frac(alpha) - self.lam) / 2).denominator != 1:
            return Series2.zero(self.body.N)
        return self.body

    def expand(self, lo, hi) -> Series2:
        """The comb restricted to w-exponents in [lo, hi]."""
        lo, hi = frac(lo), frac(hi)
        n = ceil((lo - self.lam) / 2)
        out = Series2.zero(self.body.N)
        while self.lam + 2 * n <= hi:
            out = out + self.body.shift(z_exp=self.lam + 2 * n)
            n += 1
        return out


@dataclass(frozen=True)
class CharKind:
    kind: str  # "OrdinarySeries" or "DeltaDistribution"
    body: Series2 | DeltaChar

    @property
    def is_delta(self) -> bool:
        return self.kind == "DeltaDistribution"


# cached building blocks


@lru_cache(maxsize=None)
def _theta(idx: int, N: Fraction) -> Series2:
    return special.theta(idx, N)


@lru_cache(maxsize=None)
def eta_inv_pow(k: int, N: Fraction) -> Series2:
    """eta(q)^{-k} to order N."""
    N = frac(N)
    M = N + F(k, 24)
    e = special.euler_product(M)
    acc = Series2.one(M)
    for _ in range(k):
        acc = acc * e
    return acc.mul_inverse().shift(q_exp=F(-k, 24))


@lru_cache(maxsize=None)
def _vir_over_eta2(u: int, v: int, r: int, s: int, N: Fraction) -> Series2:
    """chi^Vir_{r,s}(q) / eta(q)^2 to order N."""
    num = special.vir_numerator(u, v, r, s, N + F(1, 8))
    return num * eta_inv_pow(3, N - num.q_offset)


def _theta_index(i: int) -> int:
    return 3 if i % 2 == 0 else 2


# exact division of a theta function by 1 - C z^B q^A


def _divide_levelwise(P: Series2, C: int, B: Fraction) -> Series2:
    """P / (1 - C z^B) for a series whose every q-level is divisible."""
    if B == 0:
        raise NonTerminating("constant denominator 1 - C cannot be expanded")
    levels: dict[Fraction, dict[Fraction, int]] = {}
    for q, z, c in P.items():
        levels.setdefault(q, {})[z] = c
    out = []
    for q, row in levels.items():
        if B < 0:
            row = {z - B: -C * c for z, c in row.items()}
            b = -B
        else:
            b = B
        top = max(row)
        rem = dict(row)
        while rem:
            e = min(rem)
            if e > top:
                raise NonTerminating(f"q-level {q} is not divisible by 1 - ({C})z^{b}")
            c = rem.pop(e)
            out.append((q, e, c))
            rem[e + b] = rem.get(e + b, 0) + C * c
            if rem[e + b] == 0:
                del rem[e + b]
    return Series2.from_terms(out, P.N)


def theta_over(idx: int, C: int, B, A, N) -> Series2:
    """theta_idx(z) / (1 - C z^B q^A) to order N, C = +-1.

    For A > 0 the denominator is expanded in powers of C z^B q^A, for A < 0 in
    powers of its inverse; both expansions are exact because theta carries
    the matching factor.  A = 0 is divided level by level.
    """
    B, A, N = frac(B), frac(A), frac(N)
    th = _theta(idx, N)
    if A == 0:
        return _divide_levelwise(th, C, B)
    off = th.q_offset
    items = []
    if A > 0:
        k = 0
        while k * A <= N - off:
            items.append((k * A, k * B, C ** (k % 2)))
            k += 1
    else:
        k = 1
        while -k * A <= N - off:
            items.append((-k * A, -k * B, -(C ** (k % 2))))
            k += 1
    if not items:
        return Series2.zero(N)
    g = Series2.from_terms(items, N - off)
    return (th * g).truncate(N)


def theta_al(idx: int, n: int, x: Monomial, y: Monomial, base, N) -> Series2:
    """theta_idx(z) * AL_n(x, y; q^base), each summand divided exactly into theta."""
    base, N = frac(base), frac(N)
    off = F(1, 8) if idx in (1, 2) else F(0)
    C = x.coeff * y.coeff
    if C not in (1, -1):
        raise NonTerminating("Appell-Lerch arguments must carry unit coefficients")
    Bz = x.z_exp + y.z_exp
    out = Series2.zero(N)
    vertex = -x.q_exp / base
    for direction in (1, -1):
        j = 0 if direction == 1 else -1
        while True:
            e = n * j * x.q_exp + base * n * j * j / 2
            if e + off > N:
                if (j - vertex) * direction > 0:
                    break
                j += direction
                continue
            A = x.q_exp + y.q_exp + base * j
            quot = theta_over(idx, C, Bz, A, N - e)
            coeff = x.coeff ** ((n * j) % 2)
            out = out + quot.shift(z_exp=n * j * x.z_exp, q_exp=e, coeff=coeff)
            j += direction
    return out.truncate(N)


# theta with one triple-product factor removed


def _binomial(sign: int, z, q, N) -> Series2:
    return Series2.one(N) + Series2.monomial(sign, z, q, N)


@lru_cache(maxsize=None)
def theta_without(idx: int, alpha: Fraction, N: Fraction) -> Series2:
    """theta_idx(z) / (1 + z^{-1} q^alpha) read as a product with one factor deleted.

    When alpha < 0 the factor is rewritten as z^{-1} q^alpha (1 + z q^{-alpha})
    and the latter is deleted.
    """
    alpha, N = frac(alpha), frac(N)
    if idx not in (2, 3):
        raise ValueError("only theta_2 and theta_3 carry (1 + z^-1 q^alpha) factors")
    if alpha < 0:
        return _theta_product_omit(idx, 1, -alpha, N + alpha).shift(z_exp=1, q_exp=-alpha)
    return _theta_product_omit(idx, -1, alpha, N)


def _theta_product_omit(idx: int, zdir: int, expo: Fraction, N: Fraction) -> Series2:
    lead = F(0) if idx == 3 else F(1, 8)
    M = N - lead
    shifts = [F(2 * m - 1, 2) for m in range(1, floor(M + 1) + 2)]
    if idx == 3:
        zp = [h for h in shifts if h <= M]
        zm = list(zp)
    else:
        zp = [F(m) for m in range(1, floor(M) + 1)]
        zm = [F(m) for m in range(0, floor(M) + 1)]
    target = zp if zdir == 1 else zm
    if expo in target:
        target.remove(expo)
    elif expo <= M or (expo - (F(1, 2) if idx == 3 else 0)).denominator != 1 or expo < (1 if zdir == 1 and idx == 2 else 0):
        raise LabelOutOfRange(f"theta_{idx} has no factor (1 + z^{zdir} q^{expo})")
    acc = special.euler_product(M)
    for h in zp:
        acc = acc * _binomial(1, 1, h, M)
    for h in zm:
        acc = acc * _binomial(1, -1, h, M)
    if idx == 2:
        acc = acc.shift(z_exp=F(1, 2), q_exp=F(1, 8))
    return acc.truncate(N)


# sl2, ghost and Fock characters


def inv_itheta1(regime: Regime, N, ell_max: int) -> Series2:
    """1/(i theta_1(w^2)) in the given annulus, exact for |w-exponent| <= 2*ell_max + 1."""
    N = frac(N)
    K = special.eg_kernel(N + F(1, 8), ell_max)
    E = special.euler_product(N + F(1, 8)).mul_inverse()
    base = (K * E).shift(q_exp=F(-1, 8))
    if regime is Regime.INNER:
        return base.shift(z_exp=1, coeff=-1).truncate(N)
    return base.substitute(z_invert=True).shift(z_exp=-1).truncate(N)


def itheta1_w2(N) -> Series2:
    """i theta_1(w^2) with w in the z slot."""
    return Series2.from_terms([(q, 2 * z, c) for q, z, c in _theta(1, frac(N)).items()], N)


def _sl2_numerator_L(m: MinimalModel, r: int, N: Fraction) -> Series2:
    u, v = m.u, m.v
    items = []
    j = 0
    while True:
        live = False
        for jj in ((0,) if j == 0 else (j, -j)):
            e = v * jj * (u * jj + r)
            if e <= N:
                items += [(e, 2 * u * jj + r, 1), (e, -2 * u * jj - r, -1)]
                live = True
        if not live and j > 0:
            break
        j += 1
    return Series2.from_terms(items, N)


def _sl2_numerator_D(m: MinimalModel, r: int, s: int, N: Fraction) -> Series2:
    u, v = m.u, m.v
    items = []
    j = 0
    while True:
        live = False
        for jj in ((0,) if j == 0 else (j, -j)):
            e1 = jj * (u * v * jj + v * r - u * s)
            e2 = (u * jj - r) * (v * jj - s)
            if e1 <= N:
                items.append((e1, 2 * u * jj, 1))
                live = True
            if e2 <= N:
                items.append((e2, 2 * (u * jj - r), -1))
                live = True
        if not live and j > 0:
            break
        j += 1
    return Series2.from_terms(items, N)


def char_sl2(m: MinimalModel, label: ModuleLabel, regime: Regime | None = None, N=8,
             window: tuple = (-8, 8)) -> CharKind:
    """Character of an sl2 minimal-model module, w in the z slot.

    Ordinary characters are exact for q-exponents up to N and w-exponents in
    ``window``; the result is restricted to that window.
    """
    validate(m, label)
    if label.algebra is not Algebra.SL2:
        raise LabelOutOfRange("char_sl2 needs an SL2 label")
    if label.flow:
        raise LabelOutOfRange("spectrally flowed sl2 characters are not tabulated")
    N = frac(N)
    lo, hi = frac(window[0]), frac(window[1])
    f, r, s = label.family, label.r, label.s
    if f in (Family.E, Family.EPLUS, Family.EMINUS):
        lam = label.lam if f is Family.E else (m.lam(r, s) if f is Family.EPLUS
                                                 else m.lam(m.u - r, m.v - s))
        body = _vir_over_eta2(m.u, m.v, r, s, N)
        return CharKind("DeltaDistribution", DeltaChar(frac(lam), body))
    want = Regime.INNER if f in (Family.L, Family.DMINUS) else Regime.OUTER
    if regime is None:
        regime = want
    if Regime(regime) is not want:
        raise RegimeMismatch(f"{f.value} characters are expanded in the {want.value}")
    if f is Family.DMINUS:
        plus = char_sl2(m, replace(label, family=Family.DPLUS), Regime.OUTER, N, (-hi, lo * -1))
        return CharKind("OrdinarySeries", plus.body.substitute(z_invert=True))
    if f is Family.L:
        a = m.delta(r, 0) - m.c_sl2 / 24 + F(1, 8)
        num = _sl2_numerator_L(m, r, N - a + F(1, 8))
        nmin = min(num.z_support())
        ell = max(0, ceil((hi - nmin - 1) / 2) + 1)
        inv = inv_itheta1(Regime.INNER, N - a, ell)
        ch = (num * inv).shift(q_exp=a)
    else:
        lam = m.lam(r, s)
        a = m.delta(r, s) - m.c_sl2 / 24 + F(1, 8)
        num = _sl2_numerator_D(m, r, s, N - a + F(1, 8))
        nmax = max(num.z_support())
        ell = max(0, ceil((lam + nmax - lo) / 2) + 1)
        inv = inv_itheta1(Regime.OUTER, N - a, ell)
        ch = (num * inv).shift(z_exp=lam + 1, q_exp=a)
    return CharKind("OrdinarySeries", ch.truncate(N).restrict_z(lo, hi))


def char_ghost(i: int, super: bool = False, N=8) -> Series2:
    N = frac(N)
    i %= 4
    if not super:
        th = _theta(_theta_index(i), N + F(1, 24))
    else:
        th = _theta(4 if i % 2 == 0 else 1, N + F(1, 24))
        if i >= 2:
            th = -th
    return (th * special.eta_inv(N - th.q_offset)).truncate(N)


def char_fock(p, t, N=8) -> Series2:
    p, t, N = frac(p), frac(t), frac(N)
    if t == 0:
        raise ValueError("t must be nonzero")
    e = p * p / (4 * t)
    return special.eta_inv(N - e).shift(z_exp=p, q_exp=e)


# supercharacters


def supercharacter(ch: Series2, hw: HighestWeightData) -> Series2:
    """Insert (-1)^F: each z^alpha term gets (-1)^(alpha - j) times the parity of the
    highest-weight vector of charge j."""
    out = ch.shift(z_exp=-hw.j).substitute(z_flip=True).shift(z_exp=hw.j)
    return out if hw.parity == "+" else -out


# N=2 characters


def _lead(m: MinimalModel, p, r: int, s: int) -> Fraction:
    return m.h(p, r, s) - m.c / 24 + F(1, 8)


def _assemble(bracket, zpref, a: Fraction, N: Fraction) -> Series2:
    """z^zpref q^a eta^{-3} * bracket(order), every factor at the order it needs."""
    B = bracket(N - a + F(1, 8))
    E = eta_inv_pow(3, N - a - B.q_offset)
    return (B * E).shift(z_exp=zpref, q_exp=a).truncate(N)


def _mono(coeff, z, q) -> Monomial:
    return Monomial(coeff, frac(z), frac(q))


def _al_L(m: MinimalModel, i: int, p: Fraction, r: int, N: Fraction) -> Series2:
    u, v, t = m.u, m.v, m.t
    idx = _theta_index(i)

    def bracket(M):
        first = theta_al(idx, 2 * v, _mono(1, 0, F(r, 2)), _mono(-1, -1, p / 2), u, M)
        sh = (r - p) / 2
        second = theta_al(idx, 2 * v, _mono(1, 0, (r + t) / 2), _mono(-1, 1, -(p + t) / 2), u, M - sh)
        return first - second.shift(z_exp=1, q_exp=sh)

    return _assemble(bracket, p / t, _lead(m, p, r, 0), N)


def _al_L_conjugate_form(m: MinimalModel, i: int, p: Fraction, r: int, N: Fraction) -> Series2:
    """The same character from the second identity (the (z, p) -> (1/z, -p) image)."""
    u, v, t = m.u, m.v, m.t
    idx = _theta_index(i)

    def bracket(M):
        first = theta_al(idx, 2 * v, _mono(1, 0, F(r, 2)), _mono(-1, 1, -p / 2), u, M)
        sh = (r + p) / 2
        second = theta_al(idx, 2 * v, _mono(1, 0, (r + t) / 2), _mono(-1, -1, (p - t) / 2), u, M - sh)
        return first - second.shift(z_exp=-1, q_exp=sh)

    return _assemble(bracket, p / t, _lead(m, p, r, 0), N)


def _al_D(m: MinimalModel, i: int, p: Fraction, r: int, s: int, N: Fraction) -> Series2:
    u, v, t = m.u, m.v, m.t
    idx = _theta_index(i)

    def bracket(M):
        y = _mono(-1, 1, -p / 2)
        first = theta_al(idx, 2 * v, _mono(1, 0, (r - t * s) / 2), y, u, M)
        second = theta_al(idx, 2 * v, _mono(1, 0, -(r + t * s) / 2), y, u, M - r * s)
        return first - second.shift(q_exp=r * s)

    return _assemble(bracket, p / t, _lead(m, p, r, s), N)


def _residue_eg(m: MinimalModel, i: int, p: Fraction, r: int, N: Fraction) -> Series2:
    if not m.unitary:
        raise RegimeMismatch("the triple-product residue form applies to v = 1 only")
    u = m.u
    idx = _theta_index(i)

    def bracket(M):
        out = Series2.zero(M)
        j = 0
        for direction in (1, -1):
            j = 0 if direction == 1 else -1
            while True:
                e = j * (u * j + r)
                if e > M:
                    break
                a1 = F(2 * u * j + r) / 2 + p / 2
                a2 = -F(2 * u * j + r) / 2 + p / 2
                term = theta_without(idx, a1, M - e) - theta_without(idx, a2, M - e)
                out = out + term.shift(q_exp=e)
                j += direction
        return out.truncate(M)

    return _assemble(bracket, p / u, _lead(m, p, r, 0), N)


def _typical(m: MinimalModel, i: int, p: Fraction, r: int, s: int, N: Fraction) -> Series2:
    e = -p * p / (4 * m.t)
    idx = _theta_index(i)
    chi = _vir_over_eta2(m.u, m.v, r, s, N - e + F(1, 8))
    th = _theta(idx, N - e - chi.q_offset)
    return (th * chi).shift(z_exp=p / m.t, q_exp=e).truncate(N)


def _resolution_L(m: MinimalModel, i: int, p: Fraction, r: int, N: Fraction, window) -> Series2:
    if m.k >= 0:
        raise DivergentResolution(
            f"resolution characters are divergent for k>0 (k = {fmt_rational(m.k)})")
    u, v, t = m.u, m.v, m.t
    odd = i % 2 == 1
    base = p / t + (F(1, 2) if odd else 0)
    lo, hi = window
    omin = min(_vir_over_eta2(u, v, r, s, F(10)).q_offset for s in range(1, v))
    M = N - omin
    # theta part per charge: sum over (s, m) of (-1)^{s-1} sign z^{p/t - mm} q^{-(p - mm t)^2/4t} theta
    parts: dict[int, list] = {s: [] for s in range(1, v)}
    alpha = base + ceil(lo - base)
    while alpha <= hi:
        x = alpha - p / t
        for s in range(1, v):
            for sign, gen in ((1, lambda l: 2 * v * l + s), (-1, lambda l: 2 * v * (l + 1) - s)):
                # q-exponent is convex in mm with vertex at mm_star
                mm_star = (x + p / 2) / (t / 2 - 1)
                ell = 0
                while True:
                    mm = gen(ell)
                    n = x + mm
                    e = n * n / 2 - (p - mm * t) ** 2 / (4 * t)
                    if e <= M:
                        parts[s].append((e, alpha, sign))
                    elif mm > mm_star:
                        break
                    ell += 1
        alpha += 1
    out = None
    for s in range(1, v):
        if not parts[s]:
            continue
        T = Series2.from_terms(parts[s], M)
        chi = _vir_over_eta2(u, v, r, s, N - T.q_offset)
        term = (T * chi).scale((-1) ** (s - 1))
        out = term if out is None else out + term
    if out is None:
        return Series2.zero(N)
    return out.truncate(N)


def _resolution_window(m: MinimalModel, label: ModuleLabel, N: Fraction) -> tuple:
    hw = highest_weight(m, label)
    lead = hw.delta - m.c / 24
    W = 2 * max(N - lead, F(0)) + 4
    return (hw.j - W, hw.j + W)


def _resolution_D(m: MinimalModel, i: int, p: Fraction, r: int, s: int, N: Fraction, window) -> Series2:
    u, v, t = m.u, m.v, m.t
    out = _resolution_L(m, i, p - (v - s) * t, u - r, N, window).scale((-1) ** (v - 1 - s))
    for j in range(1, v - s):
        out = out + _typical(m, i, p - t * j, r, s + j, N).restrict_z(*window).scale((-1) ** (j - 1))
    return out


def sflow_transform(ch: Series2, c, ell_half: int, N) -> Series2:
    """z^{c l/3} q^{c l^2/6} ch(z q^l) with l = ell_half/2, truncated at N.

    The caller guarantees that ch was computed deeply enough for every term
    that lands at or below N (see ``flow_source_order``).
    """
    c, N = frac(c), frac(N)
    ell = F(ell_half, 2)
    if ell == 0:
        return ch.truncate(min(N, ch.N))
    shift = c * ell * ell / 6
    moved = ch.substitute(z_qshift=ell, q_order=N - shift)
    return moved.shift(z_exp=c * ell / 3, q_exp=shift).truncate(N)


def flow_source_order(hw: HighestWeightData, lead: Fraction, c: Fraction, ell: Fraction, N) -> Fraction:
    """Order to which a source character must be known so that its flow by ell is exact to N.

    Uses the bound |charge - j| <= sqrt(2 (grade - lead)) + 1 on every module considered here.
    """
    N = frac(N)
    target = float(N - c * ell * ell / 6)
    al = abs(float(ell))
    j0 = abs(float(hw.j))
    M = max(float(N), float(lead)) + 1

    def worst(beta):
        return beta - al * (j0 + math.sqrt(max(0.0, 2 * (beta - float(lead)))) + 1)

    while worst(M) <= target + 0.5 or (M - float(lead) > 0 and al > math.sqrt(2 * (M - float(lead)))):
        M += 0.5
    return F(ceil(M))


def _sflow(m: MinimalModel, label: ModuleLabel, N: Fraction) -> Series2:
    """Character of the label computed at momentum near zero and transported."""
    mshift = -round(label.p)
    if mshift == 0:
        mshift = -1 if label.p >= 0 else 1
    src_label = _shift_label(label, mshift)
    ell = F(mshift, 2)
    hw = highest_weight(m, src_label) if src_label.family is not Family.E \
        else _dict_E(m, src_label.i % 2, src_label.p, src_label.r, src_label.s)
    lead = hw.delta - m.c / 24
    M = flow_source_order(hw, lead, m.c, ell, N)
    src = _char_cached(m, src_label, None, M)
    return sflow_transform(src, m.c, mshift, N)


def _shift_label(label: ModuleLabel, mshift: int) -> ModuleLabel:
    """(i, p) -> (i + m, p + m): the source of sigma^{m/2} onto the label."""
    if label.family is Family.E:
        return n2(Family.E, label.i + mshift, label.p + mshift, label.r, label.s)
    return replace(label, i=(label.i + mshift) % 4, p=label.p + mshift)


_DEFAULT = {Family.L: Method.APPELL_LERCH, Family.DPLUS: Method.APPELL_LERCH,
            Family.E: Method.TYPICAL, Family.EPLUS: Method.TYPICAL, Family.EMINUS: Method.TYPICAL}


@lru_cache(maxsize=4096)
def _char_cached(m: MinimalModel, label: ModuleLabel, method: Method | None, N: Fraction,
                 window: tuple | None = None) -> Series2:
    f, i, p, r, s = label.family, label.i, label.p, label.r, label.s
    if f is Family.DMINUS and method in (None, Method.APPELL_LERCH):
        image = conjugate(m, label)
        return _char_cached(m, image, method, N).substitute(z_invert=True)
    if f is Family.S:
        out = Series2.zero(N)
        for lab, mult in groth_decompose(m, label):
            out = out + _char_cached(m, lab, None, N).scale(mult)
        return out
    if method is None:
        method = _DEFAULT.get(f)
        if method is None:
            raise LabelOutOfRange(f"no default character method for {f.value}")
    if method is Method.SFLOW:
        if f not in (Family.L, Family.DPLUS, Family.DMINUS, Family.E):
            raise LabelOutOfRange("spectral-flow transport applies to L, D and E labels")
        return _sflow(m, label, N)
    if method is Method.TYPICAL:
        if f not in (Family.E, Family.EPLUS, Family.EMINUS):
            raise LabelOutOfRange("the typical formula applies to standard (E-type) modules")
        return _typical(m, i, p, r, s, N)
    if method is Method.RESOLUTION:
        if m.k >= 0:
            raise DivergentResolution(
                f"resolution characters are divergent for k>0 (k = {fmt_rational(m.k)})")
        if window is None:
            window = _resolution_window(m, label, N)
        if f is Family.L:
            return _resolution_L(m, i, p, r, N, window)
        if f is Family.DPLUS:
            return _resolution_D(m, i, p, r, s, N, window)
        raise LabelOutOfRange("the resolution method covers L and D+ labels")
    if method is Method.RESIDUE_EG:
        if f is not Family.L:
            raise LabelOutOfRange("the triple-product residue form covers unitary L labels")
        return _residue_eg(m, i, p, r, N)
    if method is Method.APPELL_LERCH:
        if f is Family.L:
            return _al_L(m, i, p, r, N)
        if f is Family.DPLUS:
            return _al_D(m, i, p, r, s, N)
        raise LabelOutOfRange(f"no Appell-Lerch formula for {f.value}")
    raise LabelOutOfRange(f"unknown method {method}")


def hw_data(m: MinimalModel, label: ModuleLabel) -> HighestWeightData:
    """Parity and charge used to form supercharacters (irreducibles and standards)."""
    if label.family in (Family.E, Family.EPLUS, Family.EMINUS):
        base = _dict_E(m, label.i % 2, label.p, label.r, label.s)
        if label.i % 4 >= 2:
            return replace(base, parity="-" if base.parity == "+" else "+")
        return base
    return highest_weight(m, label)


def char_n2(m: MinimalModel, label: ModuleLabel, method: Method | str | None = None,
            super: bool = False, N=8, window: tuple | None = None) -> Series2:
    """(Super)character of an N=2 module of M(u, v) to q-order N."""
    validate(m, label)
    if label.algebra is not Algebra.N2:
        raise LabelOutOfRange("char_n2 needs an N2 label")
    N = frac(N)
    method = None if method is None else Method(method)
    if window is not None:
        window = (frac(window[0]), frac(window[1]))
    ch = _char_cached(m, label, method, N, window)
    if not super:
        return ch
    if label.family is Family.S:
        out = Series2.zero(N)
        for lab, mult in groth_decompose(m, label):
            out = out + char_n2(m, lab, None, True, N).scale(mult)
        return out
    return supercharacter(ch, hw_data(m, label))


def char_n2_conjugate_form(m: MinimalModel, label: ModuleLabel, N=8) -> Series2:
    """L character from the second Appell-Lerch identity (independent formula)."""
    validate(m, label)
    if label.family is not Family.L:
        raise LabelOutOfRange("the second identity is stated for L labels")
    return _al_L_conjugate_form(m, label.i, label.p, label.r, frac(N))


# verification


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("N2COSET_THREADS", "1")))
    except ValueError:
        return 1


def _discrepancy_json(d):
    if d is None:
        return None
    q, z, a, b = d
    return {"q": fmt_rational(q), "z": fmt_rational(z), "lhs": a, "rhs": b}


def _ghost_signs(i: int, super: bool, n: Fraction) -> int:
    if not super:
        return 1
    if i % 2 == 0:
        sg = -1 if n.numerator % 2 else 1
    else:
        sg = -1 if (n - F(1, 2)) % 2 else 1
    return -sg if i % 4 >= 2 else sg


def branch_verify(m: MinimalModel, sl2_label: ModuleLabel, i: int, super: bool = False, N=8,
                  y_window: int = 8) -> dict:
    """Check the coset branching rule for sl2_label (x) ghost_i, one Fock momentum at a time.

    For each momentum p the y^p coefficient of ch[sl2](y z^{1/t}) ch[ghost](y^2 z^{-k/t}),
    divided by the Fock character, is compared with the N=2 (super)character.
    """
    validate(m, sl2_label)
    if sl2_label.algebra is not Algebra.SL2 or sl2_label.family not in (Family.L, Family.DPLUS, Family.DMINUS):
        raise LabelOutOfRange("branch_verify takes an sl2 L or D label")
    N = frac(N)
    t = m.t
    f, r, s = sl2_label.family, sl2_label.r, sl2_label.s
    lam = m.lam(r, s) if f is not Family.DMINUS else -m.lam(r, s)
    first = lam + i
    first -= 2 * floor((first + y_window) / 2)
    ps = []
    p = first
    while p <= y_window:
        if p >= -y_window:
            ps.append(p)
        p += 2
    lead = m.delta(r, s) - m.c_sl2 / 24
    pmax = max((p * p / (4 * t) for p in ps), default=F(0))
    M = N + pmax
    nmax = floor(math.sqrt(2 * float(M - lead))) + 2
    mus = [p - 2 * F(n, 2) for p in ps for n in range(-2 * nmax - 1, 2 * nmax + 2)]
    window = (min(mus), max(mus)) if mus else (0, 0)
    sl2ch = char_sl2(m, sl2_label, None, M, window).body
    n2fam = {Family.L: Family.L, Family.DPLUS: Family.DPLUS, Family.DMINUS: Family.DMINUS}[f]

    def one(p):
        lhs = Series2.zero(N)
        n = F(i % 2, 2) - 2 * nmax
        while n <= 2 * nmax:
            e = n * n / 2 - p * p / (4 * t)
            if n * n / 2 <= N + p * p / (4 * t) - lead:
                S = sl2ch.coeff_z(p - 2 * n)
                lhs = lhs + S.shift(z_exp=p / t - n, q_exp=e, coeff=_ghost_signs(i, super, n)).truncate(N)
            n += 1
        lhs = lhs.truncate(N)
        label = n2(n2fam, i, p, r, s)
        rhs = char_n2(m, label, None, super, N)
        ok = lhs.equal_to_order(rhs, N)
        return {"p": fmt_rational(p), "label": str(label), "status": "pass" if ok else "fail",
                "first_discrepancy": None if ok else _discrepancy_json(lhs.first_difference(rhs, N))}

    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        rows = list(ex.map(one, ps))
    bad = [row for row in rows if row["status"] != "pass"]
    return {"check": "branching", "labels": [str(sl2_label)], "ghost": i % 4, "super": super,
            "q_order": fmt_rational(N), "y_window": y_window,
            "status": "fail" if bad else "pass",
            "first_discrepancy": bad[0]["first_discrepancy"] if bad else None,
            "sectors": rows}


def ses_char_check(m: MinimalModel, label: ModuleLabel, N=6) -> dict:
    """The standard-module formula equals the sum over its composition factors."""
    validate(m, label)
    if label.family not in (Family.EPLUS, Family.EMINUS):
        raise LabelOutOfRange("ses_char_check takes an E+ or E- label")
    N = frac(N)
    factors = groth_decompose(m, label)
    out = {"check": "ses", "labels": [str(label)], "q_order": fmt_rational(N),
           "factors": factors.to_json_obj()}
    for sup in (False, True):
        lhs = char_n2(m, label, Method.TYPICAL, sup, N)
        rhs = Series2.zero(N)
        for lab, mult in factors:
            rhs = rhs + char_n2(m, lab, None, sup, N).scale(mult)
        if not lhs.equal_to_order(rhs, N):
            out.update(status="fail", first_discrepancy={
                "super": sup, **_discrepancy_json(lhs.first_difference(rhs, N))})
            return out
    out.update(status="pass", first_discrepancy=None)
    return out


# floating-point identities


def _itheta1(logx: complex, logq: complex, T: int) -> complex:
    acc = 0j
    for k in range(-T, T):
        n = k + 0.5
        acc += (-1) ** k * cmath.exp(n * logx + n * n / 2 * logq)
    return acc


def _theta_num(idx: int, logx: complex, logq: complex, T: int) -> complex:
    acc = 0j
    if idx == 2:
        for k in range(-T, T):
            n = k + 0.5
            acc += cmath.exp(n * logx + n * n / 2 * logq)
    else:
        for n in range(-T, T + 1):
            acc += cmath.exp(n * logx + n * n / 2 * logq)
    return acc


def _eta_num(logq: complex, T: int) -> complex:
    q = cmath.exp(logq)
    acc = cmath.exp(logq / 24)
    for k in range(1, 4 * T):
        acc *= 1 - q ** k
    return acc


IDENTITIES = ("magic", "magic_primed", "ALidR", "ALidNS")


def _identity_sides(kind: str, q: complex, a: complex, b: complex, T: int) -> tuple[complex, complex]:
    lq, la, lb = cmath.log(q), cmath.log(a), cmath.log(b)
    qa = abs(q)
    if kind in ("magic", "ALidR", "ALidNS"):
        if not qa < abs(a) < 1:
            raise RegimeViolation(f"|q| < |a| < 1 fails for q={q}, a={a}")
    elif kind == "magic_primed":
        if not 1 < abs(a) < 1 / qa:
            raise RegimeViolation(f"1 < |a| < 1/|q| fails for q={q}, a={a}")
    else:
        raise ValueError(f"unknown identity {kind}")
    sgn = -1 if kind in ("ALidR", "ALidNS") else 1
    half = 0.5 if kind == "ALidNS" else 0.0
    for mm in range(-T, T + 1):
        if abs(1 - sgn * b * q ** (mm + half)) < 1e-12:
            raise RegimeViolation(f"b={b} sits on a pole of the right-hand side")
    eta3 = _eta_num(lq, T) ** 3
    if kind in ("magic", "magic_primed"):
        # theta_1 = -i * (i theta_1); the prefactors combine to +i on the left
        lhs = 1j * _itheta1(la + lb, lq, T) * eta3 / (_itheta1(la, lq, T) * _itheta1(lb, lq, T))
        if kind == "magic":
            rhs = -1j * sum(a ** mm / (1 - b * q ** mm) for mm in range(-T, T + 1))
        else:
            rhs = -1j * sum(a ** mm * b * q ** mm / (1 - b * q ** mm) for mm in range(-T, T + 1))
        return lhs, rhs
    idx = 2 if kind == "ALidR" else 3
    lhs = _theta_num(idx, la + lb, lq, T) / _itheta1(la, lq, T)
    s = sum(cmath.exp((mm + half) * la) / (1 + b * cmath.exp((mm + half) * lq))
            for mm in range(-T, T + 1))
    rhs = -_theta_num(idx, lb, lq, T) / eta3 * s
    return lhs, rhs


def magic_check(samples, truncation: int = 60, tol: float = 1e-9, identity: str = "magic") -> dict:
    """Evaluate both sides of an Appell-Lerch identity numerically at (q, a, b) samples."""
    rows = []
    worst = 0.0
    for q, a, b in samples:
        lhs, rhs = _identity_sides(identity, complex(q), complex(a), complex(b), truncation)
        dev = abs(lhs - rhs)
        worst = max(worst, dev)
        rows.append({"q": repr(q), "a": repr(a), "b": repr(b), "deviation": dev})
    ok = worst < tol
    return {"check": "magic", "identity": identity, "labels": [], "q_order": None,
            "truncation": truncation, "tol": tol, "max_deviation": worst,
            "status": "pass" if ok else "fail",
            "first_discrepancy": None if ok else next(r for r in rows if r["deviation"] >= tol),
            "samples": rows}


# in-region (q, a, b) samples; b avoids the poles b q^m = 1
MAGIC_SAMPLES = {
    "magic": ((0.1, 0.4, 0.25), (0.2, 0.5, 0.3 + 0.1j), (0.05, 0.3j, 0.7), (0.3, 0.6 - 0.2j, 1.7),
              (0.15 + 0.05j, 0.5, 0.4j)),
    "magic_primed": ((0.1, 2.0, 0.25), (0.2, 1.5, 0.3 + 0.1j), (0.05, 3j, 0.7), (0.3, 1.8 - 0.5j, 1.7),
                     (0.15 + 0.05j, 2.5, 0.4j)),
    "ALidR": ((0.1, 0.4, 0.25), (0.2, 0.5, 0.3 + 0.1j), (0.3, 0.6 - 0.2j, 1.7)),
    "ALidNS": ((0.1, 0.4, 0.25), (0.2, 0.5, 0.3 + 0.1j), (0.3, 0.6 - 0.2j, 1.7)),
}

"""Named q-series: eta, Jacobi thetas, the Eholzer-Gaberdiel kernel,
Appell-Lerch sums and Virasoro minimal-model characters."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, isqrt

from .errors import LabelOutOfRange, NonTerminating
from .series import Monomial, Series2, frac

F = Fraction


def euler_product(N) -> Series2:
    """prod_{i>=1} (1 - q^i) to order N, via the pentagonal number theorem."""
    N = frac(N)
    items = []
    k = 0
    while True:
        e1 = F(k * (3 * k - 1), 2)
        e2 = F(k * (3 * k + 1), 2)
        if e1 > N and e2 > N:
            break
        sign = -1 if k % 2 else 1
        items.append((e1, 0, sign))
        if k:
            items.append((e2, 0, sign))
        k += 1
    return Series2.from_terms(items, N)


def eta(N) -> Series2:
    N = frac(N)
    return euler_product(N - F(1, 24)).shift(q_exp=F(1, 24))


def eta_inv(N) -> Series2:
    """1/eta(q) = q^{-1/24} sum_n p(n) q^n to order N."""
    N = frac(N)
    return euler_product(N + F(1, 24)).mul_inverse().shift(q_exp=F(-1, 24))


def _half_integers(bound: Fraction, odd: bool):
    """n in Z (or Z+1/2 when odd) with n^2/2 <= bound."""
    m = isqrt(floor(8 * bound)) if bound >= 0 else -1
    # n = k/2 with k^2/8 <= bound
    for k in range(-m, m + 1):
        if (k % 2 == 1) == odd and F(k * k, 8) <= bound:
            yield F(k, 2)


def theta(i: int, N) -> Series2:
    """Sum forms; index 1 returns i*theta_1 so that all coefficients are integers."""
    N = frac(N)
    if i not in (1, 2, 3, 4):
        raise ValueError("theta index must be 1, 2, 3 or 4")
    items = []
    for n in _half_integers(N, odd=i in (1, 2)):
        c = 1
        if i == 4 and n.numerator % 2:
            c = -1
        if i == 1 and (n - F(1, 2)) % 2:
            c = -1
        items.append((n * n / 2, n, c))
    return Series2.from_terms(items, N)


def _product(factors, N) -> Series2:
    out = Series2.one(N)
    for f in factors:
        out = out * f
    return out


def theta_product(i: int, N) -> Series2:
    """Jacobi triple-product forms of the same four series (independent route)."""
    N = frac(N)
    one = Series2.one(N)
    factors = []
    if i in (3, 4):
        sg = 1 if i == 3 else -1
        m = 1
        while m - F(1, 2) <= N:
            h = m - F(1, 2)
            factors.append(one + Series2.monomial(sg, 1, h, N))
            factors.append(one + Series2.monomial(sg, -1, h, N))
            factors.append(one + Series2.monomial(-1, 0, m, N))
            m += 1
        return _product(factors, N)
    sg = 1 if i == 2 else -1
    M = N - F(1, 8)
    m = 1
    while m - 1 <= M:
        factors.append(one.truncate(M) + Series2.monomial(sg, -1, m - 1, M))
        if m <= M:
            factors.append(one.truncate(M) + Series2.monomial(sg, 1, m, M))
            factors.append(one.truncate(M) + Series2.monomial(-1, 0, m, M))
        m += 1
    return _product(factors, M).shift(z_exp=F(1, 2), q_exp=F(1, 8))


def phi_ell(ell: int, N) -> Series2:
    """sum_{s>=0} (-1)^s q^{ell*s + s(s+1)/2}, evaluated literally."""
    N = frac(N)
    items = []
    s = 0
    while True:
        e = ell * s + F(s * (s + 1), 2)
        if e > N and s >= -ell:
            break
        if e <= N:
            items.append((e, 0, -1 if s % 2 else 1))
        s += 1
    return Series2.from_terms(items, N)


def eg_kernel(N, ell_max: int | None = None) -> Series2:
    """1/prod_{i>=1}(1 - w^2 q^{i-1})(1 - w^{-2} q^i) for |q| < |w|^2 < 1, w in the z slot.

    Evaluated as q^{1/12} eta^{-2} sum_ell phi_ell(q) w^{2 ell}.  Every q-level of
    the true expansion is an infinite series in w^2; the result keeps the terms
    with w-exponent at most 2*ell_max and is exact there.
    """
    N = frac(N)
    if ell_max is None:
        ell_max = floor(N) + 2
    e2inv = (euler_product(N) * euler_product(N)).mul_inverse()
    acc: dict[tuple[int, int], int] = {}
    for ell in range(-floor(N) - 1, ell_max + 1):
        ph = phi_ell(ell, N)
        for q, _, c in ph.items():
            acc[(q, 2 * ell)] = acc.get((q, 2 * ell), 0) + c
    phis = Series2.from_terms([(q, z, c) for (q, z), c in acc.items()], N)
    return phis * e2inv


def eg_product(N, w_flip: bool = False) -> Series2:
    """prod_{i>=1}(1 - w^2 q^{i-1})(1 - w^{-2} q^i) expanded directly (test oracle)."""
    N = frac(N)
    one = Series2.one(N)
    factors = []
    for i in range(1, floor(N) + 2):
        if i - 1 <= N:
            factors.append(one - Series2.monomial(1, 2, i - 1, N))
        if i <= N:
            factors.append(one - Series2.monomial(1, -2, i, N))
    return _product(factors, N)


@dataclass(frozen=True)
class AppellArgs:
    n: int
    x: Monomial
    y: Monomial
    base: Fraction = F(1)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Appell-Lerch level must be positive")
        object.__setattr__(self, "base", frac(self.base))
        if self.base <= 0:
            raise ValueError("Appell-Lerch base must be a positive q-power")


def appell_lerch(args: AppellArgs, N, max_terms: int = 200000) -> Series2:
    """[sum_{i,j>=0} - sum_{i,j<=-1}] x^{i+nj} y^i q^{b(ij + nj^2/2)} with q -> q^b.

    Raises NonTerminating when infinitely many (i, j) land at or below order N.
    """
    N = frac(N)
    n, x, y, b = args.n, args.x, args.y, args.base
    xq, yq = x.q_exp, y.q_exp
    items = []

    def emit(i, j, sign):
        e = (i + n * j) * xq + i * yq + b * (i * j + F(n * j * j, 2))
        if e > N:
            return False
        c = sign * _ipow(x.coeff, i + n * j) * _ipow(y.coeff, i)
        items.append((e, (i + n * j) * x.z_exp + i * y.z_exp, c))
        if len(items) > max_terms:
            raise NonTerminating("Appell-Lerch expansion exceeded the term budget")
        return True

    for side in (1, -1):
        # side 1: i, j >= 0; side -1: i, j <= -1 written as i = -a, j = -c with a, c >= 1
        jj = 0 if side == 1 else 1
        while True:
            j = side * jj
            i0 = 0 if side == 1 else 1
            slope = side * (xq + yq + b * j)  # q-growth per step of |i|
            e0 = (i0 * side + n * j) * xq + i0 * side * yq + b * (i0 * side * j + F(n * j * j, 2))
            if slope <= 0:
                raise NonTerminating(
                    f"Appell-Lerch sum does not terminate (row j={j} has non-positive q-growth)")
            vertex = -xq / b
            if e0 > N and (jj > abs(vertex) + 1):
                break
            a = i0
            while True:
                if (a - i0) * slope + e0 > N:
                    break
                emit(side * a, j, side)
                a += 1
            jj += 1
    return Series2.from_terms(items, N)


def _ipow(c: int, e: int) -> int:
    if c in (1, -1):
        return c ** (e % 2)
    if e < 0:
        raise NonTerminating("Appell-Lerch monomials must carry unit coefficients")
    return c ** e


def vir_char(u: int, v: int, r: int, s: int, N) -> Series2:
    """Irreducible Virasoro minimal-model character chi_{r,s}(q) with eta^{-1} included."""
    N = frac(N)
    if u < 2 or v < 1 or gcd(u, v) != 1 or not (1 <= r <= u - 1) or not (1 <= s <= v - 1):
        raise LabelOutOfRange(f"({r},{s}) is not a Kac label of the ({u},{v}) Virasoro model")
    return vir_numerator(u, v, r, s, N + F(1, 24)) * eta_inv(N)


def vir_numerator(u: int, v: int, r: int, s: int, N) -> Series2:
    N = frac(N)
    items = []
    den = 4 * u * v
    n = 0
    while True:
        live = False
        for nn in ((n,) if n == 0 else (n, -n)):
            for sign, a in ((1, 2 * u * v * nn + v * r - u * s), (-1, 2 * u * v * nn + v * r + u * s)):
                e = F(a * a, den)
                if e <= N:
                    items.append((e, 0, sign))
                    live = True
        if not live and n > 1:
            break
        n += 1
    return Series2.from_terms(items, N)

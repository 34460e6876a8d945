import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from n2coset.errors import LabelOutOfRange, NonTerminating
from n2coset.series import Monomial, Series2
from n2coset.special import (AppellArgs, appell_lerch, eg_kernel, eg_product, eta, eta_inv,
                             euler_product, phi_ell, theta, theta_product, vir_char)

PARTITIONS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627]


def partition_count(n):
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for k in range(part, n + 1):
            table[k] += table[k - part]
    return table[n]


def test_partition_oracle_matches_reference_list():
    assert [partition_count(n) for n in range(21)] == PARTITIONS


def test_eta_inverse_counts_partitions():
    s = eta_inv(20)
    assert [s.coeff(n - F(1, 24), 0) for n in range(21)] == PARTITIONS


def test_eta_inverse_low_order():
    assert eta_inv(4).as_dict() == {(n - F(1, 24), 0): PARTITIONS[n] for n in range(5)}


def test_eta_times_inverse():
    assert (eta(8) * eta_inv(8)).truncate(7) == Series2.one(7)


def test_eta_product_expansion():
    # direct expansion of prod (1 - q^i)
    coeffs = [1] + [0] * 12
    for i in range(1, 13):
        coeffs = [coeffs[k] - (coeffs[k - i] if k >= i else 0) for k in range(13)]
    e = euler_product(12)
    assert [e.coeff(k, 0) for k in range(13)] == coeffs
    assert coeffs[:8] == [1, -1, -1, 0, 0, 1, 0, 1]


@pytest.mark.parametrize("idx", [1, 2, 3, 4])
def test_theta_sum_equals_product(idx):
    assert theta(idx, 8) == theta_product(idx, 8)


def test_theta_leading_terms():
    assert theta(3, F(1, 2)).as_dict() == {(0, 0): 1, (F(1, 2), 1): 1, (F(1, 2), -1): 1}
    t2 = theta(2, F(1, 8))
    assert t2.as_dict() == {(F(1, 8), F(1, 2)): 1, (F(1, 8), F(-1, 2)): 1}


def test_itheta1_odd_under_inversion():
    t = theta(1, 6)
    assert t.substitute(z_invert=True) == t.scale(-1)


def test_phi_values():
    assert phi_ell(0, 6).as_dict() == {(0, 0): 1, (1, 0): -1, (3, 0): 1, (6, 0): -1}
    assert phi_ell(1, 5).as_dict() == {(0, 0): 1, (2, 0): -1, (5, 0): 1}
    for ell in range(6):
        assert phi_ell(ell, 3).coeff(0, 0) == 1


def test_eg_kernel_inverts_the_product():
    N, ell_max = 6, 12
    prod = eg_kernel(N, ell_max) * eg_product(N)
    trusted = prod.restrict_z(hi=2 * ell_max - 2 * N - 2)
    assert trusted == Series2.one(N)


def test_eg_kernel_factor_by_factor():
    # peel factors off the product one at a time; what remains times the kernel is the inverse
    N, ell_max = 5, 10
    k = eg_kernel(N, ell_max)
    one = Series2.one(N)
    partial = k * (one - Series2.monomial(1, 2, 0, N))
    for i in range(1, N + 1):
        partial = partial * (one - Series2.monomial(1, -2, i, N))
        partial = partial * (one - Series2.monomial(1, 2, i, N))
    assert partial.restrict_z(hi=2 * ell_max - 2 * N - 2) == one


def test_eg_product_symmetry():
    # w^2 -> w^-2 q permutes the factors; the image is exact for q <= M and w-exponent <= 2(N - M)
    N, M = 8, 4
    p = eg_product(N)
    image = p.substitute(z_qshift=F(1, 2)).substitute(z_invert=True)
    window = 2 * (N - M)
    assert image.truncate(M).restrict_z(hi=window) == p.truncate(M).restrict_z(hi=window)


def test_appell_lerch_q0_part_is_geometric():
    x, y = Monomial(1, 1, 0), Monomial(1, 2, 0)
    with pytest.raises(NonTerminating):
        appell_lerch(AppellArgs(2, x, y), 1)


def test_appell_lerch_direct_terms():
    # x = q^{1/2}, y = z q^{1/4}: every (i, j) term has a positive q-weight away from (0, 0)
    x, y = Monomial(1, 0, F(1, 2)), Monomial(1, 1, F(1, 4))
    s = appell_lerch(AppellArgs(2, x, y), 4)
    expected = {}
    for i in range(-40, 41):
        for j in range(-40, 41):
            if (i >= 0 and j >= 0) or (i <= -1 and j <= -1):
                e = F(i + 2 * j, 2) + F(i, 4) + i * j + j * j
                if e <= 4:
                    sign = 1 if i >= 0 else -1
                    expected[(e, F(i))] = expected.get((e, F(i)), 0) + sign
    assert s.as_dict() == {k: c for k, c in expected.items() if c}


def test_vir_trivial_model_is_one():
    assert vir_char(3, 2, 1, 1, 8) == Series2.one(8)


def _fermion(sign, N):
    s = Series2.one(N)
    n = F(1, 2)
    while n <= N:
        s = s * (Series2.one(N) + Series2.monomial(sign, 0, n, N))
        n += 1
    return s


def test_ising_vacuum_matches_free_fermion():
    N = 8
    half = (_fermion(1, N) + _fermion(-1, N))
    expect = {k: c // 2 for k, c in half.as_dict().items()}
    got = vir_char(4, 3, 1, 1, N).shift(q_exp=F(1, 48))
    assert got.truncate(N - 1).as_dict() == {k: c for k, c in expect.items() if k[0] <= N - 1}
    assert [got.coeff(n, 0) for n in range(6)] == [1, 0, 1, 1, 2, 2]


def test_vir_rejects_bad_label():
    with pytest.raises(LabelOutOfRange):
        vir_char(4, 3, 4, 1, 2)


def test_vir_leading_exponent():
    rng = random.Random(7)
    models = [(u, v) for u in range(2, 9) for v in range(2, 9)
              if u != v and __import__("math").gcd(u, v) == 1]
    for _ in range(5):
        u, v = rng.choice(models)
        r, s = rng.randint(1, u - 1), rng.randint(1, v - 1)
        c = 1 - F(6 * (u - v) ** 2, u * v)
        h = F((v * r - u * s) ** 2 - (u - v) ** 2, 4 * u * v)
        assert vir_char(u, v, r, s, 3).q_offset == h - c / 24


@given(st.integers(1, 4), st.integers(0, 7))
def test_theta_coefficients_are_units(idx, level):
    for _, _, c in theta(idx, level).items():
        assert c in (1, -1)


def test_distinct_thetas_differ_at_low_order():
    for a, b in combinations([theta(i, 2) for i in (1, 2, 3, 4)], 2):
        assert a != b

from fractions import Fraction as F
from itertools import combinations

import pytest

from n2coset.catalog import Family, MinimalModel, conjugate, n2, sl2, unitary_labels
from n2coset.characters import (Method, Regime, _assemble, _lead, _mono, branch_verify,
                                char_fock, char_ghost, char_n2, char_n2_conjugate_form, char_sl2,
                                magic_check, ses_char_check, sflow_transform, theta_al)
from n2coset.errors import DivergentResolution, RegimeMismatch, RegimeViolation
from n2coset.series import Series2
from n2coset.special import eta_inv


def ghost_state_count(level_max):
    """Charge-0 states of the NS bc system by enumerating b and c mode subsets."""
    modes = [F(2 * n + 1, 2) for n in range(level_max + 1) if F(2 * n + 1, 2) <= level_max]
    counts = {}
    subsets = [c for k in range(len(modes) + 1) for c in combinations(modes, k)]
    for b in subsets:
        for c in subsets:
            lvl = sum(b) + sum(c)
            if len(b) == len(c) and lvl <= level_max:
                counts[lvl] = counts.get(lvl, 0) + 1
    return counts


def test_ghost_ns_charge_zero_count():
    ch = char_ghost(0, N=4).coeff_z(0).shift(q_exp=F(1, 24))
    got = {q: c for q, _, c in ch.items() if q <= 4}
    assert got == ghost_state_count(4)
    assert [got.get(F(n, 2), 0) for n in range(9)] == [1, 0, 1, 0, 2, 0, 3, 0, 5]


def test_ghost_parity_and_ramond_leading_term():
    for i in (0, 1):
        assert char_ghost(i + 2, super=True, N=4) == -char_ghost(i, super=True, N=4)
    lead = char_ghost(1, N=2)
    assert lead.q_offset == F(1, 8) - F(1, 24)
    assert {z: c for q, z, c in lead.items() if q == lead.q_offset} == {F(1, 2): 1, F(-1, 2): 1}


def test_fock_characters():
    assert char_fock(0, 1, 6) == eta_inv(6)
    f = char_fock(2, F(3, 2), 6)
    assert f.q_offset == F(2, 3) - F(1, 24)
    assert f.z_support() == {2}


def test_sl2_level_zero_is_trivial():
    ch = char_sl2(MinimalModel(2, 1), sl2(Family.L, 1), N=6)
    assert ch.body == Series2.one(6)


def test_sl2_spin_half_ground_states():
    m = MinimalModel(4, 1)
    ch = char_sl2(m, sl2(Family.L, 2), N=3).body
    a = ch.q_offset
    assert a == F(1, 8)
    assert {z: c for q, z, c in ch.items() if q == a} == {1: 1, -1: 1}
    assert {z: c for q, z, c in ch.items() if q == a + 1} == {3: 1, 1: 2, -1: 2, -3: 1}


def test_sl2_discrete_ground_states_form_a_ladder():
    m = MinimalModel(3, 2)
    ch = char_sl2(m, sl2(Family.DPLUS, 1, 1), N=2, window=(-12, 4)).body
    lam = m.lam(1, 1)
    assert ch.q_offset == m.delta(1, 1) - m.c_sl2 / 24
    ground = {z: c for q, z, c in ch.items() if q == ch.q_offset}
    assert ground == {lam - 2 * k: 1 for k in range(6)}  # lam - 2k >= -12


def test_sl2_regime_guard():
    with pytest.raises(RegimeMismatch):
        char_sl2(MinimalModel(3, 2), sl2(Family.L, 1), Regime.OUTER, N=2)


def test_unitary_vacuum_leading_terms():
    m = MinimalModel(4, 1)
    ch = char_n2(m, n2(Family.L, 0, 0, 1), N=4)
    assert ch.q_offset == -m.c / 24
    base = -m.c / 24
    assert ch.coeff(base, 0) == 1
    assert ch.coeff(base + F(1, 2), 1) == 0 and ch.coeff(base + F(1, 2), -1) == 0
    assert ch.coeff(base + 1, 0) == 1


def test_residue_and_appell_lerch_agree_u3():
    m = MinimalModel(3, 1)
    for lab in unitary_labels(3):
        assert char_n2(m, lab, Method.RESIDUE_EG, N=8) == char_n2(m, lab, Method.APPELL_LERCH, N=8)


@pytest.mark.parametrize("uv", [(3, 2), (2, 3)])
def test_resolution_agrees_for_negative_level(uv):
    m = MinimalModel(*uv)
    for r in range(1, m.u):
        for i in (0, 1):
            lab = n2(Family.L, i, r - 1 + i, r)
            assert char_n2(m, lab, Method.RESOLUTION, N=6) == char_n2(m, lab, Method.APPELL_LERCH, N=6)


def test_resolution_diverges_for_positive_level():
    with pytest.raises(DivergentResolution, match="divergent for k>0"):
        char_n2(MinimalModel(5, 2), n2(Family.L, 0, 0, 1), Method.RESOLUTION, N=6)


def test_conjugate_form_matches():
    m = MinimalModel(3, 2)
    for p in (-2, 0, 2, 4):
        lab = n2(Family.L, 0, p, 1)
        assert char_n2_conjugate_form(m, lab, 6) == char_n2(m, lab, N=6)


def test_conjugate_form_with_unflipped_sign_is_wrong():
    # the same identity with +z in the second argument does not reproduce the character
    m = MinimalModel(3, 2)
    u, v, t, r, p = 3, 2, m.t, 1, F(0)

    def bracket(M):
        a = theta_al(3, 2 * v, _mono(1, 0, F(r, 2)), _mono(1, 1, -p / 2), u, M)
        sh = (r + p) / 2
        b = theta_al(3, 2 * v, _mono(1, 0, (r + t) / 2), _mono(-1, -1, (p - t) / 2), u, M - sh)
        return a - b.shift(z_exp=-1, q_exp=sh)

    wrong = _assemble(bracket, p / t, _lead(m, p, r, 0), 4)
    assert wrong != char_n2(m, n2(Family.L, 0, 0, 1), N=4)


def test_spectral_flow_transport():
    m = MinimalModel(4, 1)
    ch = char_n2(m, n2(Family.L, 0, 0, 1), N=8)
    assert sflow_transform(ch, m.c, 0, 8) == ch
    for lab in unitary_labels(4)[:8]:
        assert char_n2(m, lab, Method.SFLOW, N=8) == char_n2(m, lab, N=8)


def test_spectral_flow_round_trip():
    m = MinimalModel(4, 1)
    ch = char_n2(m, n2(Family.L, 0, 0, 1), N=12)
    back = sflow_transform(sflow_transform(ch, m.c, 1, 12), m.c, -1, 12)
    assert back.truncate(6) == ch.truncate(6)


def test_conjugation_inverts_z():
    m = MinimalModel(4, 1)
    for lab in unitary_labels(4)[:6]:
        for sup in (False, True):
            img = char_n2(m, conjugate(m, lab), super=sup, N=6).substitute(z_invert=True)
            assert img == char_n2(m, lab, super=sup, N=6)


def test_typical_supercharacter_in_ramond_sector():
    # the highest-weight vector of the Ramond typical is odd, so its leading coefficient is -1
    m = MinimalModel(3, 2)
    p = F(1, 4) + 1
    sch = char_n2(m, n2(Family.E, 1, p, 1, 1), super=True, N=2)
    lead = sch.q_offset
    assert sch.coeff(lead, p / m.t + F(1, 2)) == -1
    assert sch.coeff(lead, p / m.t - F(1, 2)) == 1


@pytest.mark.parametrize("i", range(4))
def test_branching_unitary_u4(i):
    m = MinimalModel(4, 1)
    for r in range(1, 4):
        for sup in (False, True):
            rep = branch_verify(m, sl2(Family.L, r), i, sup, N=6, y_window=8)
            assert rep["status"] == "pass", rep["first_discrepancy"]


def test_branching_nonunitary_discrete():
    m = MinimalModel(3, 2)
    for fam in (Family.DPLUS, Family.DMINUS):
        rep = branch_verify(m, sl2(fam, 1, 1), 0, False, N=5, y_window=6)
        assert rep["status"] == "pass", rep["first_discrepancy"]


def test_branching_positive_level_uses_appell_lerch():
    m = MinimalModel(5, 2)
    rep = branch_verify(m, sl2(Family.L, 2), 1, False, N=5, y_window=6)
    assert rep["status"] == "pass"


@pytest.mark.parametrize("uv, fam, r, s", [((3, 2), "E+", 1, 1), ((2, 3), "E+", 1, 1),
                                           ((2, 3), "E-", 1, 2), ((5, 2), "E+", 2, 1)])
def test_exact_sequence_characters(uv, fam, r, s):
    m = MinimalModel(*uv)
    lam = m.lam(r, s) if fam == "E+" else m.lam(m.u - r, m.v - s)
    rep = ses_char_check(m, n2(fam, 0, lam, r, s), 6)
    assert rep["status"] == "pass", rep["first_discrepancy"]


def test_magic_identities():
    assert magic_check([(0.1, 0.4, 0.25)], 60, 1e-9)["status"] == "pass"
    assert magic_check([(0.1, 2.0, 0.25)], 60, 1e-9, "magic_primed")["status"] == "pass"
    for name in ("ALidR", "ALidNS"):
        assert magic_check([(0.1, 0.4, 0.25)], 60, 1e-9, name)["status"] == "pass"


def test_magic_region_guard():
    with pytest.raises(RegimeViolation):
        magic_check([(0.1, 1.0, 0.25)])
    with pytest.raises(RegimeViolation):
        magic_check([(0.1, 0.5, 1.0)])

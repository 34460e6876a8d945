"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines.
Every order, window, tolerance and time budget is pinned below.
"""
import time
from fractions import Fraction as F

from n2coset import characters as ch
from n2coset.catalog import (Family, HighestWeightData, MinimalModel, canonical_label,
                             irreducible_class, kac_table, n2, orbits, sl2, twist_label,
                             typical_ok, unitary_labels)
from n2coset.errors import DivergentResolution, NoKnownExactRule
from n2coset.fusion import fuse_exact, groth_fuse_n2, grothendieck_sample, ring_check
from n2coset.series import Series2
from n2coset.special import eg_kernel, eg_product, eta_inv, theta, theta_product

KAC_BUDGET_S = 1.0
UNITARY_BRANCHING_ORDER = 8
UNITARY_BRANCHING_BUDGET_S = 120.0
CROSS_METHOD_ORDER = 8
NONUNITARY_ORDER = 6
NONUNITARY_Y_WINDOW = 6
NONUNITARY_BUDGET_S = 300.0
RESOLUTION_ORDER = 6
SES_ORDER = 6
SES_MIN_LABELS = 6
SFLOW_ORDER = 8
SFLOW_SOURCE_ORDER = 12
MAGIC_TOL = 1e-9
MAGIC_TRUNCATION = 60
MAGIC_MIN_SAMPLES = 5
THETA_ORDER = 8
KERNEL_ORDER = 8
KERNEL_ELL_MAX = 16
PARTITIONS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297, 385, 490, 627]


def report(n, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}")
    assert ok, detail


def _cell(parity, j, delta, sector):
    return HighestWeightData(parity, F(j), F(delta), sector)


# M(4,1), rows r = 1..3, columns p = -3..6; None marks the blank corners of the grid
KAC_FULL = {
    1: [None, None,
        _cell("-", "1/4", "1/16", "R"), _cell("+", "0", "0", "NS"),
        _cell("+", "-1/4", "1/16", "R"), _cell("-", "-1/2", "1/4", "NS"),
        _cell("+", "1/4", "9/16", "R"), _cell("-", "0", "1/2", "NS"),
        _cell("+", "3/4", "9/16", "R"), _cell("-", "1/2", "1/4", "NS")],
    2: [None,
        _cell("-", "0", "1/16", "R"), _cell("+", "-1/4", "1/8", "NS"),
        _cell("-", "1/2", "5/16", "R"), _cell("+", "1/4", "1/8", "NS"),
        _cell("+", "0", "1/16", "R"), _cell("-", "-1/4", "1/8", "NS"),
        _cell("+", "1/2", "5/16", "R"), _cell("-", "1/4", "1/8", "NS"),
        None],
    3: [_cell("-", "-1/4", "1/16", "R"), _cell("+", "-1/2", "1/4", "NS"),
        _cell("-", "1/4", "9/16", "R"), _cell("+", "0", "1/2", "NS"),
        _cell("-", "3/4", "9/16", "R"), _cell("+", "1/2", "1/4", "NS"),
        _cell("+", "1/4", "1/16", "R"), _cell("-", "0", "0", "NS"),
        None, None],
}
KAC_REDUCED = {
    (1, -1): ("1/4", "1/16", "R"), (1, 0): ("0", "0", "NS"),
    (2, -2): ("0", "1/16", "R"), (2, -1): ("-1/4", "1/8", "NS"),
    (2, 0): ("1/2", "5/16", "R"), (2, 1): ("1/4", "1/8", "NS"),
    (3, -3): ("-1/4", "1/16", "R"), (3, -2): ("-1/2", "1/4", "NS"),
    (3, -1): ("1/4", "9/16", "R"), (3, 0): ("0", "1/2", "NS"),
    (3, 1): ("3/4", "9/16", "R"), (3, 2): ("1/2", "1/4", "NS"),
}


def test_criterion_01_kac_table():
    start = time.perf_counter()
    table = kac_table(4)
    elapsed = time.perf_counter() - start
    grid = {(r, p): table["full"].get((r, p)) for r in (1, 2, 3) for p in range(-3, 7)}
    expected = {(r, p): KAC_FULL[r][p + 3] for r in (1, 2, 3) for p in range(-3, 7)}
    reduced = {k: (F(j), F(d), s) for k, (j, d, s) in KAC_REDUCED.items()}
    ok = (len(grid) == 30 and grid == expected and set(table["full"]) <= set(grid)
          and table["reduced"] == reduced and elapsed < KAC_BUDGET_S)
    report(1, ok, f"Kac table M(4,1): 30 grid cells (24 filled), 12 reduced cells, {elapsed:.3f}s")


def test_criterion_02_unitary_branching():
    start = time.perf_counter()
    runs = failed = 0
    for u in (4, 5):
        m = MinimalModel(u, 1)
        for r in range(1, u):
            for i in range(4):
                for sup in (False, True):
                    rep = ch.branch_verify(m, sl2(Family.L, r), i, sup, UNITARY_BRANCHING_ORDER, 2 * u)
                    runs += 1
                    failed += rep["status"] != "pass"
    elapsed = time.perf_counter() - start
    ok = failed == 0 and runs == 56 and elapsed < UNITARY_BRANCHING_BUDGET_S
    report(2, ok, f"unitary branching u=4,5: {runs - failed}/{runs} pass, {elapsed:.1f}s")


def test_criterion_03_residue_vs_appell_lerch():
    checked = agree = 0
    for u in (4, 5):
        m = MinimalModel(u, 1)
        for lab in unitary_labels(u):
            a = ch.char_n2(m, lab, ch.Method.RESIDUE_EG, N=CROSS_METHOD_ORDER)
            b = ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=CROSS_METHOD_ORDER)
            checked += 1
            agree += a.first_difference(b, CROSS_METHOD_ORDER) is None
    ok = checked == 24 + 40 and agree == checked
    report(3, ok, f"ResidueEG = AppellLerch to q^{CROSS_METHOD_ORDER}: {agree}/{checked} labels")


def test_criterion_04_nonunitary_branching():
    start = time.perf_counter()
    runs = failed = 0
    for uv in ((3, 2), (2, 3), (5, 2)):
        m = MinimalModel(*uv)
        labels = [sl2(Family.L, r) for r in range(1, m.u)]
        labels += [sl2(Family.DPLUS, r, s) for r in range(1, m.u) for s in range(1, m.v)]
        for lab in labels:
            for i in (0, 1):
                for sup in (False, True):
                    rep = ch.branch_verify(m, lab, i, sup, NONUNITARY_ORDER, NONUNITARY_Y_WINDOW)
                    runs += 1
                    failed += rep["status"] != "pass"
    elapsed = time.perf_counter() - start
    ok = failed == 0 and elapsed < NONUNITARY_BUDGET_S
    report(4, ok, f"non-unitary branching (3,2),(2,3),(5,2): {runs - failed}/{runs} pass, {elapsed:.1f}s")


def test_criterion_05_resolution_vs_appell_lerch():
    checked = agree = 0
    for uv in ((3, 2), (2, 3)):
        m = MinimalModel(*uv)
        for r in range(1, m.u):
            for i in (0, 1):
                for shift in (0, 2, -2):
                    lab = n2(Family.L, i, m.lam(r, 0) + i + shift, r)
                    a = ch.char_n2(m, lab, ch.Method.RESOLUTION, N=RESOLUTION_ORDER)
                    b = ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=RESOLUTION_ORDER)
                    checked += 1
                    agree += a.first_difference(b, RESOLUTION_ORDER) is None
    m = MinimalModel(5, 2)
    raised = finite = 0
    for r in range(1, m.u):
        lab = n2(Family.L, 0, m.lam(r, 0), r)
        try:
            ch.char_n2(m, lab, ch.Method.RESOLUTION, N=RESOLUTION_ORDER)
        except DivergentResolution:
            raised += 1
        al = ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=RESOLUTION_ORDER)
        coeffs = [c for _, _, c in al.items()]
        finite += bool(coeffs) and all(F(c).denominator == 1 for c in coeffs)
    ok = agree == checked and raised == m.u - 1 and finite == m.u - 1
    report(5, ok, f"Resolution = AppellLerch for k<0: {agree}/{checked}; (5,2) diverges "
                  f"{raised}/{m.u - 1}, AppellLerch finite {finite}/{m.u - 1}")


def test_criterion_06_exact_sequences():
    checked = passed = 0
    for uv in ((3, 2), (2, 3), (5, 2)):
        m = MinimalModel(*uv)
        for r in range(1, m.u):
            for s in range(1, m.v):
                for lab in (n2(Family.EPLUS, 0, m.lam(r, s), r, s),
                            n2(Family.EMINUS, 0, m.lam(m.u - r, m.v - s), r, s)):
                    checked += 1
                    passed += ch.ses_char_check(m, lab, SES_ORDER)["status"] == "pass"
    ok = passed == checked and checked >= SES_MIN_LABELS
    report(6, ok, f"standard = sum of composition factors to q^{SES_ORDER}: {passed}/{checked} labels")


def test_criterion_07_spectral_flow_and_periodicity():
    m = MinimalModel(4, 1)
    labels = unitary_labels(4)
    flow_ok = transport_ok = period_ok = 0
    for lab in labels:
        src = ch.char_n2(m, lab, N=SFLOW_SOURCE_ORDER)
        image = ch.sflow_transform(src, m.c, 1, SFLOW_ORDER)
        flow_ok += image == ch.char_n2(m, twist_label(m, lab, 1), N=SFLOW_ORDER)
        transport_ok += (ch.char_n2(m, lab, ch.Method.SFLOW, N=SFLOW_ORDER)
                         == ch.char_n2(m, lab, ch.Method.APPELL_LERCH, N=SFLOW_ORDER))
        base = ch.char_n2(m, lab, N=SFLOW_ORDER)
        kac = n2(Family.L, (lab.i + 2) % 4, lab.p + m.u, m.u - lab.r)
        period = n2(Family.L, lab.i, lab.p + 2 * m.u, lab.r)
        period_ok += (ch.char_n2(m, kac, N=SFLOW_ORDER) == base
                      and ch.char_n2(m, period, N=SFLOW_ORDER) == base)
    n = len(labels)
    ok = flow_ok == transport_ok == period_ok == n
    report(7, ok, f"M(4,1) to q^{SFLOW_ORDER}: flow relation {flow_ok}/{n}, transport {transport_ok}/{n}, "
                  f"Kac periodicity {period_ok}/{n}")


def test_criterion_08_orbit_census():
    expected = {4: [8, 8, 8], 5: [20, 20], 6: [6, 6, 12, 12, 12, 12]}
    got = {u: sorted(o.length for o in orbits(u)) for u in expected}
    report(8, got == expected, f"orbit lengths {got}")


def test_criterion_09_fusion_rings():
    reports = [ring_check(MinimalModel(u, 1), unitary_labels(u), exact=True) for u in (4, 5)]
    for uv in ((3, 2), (2, 3)):
        m = MinimalModel(*uv)
        reports.append(ring_check(m, grothendieck_sample(m), p_window=4 * m.t))
        sl2_labels = [sl2(Family.L, r) for r in range(1, m.u)]
        sl2_labels += [sl2(Family.DPLUS, r, s, flow=f) for r in range(1, m.u)
                       for s in range(1, m.v) for f in (0, 1)]
        reports.append(ring_check(m, list(dict.fromkeys(sl2_labels)), flow_window=2))
    passed = sum(rep["status"] == "pass" for rep in reports)
    units = all(rep["counts"]["unit"] == len(rep["labels"]) for rep in reports)
    triples = sum(rep["counts"]["triples"] for rep in reports)
    ok = passed == len(reports) and units
    report(9, ok, f"ring axioms: {passed}/{len(reports)} rings pass, {triples} associativity triples")


def _exact_sample(m):
    labels = list(grothendieck_sample(m))
    for r in range(1, m.u):
        for s in range(1, m.v):
            labels.append(n2(Family.DMINUS, 1, 1 - m.lam(r, s), r, s))
            for i in (0, 1):
                for k in range(-12, 13):
                    p = F(k, 6)
                    if typical_ok(m, p - i, r, s):
                        labels.append(canonical_label(m, n2(Family.E, i, p, r, s)))
    return list(dict.fromkeys(labels))


def test_criterion_10_exact_rule_consistency():
    covered = consistent = typical_pairs = staggered = 0
    for uv in ((3, 2), (2, 3)):
        m = MinimalModel(*uv)
        labels = _exact_sample(m)
        for a in labels:
            for b in labels:
                try:
                    res = fuse_exact(m, a, b)
                except NoKnownExactRule:
                    continue
                covered += 1
                consistent += irreducible_class(m, res.exact) == groth_fuse_n2(m, a, b)
                if a.family is Family.E and b.family is Family.E:
                    typical_pairs += 1
                    staggered += any(x.family is Family.S for x, _ in res.exact)
    ok = consistent == covered and typical_pairs > 0 and staggered > 0
    report(10, ok, f"exact vs Grothendieck: {consistent}/{covered} covered pairs "
                   f"({typical_pairs} typical x typical, {staggered} with staggered summands)")


def test_criterion_11_magic_identities():
    lines = []
    ok = True
    for name in ("magic", "magic_primed"):
        samples = ch.MAGIC_SAMPLES[name]
        rep = ch.magic_check(samples, truncation=MAGIC_TRUNCATION, tol=MAGIC_TOL, identity=name)
        ok &= rep["status"] == "pass" and len(samples) >= MAGIC_MIN_SAMPLES and rep["tol"] == MAGIC_TOL
        lines.append(f"{name}: {len(samples)} samples, max dev {rep['max_deviation']:.1e}")
    report(11, ok, f"tol {MAGIC_TOL:g}, truncation {MAGIC_TRUNCATION}; " + "; ".join(lines))


def test_criterion_12_special_function_oracles():
    thetas = all(theta(i, THETA_ORDER) == theta_product(i, THETA_ORDER) for i in (1, 2, 3, 4))
    prod = eg_kernel(KERNEL_ORDER, KERNEL_ELL_MAX) * eg_product(KERNEL_ORDER)
    kernel = prod.restrict_z(hi=2 * KERNEL_ELL_MAX - 2 * KERNEL_ORDER - 2) == Series2.one(KERNEL_ORDER)
    e = eta_inv(21)
    lead = F(-1, 24)
    counts = [e.coeff(lead + n, 0) for n in range(21)]
    partitions = counts == PARTITIONS
    ok = thetas and kernel and partitions
    report(12, ok, f"theta sum = product {thetas}, kernel inversion {kernel}, eta vs p(0..20) {partitions}")


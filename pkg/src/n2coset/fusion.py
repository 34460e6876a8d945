"""Fusion and Grothendieck fusion rings of the N=2 minimal models, the sl2
Grothendieck ring they descend from, and a ring-axiom checker."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .catalog import (Algebra, Family, GrothVector, MinimalModel, ModuleLabel, _is_even,
                      atypical_standard, canonical_label, conjugate, groth_decompose,
                      irreducible_class, n2, normal_form, sl2, typical_ok, validate)
from .errors import LabelOutOfRange, NoKnownExactRule, ParityMismatch
from .series import fmt_rational

F = Fraction


@dataclass(frozen=True)
class FusionCoeffQuery:
    u: int
    r: int
    rp: int
    rpp: int


def fusion_coeff(q: FusionCoeffQuery) -> int:
    """Level u-2 sl2 fusion coefficient N^{(u) r''}_{r, r'}."""
    u = q.u
    for x in (q.r, q.rp, q.rpp):
        if not 1 <= x <= u - 1:
            raise LabelOutOfRange(f"index {x} outside 1..{u - 1}")
    return _N(u, q.r, q.rp, q.rpp)


def _N(u: int, r: int, rp: int, rpp: int) -> int:
    # indices outside 1..u-1 give zero (the boundary convention at 0 and u)
    if not (1 <= r <= u - 1 and 1 <= rp <= u - 1 and 1 <= rpp <= u - 1):
        return 0
    ok = abs(r - rp) + 1 <= rpp <= min(r + rp - 1, 2 * u - r - rp - 1) and (r + rp + rpp) % 2 == 1
    return 1 if ok else 0


def _channels(u: int, r: int, rp: int):
    return [x for x in range(1, u) if _N(u, r, rp, x)]


@dataclass(frozen=True)
class FusionResult:
    exact: GrothVector | None
    grothendieck: GrothVector
    conjectural: bool = False

    def to_json_obj(self) -> dict:
        return {"exact": None if self.exact is None else self.exact.to_json_obj(),
                "grothendieck": self.grothendieck.to_json_obj(),
                "conjectural": self.conjectural}


# unitary models


def fuse_unitary(m: MinimalModel, a: ModuleLabel, b: ModuleLabel) -> FusionResult:
    if not m.unitary:
        raise LabelOutOfRange("fuse_unitary needs v = 1")
    for x in (a, b):
        validate(m, x)
        if x.algebra is not Algebra.N2 or x.family is not Family.L:
            raise LabelOutOfRange("unitary fusion takes N2 L labels")
    out = GrothVector()
    for rr in _channels(m.u, a.r, b.r):
        out = out + GrothVector.of(canonical_label(m, n2(Family.L, a.i + b.i, a.p + b.p, rr)))
    return FusionResult(out, out, False)


@lru_cache(maxsize=None)
def _unitary_pair(m: MinimalModel, x: ModuleLabel, y: ModuleLabel) -> GrothVector:
    return fuse_unitary(m, x, y).exact


# non-unitary Grothendieck ring


def _standard(m: MinimalModel, i: int, p, r: int, s: int) -> GrothVector:
    """Class of the standard module at (i, p; r, s); s outside 1..v-1 contributes nothing."""
    if not 1 <= s <= m.v - 1:
        return GrothVector()
    return irreducible_class(m, GrothVector.of(atypical_standard(m, i, p, r, s)))


def _n2_rule(m: MinimalModel, x: ModuleLabel, y: ModuleLabel) -> GrothVector:
    """Grothendieck product of two irreducibles in normal form (L, D+ or E)."""
    u, v, t = m.u, m.v, m.t
    order = {Family.L: 0, Family.E: 1, Family.DPLUS: 2}
    if order[x.family] > order[y.family]:
        x, y = y, x
    I, P = x.i + y.i, x.p + y.p
    out = GrothVector()
    fx, fy = x.family, y.family
    rs = _channels(u, x.r, y.r)
    if fx is Family.L:
        for rr in rs:
            if fy is Family.L:
                out = out + irreducible_class(m, GrothVector.of(n2(Family.L, I, P, rr)))
            elif fy is Family.E:
                out = out + _standard(m, I, P, rr, y.s)
            else:
                out = out + irreducible_class(m, GrothVector.of(n2(Family.DPLUS, I, P, rr, y.s)))
        return out
    if fx is Family.E and fy is Family.E:
        s, sp = x.s, y.s
        for rr in rs:
            for ss in range(1, v):
                n1 = _N(v, s, sp, ss)
                if n1:
                    out = out + _standard(m, I - 2, P - t, rr, ss).scaled(n1)
                    out = out + _standard(m, I + 2, P + t, rr, ss).scaled(n1)
                n2c = _N(v, s, sp - 1, ss) + _N(v, s, sp + 1, ss)
                if n2c:
                    out = out + _standard(m, I, P, rr, ss).scaled(n2c)
        return out
    if fx is Family.E:  # E x D
        s, sp = x.s, y.s
        for rr in rs:
            for ss in range(1, v):
                n1 = _N(v, s, sp + 1, ss)
                if n1:
                    out = out + _standard(m, I, P, rr, ss).scaled(n1)
                n2c = _N(v, s, sp, ss)
                if n2c:
                    out = out + _standard(m, I - 2, P - t, rr, ss).scaled(n2c)
        return out
    # D x D
    s, sp = x.s, y.s
    for rr in rs:
        if s + sp < v:
            for ss in range(1, v):
                n1 = _N(v, s, sp, ss)
                if n1:
                    out = out + _standard(m, I - 2, P - t, rr, ss).scaled(n1)
            out = out + irreducible_class(m, GrothVector.of(n2(Family.DPLUS, I, P, rr, s + sp)))
        else:
            for ss in range(1, v):
                n1 = _N(v, s + 1, sp + 1, ss)
                if n1:
                    out = out + _standard(m, I - 2, P - t, rr, ss).scaled(n1)
            out = out + irreducible_class(
                m, GrothVector.of(n2(Family.DPLUS, I - 2, P - t, u - rr, s + sp - v + 1)))
    return out


def _n2_inputs(m: MinimalModel, a: ModuleLabel) -> GrothVector:
    validate(m, a)
    if a.algebra is not Algebra.N2:
        raise LabelOutOfRange("expected an N2 label")
    return irreducible_class(m, GrothVector.of(a))


@lru_cache(maxsize=None)
def _n2_pair(m: MinimalModel, x: ModuleLabel, y: ModuleLabel) -> GrothVector:
    return _n2_rule(m, x, y)


def groth_fuse_n2(m: MinimalModel, a: ModuleLabel | GrothVector, b: ModuleLabel | GrothVector) -> GrothVector:
    """Grothendieck fusion product for M(u, v), v >= 2, extended bilinearly.

    Inputs are reduced to irreducible normal forms first, so D- labels enter
    through the identification D-_{R,S} = D+_{u-R, v-1-S} (or an L label).
    """
    if m.unitary:
        raise LabelOutOfRange("groth_fuse_n2 needs v >= 2; use fuse_unitary")
    A = a if isinstance(a, GrothVector) else _n2_inputs(m, a)
    B = b if isinstance(b, GrothVector) else _n2_inputs(m, b)
    out = GrothVector()
    for x, mx in A:
        for y, my in B:
            out = out + _n2_pair(m, x, y).scaled(mx * my)
    return out


# sl2 Grothendieck ring


def _sl2_std(m: MinimalModel, lam, r: int, s: int, flow: int) -> GrothVector:
    """Class of the sl2 standard module of weight class lam and Virasoro label (r, s)."""
    if not 1 <= s <= m.v - 1:
        return GrothVector()
    lam = F(lam) % 2
    if typical_ok(m, lam, r, s):
        return GrothVector.of(canonical_label(m, sl2(Family.E, r, s, lam, flow)))
    if _is_even(lam - m.lam(r, s)):
        lab = sl2(Family.EPLUS, r, s, flow=flow)
    else:
        lab = sl2(Family.EPLUS, m.u - r, m.v - s, flow=flow)
    return sl2_class(m, lab)


def sl2_class(m: MinimalModel, label: ModuleLabel) -> GrothVector:
    """Irreducible normal-form class of an sl2 label (standards split by their exact sequences)."""
    validate(m, label)
    u, v = m.u, m.v
    f, r, s, fl = label.family, label.r, label.s, label.flow
    if f is Family.EPLUS:
        parts = [sl2(Family.DPLUS, r, s, flow=fl), sl2(Family.DMINUS, u - r, v - s, flow=fl)]
    elif f is Family.EMINUS:
        parts = [sl2(Family.DMINUS, r, s, flow=fl), sl2(Family.DPLUS, u - r, v - s, flow=fl)]
    else:
        parts = [label]
    out = GrothVector()
    for x in parts:
        out = out + GrothVector.of(normal_form(m, x))
    return out


def _flowed(vec: GrothVector, k: int) -> GrothVector:
    return vec.map_labels(lambda x: replace(x, flow=x.flow + k)) if k else vec


def _sl2_rule(m: MinimalModel, x: ModuleLabel, y: ModuleLabel) -> GrothVector:
    u, v, k = m.u, m.v, m.k
    order = {Family.L: 0, Family.E: 1, Family.DPLUS: 2}
    if order[x.family] > order[y.family]:
        x, y = y, x
    shift = x.flow + y.flow
    x, y = replace(x, flow=0), replace(y, flow=0)
    fx, fy = x.family, y.family
    rs = _channels(u, x.r, y.r)
    out = GrothVector()

    def d(rr, ss, fl=0):
        return sl2_class(m, sl2(Family.DPLUS, rr, ss, flow=fl))

    if fx is Family.L:
        for rr in rs:
            if fy is Family.L:
                out = out + GrothVector.of(sl2(Family.L, rr))
            elif fy is Family.E:
                out = out + _sl2_std(m, y.lam + x.r - 1, rr, y.s, 0)
            else:
                out = out + d(rr, y.s)
    elif fx is Family.E and fy is Family.E:
        s, sp, lam = x.s, y.s, x.lam + y.lam
        for rr in rs:
            for ss in range(1, v):
                n1 = _N(v, s, sp, ss)
                if n1:
                    out = out + _sl2_std(m, lam - k, rr, ss, 1).scaled(n1)
                    out = out + _sl2_std(m, lam + k, rr, ss, -1).scaled(n1)
                n2c = _N(v, s, sp - 1, ss) + _N(v, s, sp + 1, ss)
                if n2c:
                    out = out + _sl2_std(m, lam, rr, ss, 0).scaled(n2c)
    elif fx is Family.E:  # E x D, written with D first in the stated rule
        r, s = y.r, y.s
        sp, lam = x.s, x.lam
        for rr in rs:
            for ss in range(1, v):
                n1 = _N(v, s + 1, sp, ss)
                if n1:
                    out = out + _sl2_std(m, lam + m.lam(r, s), rr, ss, 0).scaled(n1)
                n2c = _N(v, s, sp, ss)
                if n2c:
                    out = out + _sl2_std(m, lam + m.lam(r, s + 1), rr, ss, 1).scaled(n2c)
    else:
        s, sp = x.s, y.s
        for rr in rs:
            if s + sp < v:
                for ss in range(1, v):
                    n1 = _N(v, s, sp, ss)
                    if n1:
                        out = out + _sl2_std(m, m.lam(rr, s + sp + 1), rr, ss, 1).scaled(n1)
                out = out + d(rr, s + sp)
            else:
                for ss in range(1, v):
                    n1 = _N(v, s + 1, sp + 1, ss)
                    if n1:
                        out = out + _sl2_std(m, m.lam(rr, s + sp + 1), rr, ss, 1).scaled(n1)
                out = out + d(u - rr, s + sp - v + 1, 1)
    return _flowed(out, shift)


def groth_fuse_sl2(m: MinimalModel, a: ModuleLabel | GrothVector, b: ModuleLabel | GrothVector) -> GrothVector:
    """Grothendieck fusion of sl2 minimal-model modules (v >= 2), flows kept symbolic."""
    if m.unitary:
        raise LabelOutOfRange("groth_fuse_sl2 needs v >= 2")
    A = a if isinstance(a, GrothVector) else sl2_class(m, a)
    B = b if isinstance(b, GrothVector) else sl2_class(m, b)
    out = GrothVector()
    for x, mx in A:
        for y, my in B:
            out = out + _sl2_rule(m, x, y).scaled(mx * my)
    return out


def n2_to_sl2(m: MinimalModel, label: ModuleLabel) -> tuple[ModuleLabel, int, Fraction]:
    """The sl2 module whose product with ghost sector i carries the N=2 label at momentum p."""
    validate(m, label)
    f = label.family
    if f is Family.E:
        return canonical_label(m, sl2(Family.E, label.r, label.s, label.p - label.i)), label.i, label.p
    if f in (Family.L, Family.DPLUS, Family.DMINUS, Family.EPLUS, Family.EMINUS):
        return sl2(f, label.r, label.s), label.i, label.p
    raise LabelOutOfRange(f"no sl2 counterpart for {f.value}")


def sl2_to_n2(m: MinimalModel, label: ModuleLabel, i: int, p) -> ModuleLabel:
    """Coset module at (i, p) of a possibly flowed sl2 module."""
    fl = label.flow
    i, p = i + 2 * fl, F(p) - fl * m.t
    f = label.family
    if f is Family.E:
        if not _is_even(p - i - label.lam):
            raise ParityMismatch(f"momentum {p} does not lie over weight class {label.lam}")
        return canonical_label(m, n2(Family.E, i, p, label.r, label.s))
    return validate(m, n2(f, i, p, label.r, label.s))


def groth_fuse_via_sl2(m: MinimalModel, a: ModuleLabel, b: ModuleLabel) -> GrothVector:
    """Grothendieck product computed in the sl2 ring and pushed through the coset dictionary."""
    xa, ia, pa = n2_to_sl2(m, a)
    xb, ib, pb = n2_to_sl2(m, b)
    out = GrothVector()
    for z, n in groth_fuse_sl2(m, xa, xb):
        out = out + GrothVector.of(sl2_to_n2(m, z, ia + ib, pa + pb), n)
    return irreducible_class(m, out)


# exact (conjectural) rules


def _is_e11(m: MinimalModel, x: ModuleLabel) -> bool:
    return x.family is Family.E and (x.r, x.s) in ((1, 1), (m.u - 1, m.v - 1))


def _ee_exact(m: MinimalModel, a: ModuleLabel, b: ModuleLabel) -> GrothVector:
    u, v, t = m.u, m.v, m.t
    I, P = a.i + b.i, a.p + b.p
    r, s = b.r, b.s

    def E(i, p, rr, ss):
        if not 1 <= ss <= v - 1:
            return None
        return atypical_standard(m, i, p, rr, ss)

    def S(i, p, rr, ss):
        return n2(Family.S, i, p, rr, ss)

    branches = [
        (m.lam(r, s - 1), [S(I, P, r, s - 1), E(I + 2, P + t, r, s), E(I, P, r, s + 1)]),
        (m.lam(u - r, v - s - 1), [S(I, P, u - r, v - s - 1), E(I + 2, P + t, r, s), E(I, P, r, s - 1)]),
        (m.lam(r, s + 1), [S(I + 2, P + t, r, s), E(I - 2, P - t, r, s), E(I, P, r, s - 1)]),
        (m.lam(u - r, v - s + 1), [S(I + 2, P + t, u - r, v - s), E(I - 2, P - t, r, s), E(I, P, r, s + 1)]),
    ]
    hits = []
    for lam, summands in branches:
        if _is_even(P - I - lam):
            c = {}
            for x in summands:
                if x is not None:
                    x = _canon_summand(m, x)
                    c[x] = c.get(x, 0) + 1
            hits.append(c)
    if not hits:
        generic = [E(I - 2, P - t, r, s), E(I + 2, P + t, r, s), E(I, P, r, s - 1), E(I, P, r, s + 1)]
        return GrothVector({_canon_summand(m, x): 1 for x in generic if x is not None})
    common = dict(hits[0])
    for h in hits[1:]:
        common = {k: min(n, h.get(k, 0)) for k, n in common.items()}
    return GrothVector(common)


def _canon_summand(m: MinimalModel, x: ModuleLabel) -> ModuleLabel:
    if x.family is Family.S:
        return normal_form(m, x)
    return canonical_label(m, x)


def fuse_exact(m: MinimalModel, a: ModuleLabel, b: ModuleLabel) -> FusionResult:
    """Direct-sum fusion rules where one is known: L x (L, E, D) and E_{1,1} x E."""
    if m.unitary:
        return fuse_unitary(m, a, b)
    a, b = validate(m, a), validate(m, b)
    fa, fb = a.family, b.family
    if fb is Family.L and fa is not Family.L:
        a, b, fa, fb = b, a, fb, fa
    if fa is Family.L and fb in (Family.L, Family.E, Family.DPLUS, Family.DMINUS):
        I, P = a.i + b.i, a.p + b.p
        out = GrothVector()
        for rr in _channels(m.u, a.r, b.r):
            if fb is Family.L:
                lab = n2(Family.L, I, P, rr)
            else:
                lab = n2(fb, I, P, rr, b.s)
            out = out + GrothVector.of(canonical_label(m, lab))
        return FusionResult(out, irreducible_class(m, out), False)
    if fa is Family.E and fb is Family.E:
        if not _is_e11(m, a) and _is_e11(m, b):
            a, b = b, a
        if _is_e11(m, a):
            exact = _ee_exact(m, a, b)
            return FusionResult(exact, irreducible_class(m, exact), True)
    raise NoKnownExactRule(
        f"no exact fusion rule is known for {a} x {b}; use the Grothendieck product")


# ring axioms


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("N2COSET_THREADS", "1")))
    except ValueError:
        return 1


def _in_window(vec: GrothVector, p_window, flow_window) -> bool:
    for x, _ in vec:
        if x.algebra is Algebra.SL2:
            if flow_window is not None and abs(x.flow) > flow_window:
                return False
        elif p_window is not None and abs(x.p) > p_window:
            return False
    return True


def ring_check(m: MinimalModel, label_set, exact: bool = False, p_window=None,
               flow_window: int | None = None) -> dict:
    """Commutativity, associativity, unit and conjugation compatibility on a label set.

    Triples whose intermediate products leave the window are counted as skipped.
    """
    labels = [validate(m, x) for x in label_set]
    if not labels:
        raise LabelOutOfRange("empty label set")
    sl2_ring = labels[0].algebra is Algebra.SL2
    if m.unitary:
        def mul(A, B):
            out = GrothVector()
            for x, mx in A:
                for y, my in B:
                    out = out + _unitary_pair(m, x, y).scaled(mx * my)
            return out

        def cls(x):
            return GrothVector.of(canonical_label(m, x))
        unit = n2(Family.L, 0, 0, 1)
    elif sl2_ring:
        mul = lambda A, B: groth_fuse_sl2(m, A, B)  # noqa: E731
        cls = lambda x: sl2_class(m, x)  # noqa: E731
        unit = sl2(Family.L, 1)
    else:
        mul = lambda A, B: groth_fuse_n2(m, A, B)  # noqa: E731
        cls = lambda x: irreducible_class(m, GrothVector.of(x))  # noqa: E731
        unit = n2(Family.L, 0, 0, 1)
    if p_window is not None:
        p_window = F(p_window)
    classes = [cls(x) for x in labels]
    U = cls(unit)
    failures = []
    counts = {"pairs": 0, "triples": 0, "skipped": 0, "unit": 0, "conjugation": 0}

    def conj_vec(A):
        return A.map_labels(lambda x: normal_form(m, conjugate(m, x)))

    for x, A in zip(labels, classes):
        counts["unit"] += 1
        if mul(U, A) != A or mul(A, U) != A:
            failures.append({"axiom": "unit", "labels": [str(x)]})
    prods = {}
    for (i, A), (j, B) in product(enumerate(classes), repeat=2):
        prods[(i, j)] = mul(A, B)
    for i, j in prods:
        if i < j:
            counts["pairs"] += 1
            if prods[(i, j)] != prods[(j, i)]:
                failures.append({"axiom": "commutativity", "labels": [str(labels[i]), str(labels[j])]})
        counts["conjugation"] += 1
        lhs = conj_vec(prods[(i, j)])
        rhs = mul(conj_vec(classes[i]), conj_vec(classes[j]))
        if lhs != rhs:
            failures.append({"axiom": "conjugation", "labels": [str(labels[i]), str(labels[j])]})

    def assoc(ijk):
        i, j, k = ijk
        ab, bc = prods[(i, j)], prods[(j, k)]
        if not (_in_window(ab, p_window, flow_window) and _in_window(bc, p_window, flow_window)):
            return None
        return mul(ab, classes[k]) == mul(classes[i], bc)

    triples = list(product(range(len(labels)), repeat=3))
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        results = list(ex.map(assoc, triples))
    for (i, j, k), res in zip(triples, results):
        if res is None:
            counts["skipped"] += 1
            continue
        counts["triples"] += 1
        if not res:
            failures.append({"axiom": "associativity",
                             "labels": [str(labels[i]), str(labels[j]), str(labels[k])]})
    return {"check": "ring", "labels": [str(x) for x in labels], "q_order": None,
            "exact": exact, "p_window": None if p_window is None else fmt_rational(p_window),
            "flow_window": flow_window, "counts": counts,
            "status": "fail" if failures else "pass",
            "first_discrepancy": failures[0] if failures else None,
            "failures": failures[:20]}


def grothendieck_sample(m: MinimalModel, p_max=None) -> list[ModuleLabel]:
    """A label set for ring checks: L, D+ and typical E labels at small momenta."""
    u, v, t = m.u, m.v, m.t
    out = []
    for r in range(1, u):
        for i in (0, 1):
            for p in (m.lam(r, 0) + i, m.lam(r, 0) + i - 2):
                out.append(n2(Family.L, i, p, r))
    for r in range(1, u):
        for s in range(1, v - 1):
            out.append(n2(Family.DPLUS, 0, m.lam(r, s), r, s))
    for x in (F(1, 4), F(-3, 4)):
        if typical_ok(m, x, 1, 1):
            out.append(canonical_label(m, n2(Family.E, 0, x, 1, 1)))
    return list(dict.fromkeys(canonical_label(m, x) for x in out))

"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Criterion 6 contains claims about which Hadamard pair carries which candidate
geometry.  Our searches find the same geometries attached to the opposite
pairs, so that criterion is expected to fail; it is marked strict-xfail and
still prints FAIL.  The observed assignment is asserted separately.
"""

import math
from fractions import Fraction as Fr

import numpy as np
import pytest

from hmk.catalog import HERMITIAN_COS_BOUND, bjorck, dita, fourier, fourier_transposed, hermitian
from hmk.core import DEFAULT_TOL
from hmk.equivalence import are_equivalent
from hmk.reproduce import RUNNERS, corner_profiles, edge_multiset

CFG = {"tol": DEFAULT_TOL, "budget": 10**9, "workers": 1, "seed": 0, "samples": 100_000,
       "scan_bases": 1_000_000}
_cache = {}


def section(name):
    if name not in _cache:
        _cache[name] = RUNNERS[name](CFG, None)
    return _cache[name]


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def claims(sec, names=None):
    return [c for c in sec.claims if names is None or c.name in names]


def check(capsys, number, title, items):
    bad = [c for c in items if not c.passed]
    detail = title if not bad else title + " | failed: " + "; ".join(
        f"{c.name} (expected {c.expected}, observed {c.observed})" for c in bad)
    report(capsys, number, not bad, detail)
    assert not bad, detail


def test_criterion_1_survey_12(capsys):
    check(capsys, 1, "12th-roots survey: F(0,0)=4, F(1/6,0)=1, F^T(1/6,0)=1, nothing else",
          claims(section("s5-12")))


def test_criterion_2_survey_24(capsys):
    sec = section("s5-24")
    check(capsys, 2, "24th-roots survey adds F(1/6,1/12)=4 and D(1/8)=4",
          [c for c in sec.claims if c.name.startswith("extendable") or c.name == "no quartet"])


def test_criterion_3_roots_357(capsys):
    check(capsys, 3, "3rd roots give only Tao's class, 5th and 7th roots give nothing",
          claims(section("roots-357")))


def test_criterion_4_census(capsys):
    sec = section("s6")
    check(capsys, 4, "48 vectors, 16 bases in groups 2/2/6/6, distance table at 2 digits, max 0.93",
          [c for c in sec.claims if not c.name.startswith(("biunimodular", "non-classical"))])


def test_criterion_5_biunimodular(capsys):
    sec = section("s6")
    check(capsys, 5, "biunimodular counts 12 / 48 (36 non-classical) / 2",
          [c for c in sec.claims if c.name.startswith(("biunimodular", "non-classical"))])


PAIR_SPECIFIC = {
    "(1, D(1/8)) candidates: edges 0.89 x4 and 0.95 x2",
    "(1, F(1/6,1/12)) candidates: regular simplex, edges 0.93",
}


def _criterion_6_items():
    items = [c for c in section("s5-24").claims if c.name in PAIR_SPECIFIC]
    items += [c for c in section("s7-b2").claims if not c.name.startswith("some b2 run")]
    items += list(section("s7-b1").claims)
    return items


@pytest.mark.xfail(strict=True, reason="candidate geometries appear on the opposite Hadamard pairs; see ledger")
def test_criterion_6_triplet_geometry(capsys):
    check(capsys, 6, "triplet geometry tied to (1, D(1/8)), (1, F(1/6,1/12)), b2 and b1 pairs",
          _criterion_6_items())


def test_criterion_6_pair_agnostic_parts():
    # the geometries themselves and the b1 counts are reproduced
    s24, b2 = section("s5-24"), section("s7-b2")
    assert all(c.passed for c in s24.claims if c.name.startswith("both shapes"))
    assert all(c.passed for c in b2.claims if c.name.startswith("some b2 run"))
    assert section("s7-b1").passed


def test_observed_pair_assignment():
    s24 = section("s5-24").data["survey"]
    tables = {r["pair"][1]: np.array(r["distance_table_raw"]) for r in s24["reports"]}
    assert edge_multiset(tables["D(1/8)"]) == {0.93: 6}
    assert edge_multiset(tables["F(1/6,1/12)"]) == {0.89: 4, 0.95: 2}
    b2 = section("s7-b2").data
    d0, f = b2["D(0)"], b2["F(9/24+c2,0)"]
    assert (d0["unbiased_vectors"], d0["candidates"], d0["vectors_used"]) == (120, 10, 60)
    assert all(p == {0.78: 3, 0.93: 6} for p in corner_profiles(np.array(d0["distance_table_raw"])))
    assert f["candidates"] == 2 and round(f["distance_table_raw"][0][1], 2) == 0.77


def test_criterion_7_defects(capsys):
    sec = section("s8")
    check(capsys, 7, "defect 4 for F, C, D(0), 0 for S, 4 along B(theta) at 100 angles",
          [c for c in sec.claims if c.name.startswith("defect")])


def test_criterion_8_expansion(capsys):
    sec = section("s8")
    check(capsys, 8, "expansion consistent for 100 seeds, closed form for y, affine directions, order in [3.5,4.5]",
          [c for c in sec.claims if not c.name.startswith("defect")])


def test_criterion_9_statistics(capsys):
    sec = section("s4-average")
    notes = "; ".join(c.note for c in sec.claims)
    items = sec.claims
    bad = [c for c in items if not c.passed]
    report(capsys, 9, not bad, f"Haar averages within 4 stderr, random scans below 1 ({notes})")
    assert not bad


def _identities():
    x1, x2 = Fr(1, 17), Fr(1, 23)
    x = Fr(1, 19)
    th = math.acos(HERMITIAN_COS_BOUND)
    c, cb = bjorck(), bjorck(True)
    f = fourier(x1, x2)
    pairs = [
        ("F swap", f, fourier(x2, x1)),
        ("F translate (1/3,1/6)", f, fourier(x1 + Fr(1, 3), x2 + Fr(1, 6))),
        ("F translate (1/6,1/3)", f, fourier(x1 + Fr(1, 6), x2 + Fr(1, 3))),
        ("F negate", f, fourier(-x1, -x2)),
        ("F shear", f, fourier(x2 - x1, -x1)),
        ("F (x1, x2+1/2)", f, fourier(x1, x2 + Fr(1, 2))),
        ("F (x1+1/2, x2)", f, fourier(x1 + Fr(1, 2), x2)),
        ("D(x) ~ D(x+1/2)", dita(x), dita(x + Fr(1, 2))),
        ("D(x) ~ D(1/4-x)", dita(x), dita(Fr(1, 4) - x)),
        ("D(x)^dagger ~ D(-x)", dita(x).dagger(), dita(-x)),
        ("F^T ~ F^dagger", fourier_transposed(x1, x2), f.dagger()),
        ("C^dagger ~ C", c.dagger(), c),
        ("C ~ conj(C)", c, cb),
        ("B(theta_min) ~ C", hermitian(th), c),
        ("B(2pi-theta_min) ~ conj(C)", hermitian(2 * math.pi - th), cb),
        ("B(pi) ~ D(0)", hermitian(math.pi), dita(0)),
        ("B(pi/2) ~ D(0)", hermitian(math.pi / 2), dita(0)),
        ("B(3pi/2) ~ D(0)", hermitian(3 * math.pi / 2), dita(0)),
    ]
    return pairs


def test_criterion_10_identities(capsys):
    bad = []
    for name, a, b in _identities():
        w = are_equivalent(a, b)
        if w is None or w.residual(a, b) > 1e-9:
            bad.append(name)
    n = len(_identities())
    report(capsys, 10, not bad, f"{n} equivalence identities certified by witnesses"
           + (f" | failed: {bad}" if bad else ""))
    assert not bad

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hmk.catalog import (
    HERMITIAN_COS_BOUND,
    BadArity,
    Family,
    FamilySpec,
    OutOfRange,
    bjorck,
    build,
    dita,
    dita_block_circulant,
    family_listing,
    fourier,
    fourier_transposed,
    hermitian,
    hermitian_admissible,
    parse_turn,
    tao,
    twisted_fourier,
)
from hmk.core import RationalRoot, TurnFraction, is_hadamard, root
from hmk.equivalence import dephase

BOUND = math.acos(HERMITIAN_COS_BOUND)
rational = st.builds(Fraction, st.integers(0, 47), st.sampled_from([1, 2, 3, 4, 6, 8, 12, 16, 24, 48]))


def test_fourier_00_entries():
    q = np.exp(2j * np.pi / 6)
    a = np.arange(6)
    assert np.allclose(fourier(0, 0).entries, q ** np.outer(a, a) / math.sqrt(6), atol=1e-15)


def test_dita0_fourth_roots():
    d = dita(0)
    assert d.has_exact
    for row in d.exact_entries:
        for p in row:
            assert isinstance(p, RationalRoot) and (4 * p.root.fraction) % 1 == 0


@given(rational, rational)
def test_fourier_family_hadamard(x1, x2):
    assert is_hadamard(fourier(x1, x2))
    assert is_hadamard(fourier_transposed(x1, x2))


def test_bjorck_circulant():
    c = bjorck().entries
    for a in range(6):
        for b in range(6):
            assert abs(c[a, b] - c[(a + 1) % 6, (b + 1) % 6]) < 1e-15
    assert is_hadamard(c) and is_hadamard(bjorck(True))


@pytest.mark.parametrize("x", ["0", "1/8", "-1/8", "1/19"])
def test_dita_family(x):
    assert is_hadamard(dita(x))


def test_hermitian_admissible():
    assert hermitian_admissible(math.pi)
    assert not hermitian_admissible(0.0)
    assert hermitian_admissible(BOUND)


def test_hermitian_out_of_range():
    with pytest.raises(OutOfRange):
        hermitian(0.3)


def test_hermitian_self_adjoint(rng):
    for t in rng.uniform(BOUND, 2 * math.pi - BOUND, 100):
        for br in (1, -1):
            h = hermitian(float(t), br).entries
            assert np.max(np.abs(h - h.conj().T)) < 1e-10
            assert is_hadamard(h)


def test_hermitian_endpoint_square_root_vanishes():
    h = hermitian(BOUND)
    assert is_hadamard(h)
    assert np.max(np.abs(h.entries - hermitian(BOUND, -1).entries)) < 1e-12


def test_twisted_and_block_circulant():
    assert is_hadamard(twisted_fourier(0, "1/4"))
    assert is_hadamard(twisted_fourier("9/24+c2", 0, 0))
    for v in range(5):
        assert is_hadamard(dita_block_circulant(v))
    with pytest.raises(OutOfRange):
        dita_block_circulant(7)


def test_tao_third_roots():
    s = tao()
    assert is_hadamard(s)
    for row in dephase(s).exact_entries:
        for p in row:
            assert isinstance(p, RationalRoot) and p.root.denominator in (1, 3)


def test_tao_cache(tmp_path, monkeypatch):
    import hmk.catalog as cat

    monkeypatch.setenv("HMK_CACHE_DIR", str(tmp_path))
    monkeypatch.setattr(cat, "_TAO", None)
    s = cat.tao()
    assert (tmp_path / "tao.json").exists()
    monkeypatch.setattr(cat, "_TAO", None)
    assert np.array_equal(cat.tao().entries, s.entries)


def test_build_and_arity():
    m = build(FamilySpec(Family.Fourier, ("1/6", "1/12")))
    assert m.label == "F(1/6,1/12)"
    with pytest.raises(BadArity):
        FamilySpec(Family.Dita, ())
    with pytest.raises(BadArity):
        FamilySpec(Family.Fourier, ("0",))
    assert is_hadamard(build(FamilySpec(Family.Hermitian, ("2.0",), branch=-1)))
    assert {f["family"] for f in family_listing()} == {f.value for f in Family}


def test_parse_turn():
    assert parse_turn("1/6") == root(1, 6)
    assert parse_turn("-1/8") == root(7, 8)
    from hmk.core import C2

    assert abs(parse_turn("9/24+c2").angle() % (2 * math.pi) - (2 * math.pi * (9 / 24 + C2)) % (2 * math.pi)) < 1e-12
    with pytest.raises(ValueError):
        parse_turn("x1")

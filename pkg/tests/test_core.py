import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hmk.catalog import bjorck, dita, fourier
from hmk.core import (
    C1,
    C2,
    BasisMatrix,
    FloatPhase,
    RationalRoot,
    SpecialConstant,
    SpecialProduct,
    Tolerances,
    TurnFraction,
    ValidationError,
    are_unbiased,
    exact_phase_of,
    identity,
    is_hadamard,
    multiply,
    realize,
    root,
    special,
)

fractions_st = st.builds(Fraction, st.integers(-500, 500), st.integers(1, 96))


def test_turn_fraction_normalizes():
    t = TurnFraction(14, 12)
    assert (t.numerator, t.denominator) == (1, 6)
    assert TurnFraction(-1, 4) == TurnFraction(3, 4)
    with pytest.raises(ValueError):
        TurnFraction(1, 0)


@given(fractions_st)
def test_turn_fraction_invariants(f):
    t = TurnFraction.of(f)
    assert 0 <= t.numerator < t.denominator
    assert math.gcd(t.numerator, t.denominator) == 1
    z = t.realize()
    exact = complex(math.cos(2 * math.pi * float(f % 1)), math.sin(2 * math.pi * float(f % 1)))
    assert abs(z - exact) < 1e-15


def test_realize_examples():
    assert realize(root(0)) == 1 + 0j
    assert realize(root(3, 12)) == 1j
    d = realize(special("d"))
    # closed form; the approximate imaginary part is 0.93060
    assert abs(d - complex(-0.36603, 0.93060)) < 1e-5
    assert abs(d - complex((1 - math.sqrt(3)) / 2, math.sqrt(math.sqrt(3) / 2))) < 1e-15


def test_special_constants():
    d = SpecialConstant("d").realization
    assert abs(d * d - (1 - math.sqrt(3)) * d + 1) < 1e-13
    for s in ("d", "dbar", "b1", "b1bar", "b2", "b2bar"):
        assert abs(abs(SpecialConstant(s).realization) - 1) < 1e-14
    assert abs(math.cos(2 * math.pi * C1) - math.sqrt(2 / 3)) < 1e-14
    assert abs(math.tan(2 * math.pi * C2) + 2) < 1e-12
    assert 0 < C1 < 0.25 and 0.25 < C2 < 0.5
    with pytest.raises(ValueError):
        SpecialConstant("e")


@given(fractions_st, fractions_st)
def test_realize_multiplicative(a, b):
    ta, tb = TurnFraction.of(a), TurnFraction.of(b)
    assert abs(ta.realize() * tb.realize() - (ta + tb).realize()) < 1e-13


@given(fractions_st, fractions_st, st.sampled_from(["d", "dbar", "b1", "b2bar"]))
def test_multiply_exact_kinds(a, b, s):
    p, q = special(s, a), root(b.numerator, b.denominator)
    r = multiply(p, q)
    assert isinstance(r, SpecialProduct)
    assert abs(r.realize() - p.realize() * q.realize()) < 1e-13
    # a special times its conjugate collapses to a rational root
    c = multiply(p, p.conjugate())
    assert isinstance(c, RationalRoot) and c.root == TurnFraction(0)
    sq = multiply(p, p)
    assert sq.power == 2 and abs(sq.realize() - p.realize() ** 2) < 1e-13


def test_float_phase_compares_mod_two_pi():
    assert FloatPhase(0.5) == FloatPhase(0.5 + 2 * math.pi)
    assert FloatPhase(math.pi / 2) == root(1, 4)
    assert FloatPhase(0.1) != FloatPhase(0.2)


def test_exact_phase_of():
    assert exact_phase_of(1j, 12) == root(3, 12)
    assert exact_phase_of(complex(0.6, 0.8), 12) is None


def test_is_hadamard_examples():
    assert not is_hadamard(identity(6))
    assert is_hadamard(fourier(0, 0))
    a = np.array(fourier(0, 0).entries)
    a[2, 3] = 0
    assert not is_hadamard(a)


def test_catalog_residuals_small():
    for m in (fourier(0, 0), fourier("1/6", "1/12"), bjorck(), dita("1/8")):
        a = m.entries
        assert np.max(np.abs(a.conj().T @ a - np.eye(6))) < 1e-12
        assert m.exact_consistency() < 1e-12


def test_are_unbiased_examples():
    f = fourier(0, 0)
    assert are_unbiased(identity(6), f)
    assert not are_unbiased(identity(6), identity(6))
    rephased = f.entries * np.exp(1j * np.arange(6))[None, :]
    assert not are_unbiased(f, rephased)
    with pytest.raises(ValueError):
        are_unbiased(identity(2), identity(3))


def test_are_unbiased_symmetric_exactly(rng):
    for _ in range(20):
        from hmk.geometry import random_basis

        a, b = random_basis(6, rng.integers(1 << 30)), random_basis(6, rng.integers(1 << 30))
        from hmk.core import unbiasedness_residual

        assert unbiasedness_residual(a, b) == unbiasedness_residual(b, a)


def test_tolerances_positive():
    with pytest.raises(ValueError):
        Tolerances(unitarity_tolerance=0)
    with pytest.raises(ValueError):
        Tolerances(rank_threshold=-1)


def test_basis_matrix_immutable_and_validates():
    m = fourier(0, 0)
    with pytest.raises(AttributeError):
        m.label = "x"
    with pytest.raises(ValueError):
        m.entries[0, 0] = 2
    with pytest.raises(ValidationError):
        BasisMatrix(np.ones((6, 6)) / 6).validate()
    with pytest.raises(ValueError):
        BasisMatrix(np.ones((2, 3)))


def test_dagger_transpose_conjugate_keep_exact():
    c = bjorck()
    for m in (c.dagger(), c.transpose(), c.conjugate()):
        assert m.has_exact and m.exact_consistency() < 1e-12

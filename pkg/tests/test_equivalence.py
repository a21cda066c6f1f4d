import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hmk.catalog import (
    HERMITIAN_COS_BOUND,
    bjorck,
    dita,
    dita_block_circulant,
    fourier,
    fourier_transposed,
    hermitian,
    tao,
    twisted_fourier,
)
from hmk.core import identity
from hmk.equivalence import (
    are_equivalent,
    canonical_key,
    dephase,
    fourier_orbit,
    haagerup_invariant,
    in_fundamental_triangle,
    phase_codes,
    reduce_fourier_params,
    unordered_pair_equivalent,
)
from conftest import random_equivalent

X1, X2 = Fr(1, 17), Fr(1, 23)


def eq(a, b):
    w = are_equivalent(a, b)
    if w is not None:
        assert w.residual(a, b) <= 1e-9
    return w is not None


def test_dephase():
    f = fourier(0, 0)
    assert np.allclose(dephase(f).entries, f.entries, atol=1e-12)
    g = f.entries * np.array([1, 1j, 1, 1, 1, 1])[None, :]
    assert np.allclose(dephase(g).entries, f.entries, atol=1e-12)
    c = dephase(bjorck())
    assert np.allclose(c.entries[0], 1 / math.sqrt(6)) and np.allclose(c.entries[:, 0], 1 / math.sqrt(6))


@pytest.mark.parametrize("other", [
    (X2, X1),
    (X1 + Fr(2, 6), X2 + Fr(1, 6)),
    (X1 + Fr(1, 6), X2 + Fr(2, 6)),
    (-X1, -X2),
    (X2 - X1, -X1),
    (X1, X2 + Fr(1, 2)),
    (X1 + Fr(1, 2), X2),
])
def test_fourier_identities(other):
    assert eq(fourier(X1, X2), fourier(*other))


def test_fourier_sign_flip_not_identity():
    # a single sign flip is not in the equivalence group of a generic point
    assert not eq(fourier(X1, X2), fourier(X1, -X2))


def test_dita_identities():
    x = Fr(1, 19)
    assert eq(dita(x), dita(x + Fr(1, 2)))
    assert eq(dita(x), dita(Fr(1, 4) - x))
    assert not eq(dita(x), dita(-x))


@pytest.mark.parametrize("x", [Fr(k, 97) for k in range(1, 21)])
def test_dita_dagger(x):
    assert eq(dita(x).dagger(), dita(-x))


def test_dagger_relations():
    assert eq(fourier_transposed(X1, X2), fourier(X1, X2).dagger())
    assert unordered_pair_equivalent(fourier(X1, X2), fourier_transposed(X1, X2))
    c = bjorck()
    assert eq(c.dagger(), c)
    assert eq(c, bjorck(True))
    assert unordered_pair_equivalent(c, c)


def test_tao_inequivalent_to_fourier():
    assert not eq(fourier(0, 0), tao())
    assert not unordered_pair_equivalent(fourier(0, 0), tao())


def test_hermitian_endpoints_and_special_points():
    th = math.acos(HERMITIAN_COS_BOUND)
    c, cb = bjorck(), bjorck(True)
    for t in (th, 2 * math.pi - th):
        for br in (1, -1):
            assert eq(hermitian(t, br), c) or eq(hermitian(t, br), cb)
    for t in (math.pi, math.pi / 2, 3 * math.pi / 2):
        assert eq(hermitian(t), dita(0))


@pytest.mark.parametrize("theta", [1.2, 2.0, 3.5, 4.9])
def test_hermitian_branches_equivalent(theta):
    assert eq(hermitian(theta, 1), hermitian(theta, -1))


def test_twisted_product_forms():
    assert eq(twisted_fourier(0, 0, Fr(1, 4)), fourier(Fr(1, 6), Fr(1, 12)))
    assert eq(twisted_fourier(X1, X2), fourier(X1, X2))
    assert eq(dita_block_circulant(0), dita(0))
    for v in range(1, 5):
        assert eq(dita_block_circulant(v), dita(Fr(1, 8)))


def test_random_equivalents_and_invariant(rng):
    mats = [fourier(0, 0), fourier(Fr(1, 6), Fr(1, 12)), bjorck(), dita(Fr(1, 8)), tao(), hermitian(2.2)]
    for m in mats:
        for _ in range(200 // len(mats)):
            h = random_equivalent(m, rng)
            assert haagerup_invariant(h) == haagerup_invariant(m)
            w = are_equivalent(h, m)
            assert w is not None and w.residual(h, m) < 1e-9
            inv = w.inverse()
            assert inv.residual(m, h) < 1e-9


def test_reflexive():
    for m in (fourier(0, 0), bjorck(), tao()):
        assert eq(m, m)


def test_wrong_shape():
    assert are_equivalent(identity(2), fourier(0, 0)) is None


def test_canonical_key_invariant(rng):
    f = fourier(Fr(1, 6), 0)
    k = canonical_key(phase_codes(f))
    for _ in range(5):
        p1, p2 = rng.permutation(6), rng.permutation(6)
        from hmk.core import BasisMatrix

        g = [[f.exact_entries[i][j] for j in p2] for i in p1]
        assert canonical_key(phase_codes(BasisMatrix.from_phases(g))) == k
    assert canonical_key(phase_codes(fourier(0, 0))) != k


def test_reduce_fourier_params_examples():
    assert reduce_fourier_params(0, 0) == (0, 0)
    x1, x2 = Fr(1, 29), Fr(1, 31)
    assert reduce_fourier_params(x1 + Fr(2, 6), x2 + Fr(1, 6)) == reduce_fourier_params(x1, x2)
    assert len(fourier_orbit(x1, x2)) == 144


@given(st.integers(0, 23), st.integers(0, 23))
def test_orbit_size_divides_144(a, b):
    assert 144 % len(fourier_orbit(Fr(a, 24), Fr(b, 24))) == 0


@given(st.integers(0, 47), st.integers(0, 47))
def test_reduced_point_in_triangle(a, b):
    p = reduce_fourier_params(Fr(a, 48), Fr(b, 48))
    assert in_fundamental_triangle(*p)


@pytest.mark.parametrize("pt", [(Fr(5, 17), Fr(2, 13)), (Fr(7, 24), Fr(1, 24)), (0.3, 0.77)])
def test_reduced_point_certified(pt):
    red = reduce_fourier_params(*pt)
    assert in_fundamental_triangle(*red)
    assert are_equivalent(fourier(*pt), fourier(*red), atol=1e-7) is not None

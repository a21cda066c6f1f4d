import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import hmk.defect as dmod
from hmk.catalog import bjorck, dita, fourier, hermitian, tao
from hmk.core import ValidationError, identity, is_hadamard
from hmk.defect import (
    AFFINE_DIRECTIONS,
    DEPENDENT,
    HERMITIAN_DIRECTION,
    IllConditioned,
    Inconsistent,
    PhasePerturbation,
    affine_direction_check,
    convergence_order,
    defect,
    dita_expand,
    first_order,
    hermitian_direction_match,
    jacobian,
    scan_hermitian,
)
from conftest import random_equivalent

small = st.floats(-0.1, 0.1, allow_nan=False)


@pytest.mark.parametrize("name,m,want", [
    ("F", fourier(0, 0), 4), ("C", bjorck(), 4), ("D", dita(0), 4), ("S", tao(), 0),
])
def test_defect_examples(name, m, want):
    assert defect(m) == want


def test_jacobian_shape():
    j = jacobian(fourier(0, 0))
    assert j.shape == (2 * 15 + 6, 25)
    # row-norm constraints do not depend on phases
    assert np.allclose(j[-6:], 0)


@pytest.mark.parametrize("m", [fourier(0, 0), bjorck(), dita(0), tao(), hermitian(2.0)])
def test_defect_invariant_under_equivalence(m, rng):
    want = defect(m)
    for _ in range(20):
        assert defect(random_equivalent(m, rng)) == want


def test_defect_requires_hadamard():
    with pytest.raises(ValidationError):
        defect(identity(6))


def test_ill_conditioned_guard():
    s = np.array([1.0, 0.5, 3e-9])
    with pytest.raises(IllConditioned):
        dmod._rank(s, 1e-8)
    assert dmod._rank(np.array([1.0, 0.5, 1e-14]), 1e-8) == 2


def test_hermitian_scan_defect_four():
    r = scan_hermitian(samples=100, seed=0)
    assert r["distinct"] == [4]


def test_first_order_relations():
    x = first_order((0.1, 0.2, 0.3, 0.4))
    assert np.allclose(x, -x.T)
    assert x[0, 3] == pytest.approx(0.1 + 0.4)
    for (a, b), c in DEPENDENT.items():
        assert x[a - 1, b - 1] == pytest.approx(np.dot(c, (0.1, 0.2, 0.3, 0.4)))
    with pytest.raises(ValueError):
        first_order((1, 2))


def test_first_order_solution_space_dimension():
    from hmk.defect import _system

    S = _system()
    # the four free directions lie in the kernel and are independent; the kernel has dimension 4
    basis = np.stack([first_order(np.eye(4)[k]).ravel() for k in range(4)])
    for v in basis:
        assert np.linalg.norm(S.apply(v.reshape(5, 5))) < 1e-12
    assert np.linalg.matrix_rank(basis) == 4
    assert defect(dita(0)) == 4


def test_phase_perturbation_decomposition(rng):
    x = rng.normal(size=(5, 5))
    p = PhasePerturbation(x)
    assert np.allclose(p.diagonal + p.symmetric + p.antisymmetric, x, atol=1e-15)
    assert p.entry(2, 3) == x[1, 2]


def test_zero_seed():
    rep = dita_expand((0, 0, 0, 0))
    assert np.all(rep.x == 0) and np.allclose(rep.y, 0) and np.allclose(rep.z, 0)
    assert np.allclose(rep.matrix().entries, dita(0).entries, atol=1e-15)
    assert math.isinf(rep.convergence_order)


@pytest.mark.parametrize("x", [0.05, 0.3, -0.2])
def test_affine_seed_has_no_corrections(x):
    rep = dita_expand((x, 0, 0, 0))
    assert np.abs(rep.y).max() < 1e-10 and np.abs(rep.z).max() < 1e-10
    assert is_hadamard(rep.matrix())


@pytest.mark.parametrize("d", list(AFFINE_DIRECTIONS))
def test_affine_directions(d):
    assert affine_direction_check(d, [0.3, 1.0, 2.0, math.pi])


def test_generic_direction_not_affine():
    assert not affine_direction_check((1, 0.3, 0.2, 0), [0.5])
    assert not affine_direction_check(HERMITIAN_DIRECTION, [0.5])


def test_expansion_checks_generic(rng):
    for _ in range(100):
        seed = rng.uniform(-0.1, 0.1, 4)
        rep = dita_expand(seed, fit_order=False)
        assert rep.consistent
        c = rep.checks
        assert c["y_antisymmetric_max"] < 1e-12
        assert c["y_diagonal_formula_max"] < 1e-10
        assert c["y_symmetric_spread"] < 1e-10
        assert c["y_closed_form_diff"] < 1e-10
        assert c["z_diagonal_max"] < 1e-10 and c["z_symmetric_max"] < 1e-10
        assert max(abs(g) for g in rep.gauge["y"] + rep.gauge["z"]) < 1e-12


@given(st.tuples(small, small, small, small))
def test_expansion_consistent_property(seed):
    assert dita_expand(seed, fit_order=False).consistent


def test_convergence_order_generic(rng):
    for _ in range(10):
        rep = dita_expand(rng.uniform(-0.3, 0.3, 4))
        assert 3.5 <= rep.convergence_order <= 4.5


def test_convergence_order_affine():
    rep = dita_expand((0, 0.25, 0, 0))
    assert math.isinf(convergence_order(rep))
    assert rep.to_json()["convergence_order"] == "inf"


def test_orders_and_seed_range():
    assert dita_expand((0.1, 0, 0, 0.1), order=1).y is None
    assert dita_expand((0.1, 0, 0, 0.1), order=2).z is None
    with pytest.raises(ValueError):
        dita_expand((0.5, 0, 0, 0))
    with pytest.raises(ValueError):
        dita_expand((0.1, 0, 0, 0), order=4)


def test_hermitian_direction():
    rep, match = hermitian_direction_match(0.01)
    assert rep.consistent
    assert abs(rep.y_scalar) > 1e-6
    assert match is not None
    theta, branch, w = match
    assert w.residual(rep.matrix(), hermitian(theta, branch)) < 1e-6


def test_inconsistent_raised(monkeypatch):
    monkeypatch.setattr(dmod, "INCONSISTENT_TOL", -1.0)
    with pytest.raises(Inconsistent):
        dita_expand((0.1, 0.05, 0, 0))

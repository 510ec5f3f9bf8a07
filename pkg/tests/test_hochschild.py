import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbwcobar.algebra import PolynomialAlgebra, TruncatedAlgebra
from pbwcobar.coalg import SYMMETRIC, CoalgebraSpec, coproduct
from pbwcobar.errors import DegreeOverflowError, ShapeError
from pbwcobar.hochschild import (
    CoCochain,
    Cochain,
    antisymmetrize,
    differential_bracket_sign,
    dualize,
    gerstenhaber_bracket,
    hkr,
    hochschild_differential,
    identity_cochain,
    phi1,
    phi1_defect,
    product_cochain,
)
from pbwcobar.polyvec import V_DUAL, Polyvector

A2 = PolynomialAlgebra(2, 4, strict=False)
SMALL = PolynomialAlgebra(2, 2, strict=False)


def matrix_algebra():
    """2x2 matrices on elementary units E_ij."""
    basis = [(i, j) for i in (1, 2) for j in (1, 2)]

    def table(a, b):
        return {(a[0], b[1]): 1} if a[1] == b[0] else {}

    unit_free = TruncatedAlgebra(basis, table, name="M2")
    return unit_free


M2 = matrix_algebra()


def random_cochain(alg, arity, rng, density=0.4):
    table = {}
    for args in itertools.product(alg.basis, repeat=arity):
        if rng.random() < density:
            b = rng.choice(alg.basis)
            table[args] = {b: rng.randint(-2, 2)}
    return Cochain(alg, arity, table)


def test_cochain_evaluation():
    m = product_cochain(A2)
    x1, x2 = A2.variable(1), A2.variable(2)
    assert m({x1: 2, x2: 1}, {x1: 1}) == {(2, 0): 2, (1, 1): 1}
    with pytest.raises(ShapeError):
        m({x1: 1})


@pytest.mark.parametrize("arity", [0, 1, 2])
def test_differential_squares_to_zero(arity):
    rng = random.Random(arity)
    for alg in (SMALL, M2):
        psi = random_cochain(alg, arity, rng)
        dd = hochschild_differential(hochschild_differential(psi))
        assert all(not v for v in dd.table().values())


def test_product_is_a_cocycle_and_identity_a_coboundary_of_nothing():
    m = product_cochain(M2)
    assert all(not v for v in hochschild_differential(m).table().values())
    # d(id)(a, b) = a b - ab + ab = ab
    d_id = hochschild_differential(identity_cochain(M2))
    assert d_id.equals_on(m, m.evaluation_domain())


@settings(max_examples=100)
@given(st.integers(0, 10**6), st.integers(0, 2), st.integers(0, 2))
def test_bracket_graded_antisymmetry(seed, k1, k2):
    if k1 == k2 == 0:
        k2 = 1  # the bracket of two 0-cochains has no room to live
    rng = random.Random(seed)
    p, q = random_cochain(M2, k1, rng), random_cochain(M2, k2, rng)
    lhs = gerstenhaber_bracket(p, q)
    rhs = gerstenhaber_bracket(q, p).scale(-((-1) ** ((k1 - 1) * (k2 - 1))))
    assert lhs.equals_on(rhs, lhs.evaluation_domain())


@settings(max_examples=100)
@given(st.integers(0, 10**6), st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_bracket_graded_jacobi(seed, arities):
    rng = random.Random(seed)
    if sum(arities) > 4:
        arities = [min(a, 1) for a in arities]
    if arities.count(0) > 1:
        arities = [max(a, 1) for a in arities]
    p, q, r = (random_cochain(M2, a, rng, 0.3) for a in arities)
    a, b, c = (x - 1 for x in arities)
    B = gerstenhaber_bracket
    lhs = B(p, B(q, r))
    rhs = B(B(p, q), r) + B(q, B(p, r)).scale((-1) ** (a * b))
    assert lhs.equals_on(rhs, lhs.evaluation_domain())


def test_bracket_of_product_with_itself_detects_associativity():
    m = product_cochain(A2)
    assert all(not v for v in gerstenhaber_bracket(m, m).table(A2.basis[:6]).values())
    x1 = A2.variable(1)
    broken = A2.with_table_entry(x1, x1, {(0, 1): 1})
    mb = product_cochain(broken)
    mm = gerstenhaber_bracket(mb, mb)
    assert any(mm.table(broken.basis[:6]).values())
    assert broken.find_nonassociative() is not None


@pytest.mark.parametrize("arity", [0, 1, 2, 3])
def test_differential_is_bracket_with_product(arity):
    rng = random.Random(10 + arity)
    alg = M2 if arity != 3 else SMALL
    psi = random_cochain(alg, arity, rng)
    lhs = hochschild_differential(psi)
    rhs = gerstenhaber_bracket(product_cochain(alg), psi).scale(differential_bracket_sign(arity))
    assert lhs.equals_on(rhs, lhs.evaluation_domain())
    # and the opposite sign is wrong unless both sides vanish
    if any(lhs.table().values()):
        assert not lhs.equals_on(rhs.scale(-1), lhs.evaluation_domain())


def test_arity_zero_needs_noncommutative_algebra():
    psi = Cochain(M2, 0, {(): {(1, 2): 1}})
    d = hochschild_differential(psi)
    assert d.on_basis(((2, 1),)) == {(2, 2): 1, (1, 1): -1}


# HKR --------------------------------------------------------------------


def test_hkr_examples():
    alg = PolynomialAlgebra(2, 3, strict=False)
    gamma = Polyvector(2, {((0, 0), (1, 2)): 1}, V_DUAL)
    h = hkr(gamma, alg)
    x1, x2 = alg.variable(1), alg.variable(2)
    assert h.on_basis((x1, x2)) == {(0, 0): Fraction(1, 2)}
    assert h.on_basis((x2, x1)) == {(0, 0): Fraction(-1, 2)}
    assert antisymmetrize(h).on_basis((x1, x2)) == {(0, 0): 1}
    # a vector field acts as a derivation
    v = Polyvector(2, {((1, 0), (2,)): 1}, V_DUAL)
    assert hkr(v, alg).on_basis(((0, 2),)) == {(1, 1): 2}
    # a function is a 0-cochain
    f = Polyvector(2, {((1, 1), ()): 3}, V_DUAL)
    assert hkr(f, alg).on_basis(()) == {(1, 1): 3}


@given(st.integers(0, 10**6))
def test_hkr_antisymmetrization_recovers_polyvector(seed):
    rng = random.Random(seed)
    alg = PolynomialAlgebra(3, 3, strict=False)
    terms = {}
    for _ in range(3):
        e = tuple(rng.randint(0, 1) for _ in range(3))
        terms[(e, tuple(sorted(rng.sample([1, 2, 3], 2))))] = rng.choice([-3, -2, -1, 1, 2, 3])
    gamma = Polyvector(3, terms, V_DUAL)
    alt = antisymmetrize(hkr(gamma, alg))
    xs = [alg.variable(i) for i in (1, 2, 3)]
    for i, j in itertools.combinations(range(3), 2):
        expected = {}
        for (e, dirs), c in gamma.terms.items():
            if dirs == (i + 1, j + 1) and c:
                expected[e] = expected.get(e, 0) + c
        assert alt.on_basis((xs[i], xs[j])) == {k: v for k, v in expected.items() if v}


def test_hkr_of_cocycle_bivector_is_hochschild_cocycle():
    alg = PolynomialAlgebra(2, 2, strict=False)
    gamma = Polyvector(2, {((1, 0), (1, 2)): 1}, V_DUAL)
    d = hochschild_differential(hkr(gamma, alg))
    assert all(not v for v in d.table().values())


# dualization and Phi_1 -------------------------------------------------------


def test_product_dualizes_to_coproduct():
    alg = PolynomialAlgebra(2, 3, strict=False)
    dual = dualize(product_cochain(alg))
    spec = CoalgebraSpec(SYMMETRIC, 2, reduced=False)
    for sigma in spec.basis_upto(3):
        assert dual.value(sigma) == coproduct(spec, sigma)


def test_strict_overflow_names_the_arguments():
    alg = PolynomialAlgebra(2, 2, strict=True)
    m = product_cochain(alg)
    with pytest.raises(DegreeOverflowError) as e:
        m.on_basis(((2, 0), (1, 1)))
    assert e.value.offending == ((2, 0), (1, 1))


def _random_cocochain(rng, dim, arity, unit_value=True):
    spec = CoalgebraSpec(SYMMETRIC, dim, reduced=False)
    basis = spec.basis_upto(2)
    table = {}
    for s in basis:
        if s == () and not unit_value:
            continue
        if rng.random() < 0.6:
            key = tuple(rng.choice(basis) for _ in range(arity))
            table[s] = {key: rng.randint(-2, 2) or 1}
    return CoCochain(dim, arity, table)


def test_phi1_is_projection():
    psi = CoCochain(2, 2, {(1,): {((1,), ()): 1, ((), (1,)): 1}, (1, 2): {((1,), (2,)): 5}})
    res = phi1(psi)
    g = res.complex.letter((1, 2))
    assert res.degree == 1
    assert res.derivation.on_generator(g).terms == {(res.complex.letter((1,)), res.complex.letter((2,))): res.derivation.on_generator(g).terms[(res.complex.letter((1,)), res.complex.letter((2,)))]}
    assert res.derivation.on_generator(res.complex.letter((1,))).is_zero()


def test_phi1_commutes_without_unit_value():
    rng = random.Random(1)
    for arity in (1, 2):
        psi = _random_cocochain(rng, 2, arity, unit_value=False)
        res = phi1_defect(psi, 2)
        assert all(v.is_zero() for v in res.defects.values())
        assert res.witness.is_zero()


@pytest.mark.parametrize("seed", range(50))
def test_phi1_defect_is_inner(seed):
    rng = random.Random(seed)
    arity = 1 + seed % 3
    psi = _random_cocochain(rng, 2, arity)
    table = dict(psi.table)
    table[()] = {tuple((1 + (t + seed) % 2,) for t in range(arity)): 1}
    psi = CoCochain(2, arity, table)
    res = phi1_defect(psi, 2)
    assert not res.witness.is_zero()
    assert res.sign == (-1) ** arity
    assert any(not v.is_zero() for v in res.defects.values())

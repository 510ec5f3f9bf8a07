import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pbwcobar.errors import ContextError, GradingError
from pbwcobar.polyvec import (
    K_BRACKET_SIGN,
    NON_JACOBI,
    QUADRATIC_2D,
    SO3,
    V_DUAL,
    V_SHIFT,
    PoissonBivector,
    Polyvector,
    is_poisson,
    jacobiator,
    koszul_dual,
    koszul_dual_inverse,
    maurer_cartan_check,
    poisson_bracket,
    schouten_bracket,
)

N = 3


def monomial_strategy(context, max_odd=3, max_even=2):
    exps = st.tuples(*[st.integers(0, max_even)] * N)
    odd = st.lists(st.integers(1, N), max_size=max_odd, unique=True).map(tuple)
    return st.builds(lambda e, o, c: Polyvector(N, {(e, o): c}, context), exps, odd, st.integers(-3, 3).filter(bool))


def homogeneous(context):
    return st.lists(monomial_strategy(context), min_size=1, max_size=3).map(
        lambda ms: [m for m in ms if len(next(iter(m.terms))[1]) == len(next(iter(ms[0].terms))[1])]
    ).map(lambda ms: sum(ms[1:], ms[0]))


def _deg(p):
    return p.degree() if not p.is_zero() else 0


def test_vector_field_bracket():
    a = Polyvector(2, {((1, 0), (2,)): 1})  # x1 d2
    b = Polyvector(2, {((0, 1), (1,)): 1})  # x2 d1
    expected = Polyvector(2, {((1, 0), (1,)): 1, ((0, 1), (2,)): -1})
    assert schouten_bracket(a, b) == expected


def test_bracket_with_functions():
    v = Polyvector(2, {((0, 0), (1,)): 1})  # d1
    f = Polyvector(2, {((2, 1), ()): 1})  # x1^2 x2
    assert schouten_bracket(v, f) == Polyvector(2, {((1, 1), ()): 2})
    assert schouten_bracket(f, f).is_zero()


def test_product_signs():
    d1 = Polyvector.monomial(2, (0, 0), (1,))
    d2 = Polyvector.monomial(2, (0, 0), (2,))
    assert d1 * d2 == -(d2 * d1)
    assert (d1 * d1).is_zero()
    assert Polyvector.monomial(2, (0, 0), (2, 1)) == Polyvector.monomial(2, (0, 0), (1, 2), -1)


@pytest.mark.parametrize("context", [V_DUAL, V_SHIFT])
@given(data=st.data())
def test_graded_antisymmetry(context, data):
    a, b = data.draw(homogeneous(context)), data.draw(homogeneous(context))
    da, db = _deg(a), _deg(b)
    assert schouten_bracket(a, b) == schouten_bracket(b, a).scale(-((-1) ** (da * db)))


@pytest.mark.parametrize("context", [V_DUAL, V_SHIFT])
@given(data=st.data())
def test_graded_jacobi(context, data):
    a, b, c = (data.draw(homogeneous(context)) for _ in range(3))
    da, db = _deg(a), _deg(b)
    B = schouten_bracket
    assert B(a, B(b, c)) == B(B(a, b), c) + B(b, B(a, c)).scale((-1) ** (da * db))


def test_contexts_do_not_mix():
    a = Polyvector(2, {((1, 0), (1,)): 1}, V_DUAL)
    with pytest.raises(ContextError):
        schouten_bracket(a, koszul_dual(a))
    with pytest.raises(ContextError):
        koszul_dual(koszul_dual(a))
    with pytest.raises(ContextError):
        maurer_cartan_check(a)


# Koszul duality -------------------------------------------------------------


def test_koszul_dual_examples():
    g = koszul_dual(QUADRATIC_2D)
    assert g.context == V_SHIFT
    # x1 x2 d1^d2  ->  xi1 xi2 d_xi1 d_xi2
    assert g.terms == {((1, 1), (1, 2)): 1}
    assert g.degree() == 1
    so3 = koszul_dual(SO3)
    assert so3.terms == {
        ((0, 0, 1), (1, 2)): 1,
        ((0, 1, 0), (1, 3)): -1,
        ((1, 0, 0), (2, 3)): 1,
    }
    assert koszul_dual_inverse(so3) == SO3.as_polyvector()


@given(data=st.data())
def test_koszul_dual_reverses_bracket(data):
    a, b = data.draw(homogeneous(V_DUAL)), data.draw(homogeneous(V_DUAL))
    K = koszul_dual
    assert schouten_bracket(K(a), K(b)) == K(schouten_bracket(a, b)).scale(K_BRACKET_SIGN)


# Poisson and Maurer-Cartan -------------------------------------------------


def _sympy_jacobiator(alpha: PoissonBivector):
    xs = sympy.symbols(f"x1:{alpha.n + 1}")

    def poly(d):
        return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod(x**k for x, k in zip(xs, e)) for e, c in d.items())

    P = [[poly(alpha.coefficient(i, j)) for j in range(1, alpha.n + 1)] for i in range(1, alpha.n + 1)]

    def br(f, g):
        return sympy.expand(sum(P[i][j] * sympy.diff(f, xs[i]) * sympy.diff(g, xs[j]) for i in range(alpha.n) for j in range(alpha.n)))

    out = {}
    for i, j, k in itertools.combinations(range(alpha.n), 3):
        val = sympy.expand(
            br(br(xs[i], xs[j]), xs[k]) + br(br(xs[j], xs[k]), xs[i]) + br(br(xs[k], xs[i]), xs[j])
        )
        if val != 0:
            terms = sympy.Poly(val, *xs).terms()
            out[(i + 1, j + 1, k + 1)] = {e: Fraction(int(c.p), int(c.q)) for e, c in terms}
    return out


def random_bivector(rng, n=3, max_deg=2):
    entries = {}
    monos = [e for e in itertools.product(range(max_deg + 1), repeat=n) if sum(e) <= max_deg]
    for i, j in itertools.combinations(range(1, n + 1), 2):
        entries[(i, j)] = {rng.choice(monos): rng.randint(-2, 2) for _ in range(2)}
    return PoissonBivector(n, entries)


def test_jacobiator_examples():
    assert jacobiator(SO3) == {}
    assert jacobiator(NON_JACOBI) == {(1, 2, 3): {(1, 0, 0): -1, (0, 1, 0): -1, (0, 0, 1): -1}}
    assert is_poisson(QUADRATIC_2D).is_poisson


def test_poisson_bracket_so3():
    x1, x2, x3 = ({tuple(int(i == k) for i in range(3)): Fraction(1)} for k in range(3))
    assert poisson_bracket(SO3, x1, x2) == x3
    assert poisson_bracket(SO3, x2, x1) == {(0, 0, 1): -1}


@given(st.integers(0, 10**6))
def test_jacobiator_matches_sympy(seed):
    alpha = random_bivector(random.Random(seed))
    assert jacobiator(alpha) == _sympy_jacobiator(alpha)


@given(st.integers(0, 10**6))
def test_square_is_minus_twice_jacobiator(seed):
    alpha = random_bivector(random.Random(seed))
    check = is_poisson(alpha)
    jac = check.jacobiator
    expected = Polyvector(
        alpha.n, {(e, ijk): -2 * c for ijk, poly in jac.items() for e, c in poly.items()}
    )
    assert check.square == expected
    assert check.is_poisson == (not jac)


@given(st.integers(0, 10**6))
def test_maurer_cartan_iff_poisson(seed):
    alpha = random_bivector(random.Random(seed))
    mc = maurer_cartan_check(koszul_dual(alpha))
    assert mc.satisfied == is_poisson(alpha).is_poisson
    assert mc.square == koszul_dual(is_poisson(alpha).square).scale(K_BRACKET_SIGN)


def test_maurer_cartan_degree_check():
    vector_field = koszul_dual(Polyvector(2, {((1, 0), (2,)): 1}))
    with pytest.raises(GradingError):
        maurer_cartan_check(vector_field)
    assert maurer_cartan_check(Polyvector.zero(2, V_SHIFT)).satisfied


def test_non_jacobi_fails():
    check = is_poisson(NON_JACOBI)
    assert not check.is_poisson
    assert not maurer_cartan_check(koszul_dual(NON_JACOBI)).satisfied


def test_bivector_validation():
    with pytest.raises(ValueError):
        PoissonBivector(2, {(1, 1): {(0, 0): 1}})
    flipped = PoissonBivector(2, {(2, 1): {(1, 0): 1}})
    assert flipped.coefficient(1, 2) == {(1, 0): -1}

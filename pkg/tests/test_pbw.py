import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbwcobar import linalg
from pbwcobar.errors import ContextError, GradingError, PreconditionError
from pbwcobar.pbw import (
    BUILTIN_LIE,
    LieAlgebra,
    RelationSet,
    check_square_zero,
    deformed_cobar,
    graded_dimensions,
    h0_presentation,
    normal_form,
    obstruction,
    pbw_check,
    relations_from_lie,
    relations_order1,
    solve_corrections,
)
from pbwcobar.polyvec import NON_JACOBI, QUADRATIC_2D, PoissonBivector, is_poisson
from pbwcobar.tensor import Element, Scalar, coordinates

X = coordinates(3)


def word(*idx):
    return tuple(X[i - 1] for i in idx)


def el(terms, M):
    """{(hbar power, index word): coefficient} -> Element."""
    return Element([(word(*w), Scalar.hbar_power(a, c, M)) for (a, w), c in terms.items()], M)


def random_lie(rng, n=3):
    consts = {}
    for i, j in itertools.combinations(range(1, n + 1), 2):
        consts[(i, j)] = {k: rng.randint(-1, 1) for k in range(1, n + 1)}
    return LieAlgebra(n, consts)


def jacobi_lie(rng):
    """Relabelings of the builtin Lie algebras, so Jacobi holds."""
    base = rng.choice(["abelian", "h3", "sl2", "so3"])
    g = BUILTIN_LIE[base]
    perm = rng.sample([1, 2, 3], 3)
    consts = {}
    for (i, j), row in g.constants.items():
        consts[(perm[i - 1], perm[j - 1])] = {perm[k - 1]: v for k, v in row.items()}
    return LieAlgebra(3, consts)


# normal forms -------------------------------------------------------------


def test_normal_form_examples():
    R = relations_from_lie(BUILTIN_LIE["h3"], 3)
    assert normal_form(word(2, 1), R) == el({(0, (1, 2)): 1, (1, (3,)): -1}, 3)
    assert normal_form(word(3, 2, 1), R) == el({(0, (1, 2, 3)): 1, (1, (3, 3)): -1}, 3)
    assert normal_form(word(1, 2, 3), R) == el({(0, (1, 2, 3)): 1}, 3)
    so3 = relations_from_lie(BUILTIN_LIE["so3"], 2)
    # x2 x1 = x1 x2 - hbar x3
    assert normal_form(word(2, 1), so3) == el({(0, (1, 2)): 1, (1, (3,)): -1}, 2)
    # x3 x1 = x1 x3 + hbar x2
    assert normal_form(word(3, 1), so3) == el({(0, (1, 3)): 1, (1, (2,)): 1}, 2)


def test_normal_form_rejects_foreign_letters():
    R = relations_from_lie(BUILTIN_LIE["h3"], 2)
    with pytest.raises(ContextError):
        normal_form((coordinates(4)[3],), R)


def _ideal_contains(R, vec, W):
    """Brute force: is vec (as {(a, word): c}) in the span of
    hbar^b u (x_i x_j - x_j x_i - R_ij) v of weight W = len + a?"""
    M, n = R.order, R.n
    ech = linalg.Echelon()
    for b in range(M + 1):
        L = W - b - 2
        if L < 0:
            continue
        for (i, j) in itertools.combinations(range(1, n + 1), 2):
            rel = {(0, (i, j)): Fraction(1), (0, (j, i)): Fraction(-1)}
            for w, c in R.relation(i, j).terms.items():
                for a in range(1, M + 1):
                    if c[a]:
                        k = (a, tuple(g.index[0] for g in w))
                        rel[k] = rel.get(k, 0) - c[a]
            for split in range(L + 1):
                for u in itertools.product(range(1, n + 1), repeat=split):
                    for v in itertools.product(range(1, n + 1), repeat=L - split):
                        g = {}
                        for (a, t), c in rel.items():
                            if a + b <= M:
                                g[(a + b, u + t + v)] = g.get((a + b, u + t + v), 0) + c
                        ech.add(g)
    return ech.contains(vec)


@pytest.mark.parametrize("name", ["h3", "sl2", "so3", "nonjacobi"])
def test_normal_form_is_congruent_mod_ideal(name):
    R = relations_from_lie(BUILTIN_LIE[name], 2)
    rng = random.Random(name)
    for _ in range(6):
        w = tuple(rng.randint(1, 3) for _ in range(3))
        nf = normal_form(word(*w), R)
        diff = {(0, w): Fraction(1)}
        for t, c in nf.terms.items():
            for a in range(3):
                if c[a]:
                    k = (a, tuple(g.index[0] for g in t))
                    diff[k] = diff.get(k, 0) - c[a]
        diff = {k: v for k, v in diff.items() if v}
        assert _ideal_contains(R, diff, 3)
        # normal forms only contain sorted words
        assert all(list(t) == sorted(t) for t in nf.terms)


@given(st.integers(0, 10**6))
def test_normal_form_idempotent_and_multiplicative(seed):
    rng = random.Random(seed)
    R = relations_from_lie(jacobi_lie(rng), 3)
    u = word(*(rng.randint(1, 3) for _ in range(2)))
    v = word(*(rng.randint(1, 3) for _ in range(2)))
    nu, nv = normal_form(u, R), normal_form(v, R)
    assert normal_form(nu, R) == nu
    assert normal_form(nu * nv, R) == normal_form(u + v, R)


@given(st.integers(0, 10**6))
def test_normal_form_truncation_is_stable(seed):
    rng = random.Random(seed)
    R = relations_from_lie(random_lie(rng), 4)
    w = word(*(rng.randint(1, 3) for _ in range(4)))
    full = normal_form(w, R)
    for M in (1, 2, 3):
        assert normal_form(w, R, M) == full.truncate(M)


# PBW verdicts ---------------------------------------------------------------


@pytest.mark.parametrize("name", ["abelian", "h3", "sl2", "so3"])
def test_lie_algebras_pass(name):
    rep = pbw_check(relations_from_lie(BUILTIN_LIE[name], 3), 4)
    assert rep.verdict and rep.confluent and rep.dims_match
    assert rep.dims == [1, 3, 6, 10, 15]
    assert rep.hbar_weight == (0 if name == "abelian" else 1)


def test_non_jacobi_fails_with_witness():
    rep = pbw_check(relations_from_lie(BUILTIN_LIE["nonjacobi"], 3), 4)
    assert not rep.verdict
    ov = rep.first_defect()
    assert ov.triple == (3, 2, 1) and ov.first_order == 2
    assert rep.dims[3] < 10
    assert all(d <= e for d, e in zip(rep.dims, rep.expected))


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_verdict_matches_jacobi(seed):
    g = random_lie(random.Random(seed))
    rep = pbw_check(relations_from_lie(g, 2), 3)
    assert rep.verdict == g.jacobi_verified
    assert rep.confluent == g.jacobi_verified
    for (k, d), v in rep.level_dims.items():
        assert 0 <= v <= math.comb(d + 2, 2)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_order_two_obstruction_matches_poisson(seed):
    rng = random.Random(seed)
    monos = [e for e in itertools.product(range(3), repeat=3) if sum(e) == 2]
    ent = {p: {rng.choice(monos): rng.randint(-1, 1) for _ in range(2)} for p in itertools.combinations((1, 2, 3), 2)}
    alpha = PoissonBivector(3, ent)
    R = relations_order1(alpha, 2)
    assert R.hbar_weight() == 0
    assert bool(obstruction(R, 2)) == (not is_poisson(alpha).is_poisson)


def test_obstruction_needs_lower_orders_clean():
    R = relations_from_lie(BUILTIN_LIE["nonjacobi"], 3)
    with pytest.raises(PreconditionError):
        obstruction(R, 3)
    assert obstruction(R, 2)[(3, 2, 1)]


def test_non_homogeneous_relations_skip_dimensions():
    M = 2
    R = RelationSet(3, {(1, 2): el({(1, (3,)): 1, (1, (3, 3)): 1}, M)}, M)
    rep = pbw_check(R, 3)
    assert rep.hbar_weight is None and rep.dims == [None] * 4
    assert rep.notes
    with pytest.raises(GradingError):
        graded_dimensions(R, 3)


def test_small_N_notes():
    rep = pbw_check(relations_from_lie(BUILTIN_LIE["nonjacobi"], 2), 2)
    assert not rep.verdict
    assert any("N < 3" in n for n in rep.notes)


def test_relation_validation():
    with pytest.raises(GradingError):
        RelationSet(3, {(1, 2): el({(0, (3,)): 1}, 2)}, 2)
    with pytest.raises(ValueError):
        RelationSet(3, {(2, 1): el({(1, (3,)): 1}, 2)}, 2)
    with pytest.raises(ContextError):
        RelationSet(3, {(1, 2): el({(1, (3,)): 1}, 3)}, 2)


# correction solver ---------------------------------------------------------


def test_corrections_two_dimensions():
    res = solve_corrections(relations_order1(QUADRATIC_2D, 3), 2)
    assert res.feasible and res.omega == {}


def test_corrections_linear_need_nothing():
    res = solve_corrections(relations_from_lie(BUILTIN_LIE["sl2"], 3), 2)
    assert res.feasible and res.omega == {}
    assert pbw_check(res.relations, 3, 3).verdict


def test_corrections_infeasible_without_jacobi():
    res = solve_corrections(relations_order1(NON_JACOBI, 3), 2)
    assert not res.feasible
    assert (3, 2, 1) in res.residual


def test_corrections_nontrivial():
    # Jacobian structure of phi = -x1^3 + 2 x1 x2 x3 with reversed word orders
    M = 3
    R = RelationSet(
        3,
        {
            (1, 2): el({(1, (2, 1)): 2}, M),
            (2, 3): el({(1, (1, 1)): -3, (1, (3, 2)): 2}, M),
            (1, 3): el({(1, (3, 1)): -2}, M),
        },
        M,
    )
    assert not pbw_check(R, 3).verdict
    res = solve_corrections(R, 2)
    assert res.feasible
    assert res.omega == {(1, 2): {word(1, 2): 4}}
    assert pbw_check(res.relations, 3, 3).verdict
    assert pbw_check(res.relations, 3, 2).verdict


def test_corrections_order_one_rejected():
    with pytest.raises(PreconditionError):
        solve_corrections(relations_from_lie(BUILTIN_LIE["h3"], 2), 1)


# deformed cobar and H^0 -----------------------------------------------------


@pytest.mark.parametrize("name", ["h3", "sl2", "so3"])
def test_h0_presentation_recovers_enveloping_algebra(name):
    g = BUILTIN_LIE[name]
    c = deformed_cobar(g, 3)
    assert check_square_zero(c, 3).ok
    R, rep = h0_presentation(c, 4)
    assert R == relations_from_lie(g, 3)
    assert rep.verdict


def test_h0_presentation_rejects_non_jacobi():
    c = deformed_cobar(BUILTIN_LIE["nonjacobi"], 3)
    chk = check_square_zero(c, 3)
    assert not chk.ok and chk.generator.index == (1, 2, 3)
    with pytest.raises(PreconditionError):
        h0_presentation(c, 3)


def test_deformed_differential_on_pair():
    c = deformed_cobar(BUILTIN_LIE["h3"], 2)
    x1, x2, x3 = (c.letter((i,)) for i in (1, 2, 3))
    d = c.d(Element.letter(c.letter((1, 2)), 2))
    expected = Element({(x1, x2): -1, (x2, x1): 1, (x3,): Scalar.hbar_power(1, 1, 2)}, 2)
    assert d == expected

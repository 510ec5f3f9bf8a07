from fractions import Fraction

import pytest

from pbwcobar.coalg import (
    EXTERIOR,
    SYMMETRIC,
    CoalgebraSpec,
    apply_in_slot,
    check_coassociativity,
    cocompleteness_filtration,
    coproduct,
    project,
    shuffle_sign,
)

S_FULL = CoalgebraSpec(SYMMETRIC, 2, reduced=False)
S_PLUS = CoalgebraSpec(SYMMETRIC, 3, reduced=True)
L_MINUS = CoalgebraSpec(EXTERIOR, 3, reduced=True)


def test_symmetric_coproducts():
    assert coproduct(S_FULL, (1, 2)) == {
        ((), (1, 2)): 1,
        ((1,), (2,)): 1,
        ((2,), (1,)): 1,
        ((1, 2), ()): 1,
    }
    assert coproduct(CoalgebraSpec(SYMMETRIC, 2), (1, 2)) == {((1,), (2,)): 1, ((2,), (1,)): 1}
    # repeated variables split by position
    assert coproduct(CoalgebraSpec(SYMMETRIC, 1), (1, 1)) == {((1,), (1,)): 2}


def test_exterior_coproduct_signs():
    assert coproduct(L_MINUS, (1, 2)) == {((1,), (2,)): 1, ((2,), (1,)): -1}
    assert coproduct(L_MINUS, (1,)) == {}
    d = coproduct(L_MINUS, (1, 2, 3))
    assert d[((2,), (1, 3))] == -1 and d[((1, 3), (2,))] == -1 and d[((3,), (1, 2))] == 1


def test_invalid_basis_rejected():
    with pytest.raises(ValueError):
        coproduct(L_MINUS, (2, 1))
    with pytest.raises(ValueError):
        coproduct(L_MINUS, ())


@pytest.mark.parametrize("kind", [SYMMETRIC, EXTERIOR])
@pytest.mark.parametrize("reduced", [True, False])
@pytest.mark.parametrize("dim", [1, 2, 3])
def test_coassociative(kind, reduced, dim):
    ok, witness = check_coassociativity(CoalgebraSpec(kind, dim, reduced), 4)
    assert ok and witness is None


def test_flipped_shuffle_sign_is_caught():
    def flipped(J, K):
        s = shuffle_sign(J, K)
        return -s if len(J) == 1 else s

    ok, witness = check_coassociativity(CoalgebraSpec(EXTERIOR, 3, True, flipped), 3)
    assert not ok and witness == (1, 2, 3)


def test_cocompleteness():
    assert cocompleteness_filtration(S_PLUS, (1, 2, 3), 10) == 3
    assert cocompleteness_filtration(L_MINUS, (1, 2), 10) == 2
    assert cocompleteness_filtration(S_PLUS, (1,), 10) == 1
    assert cocompleteness_filtration(S_PLUS, (1, 1, 2, 3), 2) is None
    with pytest.raises(ValueError):
        cocompleteness_filtration(S_FULL, (1,), 3)


def test_projection_is_a_coalgebra_map_but_inclusion_is_not():
    for w in range(1, 5):
        for b in S_FULL.basis(w):
            full = coproduct(S_FULL, b)
            plus = coproduct(CoalgebraSpec(SYMMETRIC, 2), b)
            # (p x p) Delta = Delta_+ p
            assert project(full) == plus
            # the inclusion misses exactly the two counit terms
            missing = {k: v for k, v in full.items() if k not in plus}
            assert missing == {((), b): 1, (b, ()): 1}


def test_apply_in_slot_signs_are_plain():
    t = {((1, 2), (3,)): Fraction(2)}
    assert apply_in_slot(L_MINUS, t, 0) == {((1,), (2,), (3,)): 2, ((2,), (1,), (3,)): -2}

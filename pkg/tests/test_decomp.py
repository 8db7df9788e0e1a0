from fractions import Fraction

import pytest

from shpoints.decomp import (ElemFactor, LevelIdeal, decompose,
                             decompose_unit_det, factors_from_text,
                             factors_to_text, lemma_factorization,
                             product_of, random_gamma1, ring_mat,
                             verify_product)
from shpoints.errors import PreconditionError
from shpoints.matrices import Mat2
from shpoints.quadfield import QuadElt
from shpoints.sintegers import SIntRing

R5 = SIntRing.z_inv_p(5)
LVL3 = LevelIdeal(R5, R5.elt(3))


def _om(a, b=0):
    F = SIntRing.quad_maximal(5)
    return QuadElt(5, a) + QuadElt(5, b) * F.omega()


def test_lemma_identity_matrix():
    # a = 1 forces the (1-a)-factors to vanish
    g = ring_mat(R5, (1, 0, 0, 1))
    fs = lemma_factorization(g, R5.elt(1), R5.elt(-1), LVL3)
    assert verify_product(fs, g, R5)


def test_lemma_symbolic_first_column():
    # T*gamma must be upper unipotent: built into the postcondition
    g = ring_mat(R5, (4, 3, 9, 7))
    # c = u + t*a with u = 5^10, t = (9 - 5^10)/4... choose exact instance:
    # pick u = -1: t = (9 + 1)/4 not integral; u = 25: t = (9-25)/4 = -4
    fs = lemma_factorization(g, R5.elt(25), R5.elt(-4), LVL3)
    assert verify_product(fs, g, R5)
    for f in fs:
        f.check_membership(LVL3)


def test_lemma_precondition():
    g = ring_mat(R5, (4, 3, 9, 7))
    with pytest.raises(PreconditionError):
        lemma_factorization(g, R5.elt(25), R5.elt(1), LVL3)


def test_trivial_cases():
    assert decompose(ring_mat(R5, (1, 7, 0, 1)), LVL3)[0].tag == "U"
    assert decompose(ring_mat(R5, (1, 0, 6, 1)), LVL3)[0].tag == "L"
    assert decompose(ring_mat(R5, (1, 0, 0, 1)), LVL3) == []
    with pytest.raises(PreconditionError):
        decompose(ring_mat(R5, (1, 0, 5, 1)), LVL3)  # c not in level


def test_degenerate_c_zero():
    g = ring_mat(R5, (25, 1, 0, Fraction(1, 25)))
    fs = decompose(g, LVL3)
    assert verify_product(fs, g, R5)


def test_random_words_decompose():
    for seed in range(40):
        w = random_gamma1(LVL3, 6, seed, height=2)
        fs = decompose(w, LVL3)
        assert len(fs) <= 5
        assert verify_product(fs, w, R5)
        for f in fs:
            f.check_membership(LVL3)


def test_other_levels():
    for p, M in [(3, 7), (11, 3), (7, 5), (3, 17), (3, 35)]:
        R = SIntRing.z_inv_p(p)
        lvl = LevelIdeal(R, R.elt(M))
        for seed in range(6):
            w = random_gamma1(lvl, 5, seed, height=2)
            fs = decompose(w, lvl)
            assert len(fs) <= 5 and verify_product(fs, w, R)


def test_membership_preserved_by_lambda_shift():
    # gamma' = U(lambda) gamma keeps a' = 1, c' = 0 mod level
    w = random_gamma1(LVL3, 5, 123, height=2)
    shifted = ring_mat(R5, (1, 4, 0, 1)) * w
    one = R5.one().value
    assert LVL3.contains(R5.elt(shifted.a - one))
    assert LVL3.contains(R5.elt(shifted.c))


def test_word_entry_growth():
    import math
    sizes = []
    for L in (2, 4, 6, 8):
        w = random_gamma1(LVL3, L, 7, height=2)
        m = max(abs(Fraction(e).numerator) for e in w.entries())
        sizes.append(max(m, 2))
    # roughly exponential: log-size grows
    assert math.log(sizes[-1]) > math.log(sizes[0])


def test_quadratic_unit_det_example():
    """The Q(sqrt5) matrix with unit determinant omega + 1."""
    F = SIntRing.quad_maximal(5)
    lvl = LevelIdeal(F, F.elt(QuadElt(5, 6, 1)))
    g = Mat2(_om(-18, 11), _om(10, -6), _om(-10, -4), _om(6, 3))
    assert g.det() == _om(1, 1)
    fs = decompose_unit_det(g, lvl)
    assert verify_product(fs, g, F)
    for f in fs:
        f.check_membership(lvl)
    assert fs[-1].tag == "D"
    assert len(fs) <= 6
    # serialization roundtrip
    txt = factors_to_text(fs)
    assert verify_product(factors_from_text(txt, F), g, F)


def test_unit_det_reduces_to_det1():
    g = ring_mat(R5, (4, 3, 9, 7))
    assert [f.tag for f in decompose_unit_det(g, LVL3)] == \
        [f.tag for f in decompose(g, LVL3)]


def test_pure_unit_diag():
    g = ring_mat(R5, (1, 0, 0, 25))
    fs = decompose_unit_det(g, LVL3)
    assert [f.tag for f in fs] == ["D"]
    assert verify_product(fs, g, R5)


def test_verify_product_trivia():
    assert verify_product([], Mat2(Fraction(1), Fraction(0), Fraction(0),
                                   Fraction(1)), R5)
    f = ElemFactor("U", R5.elt(Fraction(7, 5)))
    assert verify_product([f], f.matrix(), R5)


def test_serialization_rational():
    w = random_gamma1(LVL3, 5, 9, height=2)
    fs = decompose(w, LVL3)
    back = factors_from_text(factors_to_text(fs), R5)
    assert verify_product(back, w, R5)

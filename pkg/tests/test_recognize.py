import random
from fractions import Fraction

from shpoints.darmon import TateCurve, darmon_point, find_embeddings, tate_q
from shpoints.modsym import ec_neg
from shpoints.padic import PadicElt, embed_quad, hensel_sqrt
from shpoints.quadfield import QuadElt
from shpoints.recognize import (IntLattice, _quad_from_sqrtD, is_size_reduced,
                                lattice_reduce, match_global_point,
                                recognize_degree2_over_K, recognize_quadratic)
from shpoints.tables import find_row


def test_lll_orthogonal_unchanged():
    L = IntLattice([[3, 0, 0], [0, 1, 0], [0, 0, 2]])
    R = lattice_reduce(L)
    rows = sorted(tuple(map(abs, r)) for r in R.basis)
    assert rows == [(0, 0, 2), (0, 1, 0), (3, 0, 0)]


def test_lll_det_preserved_and_reduced():
    def det3(b):
        (a, b_, c), (d, e, f), (g, h, i) = b
        return a * (e * i - f * h) - b_ * (d * i - f * g) + c * (d * h - e * g)
    L = IntLattice([[101, 57, 33], [57, 38, 19], [33, 19, 99]])
    R = lattice_reduce(L)
    assert abs(det3(R.basis)) == abs(det3(L.basis))
    assert is_size_reduced(R)


def test_lll_planted_short_vector():
    big = [[2, -1, 3], [1000, 999, 0], [0, 995, 1003]]
    R = lattice_reduce(IntLattice(big))
    # brute-force shortest vector on the small instance
    best = None
    for a in range(-8, 9):
        for b in range(-8, 9):
            for c in range(-8, 9):
                if (a, b, c) == (0, 0, 0):
                    continue
                v = [a * big[0][i] + b * big[1][i] + c * big[2][i]
                     for i in range(3)]
                n = sum(x * x for x in v)
                if best is None or n < best:
                    best = n
    n0 = sum(x * x for x in R.basis[0])
    assert n0 <= 2 * best  # within the LLL guarantee for dim 3


def test_recognize_quadratic_roundtrips():
    rng = random.Random(1)
    p = 5
    done = 0
    while done < 30:
        D = rng.choice([13, 28, 37, 8, 73, 97])
        if D % p == 0 or pow(D % p, (p - 1) // 2, p) != p - 1:
            continue
        n2 = rng.randint(1, 100)
        n0 = rng.randint(-100, 100)
        n1 = rng.randint(-100, 100)
        val = _quad_from_sqrtD(D, Fraction(n0, n2), Fraction(n1, n2))
        x = embed_quad(p, val, 14)
        if x.zero or x.v < 0:
            continue
        rec = recognize_quadratic(x, D, 100, 12)
        assert rec == val
        done += 1


def test_recognize_exact_and_table_value():
    x = embed_quad(5, QuadElt(13, 2, 3), 14)
    assert recognize_quadratic(x, 13, 100, 12) == QuadElt(13, 2, 3)
    # the X-coordinate of the known 15A1 point over Q(sqrt 13)
    x = embed_quad(5, QuadElt(13, 1, -1), 14)
    assert recognize_quadratic(x, 13, 100, 12) == QuadElt(13, 1, -1)


def test_recognize_rejects_junk():
    x = PadicElt.from_pair(5, 0, 123456789, 987654321, 12)
    assert recognize_quadratic(x, 13, 50, 12) is None


def test_degree2_table_polynomial():
    row = find_row("21A1", 65)
    beta, gamma = row.data["b"], row.data["c"]
    b3 = embed_quad(3, beta, 44)
    g3 = embed_quad(3, gamma, 44)
    root = (-b3 + hensel_sqrt(b3 * b3 - 4 * g3)) / 2
    rec = recognize_degree2_over_K(root, 65, 10 ** 7, 40)
    assert rec is not None
    rb, rg = rec
    assert rb == beta and rg == gamma


def test_degree2_reducible_plants_linear_root():
    val = _quad_from_sqrtD(65, Fraction(3, 7), Fraction(2, 7))
    x = embed_quad(3, val, 30)
    assert recognize_quadratic(x, 65, 200, 26) == val


def test_degree2_none_for_junk():
    x = PadicElt.from_pair(3, 0, 2 ** 61 % 3 ** 40, 3 ** 39 - 7, 40)
    assert recognize_degree2_over_K(x, 65, 1000, 36) is None


def _point15(setup15, prec=6, depth=4):
    emb = find_embeddings(setup15, 13, count=1, prec=18)[0]
    return darmon_point(setup15, emb, prec=prec, depth=depth)


def test_match_self(setup15):
    pt = _point15(setup15)
    from shpoints.integrate import recover_value
    u = recover_value(pt.J)
    P = pt.tate.point_from_u(u)
    # matching the point we just produced must give n = m' = 1-type relation
    from shpoints.recognize import MatchResult
    from shpoints.padic import padic_log
    uP = pt.tate.u_from_point(P)
    lu = padic_log(uP)
    d = lu - pt.J.log_value
    k, rem = divmod(int(uP.v - pt.J.valuation), pt.tate.vq)
    assert rem == 0
    lq = padic_log(pt.tate.q)
    diff = lu - pt.J.log_value - k * lq
    assert diff.zero or diff.v >= 4


def test_match_table_row(setup15):
    pt = _point15(setup15)
    row = find_row("15A1", 13)
    verdict = match_global_point(pt.J, pt.multiplier, row.point(), pt.tate,
                                 prec=4)
    assert verdict.matched
    assert abs(verdict.n) <= 20 and abs(verdict.m) <= 20


def test_match_negated_point(setup15):
    pt = _point15(setup15)
    row = find_row("15A1", 13)
    E = setup15.curve
    P = row.point()
    negP = ec_neg(E, P)
    v1 = match_global_point(pt.J, pt.multiplier, P, pt.tate, prec=4)
    v2 = match_global_point(pt.J, pt.multiplier, negP, pt.tate, prec=4)
    # negation is absorbed by the signed (m', embedding) search
    assert v1.matched and v2.matched

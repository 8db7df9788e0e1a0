import random
from fractions import Fraction

import pytest

from shpoints.errors import PreconditionError
from shpoints.integrate import (Ball, MeasureCtx, ball_moments, gbar,
                                recover_value, riemann_double_integral,
                                series_double_integral, split_value,
                                standard_cover, unit_result)
from shpoints.matrices import Cusp, Mat2
from shpoints.padic import PadicElt, embed_quad
from shpoints.quadfield import QuadElt


@pytest.fixture(scope="module")
def ctx15(sym15):
    return MeasureCtx(sym15, Cusp(1, 0), Cusp(0))


@pytest.fixture(scope="module")
def tau_pair(setup15):
    from shpoints.darmon import find_embeddings, gamma_tau
    emb = find_embeddings(setup15, 13, count=1, prec=16)[0]
    tau = emb.tau
    L = Mat2(Fraction(1), Fraction(0), Fraction(6), Fraction(1))
    return tau, L.inverse().act(tau)


def test_total_measure_zero(ctx15):
    assert ctx15.measure(Mat2(1, 0, 0, 1)) + ctx15.measure(Mat2(0, 1, 5, 0)) == 0


def test_complement_negates(ctx15):
    rng = random.Random(9)
    for _ in range(20):
        g = Mat2(*(rng.randint(-40, 40) for _ in range(4)))
        if g.det() == 0:
            continue
        ball = Ball(g)
        assert ctx15.measure_of_ball(ball) == -ctx15.measure_of_ball(
            ball.complement(5))


def test_child_additivity(ctx15):
    rng = random.Random(10)
    done = 0
    while done < 40:
        g = Mat2(*(rng.randint(-60, 60) for _ in range(4)))
        if g.det() == 0:
            continue
        ball = Ball(g)
        kids = sum(ctx15.measure_of_ball(b) for b in ball.children(5))
        assert ctx15.measure_of_ball(ball) == kids
        done += 1


def test_gbar():
    assert gbar(Mat2(1, 0, 0, 1)) == Mat2(Fraction(0), Fraction(-1),
                                          Fraction(1), Fraction(0))
    rng = random.Random(11)
    for _ in range(15):
        g = Mat2(*(rng.randint(-9, 9) for _ in range(4)))
        h = Mat2(*(rng.randint(-9, 9) for _ in range(4)))
        if g.det() == 0 or h.det() == 0:
            continue
        assert gbar(h * g) == gbar(g) * h.inverse()


def test_cover_structure(setup15, tau_pair):
    tau, tauB = tau_pair
    cov = standard_cover(tau, tauB)
    p = 5
    assert len(cov.balls) == p + 1 + cov.r * (p - 1)
    # every ball satisfies the series valuation conditions
    ht1 = cov.h.act(tau)
    ht2 = cov.h.act(tauB)
    for g in cov.balls:
        gb = gbar(g)
        A = gb.act(ht2)
        B = gb.act(ht1)
        assert A is None or A.zero or A.v >= 1
        assert B is None or B.zero or B.v >= 1


def test_cover_r1_size():
    # engineered tau2 with r = 1: congruent to an integer mod p exactly
    p = 5
    w = PadicElt.from_pair(p, 0, 2, 1, 12)          # residue not in F_p
    tau1 = w
    tau2 = PadicElt.from_pair(p, 0, 3, p, 12)       # 3 + 5w: r = 1
    cov = standard_cover(tau1, tau2)
    assert cov.r == 1
    assert len(cov.balls) == 2 * p


def test_cover_disjoint_exhaustive(setup15, tau_pair):
    tau, tauB = tau_pair
    cov = standard_cover(tau, tauB)
    p = 5
    D = cov.r + 2

    def vp(n):
        if n == 0:
            return 10 ** 9
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    def in_ball(ball, num, den):
        x = ball.d * num - ball.b * den
        y = -ball.c * num + ball.a * den
        if y == 0:
            return False
        return vp(x) >= vp(y)

    for c in range(p ** D):
        assert sum(1 for b in cov.balls if in_ball(b, c, 1)) == 1
    for c in range(p ** (D - 1)):
        assert sum(1 for b in cov.balls if in_ball(b, 1, p * c)) == 1


def test_degenerate_tau_rejected(ctx15):
    t1 = PadicElt.from_int(5, 7, 10)  # rational
    t2 = PadicElt.from_pair(5, 0, 2, 1, 10)
    with pytest.raises(PreconditionError):
        standard_cover(t1, t2)


def test_ball_moments_consistency(ctx15):
    ball = Ball(Mat2(25, 3, 0, 1))
    m4 = ball_moments(ctx15, ball, 5, 4)
    m6 = ball_moments(ctx15, ball, 5, 6)
    assert m4[0] == PadicElt.from_int(5, ctx15.measure_of_ball(ball), 4)
    for a, b in zip(m4, m6):
        assert a.eq_mod(b, 4)


def test_moments_child_reassembly(ctx15):
    # moments of the ball from binomially-shifted child moments
    from math import comb
    p = 5
    ball = Ball(Mat2(1, 0, 0, 1))
    depth = 4
    n_max = 4
    mod = p ** depth
    whole = ctx15.moments(ball.g, depth, n_max, mod)
    acc = [0] * (n_max + 1)
    for a in range(p):
        child = Mat2(p, a, 0, 1)
        cm = ctx15.moments(ball.g * child, depth - 2, n_max, mod)
        # t in child means a + p*t in the parent
        for n in range(n_max + 1):
            for k in range(n + 1):
                acc[n] += comb(n, k) * a ** (n - k) * p ** k * cm[k]
    for n in range(n_max + 1):
        assert (acc[n] - whole[n]) % p ** (depth - 2) == 0


def test_riemann_vs_series(ctx15, tau_pair):
    tau, tauB = tau_pair
    r1 = riemann_double_integral(ctx15, tau, tauB, 4)
    r2 = series_double_integral(ctx15, tau, tauB, 6, moment_depth=4)
    assert r1.valuation == r2.valuation
    assert r1.log_value.eq_mod(r2.log_value, 4)
    d = r1.teich - r2.teich
    assert d.zero or d.v >= 1


def test_trivial_and_swap(ctx15, tau_pair):
    tau, tauB = tau_pair
    r0 = series_double_integral(ctx15, tau, tau, 5)
    assert r0.valuation == 0 and r0.log_value.zero
    r = series_double_integral(ctx15, tau, tauB, 5, moment_depth=4)
    rswap = series_double_integral(ctx15, tauB, tau, 5, moment_depth=4)
    assert r.valuation == -rswap.valuation
    s = r.log_value + rswap.log_value
    assert s.zero or s.v >= 4


def test_endpoint_additivity(sym15, tau_pair):
    # result(r->s) * result(s->t) = result(r->t)
    tau, tauB = tau_pair
    r, s, t = Cusp(1, 0), Cusp(0), Cusp(1, 3)
    v1 = series_double_integral(MeasureCtx(sym15, r, s), tau, tauB, 4,
                                moment_depth=4)
    v2 = series_double_integral(MeasureCtx(sym15, s, t), tau, tauB, 4,
                                moment_depth=4)
    v3 = series_double_integral(MeasureCtx(sym15, r, t), tau, tauB, 4,
                                moment_depth=4)
    comb = v1 * v2
    assert comb.valuation == v3.valuation
    d = comb.log_value - v3.log_value
    assert d.zero or d.v >= 4


def test_recover_roundtrip(ctx15, tau_pair):
    tau, tauB = tau_pair
    res = series_double_integral(ctx15, tau, tauB, 5, moment_depth=4)
    val = recover_value(res)
    back = split_value(val)
    assert back.valuation == res.valuation
    d = back.log_value - res.log_value
    assert d.zero or d.v >= 4
    assert (back.teich - res.teich).zero or (back.teich - res.teich).v >= 1


def test_recover_trivial():
    one = unit_result(5, 6)
    assert recover_value(one) == PadicElt.from_int(5, 1, 6)


def test_riemann_recover_matches_raw_product(ctx15, tau_pair):
    # recover(riemann result) equals the literal Riemann product mod p^depth
    tau, tauB = tau_pair
    depth = 3
    p = 5
    res = riemann_double_integral(ctx15, tau, tauB, depth)
    val = recover_value(res)
    prod = PadicElt.from_int(p, 1, 12)
    cells = [Mat2(p ** depth, c, 0, 1) for c in range(p ** depth)]
    cells += [Mat2(0, 1, p, 0) * Mat2(p ** (depth - 1), c, 0, 1)
              for c in range(p ** (depth - 1))]
    for g in cells:
        mu = ctx15.measure(g)
        if mu == 0:
            continue
        n = g.a * 0 + g.b
        d = g.c * 0 + g.d
        if d == 0:
            continue
        x = PadicElt.from_fraction(p, Fraction(int(n), int(d)), 12)
        prod = prod * ((x - tauB) / (x - tau)) ** mu
    assert val.v == prod.v
    d = val / prod - 1
    assert d.zero or d.v >= depth - abs(int(res.valuation))

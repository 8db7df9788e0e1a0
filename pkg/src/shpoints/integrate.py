"""Measures on P^1(Q_p) and multiplicative double integrals.

Two evaluators are provided: a plain Riemann product over a depth-level
cell decomposition, and the power-series method on the explicit cover
with p + 1 + r(p-1) opens, whose log pairs series coefficients against
moments of the measure.  Moments are computed by finite-depth Riemann
sums; the polynomial-time overconvergent lifting is deliberately out of
scope.

Results are carried as (valuation, log, Teichmuller) triples, never as
raw elements of K_p^x, so large valuations cost no precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .errors import PreconditionError, PrecisionError
from .matrices import Cusp, Mat2
from .modsym import NewformSymbol
from .padic import PadicElt, padic_exp, padic_log, teichmuller


@dataclass(frozen=True)
class Ball:
    """The open g*Z_p in P^1(Q_p), g an integral invertible matrix."""

    g: Mat2
    depth: int = 0

    def children(self, p: int):
        return [Ball(self.g * Mat2(p, a, 0, 1), self.depth + 1)
                for a in range(p)]

    def complement(self, p: int) -> "Ball":
        return Ball(self.g * Mat2(0, 1, p, 0), self.depth)


class MeasureCtx:
    """mu_f{r -> s} on P^1(Q_p) for a fixed symbol and cusp pair."""

    def __init__(self, symbol: NewformSymbol, r: Cusp, s: Cusp):
        if symbol.curve.p is None:
            raise PreconditionError("symbol's curve has no prime p attached")
        self.symbol = symbol
        self.p = symbol.curve.p
        self.r = r
        self.s = s

    def measure(self, g: Mat2) -> int:
        return kernels.measure_ball(
            int(g.a), int(g.b), int(g.c), int(g.d), self.p,
            self.r.n, self.r.d, self.s.n, self.s.d,
            self.symbol.N, self.symbol.p1.idx_of, self.symbol.values)

    def measure_of_ball(self, ball: Ball) -> int:
        return self.measure(ball.g)

    def moments(self, g: Mat2, depth: int, n_max: int, mod: int):
        """[int t^n dmu(g t)]_{n=0..n_max} by depth-level Riemann sums."""
        if depth % 2:
            depth += 1  # odd cell levels would re-expand inside the kernel
        return kernels.moments_ball(
            int(g.a), int(g.b), int(g.c), int(g.d), self.p, depth, n_max,
            mod, self.r.n, self.r.d, self.s.n, self.s.d,
            self.symbol.N, self.symbol.p1.idx_of, self.symbol.values)


def ball_moments(ctx: MeasureCtx, ball: Ball, n_max: int, depth: int,
                 prec: int | None = None):
    """Moments of mu at the ball as PadicElt values (exact mod p^prec)."""
    p = ctx.p
    prec = prec if prec is not None else depth
    mod = p ** (prec + 2)
    raw = ctx.moments(ball.g, depth, n_max, mod)
    return [PadicElt.from_int(p, m, prec + 2).at_absprec(prec)
            if m else PadicElt.zero_elt(p, prec, deg=2) for m in raw]


def gbar(g: Mat2) -> Mat2:
    """(0 -1; 1 0) * g^{-1}; satisfies gbar(h*g) = gbar(g)*h^{-1}."""
    return Mat2(Fraction(0), Fraction(-1), Fraction(1), Fraction(0)) * g.inverse()


@dataclass
class MultIntResult:
    """A K_p^x value split as p^valuation * teich * exp(log_value)."""

    valuation: Fraction
    log_value: PadicElt
    teich: PadicElt
    prec: int

    def __mul__(self, other: "MultIntResult") -> "MultIntResult":
        return MultIntResult(self.valuation + other.valuation,
                             self.log_value + other.log_value,
                             self.teich * other.teich,
                             min(self.prec, other.prec))

    def __pow__(self, n: int) -> "MultIntResult":
        t = self.teich ** n if n >= 0 else (self.teich.inverse()) ** (-n)
        return MultIntResult(self.valuation * n, self.log_value * n, t, self.prec)

    def inverse(self) -> "MultIntResult":
        return self ** (-1)


def unit_result(p: int, prec: int) -> MultIntResult:
    one = PadicElt.from_int(p, 1, prec)
    return MultIntResult(Fraction(0), PadicElt.zero_elt(p, prec, deg=2), one, prec)


def split_value(x: PadicElt, prec: int | None = None) -> MultIntResult:
    if x.zero:
        raise PreconditionError("cannot split zero")
    prec = prec if prec is not None else x.N
    u = x.unit_part()
    return MultIntResult(Fraction(x.v), padic_log(x), teichmuller(u), prec)


def recover_value(res: MultIntResult) -> PadicElt:
    """p^v * teich * exp(log); valuation must be integral by now."""
    if res.valuation.denominator != 1:
        raise PrecisionError("half-integral valuation not yet resolved; "
                             "square the result first")
    p = res.teich.p
    v = int(res.valuation)
    out = res.teich * padic_exp(res.log_value)
    if v:
        out = out * PadicElt(p, 1, v, 1, 0, out.N)
    return out


# -- the standard cover -------------------------------------------------------

@dataclass
class StandardCover:
    h: Mat2              # normalizing map, exact rational entries
    hinv_int: Mat2       # integer-scaled inverse of h
    balls: list[Mat2]    # cover of P^1 in h-normalized coordinates
    r: int               # congruence depth of tau2 to an integer


def _xy_parts(tau: PadicElt):
    """tau = x + y*w with x, y in Q_p; returns (vx, vy) valuations."""
    if tau.zero:
        raise PreconditionError("tau must be nonzero")
    p, N = tau.p, tau.N
    vx = tau.v + (_vp_mod(tau.u0, p, N))
    vy = tau.v + (_vp_mod(tau.u1, p, N))
    return vx, vy


def _vp_mod(u: int, p: int, N: int) -> int:
    if u % p ** N == 0:
        return N  # indistinguishable from 0 at working precision
    v = 0
    while u % p == 0:
        u //= p
        v += 1
    return v


def _x_truncation(tau: PadicElt, level: int) -> int:
    """Integer congruent to the rational component of tau mod p^level."""
    if level <= 0:
        return 0
    p = tau.p
    if tau.v < 0:
        raise PreconditionError("x-part not integral")
    return tau.u0 * p ** tau.v % p ** level


def _normalizer(tau1: PadicElt, tau2: PadicElt):
    """h in GL2(Q) with v(h tau1 - a) = 0 for all integers a and
    v(h tau2) >= 0.

    A translation/scaling always arranges the tau1 conditions (they say the
    normalized tau1 reduces onto no F_p-point); if tau2 then sits in the
    direction of infinity, the root-fixing inversion z -> -1/z moves it
    inside Z_p without disturbing tau1's residue conditions.
    """
    p = tau1.p
    vx, vy = _xy_parts(tau1)
    m0 = min(vx, vy)
    h = _scale_map(p, m0)
    t1a = h.act(tau1)
    vx, vy = _xy_parts(t1a)
    if vy != 0:
        n = _x_truncation(t1a, vy)
        h = Mat2(Fraction(1), Fraction(-n), Fraction(0), Fraction(p) ** vy) * h
    t1b = h.act(tau1)
    vx1, vy1 = _xy_parts(t1b)
    if not (vy1 == 0 and vx1 >= 0):
        raise PreconditionError("could not normalize tau1 for the cover")
    t2b = h.act(tau2)
    if t2b is None or t2b.zero:
        raise PreconditionError("tau2 degenerates under the normalizer")
    if min(_xy_parts(t2b)) < 0:
        h = Mat2(Fraction(0), Fraction(-1), Fraction(1), Fraction(0)) * h
        t1c = h.act(tau1)
        vx1, vy1 = _xy_parts(t1c)
        assert vy1 == 0 and vx1 >= 0
        t2c = h.act(tau2)
        if t2c is None or t2c.zero or min(_xy_parts(t2c)) < 0:
            raise PreconditionError("could not normalize (tau1, tau2)")
    return h


def _scale_map(p: int, k: int) -> Mat2:
    # z -> z / p^k
    return Mat2(Fraction(1), Fraction(0), Fraction(0), Fraction(p) ** k)


def _int_scaled(m: Mat2) -> Mat2:
    """Clear denominators to get an integer matrix (projectively equal)."""
    den = 1
    for e in m.entries():
        den = den * Fraction(e).denominator // _gcd(den, Fraction(e).denominator)
    return Mat2(*(int(Fraction(e) * den) for e in m.entries()))


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def standard_cover(tau1: PadicElt, tau2: PadicElt) -> StandardCover:
    """The explicit cover adapted to (tau1, tau2); p+1+r(p-1) opens."""
    p = tau1.p
    if tau1.is_rational() or tau2.is_rational():
        raise PreconditionError("tau must lie outside P^1(Q_p) "
                                "(w-component vanishes at working precision)")
    h = _normalizer(tau1, tau2)
    t1 = h.act(tau1)
    t2 = h.act(tau2)
    _, vy2 = _xy_parts(t2)
    if vy2 > t2.N - 2:
        raise PrecisionError("tau2 sits closer to a rational than the "
                             "working precision resolves; deepen tau")
    r = max(0, vy2)
    balls = []
    for i in range(1, r + 1):
        ti = _x_truncation(t2, i)
        for b in range(1, p):
            balls.append(Mat2(p ** i, ti + b * p ** (i - 1), 0, 1))
    tr = _x_truncation(t2, r) if r else 0
    for b in range(p):
        balls.append(Mat2(p ** (r + 1), tr + b * p ** r, 0, 1))
    balls.append(Mat2(0, 1, p, 0))
    assert len(balls) == p + 1 + r * (p - 1)
    hint = _int_scaled(h)
    return StandardCover(h=h, hinv_int=hint.adjugate(), balls=balls, r=r)


# -- evaluators ----------------------------------------------------------------

# sample preimages, all inside Z_p (p odd)
CUSP_PROBES = (Cusp(0), Cusp(1), Cusp(2), Cusp(3), Cusp(1, 2), Cusp(5))


def _split_sample(x: PadicElt, tau1, tau2, prec):
    """(v, log, teich) of (x - tau2)/(x - tau1), or None on collision."""
    num = (-tau2) + x
    den = (-tau1) + x
    if num.zero or den.zero:
        return None  # collision at working precision; caller re-centers
    return split_value(num / den, prec)


def riemann_double_integral(ctx: MeasureCtx, tau1: PadicElt, tau2: PadicElt,
                            depth: int) -> MultIntResult:
    """Riemann product over all depth-level cells; ~depth digits."""
    if depth < 1:
        raise PreconditionError("depth >= 1")
    p = ctx.p
    prec = min(tau1.N, tau2.N)
    total = unit_result(p, depth)
    cells = [Mat2(p ** depth, c, 0, 1) for c in range(p ** depth)]
    cells += [Mat2(0, 1, p, 0) * Mat2(p ** (depth - 1), c, 0, 1)
              for c in range(p ** (depth - 1))]
    for g in cells:
        mu = ctx.measure(g)
        if mu == 0:
            continue
        split = None
        at_infinity = False
        for probe in CUSP_PROBES:
            n = g.a * probe.n + g.b * probe.d
            d = g.c * probe.n + g.d * probe.d
            if d == 0:
                at_infinity = n != 0  # integrand tends to 1 at infinity
                if at_infinity:
                    break
                continue
            x = PadicElt.from_fraction(p, Fraction(int(n), int(d)), prec)
            split = _split_sample(x, tau1, tau2, prec)
            if split is not None:
                break
        if at_infinity:
            continue
        if split is None:
            raise PrecisionError("no collision-free sample point in cell")
        total = total * (split ** mu)
    total.prec = min(total.prec, depth)
    return total


def series_double_integral(ctx: MeasureCtx, tau1: PadicElt, tau2: PadicElt,
                           prec: int, moment_depth: int | None = None
                           ) -> MultIntResult:
    """Power-series evaluation over the standard cover.

    For each cover ball with matrix g = (a b; 0 d) (or the complement),
    the integrand is alpha0 * (1 + A t)/(1 + B t) with A = gbar(tau2),
    B = gbar(tau1) of valuation >= 1, so its log pairs term by term with
    the moments of the measure at the ball.
    """
    p = ctx.p
    if moment_depth is None:
        moment_depth = prec
    work = prec + 3
    t1, t2 = tau1, tau2  # keep full precision: tau may sit near a rational
    cover = standard_cover(t1, t2)
    ht1 = cover.h.act(t1)
    ht2 = cover.h.act(t2)
    n_max = prec + _base_digits(prec, p) + 2
    mod = p ** (work + _base_digits(n_max, p) + 2)
    total = unit_result(p, prec)
    for g in cover.balls:
        gb = gbar(g)
        A = gb.act(ht2)
        B = gb.act(ht1)
        if A is None or B is None or (not A.zero and A.v < 1) \
                or (not B.zero and B.v < 1):
            raise PrecisionError("cover ball violates the series valuation "
                                 "condition; normalization bug")
        alpha0 = (g.b - g.d * ht2) / (g.b - g.d * ht1)
        Q = cover.hinv_int * g
        mu = ctx.measure(Q)
        moments = ctx.moments(Q, moment_depth, n_max, mod)
        contrib_log = PadicElt.zero_elt(p, work, deg=2)
        if mu:
            contrib_log = contrib_log + mu * padic_log(alpha0)
        mod_exp = work + _base_digits(n_max, p) + 2
        Apow, Bpow = A, B
        for n in range(1, n_max + 1):
            if moments[n]:
                mn = PadicElt.from_int(p, moments[n], mod_exp).at_absprec(mod_exp)
                term = (Apow - Bpow) / n * mn
                if n % 2 == 0:
                    term = -term
                contrib_log = contrib_log + term
            Apow = Apow * A
            Bpow = Bpow * B
        total.log_value = total.log_value + contrib_log
        if mu:
            total.valuation += mu * alpha0.v
            total.teich = total.teich * teichmuller(alpha0.unit_part()) ** mu
    total.log_value = total.log_value.at_absprec(min(work, moment_depth + 1))
    total.prec = min(prec, moment_depth + 1)
    return total


def _base_digits(n: int, p: int) -> int:
    d = 0
    while n:
        n //= p
        d += 1
    return d

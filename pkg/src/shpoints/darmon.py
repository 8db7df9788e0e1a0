"""Assembly of p-adic Darmon points.

Pipeline: Atkin-Lehner setup -> optimal embedding of the real quadratic
order -> stabilizer generator gamma_tau -> reduction into Gamma_1(M Z[1/p])
-> elementary decomposition -> a plan of definite double integrals -> J ->
Tate uniformization -> a local point on E(K_p).

The semi-indefinite integral never materializes: the factor-by-factor
rewriting turns it into definite double integrals directly, and the
integer multiplier picked up along the way is carried in the result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .decomp import ElemFactor, LevelIdeal, decompose, ring_mat
from .errors import (InapplicableFieldError, PreconditionError,
                     PrecisionError)
from .integrate import (MeasureCtx, MultIntResult, recover_value,
                        riemann_double_integral, series_double_integral,
                        split_value, unit_result)
from .matrices import Cusp, Mat2
from .modsym import EllCurve, NewformSymbol, ec_add, ec_neg
from .padic import PadicElt, hensel_sqrt, padic_exp, padic_log
from .quadfield import QuadElt
from .sintegers import SIntRing, fundamental_unit


def squarefree_part(n: int) -> int:
    out = 1
    for q, e in sympy.factorint(n).items():
        if e % 2:
            out *= q
    return out


@dataclass
class EichlerSetup:
    curve: EllCurve
    symbol: NewformSymbol
    p: int
    M: int
    d: int                  # Atkin-Lehner divisor with eigenvalue +1
    w_d: Mat2               # (0 1; -d 0)
    level: LevelIdeal       # M * Z[1/p]
    ring: SIntRing


def build_setup(curve: EllCurve, dps: int | None = None) -> EichlerSetup:
    """Choose the smallest d | M, d > 1 with Atkin-Lehner eigenvalue +1."""
    if curve.p is None:
        raise PreconditionError("attach p first (EllCurve(..., p=p))")
    if curve.M is None or curve.M <= 1:
        raise PreconditionError("composite conductor required (M > 1)")
    symbol = NewformSymbol(curve, dps=dps) if dps else NewformSymbol(curve)
    chosen = None
    for d in sorted(sympy.divisors(curve.M)):
        if d == 1:
            continue
        if symbol.atkin_lehner_sign(d) == 1:
            chosen = d
            break
    if chosen is None:
        raise PreconditionError(
            "no divisor d > 1 of M has Atkin-Lehner eigenvalue +1; "
            "curve out of scope")
    ring = SIntRing.z_inv_p(curve.p)
    return EichlerSetup(curve=curve, symbol=symbol, p=curve.p, M=curve.M,
                        d=chosen, w_d=Mat2(0, 1, -chosen, 0),
                        level=LevelIdeal(ring, ring.elt(curve.M)),
                        ring=ring)


# -- optimal embeddings --------------------------------------------------------

@dataclass
class Embedding:
    D: int                  # fundamental discriminant of K
    d0: int                 # squarefree part
    W: Mat2                 # integer matrix, image of (D + sqrt D)/2
    tau: PadicElt           # fixed point in H_p
    prec: int

    def fixed_point_check(self) -> bool:
        W, tau = self.W, self.tau
        val = W.c * tau * tau + (W.d - W.a) * tau - W.b
        return val.zero or val.v >= tau.N - 2


def check_splitting(setup: EichlerSetup, D: int):
    p, M = setup.p, setup.M
    if D <= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"D = {D} is not a positive discriminant")
    if D % p == 0 or sympy.jacobi_symbol(D % p, p) != -1:
        raise InapplicableFieldError(f"p = {p} is not inert in Q(sqrt {D})")
    for q in sympy.primefactors(M):
        if q == 2:
            if D % 8 != 1:
                raise InapplicableFieldError("2 must split in K")
        elif D % q == 0 or sympy.jacobi_symbol(D % q, q) != 1:
            raise InapplicableFieldError(f"q = {q} | M is not split in K")


def find_embeddings(setup: EichlerSetup, D: int, count: int = 1,
                    prec: int = 12, search_bound: int = 400) -> list[Embedding]:
    """Integer matrices W with trace D, det (D^2-D)/4 and M | c.

    Candidates are deduplicated by a bounded conjugation heuristic under
    the group generated by unipotents and the p-scaling.
    """
    check_splitting(setup, D)
    d0 = squarefree_part(D)
    M = setup.M
    nm = (D * D - D) // 4
    found: list[Embedding] = []
    canon_seen = set()
    for size in range(1, search_bound):
        for csign in (1, -1):
            c = csign * size * M
            for a in _centered(D, size):
                d = D - a
                num = a * d - nm
                if num % c:
                    continue
                b = num // c
                W = Mat2(a, b, c, d)
                key = _conj_canonical(W, M, setup.p)
                if key in canon_seen:
                    continue
                canon_seen.add(key)
                emb = _embed_from_matrix(setup, D, d0, W, prec)
                found.append(emb)
                if len(found) >= count:
                    return found
    if not found:
        raise PreconditionError(
            f"no optimal embedding found for D = {D} within bound")
    return found


def _centered(D, size):
    mid = D // 2
    for off in range(0, size * abs(D) + size + 2):
        for s in (1, -1) if off else (1,):
            yield mid + s * off


def _conj_canonical(W: Mat2, M: int, p: int, steps: int = 60) -> tuple:
    """Greedy minimal form under conjugation by small group generators."""
    gens = [Mat2(1, 1, 0, 1), Mat2(1, -1, 0, 1),
            Mat2(1, 0, M, 1), Mat2(1, 0, -M, 1)]
    best = W
    cur = W

    def size_key(m):
        return (max(abs(m.a), abs(m.b), abs(m.c), abs(m.d)),
                m.a, m.b, m.c, m.d)

    for _ in range(steps):
        improved = None
        for g in gens:
            cand = g * cur * g.inverse()
            cand = Mat2(int(cand.a), int(cand.b), int(cand.c), int(cand.d))
            if size_key(cand) < size_key(cur):
                if improved is None or size_key(cand) < size_key(improved):
                    improved = cand
        if improved is None:
            break
        cur = improved
        if size_key(cur) < size_key(best):
            best = cur
    return size_key(best)


def _embed_from_matrix(setup, D, d0, W, prec) -> Embedding:
    p = setup.p
    sD = hensel_sqrt(PadicElt.from_int(p, D, prec))
    tau = (PadicElt.from_int(p, W.a - W.d, prec) + sD) / (2 * W.c)
    emb = Embedding(D=D, d0=d0, W=W, tau=tau, prec=prec)
    assert emb.fixed_point_check()
    return emb


def gamma_tau(setup: EichlerSetup, emb: Embedding) -> Mat2:
    """Image of the norm-1 fundamental unit power: generates the stabilizer."""
    eps = fundamental_unit(emb.d0)
    if eps.norm() == -1:
        eps = eps * eps
    # coordinates of eps in Z[(D + sqrt D)/2]
    u, v = Fraction(eps.x), Fraction(eps.y)  # eps = u + v sqrt(d0)
    D = emb.D
    if D == emb.d0:
        y = 2 * v
        x = u - y * Fraction(D) / 2
    else:  # D = 4 d0, omega = 2 d0 + sqrt d0
        y = v
        x = u - 2 * emb.d0 * v
    assert x.denominator == 1 and y.denominator == 1
    x, y = int(x), int(y)
    g = Mat2(x + y * emb.W.a, y * emb.W.b, y * emb.W.c, x + y * emb.W.d)
    assert g.det() == 1
    # g fixes tau
    img = g.act(emb.tau)
    assert img is not None and (img - emb.tau).zero
    return g


def normalize_to_gamma1(setup: EichlerSetup, g: Mat2, tau: PadicElt):
    """(gamma', tau', m) with gamma' in Gamma_1(M Z[1/p]).

    Prefers the p-power diagonal conjugation trick (m = 1); otherwise
    raises to the least power with upper-left entry 1 mod M.
    """
    M, p = setup.M, setup.p
    alpha = int(g.a) % M
    if alpha == 1 % M:
        return _as_fraction_mat(g), tau, 1
    # a = p^n mod M?
    n = None
    cur = 1 % M
    for k in range(1, sympy.n_order(p, M) + 1):
        cur = cur * p % M
        if cur == alpha:
            n = k
            break
    if n is not None:
        # g' = diag(p^-n, p^n) * g: rows scale by p^-n and p^n
        gp = Mat2(Fraction(g.a, p ** n), Fraction(g.b, p ** n),
                  Fraction(g.c * p ** n), Fraction(g.d * p ** n))
        tau_p = tau / PadicElt.from_int(tau.p, p ** (2 * n), tau.N)
        return gp, tau_p, 1
    m = int(sympy.n_order(alpha, M))
    return _as_fraction_mat(g ** m), tau, m


def _as_fraction_mat(g: Mat2) -> Mat2:
    return Mat2(Fraction(g.a), Fraction(g.b), Fraction(g.c), Fraction(g.d))


# -- the plan -----------------------------------------------------------------

@dataclass
class PlanTerm:
    tau_from: PadicElt
    tau_to: PadicElt
    r: Cusp
    s: Cusp
    exponent: int = 1
    half: bool = False


@dataclass
class SemiIndefPlan:
    terms: list[PlanTerm] = field(default_factory=list)
    multiplier: int = 1


def plan_semi_indefinite(setup: EichlerSetup, gamma1: Mat2, tau: PadicElt,
                         multiplier: int = 1,
                         search_bound: int | None = None) -> SemiIndefPlan:
    """Rewrite the period from infinity to gamma1*infinity at base tau.

    Upper factors move the base point; each lower factor contributes one
    definite double integral between tau and its translate, with cusp pair
    (infinity, 0).  The result contains definite terms only.
    """
    kwargs = {}
    if search_bound is not None:
        kwargs["search_bound"] = search_bound
    factors = decompose(gamma1, setup.level, **kwargs)
    plan = SemiIndefPlan(multiplier=multiplier)
    cur_tau = tau
    for f in factors:
        fm = f.matrix()
        fm = Mat2(Fraction(fm.a), Fraction(fm.b), Fraction(fm.c), Fraction(fm.d))
        if f.tag == "U":
            cur_tau = fm.inverse().act(cur_tau)
        elif f.tag == "L":
            moved = fm.inverse().act(cur_tau)
            plan.terms.append(PlanTerm(tau_from=moved, tau_to=cur_tau,
                                       r=Cusp(1, 0), s=Cusp(0), exponent=1))
            cur_tau = moved
        else:
            raise PreconditionError(
                "unit-diagonal factors cannot appear in the p-adic plan")
    return plan


def compute_J(setup: EichlerSetup, plan: SemiIndefPlan, prec: int,
              depth: int | None = None, method: str = "series") -> MultIntResult:
    """Evaluate the plan; returns the triple for J^multiplier."""
    p = setup.p
    total = unit_result(p, prec)
    ctx_cache: dict = {}
    for term in plan.terms:
        key = (term.r, term.s)
        ctx = ctx_cache.get(key)
        if ctx is None:
            ctx = MeasureCtx(setup.symbol, term.r, term.s)
            ctx_cache[key] = ctx
        if method == "series":
            val = series_double_integral(ctx, term.tau_from, term.tau_to,
                                         prec, moment_depth=depth)
        else:
            val = riemann_double_integral(ctx, term.tau_from, term.tau_to,
                                          depth if depth else prec)
        val = val ** term.exponent
        if term.half:
            val = _halve(val)
        total = total * val
    return total


def _halve(res: MultIntResult) -> MultIntResult:
    p = res.teich.p
    half_log = res.log_value / 2
    t = res.teich
    # square root of the Teichmuller part stays a root of unity
    ts = hensel_sqrt(t)
    return MultIntResult(res.valuation / 2, half_log, ts, res.prec)


# -- Tate uniformization ------------------------------------------------------

def _j_q_series(n_terms: int) -> list[int]:
    """Coefficients of q*j(q) = 1 + 744 q + ... as integers."""
    n = n_terms
    sigma3 = [0] * n
    for d in range(1, n):
        for m in range(d, n, d):
            sigma3[m] += d ** 3
    e4 = [0] * n
    e4[0] = 1
    for m in range(1, n):
        e4[m] = 240 * sigma3[m]
    e4_3 = _poly_mul(_poly_mul(e4, e4, n), e4, n)
    # Delta / q = prod (1 - q^m)^24
    dd = [0] * n
    dd[0] = 1
    for m in range(1, n):
        for _ in range(24):
            dd = [dd[i] - (dd[i - m] if i >= m else 0) for i in range(n)]
    inv = _poly_inv(dd, n)
    return _poly_mul(e4_3, inv, n)


def _poly_mul(a, b, n):
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += ai * bj
    return out


def _poly_inv(a, n):
    assert a[0] == 1
    out = [0] * n
    out[0] = 1
    for m in range(1, n):
        acc = 0
        for k in range(1, m + 1):
            if k < len(a):
                acc += a[k] * out[m - k]
        out[m] = -acc
    return out


def tate_q(curve: EllCurve, prec: int) -> PadicElt:
    """The p-adic period q with j(q) = j(E), by series reversion."""
    p = curve.p
    j = curve.j_invariant()
    vj = _vp_fraction(j, p)
    if vj >= 0:
        raise PreconditionError("v_p(j) < 0 required (multiplicative reduction)")
    vq = -vj
    n_terms = max(3, prec // vq + 3)
    jser = _j_q_series(n_terms + 2)
    # u := 1/j as a power series in q: u = q / (q*j(q))
    # reversion by fixed-point iteration q = u * G(q), G = q*j(q)
    work = prec + vq + 2
    u0 = PadicElt.from_fraction(p, 1 / j, work)
    qv = u0
    for _ in range(n_terms + 1):
        acc = PadicElt.zero_elt(p, work)
        qpow = PadicElt.from_int(p, 1, work)
        for c in jser:
            if c:
                acc = acc + qpow * c
            qpow = qpow * qv
            if qpow.zero or qpow.v > work:
                break
        qv = u0 * acc
    assert qv.v == vq
    return qv.at_absprec(prec + vq)


def _vp_fraction(x: Fraction, p: int) -> int:
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def j_of_q(qv: PadicElt, prec: int) -> PadicElt:
    """Forward evaluation of j(q), for verifying tate_q."""
    p = qv.p
    vq = qv.v
    n_terms = max(3, prec // vq + 3)
    jser = _j_q_series(n_terms + 2)
    acc = PadicElt.zero_elt(p, prec + vq)
    qpow = PadicElt.from_int(p, 1, prec + vq)
    for c in jser:
        if c:
            acc = acc + qpow * c
        qpow = qpow * qv
        if qpow.zero or qpow.v > prec + vq:
            break
    return acc / qv


class TateCurve:
    """E_q: y^2 + xy = x^3 + a4(q) x + a6(q), with the iso to the model."""

    def __init__(self, curve: EllCurve, qv: PadicElt, prec: int):
        self.curve = curve
        self.p = curve.p
        self.q = qv
        self.prec = prec
        self.vq = qv.v
        p = self.p
        work = prec + self.vq + 2
        self.work = work
        n_terms = work // self.vq + 2
        q_pows = [PadicElt.from_int(p, 1, work)]
        for _ in range(n_terms + 1):
            q_pows.append(q_pows[-1] * qv)
        self.q_pows = q_pows
        s1 = PadicElt.zero_elt(p, work)
        s3 = PadicElt.zero_elt(p, work)
        s5 = PadicElt.zero_elt(p, work)
        for n in range(1, n_terms + 1):
            t = q_pows[n] / (1 - q_pows[n])
            s1 = s1 + n * t
            s3 = s3 + n ** 3 * t
            s5 = s5 + n ** 5 * t
        self.s1 = s1
        self.a4q = -5 * s3
        self.a6q = -(5 * s3 + 7 * s5) / 12
        self._solve_iso()

    def _invariants_q(self):
        a4, a6 = self.a4q, self.a6q
        b2 = PadicElt.from_int(self.p, 1, self.work)
        b4 = 2 * a4
        b6 = 4 * a6
        c4 = 1 - 48 * a4
        c6 = -1 + 72 * a4 - 864 * a6
        return c4, c6

    def _solve_iso(self):
        """(u0, r0, s0, t0): coordinates map E_q -> given model of E."""
        E = self.curve
        p = self.p
        work = self.work
        c4q, c6q = self._invariants_q()
        c4e = PadicElt.from_int(p, E.c4, work)
        c6e = PadicElt.from_int(p, E.c6, work)
        u0sq = (c6e / c6q) * (c4q / c4e)
        u0 = hensel_sqrt(u0sq)
        a1, a2, a3, a4, a6 = [PadicElt.from_int(p, a, work) for a in E.ainvs]
        s0 = (u0 - a1) / 2                       # a1(Eq) = 1
        r0 = (s0 * a1 + s0 * s0 - a2) / 3        # a2(Eq) = 0
        t0 = -(a3 + r0 * a1) / 2                 # a3(Eq) = 0
        self.u0, self.r0, self.s0, self.t0 = u0, r0, s0, t0
        # verify the remaining invariant equations within precision
        chk4 = (a4 - s0 * a3 + 2 * r0 * a2 - (t0 + r0 * s0) * a1
                + 3 * r0 * r0 - 2 * s0 * t0) - u0 ** 4 * self.a4q
        chk6 = (a6 + r0 * a4 + r0 * r0 * a2 + r0 ** 3 - t0 * a3
                - t0 * t0 - r0 * t0 * a1) - u0 ** 6 * self.a6q
        tol = self.prec
        if not ((chk4.zero or chk4.v >= tol) and (chk6.zero or chk6.v >= tol)):
            raise PrecisionError("Tate isomorphism residuals too large; "
                                 "wrong reduction data or low precision")

    # -- theta-type coordinate series ------------------------------------
    def _xy_series(self, u: PadicElt):
        p = self.p
        work = self.work
        one = PadicElt.from_int(p, 1, work)
        du = one - u
        if du.zero:
            raise PrecisionError("u = 1 at working precision (point at infinity)")
        X = u / (du * du)
        Y = u * u / (du * du * du)
        uinv = u.inverse()
        for n in range(1, len(self.q_pows) - 1):
            qn = self.q_pows[n]
            if qn.zero or qn.v > work:
                break
            t1d = one - qn * u
            t2d = one - qn * uinv
            t0d = one - qn
            X = X + (qn * u) / (t1d * t1d) + (qn * uinv) / (t2d * t2d) \
                - 2 * qn / (t0d * t0d)
            Y = Y + (qn * u) * (qn * u) / (t1d ** 3) \
                - (qn * uinv) / (t2d ** 3) + qn / (t0d * t0d)
        # the n>=1 corrections above fold the standard -2s1/+s1 constants in
        return X, Y

    def point_from_u(self, u: PadicElt):
        """Point on the given model of E, or None for the origin."""
        u = self.reduce_u(u)
        one = PadicElt.from_int(self.p, 1, self.work)
        if (u - one).zero:
            return None
        X, Y = self._xy_series(u)
        x = self.u0 ** 2 * X + self.r0
        y = self.u0 ** 3 * Y + self.s0 * self.u0 ** 2 * X + self.t0
        if not self.curve.is_on_curve(x.at_absprec(self.prec),
                                      y.at_absprec(self.prec)):
            raise PrecisionError("Tate image missed the curve at target "
                                 "precision")
        return (x, y)

    def reduce_u(self, u: PadicElt) -> PadicElt:
        if u.zero:
            raise PreconditionError("u must be nonzero")
        k = u.v // self.vq  # floor division handles negatives
        if k:
            u = u / self.q ** k
        assert 0 <= u.v < self.vq
        return u

    def u_from_point(self, P) -> PadicElt:
        """Inverse of point_from_u on E(K_p), in the fundamental domain."""
        if P is None:
            return PadicElt.from_int(self.p, 1, self.work)
        x, y = P
        xq = (x - self.r0) / (self.u0 ** 2)
        yq = (y - self.s0 * self.u0 ** 2 * xq - self.t0) / (self.u0 ** 3)
        u = self._solve_u(xq, yq)
        return self.reduce_u(u)

    def _seeds(self, xq: PadicElt):
        """Initial guesses for u/(1-u)^2 = x, by the valuation of x."""
        p = self.p
        one = PadicElt.from_int(p, 1, self.work)
        out = []
        if xq.zero:
            return out
        if xq.v > 0:
            # both roots can sit mid-annulus: leading model u^2 - x u + q = 0
            disc = xq * xq - 4 * self.q
            if not disc.zero and disc.v % 2 == 0:
                for rel in (2, 1):
                    try:
                        rt = hensel_sqrt(disc.at_absprec(disc.v + 2 * rel))
                    except PreconditionError:
                        continue
                    out.extend([(xq + rt) / 2, (xq - rt) / 2])
                    break
            out.append(xq)  # u ~ x panel when v(u) < v(q)/2
        elif xq.v < 0:
            # u = 1 + delta, delta^2 ~ 1/x (even valuation by construction)
            inv = xq.inverse()
            if inv.v % 2 == 0:
                try:
                    rt = hensel_sqrt(inv.at_absprec(
                        min(inv.abs_prec(), inv.v + self.vq)))
                    out.extend([one + rt, one - rt])
                except PreconditionError:
                    pass
        else:
            disc = 4 * xq + 1
            if not disc.zero and disc.v % 2 == 0:
                try:
                    rt = hensel_sqrt(disc.at_absprec(
                        min(disc.abs_prec(), disc.v + self.vq)))
                    den = 2 * xq
                    for sgn in (1, -1):
                        cand = (2 * xq + 1 + sgn * rt) / den
                        out.append(cand)
                except PreconditionError:
                    pass
        return out

    def _solve_u(self, xq: PadicElt, yq: PadicElt) -> PadicElt:
        best = None
        for seed in self._seeds(xq):
            if seed.zero:
                continue
            # lift the seed to an exact representative: Newton contracts its
            # own error, so tracked precision should reflect the arithmetic
            seed = PadicElt(seed.p, seed.deg, seed.v, seed.u0, seed.u1,
                            self.work)
            try:
                u = self._newton_u(self.reduce_u(seed), xq)
            except (PrecisionError, PreconditionError, AssertionError,
                    ZeroDivisionError):
                continue
            for cand in (u, self.reduce_u(u.inverse())):
                try:
                    Xc, Yc = self._xy_series(cand)
                except (PrecisionError, ZeroDivisionError):
                    continue
                ex = Xc - xq
                ey = Yc - yq
                if not (ex.zero or ex.v >= self.prec):
                    continue
                score = 10 ** 9 if ey.zero else ey.v
                if best is None or score > best[0]:
                    best = (score, cand)
        if best is None or best[0] < self.prec:
            raise PrecisionError("could not invert the Tate parametrization")
        return best[1]

    def _newton_u(self, u: PadicElt, xq: PadicElt, iters: int = 64) -> PadicElt:
        work = self.work
        for _ in range(iters):
            F = self._x_of_u(u) - xq
            if F.zero or F.v >= work:
                return u
            Fp = self._dx_du(u)
            if Fp.zero:
                raise PrecisionError("degenerate Newton derivative")
            step = F / Fp
            if step.zero or step.v >= work:
                return u
            u = u - step
            if u.zero:
                raise PrecisionError("Newton left the domain")
            if not 0 <= u.v < self.vq:
                u = self.reduce_u(u)
        F = self._x_of_u(u) - xq
        if F.zero or F.v >= self.prec:
            return u
        raise PrecisionError("Newton for u did not converge")

    def _x_of_u(self, u):
        return self._xy_series(u)[0]

    def _dx_du(self, u):
        p = self.p
        work = self.work
        one = PadicElt.from_int(p, 1, work)
        du = one - u
        out = (one + u) / (du ** 3)
        uinv = u.inverse()
        for n in range(1, len(self.q_pows) - 1):
            qn = self.q_pows[n]
            if qn.zero or qn.v > work:
                break
            t1d = one - qn * u
            out = out + qn * (one + qn * u) / (t1d ** 3)
            # d/du of (q^n/u)/(1 - q^n/u)^2 = -q^n (u + q^n) / (u - q^n)^3
            um = u - qn
            out = out - qn * (u + qn) / (um ** 3)
        return out


# -- result bundle ------------------------------------------------------------

@dataclass
class DarmonPoint:
    J: MultIntResult
    multiplier: int
    local_point: tuple | None
    tate: TateCurve
    embedding: Embedding
    recognition: object = None


def darmon_point(setup: EichlerSetup, emb: Embedding, prec: int,
                 depth: int | None = None,
                 search_bound: int | None = None) -> DarmonPoint:
    """Full pipeline for one embedding.

    The Moebius chain through the decomposition factors can push a
    translate of tau very close to P^1(Q_p); when the working precision
    cannot see its quadratic part any more, the embedding is redone
    deeper and the plan rebuilt.
    """
    J = None
    plan = None
    for extra in (10, 25, 55, 115):
        emb_deep = _embed_from_matrix(setup, emb.D, emb.d0, emb.W,
                                      prec + extra)
        g = gamma_tau(setup, emb_deep)
        g1, tau1, m = normalize_to_gamma1(setup, g, emb_deep.tau)
        plan = plan_semi_indefinite(setup, g1, tau1, multiplier=m,
                                    search_bound=search_bound)
        try:
            J = compute_J(setup, plan, prec, depth=depth)
            break
        except PreconditionError as exc:
            if "outside P^1" not in str(exc):
                raise
        except PrecisionError as exc:
            if "deepen tau" not in str(exc):
                raise
    if J is None:
        raise PrecisionError("tau chain collapses onto P^1(Q_p); "
                             "raise the working precision")
    qv = tate_q(setup.curve, prec + 4)
    tate = TateCurve(setup.curve, qv, prec + 2)
    u = recover_value(J)
    pt = tate.point_from_u(u)
    return DarmonPoint(J=J, multiplier=plan.multiplier, local_point=pt,
                       tate=tate, embedding=emb)

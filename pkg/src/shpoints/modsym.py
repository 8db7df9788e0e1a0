"""Integer-valued modular symbols of elliptic newforms, numerically.

The symbol I{r -> s} = Re(int_r^s omega_f)/Omega+ is evaluated once per
Manin coset of Gamma_0(N) by summing q-expansions at points with
controlled imaginary part; every path value after that is exact integer
arithmetic (continued fractions + table lookups).  Cusp integrals use the
Atkin-Lehner extension, which for squarefree N connects every cusp to
infinity; the eigenvalue of W_q for q || N is -a_q.

Only squarefree conductors are supported here, which covers every curve
this package targets; additive reduction would need expansions at cusps
that the newform's Atkin-Lehner symmetries no longer reach.
"""
from __future__ import annotations

import threading
from array import array
from fractions import Fraction
from math import gcd, isqrt

import mpmath as mp
import sympy

from . import kernels
from .errors import PreconditionError, PrecisionError
from .matrices import Cusp, Mat2

REAL_DPS = 60
ROUND_TOL = 1e-6


class EllCurve:
    """Elliptic curve over Q given by a (globally minimal) Weierstrass model."""

    def __init__(self, a1, a2, a3, a4, a6, p=None):
        self.ainvs = (a1, a2, a3, a4, a6)
        a1, a2, a3, a4, a6 = self.ainvs
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = (a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4
                   + a2 * a3 * a3 - a4 * a4)
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = (-self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6)
        self.disc = (-self.b2 * self.b2 * self.b8 - 8 * self.b4 ** 3
                     - 27 * self.b6 * self.b6 + 9 * self.b2 * self.b4 * self.b6)
        if self.disc == 0:
            raise PreconditionError("singular Weierstrass model")
        self.conductor = self._conductor()
        self.p = None
        self.M = None
        if p is not None:
            self.set_p(p)

    def _conductor(self) -> int:
        N = 1
        for ell, e in sympy.factorint(abs(self.disc)).items():
            if self.c4 % ell != 0:
                N *= ell  # multiplicative
            else:
                if e >= 12 and self.c4 % ell ** 4 == 0 and self.c6 % ell ** 6 == 0:
                    raise PreconditionError(
                        f"model looks non-minimal at {ell}; supply a minimal model")
                if ell < 5:
                    raise PreconditionError(
                        f"additive reduction at {ell} not supported")
                N *= ell * ell
        return N

    def set_p(self, p: int):
        if not sympy.isprime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if self.conductor % p != 0 or self.conductor % (p * p) == 0:
            raise PreconditionError(
                f"curve must have multiplicative reduction at p = {p}")
        self.p = p
        self.M = self.conductor // p
        if self.M % p == 0:
            raise PreconditionError("p must exactly divide the conductor")

    def j_invariant(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.disc)

    def reduction_type(self, ell: int) -> str:
        """'good', 'split', 'nonsplit' or 'additive'."""
        if self.disc % ell != 0:
            return "good"
        if self.c4 % ell == 0:
            return "additive"
        if ell >= 5:
            t = (-self.c6) % ell
            return "split" if pow(t, (ell - 1) // 2, ell) == 1 else "nonsplit"
        # small-p fallback: count points on the reduced curve
        a1, a2, a3, a4, a6 = self.ainvs
        cnt = 1
        for x in range(ell):
            for y in range(ell):
                if (y * y + a1 * x * y + a3 * y
                        - (x ** 3 + a2 * x * x + a4 * x + a6)) % ell == 0:
                    cnt += 1
        ap = ell + 1 - cnt
        return "split" if ap == 1 else "nonsplit"

    def ap(self, ell: int) -> int:
        rt = self.reduction_type(ell)
        if rt == "split":
            return 1
        if rt == "nonsplit":
            return -1
        if rt == "additive":
            return 0
        if ell == 2:
            a1, a2, a3, a4, a6 = self.ainvs
            cnt = 1
            for x in range(2):
                for y in range(2):
                    if (y * y + a1 * x * y + a3 * y
                            - (x ** 3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                        cnt += 1
            return 2 + 1 - cnt
        return kernels.ap_good(self.b2 % ell, self.b4 % ell, self.b6 % ell, ell)

    def is_on_curve(self, x, y) -> bool:
        a1, a2, a3, a4, a6 = self.ainvs
        lhs = y * y + a1 * x * y + a3 * y
        rhs = x * x * x + a2 * x * x + a4 * x + a6
        diff = lhs - rhs
        if hasattr(diff, "zero"):
            return diff.zero
        if hasattr(diff, "is_zero"):
            return diff.is_zero()
        return diff == 0

    def __repr__(self):
        return f"EllCurve{self.ainvs} (N={self.conductor})"


def an_coeffs(curve: EllCurve, B: int) -> list[int]:
    """a_1..a_B (index 0 unused) via point counts and Hecke recursions."""
    an = [0] * (B + 1)
    if B >= 1:
        an[1] = 1
    N = curve.conductor
    for ell in sympy.primerange(2, B + 1):
        ap = curve.ap(ell)
        pk, vals = ell, {1: 1, ell: ap}
        while pk * ell <= B:
            pk *= ell
            if N % ell == 0:
                vals[pk] = vals[pk // ell] * ap
            else:
                vals[pk] = ap * vals[pk // ell] - ell * vals[pk // (ell * ell)]
        for q, v in vals.items():
            if 1 < q <= B:
                an[q] = v
    for n in range(2, B + 1):
        if an[n]:
            continue
        m, q = n, 1
        ell = sympy.primefactors(n)[0]
        while m % ell == 0:
            m //= ell
            q *= ell
        if m > 1:
            an[n] = an[q] * an[m]
    return an


# -- generic Weierstrass group law (any exact coefficient field) -------------

def ec_neg(curve: EllCurve, P):
    if P is None:
        return None
    a1, _, a3, _, _ = curve.ainvs
    x, y = P
    return (x, -y - a1 * x - a3)


def ec_add(curve: EllCurve, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = curve.ainvs
    x1, y1 = P
    x2, y2 = Q
    if _eqv(x1, x2):
        if _eqv(y1 + y2 + a1 * x2 + a3, y1 * 0):
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def ec_mul(curve: EllCurve, n: int, P):
    if n < 0:
        return ec_mul(curve, -n, ec_neg(curve, P))
    R = None
    Q = P
    while n:
        if n & 1:
            R = ec_add(curve, R, Q)
        Q = ec_add(curve, Q, Q)
        n >>= 1
    return R


def _eqv(x, y):
    d = x - y
    if hasattr(d, "zero"):
        return d.zero
    if hasattr(d, "is_zero"):
        return d.is_zero()
    return d == 0


# -- P^1(Z/N) ------------------------------------------------------------------

class P1Index:
    """Projective line over Z/N: canonical indices and small SL2 lifts."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N) if gcd(u, N) == 1]
        idx_of = [-1] * (N * N)
        reps = []
        for c in range(N):
            for d in range(N):
                if idx_of[c * N + d] != -1 or gcd(gcd(c, d), N) != 1:
                    continue
                i = len(reps)
                reps.append((c, d))
                for u in units:
                    idx_of[(u * c % N) * N + (u * d % N)] = i
        self.idx_of = array("i", idx_of)  # dense table; kernel-ready
        self.size = len(reps)
        self.lifts = [self._small_lift(c, d) for c, d in reps]

    def index(self, c: int, d: int) -> int:
        i = self.idx_of[(c % self.N) * self.N + (d % self.N)]
        if i < 0:
            raise PreconditionError(f"({c}:{d}) not in P^1(Z/{self.N})")
        return i

    def _small_lift(self, c, d) -> Mat2:
        """SL2(Z) matrix with bottom row a short coprime vector in the class."""
        N = self.N
        v1, v2 = (c, d), (N, 0)
        # Gauss-reduce the lattice Z(c,d) + N Z^2 spanned by three vectors
        basis = self._reduce2((c, d), (N, 0), (0, N))
        target = self.idx_of[c * N + d]
        best = None
        for s in range(-4, 5):
            for t in range(-4, 5):
                x = s * basis[0][0] + t * basis[1][0]
                y = s * basis[0][1] + t * basis[1][1]
                if gcd(x, y) != 1:
                    continue
                if self.idx_of[(x % N) * N + (y % N)] != target:
                    continue
                score = max(abs(x), abs(y))
                if best is None or score < best[0]:
                    best = (score, x, y)
        if best is None:  # fall back to a direct coprime lift
            x, y = c, d
            while gcd(x, y) != 1:
                y += N
            best = (max(abs(x), abs(y)), x, y)
        _, x, y = best
        return self._complete(x, y)

    @staticmethod
    def _complete(c, d) -> Mat2:
        g, u, v = _xgcd(c, d)
        assert g == 1
        # u*c + v*d = 1; take (v, -u; c, d), det = v*d + u*c = 1
        return Mat2(v, -u, c, d)

    @staticmethod
    def _reduce2(*vecs):
        """Two shortest-ish independent vectors by pairwise Gauss reduction."""
        vs = sorted(vecs, key=lambda v: v[0] * v[0] + v[1] * v[1])
        b1 = vs[0]
        b2 = next(v for v in vs[1:] if v[0] * b1[1] - v[1] * b1[0] != 0)
        while True:
            n1 = b1[0] * b1[0] + b1[1] * b1[1]
            mu = round((b2[0] * b1[0] + b2[1] * b1[1]) / n1)
            b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
            n2 = b2[0] * b2[0] + b2[1] * b2[1]
            if n2 >= n1:
                return b1, b2
            b1, b2 = b2, b1


def _xgcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _xgcd(b, a % b)
    return (g, y, x - (a // b) * y)


# -- the symbol ----------------------------------------------------------------

class NewformSymbol:
    """Z-valued modular symbol of a curve of squarefree conductor N."""

    def __init__(self, curve: EllCurve, dps: int = REAL_DPS,
                 precompute: bool = True):
        N = curve.conductor
        for ell in sympy.primefactors(N):
            if N % (ell * ell) == 0:
                raise PreconditionError(
                    "squarefree conductor required by the cusp-tail evaluator")
        self.curve = curve
        self.N = N
        self.dps = dps
        self.p1 = P1Index(N)
        self._an = [0, 1]
        self._lock = threading.Lock()
        self._tail_cache = {}
        self._al_sign_cache = {}
        self.w_infinity = +1
        # Atkin-Lehner eigenvalue of W_d, d | N: product of -a_q
        self._lam = {}
        for d in sympy.divisors(N):
            v = 1
            for q in sympy.primefactors(d):
                v *= -curve.ap(q)
            self._lam[d] = v
        with mp.workdps(self.dps):
            self.omega_raw = self._real_period()
            self.c0, self.omega_plus = None, None
            self.values = None
            if precompute:
                self._build_table()

    # -- numerics --------------------------------------------------------
    def _need_an(self, B: int):
        if len(self._an) > B:
            return
        with self._lock:
            if len(self._an) > B:
                return
            self._an = an_coeffs(self.curve, max(B, 2 * len(self._an)))

    def _real_period(self):
        """Integral of |omega| over E(R), via a smooth doubled integrand."""
        b2, b4, b6 = self.curve.b2, self.curve.b4, self.curve.b6
        roots = mp.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=80)
        reals = [r for r in roots if abs(mp.im(r)) < mp.mpf(10) ** (-self.dps // 2)]
        e1 = max(mp.re(r) for r in reals)
        others = [r for r in roots if abs(r - e1) > mp.mpf(10) ** (-self.dps // 2)]
        # y^2 = f(x)/4: omega = dx/(2y) = dx/sqrt(f); sub x = e1 + t^2
        f = lambda t: 2 / mp.sqrt((t * t + e1 - others[0]) * (t * t + e1 - others[1]))
        om0 = mp.quad(f, [0, 1, mp.inf])
        ncomp = 2 if self.curve.disc > 0 else 1
        return mp.re(om0) * ncomp

    def _fsum(self, z):
        """F(z) = sum a_n/n e^(2 pi i n z); needs Im(z) > 0."""
        im = mp.im(z)
        B = int((self.dps + 8) * mp.log(10) / (2 * mp.pi * im)) + 10
        self._need_an(B)
        an = self._an
        q = mp.e ** (2j * mp.pi * z)
        s = mp.mpc(0)
        qn = mp.mpc(1)
        floor = mp.mpf(10) ** (-(self.dps + 8))
        for n in range(1, B + 1):
            qn *= q
            if an[n]:
                s += mp.mpf(an[n]) / n * qn
            if abs(qn) < floor:
                break
        return s

    def _tail(self, a: int, c: int):
        """Raw period integral from infinity to the cusp a/c (complex)."""
        if c == 0:
            return mp.mpc(0)
        if c < 0:
            a, c = -a, -c
        g = gcd(abs(a), c)
        a, c = a // g, c // g
        key = (a, c)
        cached = self._tail_cache.get(key)
        if cached is not None:
            return cached
        N = self.N
        e = gcd(c, N)
        d = N // e
        # Atkin-Lehner matrix of type d mapping infinity to a/c exactly:
        # M = (d*a, y; d*c, d*w) with d*a*w - c*y = 1
        g_, wc, yc = _xgcd(d * a, c)
        assert g_ == 1
        w, y = wc, -yc
        gam = d * c
        sd = mp.sqrt(d)
        z0 = (-d * w + 1j * sd) / gam
        mz0 = mp.mpf(d * a) / gam + 1j * sd / gam
        val = self._fsum(mz0) - self._lam[d] * self._fsum(z0)
        self._tail_cache[key] = val
        return val

    def _raw_path(self, r: Cusp, s: Cusp):
        return self._tail(s.n, s.d) - self._tail(r.n, r.d)

    # -- normalization and the coset table --------------------------------
    def _coset_raw(self, i: int):
        g = self.p1.lifts[i]
        return self._tail(g.a, g.c) - self._tail(g.b, g.d)

    def _build_table(self):
        with mp.workdps(self.dps):
            raws = [mp.re(self._coset_raw(i)) / self.omega_raw
                    for i in range(self.p1.size)]
            for c0 in range(1, 9):
                scaled = [v * c0 for v in raws]
                if all(abs(v - mp.nint(v)) < ROUND_TOL for v in scaled):
                    ints = [int(mp.nint(v)) for v in scaled]
                    g = 0
                    for v in ints:
                        g = gcd(g, abs(v))
                    if g == 1:
                        self.c0 = c0
                        self.omega_plus = self.omega_raw / c0
                        self.values = array("q", ints)
                        return
            raise PrecisionError(
                "no period normalization with c0 <= 8 gives integral values "
                "with content 1; raise the working precision")

    # -- exact evaluation ---------------------------------------------------
    def eval_symbol(self, r: Cusp, s: Cusp) -> int:
        """I{r -> s}, an exact integer."""
        return kernels.pair_value(r.n, r.d, s.n, s.d,
                                  self.N, self.p1.idx_of, self.values)

    def eval_symbol_numeric(self, r: Cusp, s: Cusp) -> int:
        """Direct numeric evaluation (no Manin reduction); cross-check path."""
        with mp.workdps(self.dps):
            v = mp.re(self._raw_path(r, s)) / self.omega_plus
            iv = int(mp.nint(v))
            if abs(v - iv) >= ROUND_TOL:
                raise PrecisionError(
                    f"symbol value {v} is not integral at tolerance {ROUND_TOL}")
            return iv

    def normalize_period(self):
        """(Omega+, c0): the AGM-type real period divided by the integer
        that makes coset values integral with content 1."""
        return self.omega_plus, self.c0

    def atkin_lehner_sign(self, d: int, pairs=None) -> int:
        """Empirical eigenvalue of W_d on the symbol, d | N, d > 1.

        Evaluates I{W_d r -> W_d s} / I{r -> s} on several independent path
        pairs with a standard level-N Atkin-Lehner representative and
        requires unanimity.
        """
        N = self.N
        if d <= 1 or N % d != 0 or gcd(d, N // d) != 1:
            raise PreconditionError("need d | N with gcd(d, N/d) = 1")
        if d in self._al_sign_cache:
            return self._al_sign_cache[d]
        # standard representative W = (d, y; N, d*w), det d: d*w - (N/d)*y = 1
        g_, w_, v_ = _xgcd(d, N // d)
        assert g_ == 1
        W = Mat2(d, -v_, N, d * w_)
        assert W.det() == d, W
        if pairs is None:
            pairs = [(Cusp(0), Cusp(1, 0)), (Cusp(1, 3), Cusp(2, 5)),
                     (Cusp(1, 7), Cusp(3, 4)), (Cusp(2, 9), Cusp(5, 11))]
        signs = set()
        for r, s in pairs:
            base = self.eval_symbol(r, s)
            moved = self.eval_symbol(W.act_cusp(r), W.act_cusp(s))
            if base == 0:
                if moved != 0:
                    raise PrecisionError("inconsistent Atkin-Lehner transform")
                continue
            if abs(moved) != abs(base):
                raise PrecisionError(
                    f"W_{d} does not act by a sign on sampled paths")
            signs.add(moved // base)
        if len(signs) != 1:
            raise PrecisionError(
                f"Atkin-Lehner sign for d={d} not unanimous on sample paths")
        sign = signs.pop()
        assert sign == self._lam[d], \
            "empirical Atkin-Lehner sign disagrees with -a_q product"
        self._al_sign_cache[d] = sign
        return sign

    # -- cache export/import ------------------------------------------------
    def export_cache(self, path: str):
        with open(path, "w") as fh:
            fh.write(f"# curve {' '.join(map(str, self.curve.ainvs))} "
                     f"N={self.N} c0={self.c0}\n")
            for i in range(self.p1.size):
                g = self.p1.lifts[i]
                fh.write(f"{g.c % self.N}:{g.d % self.N} -> {self.values[i]}\n")

    def import_cache(self, path: str):
        vals = [None] * self.p1.size
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, v = line.partition("->")
                c, _, d = key.strip().partition(":")
                vals[self.p1.index(int(c), int(d))] = int(v)
        if any(v is None for v in vals):
            raise PreconditionError("cache file does not cover P^1(Z/N)")
        self.values = array("q", vals)

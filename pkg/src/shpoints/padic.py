"""Capped-precision arithmetic in Q_p and its unramified quadratic extension.

An element is p^v * (u0 + u1*w) where w^2 = r for a fixed lift r of the
smallest quadratic nonresidue mod p, and the unit (u0, u1) is known modulo
p^N (relative precision N).  The valuation v is exact.  Zero carries an
explicit flag instead of a large valuation, so equality tests cannot be
fooled by precision artifacts.  Only odd p is supported.

All values are immutable; operations return fresh objects and track the
minimum surviving precision.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import PreconditionError, PrecisionError

DEFAULT_PREC = 20


def _smallest_nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise PreconditionError(f"{p} is not an odd prime")


_NR_CACHE: dict[int, int] = {}


def nonresidue(p: int) -> int:
    if p not in _NR_CACHE:
        _NR_CACHE[p] = _smallest_nonresidue(p)
    return _NR_CACHE[p]


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicElt:
    """Element of Q_p (deg=1) or Q_{p^2} (deg=2) at capped precision."""

    __slots__ = ("p", "deg", "v", "u0", "u1", "N", "zero")

    def __init__(self, p, deg, v, u0, u1, N, zero=False):
        self.p = p
        self.deg = deg
        self.zero = zero
        if zero:
            self.v = 0
            self.u0 = 0
            self.u1 = 0
            self.N = N
            return
        if N < 1:
            raise PrecisionError("precision exhausted")
        mod = p ** N
        u0 %= mod
        u1 %= mod
        # re-normalize in case the unit part picked up p-divisibility
        k = min(_vp_int(u0, p) if u0 else N, _vp_int(u1, p) if u1 else N)
        if k >= N:
            # indistinguishable from zero at this precision
            self.v = 0
            self.u0 = 0
            self.u1 = 0
            self.N = N
            self.zero = True
            return
        if k:
            pk = p ** k
            u0 //= pk
            u1 //= pk
            v += k
            N -= k
            mod = p ** N
        self.v = v
        self.u0 = u0 % mod
        self.u1 = u1 % mod
        self.N = N
        if u1 % p != 0 and deg == 1:
            self.deg = 2

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero_elt(cls, p, N=DEFAULT_PREC, deg=1):
        return cls(p, deg, 0, 0, 0, N, zero=True)

    @classmethod
    def from_int(cls, p, n, N=DEFAULT_PREC):
        if n == 0:
            return cls.zero_elt(p, N)
        v = _vp_int(abs(n), p)
        return cls(p, 1, v, n // p ** v, 0, N)

    @classmethod
    def from_fraction(cls, p, q, N=DEFAULT_PREC):
        q = Fraction(q)
        if q == 0:
            return cls.zero_elt(p, N)
        num, den = q.numerator, q.denominator
        vn = _vp_int(abs(num), p)
        vd = _vp_int(den, p)
        num //= p ** vn
        den //= p ** vd
        mod = p ** N
        u = num * pow(den, -1, mod) % mod
        return cls(p, 1, vn - vd, u, 0, N)

    @classmethod
    def from_pair(cls, p, v, u0, u1, N=DEFAULT_PREC):
        if u0 == 0 and u1 == 0:
            return cls.zero_elt(p, N, deg=2)
        return cls(p, 2, v, u0, u1, N)

    def w(self):
        """The generator w of the quadratic extension, w^2 = nonresidue."""
        return PadicElt(self.p, 2, 0, 0, 1, self.N)

    # -- basic structure --------------------------------------------------
    @property
    def r(self) -> int:
        return nonresidue(self.p)

    def valuation(self):
        if self.zero:
            raise PreconditionError("valuation of zero")
        return self.v

    def abs_prec(self) -> int:
        return self.N if self.zero else self.v + self.N

    def unit_part(self) -> "PadicElt":
        if self.zero:
            raise PreconditionError("unit part of zero")
        return PadicElt(self.p, self.deg, 0, self.u0, self.u1, self.N)

    def residue(self):
        """(u0, u1) of the unit part mod p; (0, 0) for zero."""
        if self.zero:
            return (0, 0)
        if self.v < 0:
            raise PreconditionError("negative valuation has no residue")
        if self.v > 0:
            return (0, 0)
        return (self.u0 % self.p, self.u1 % self.p)

    def is_rational(self) -> bool:
        return self.zero or self.u1 % self.p ** self.N == 0

    def at_prec(self, N: int) -> "PadicElt":
        if self.zero:
            return PadicElt.zero_elt(self.p, N, self.deg)
        return PadicElt(self.p, self.deg, self.v, self.u0, self.u1,
                        min(self.N, N))

    def at_absprec(self, A: int) -> "PadicElt":
        """Truncate to absolute precision A (known mod p^A)."""
        if self.zero:
            return PadicElt.zero_elt(self.p, max(A, 1), self.deg)
        rel = A - self.v
        if rel <= 0:
            return PadicElt.zero_elt(self.p, max(A, 1), self.deg)
        return PadicElt(self.p, self.deg, self.v, self.u0, self.u1,
                        min(self.N, rel))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if isinstance(other, int):
            other = PadicElt.from_int(self.p, other, self.N)
        elif isinstance(other, Fraction):
            other = PadicElt.from_fraction(self.p, other, self.N)
        if not isinstance(other, PadicElt) or other.p != self.p:
            raise PreconditionError("mixed p-adic fields")
        return other

    def __add__(self, other):
        o = self._check(other)
        if self.zero:
            return o
        if o.zero:
            return self
        v = min(self.v, o.v)
        absN = min(self.abs_prec(), o.abs_prec())
        if absN <= v:
            return PadicElt.zero_elt(self.p, max(absN, 1), max(self.deg, o.deg))
        p = self.p
        s0 = self.u0 * p ** (self.v - v) + o.u0 * p ** (o.v - v)
        s1 = self.u1 * p ** (self.v - v) + o.u1 * p ** (o.v - v)
        return PadicElt(p, max(self.deg, o.deg), v, s0, s1, absN - v)

    __radd__ = __add__

    def __neg__(self):
        if self.zero:
            return self
        mod = self.p ** self.N
        return PadicElt(self.p, self.deg, self.v, -self.u0 % mod,
                        -self.u1 % mod, self.N)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check(other)
        if self.zero or o.zero:
            return PadicElt.zero_elt(self.p, min(self.N, o.N),
                                     max(self.deg, o.deg))
        N = min(self.N, o.N)
        mod = self.p ** N
        a0, a1, b0, b1 = self.u0, self.u1, o.u0, o.u1
        c0 = (a0 * b0 + a1 * b1 * self.r) % mod
        c1 = (a0 * b1 + a1 * b0) % mod
        return PadicElt(self.p, max(self.deg, o.deg), self.v + o.v, c0, c1, N)

    __rmul__ = __mul__

    def inverse(self) -> "PadicElt":
        if self.zero:
            raise ZeroDivisionError("p-adic division by zero")
        N = self.N
        mod = self.p ** N
        a0, a1 = self.u0, self.u1
        if a1 % self.p == 0:
            # rational-direction unit: invert u0 + u1 w with u1 ≡ 0 via
            # the same norm formula (norm is a unit since u0 is)
            pass
        nrm = (a0 * a0 - a1 * a1 * self.r) % mod
        ninv = pow(nrm, -1, mod)
        return PadicElt(self.p, self.deg, -self.v, a0 * ninv % mod,
                        -a1 * ninv % mod, N)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if self.zero:
            if n <= 0:
                raise ZeroDivisionError("0 ** nonpositive")
            return self
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicElt(self.p, self.deg, 0, 1, 0, self.N)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "PadicElt":
        """Frobenius w -> -w (identity on Q_p)."""
        if self.zero:
            return self
        mod = self.p ** self.N
        return PadicElt(self.p, self.deg, self.v, self.u0,
                        -self.u1 % mod, self.N)

    def norm_to_qp(self) -> "PadicElt":
        return self * self.conj()

    # -- comparison: congruence at the common precision -------------------
    def __eq__(self, other):
        try:
            o = self._check(other)
        except PreconditionError:
            return NotImplemented
        d = self - o
        return d.zero

    def __hash__(self):
        raise TypeError("PadicElt is congruence-compared; not hashable")

    def eq_mod(self, other, k: int) -> bool:
        """True iff v(self - other) >= k."""
        d = self - self._check(other)
        return d.zero or d.v >= k

    # -- display -----------------------------------------------------------
    def expansion(self, digits=None):
        if self.zero:
            return []
        digits = digits or self.N
        out = []
        u0, u1 = self.u0, self.u1
        for _ in range(min(digits, self.N)):
            out.append((u0 % self.p, u1 % self.p))
            u0 //= self.p
            u1 //= self.p
        return out

    def __repr__(self):
        if self.zero:
            return f"O({self.p}^{self.N})"
        mod = self.p ** self.N
        s = f"{self.u0 % mod}"
        if self.u1 % mod:
            s += f"+{self.u1 % mod}*w"
        if self.v:
            s = f"{self.p}^{self.v}*({s})"
        return f"{s} + O({self.p}^{self.v + self.N})"


# -- transcendental maps ----------------------------------------------------

def teichmuller(x: PadicElt) -> PadicElt:
    """The (p^deg - 1)-th root of unity congruent to x's unit part mod p."""
    if x.zero:
        raise PreconditionError("teichmuller of zero")
    if x.v != 0:
        raise PreconditionError("teichmuller needs a unit")
    p, N = x.p, x.N
    y = x
    # y -> y^(p^deg) gains one digit of agreement per step
    q = p ** x.deg
    for _ in range(N):
        y = y ** q
    return y


def _digits_base(n: int, p: int) -> int:
    d = 0
    while n:
        n //= p
        d += 1
    return d


def padic_log(x: PadicElt) -> PadicElt:
    """Iwasawa branch: log(p) = 0 and log kills Teichmuller units.

    Additive on products.  The result carries absolute precision N, the
    relative precision of the input's unit part.
    """
    if x.zero:
        raise PreconditionError("log of zero")
    p = x.p
    u = x.unit_part()
    zeta = teichmuller(u)
    y = u / zeta  # ≡ 1 mod p
    N = y.N
    one = PadicElt(p, y.deg, 0, 1, 0, N)
    t = y - one
    if t.zero:
        return PadicElt.zero_elt(p, N, x.deg)
    tv = t.v
    # last term whose contribution n*tv - v_p(n) can fall below abs prec N
    n_max = 1
    while n_max * tv - _digits_base(n_max, p) < N:
        n_max += 1
    guard = _digits_base(n_max, p) + 1
    work = N + guard
    t = PadicElt(p, t.deg, t.v, t.u0, t.u1, work)
    total = PadicElt.zero_elt(p, work, t.deg)
    term = t
    for n in range(1, n_max + 1):
        if term.zero:
            break
        contrib = term / n
        if n % 2 == 0:
            contrib = -contrib
        total = total + contrib
        term = term * t
    return total.at_absprec(N)


def padic_exp(x: PadicElt) -> PadicElt:
    """exp via its power series; requires v(x) >= 1 (p odd).

    The result is a unit known to the input's absolute precision.
    """
    p = x.p
    if x.zero:
        return PadicElt(p, x.deg, 0, 1, 0, x.N)
    if x.v < 1:
        raise PrecisionError("exp requires valuation >= 1")
    A = x.N + x.v  # absolute precision of the input
    xv = x.v
    # v(x^n/n!) >= n*xv - (n-1)//(p-1), increasing since xv >= 1 > 1/(p-1)
    n_max = 1
    while n_max * xv - (n_max - 1) // (p - 1) < A:
        n_max += 1
    guard = n_max // (p - 1) + 2
    work = A + guard
    xx = PadicElt(p, x.deg, x.v, x.u0, x.u1, work)
    total = PadicElt(p, x.deg, 0, 1, 0, work)
    term = xx
    for n in range(1, n_max + 1):
        if term.zero:
            break
        total = total + term
        term = term * xx / (n + 1)
    return total.at_absprec(A)


def _sqrt_mod_p(a: int, p: int) -> int:
    """Tonelli-Shanks in F_p."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise PreconditionError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = nonresidue(p)
    m, c, t, rr = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, rr = t * c % p, rr * b % p
    return rr


def _sqrt_residue_fp2(a0: int, a1: int, p: int) -> tuple[int, int]:
    """Square root in F_{p^2} = F_p(w), w^2 = r, by Tonelli-Shanks."""
    r = nonresidue(p)

    def mul(x, y):
        return ((x[0] * y[0] + x[1] * y[1] * r) % p,
                (x[0] * y[1] + x[1] * y[0]) % p)

    def powq(x, n):
        res, b = (1, 0), x
        while n:
            if n & 1:
                res = mul(res, b)
            b = mul(b, b)
            n >>= 1
        return res

    q = p * p - 1
    if powq((a0, a1), q // 2) != (1, 0):
        raise PreconditionError("not a square in F_p^2")
    m2, s = q, 0
    while m2 % 2 == 0:
        m2 //= 2
        s += 1
    # find a nonresidue of F_{p^2}
    z = None
    for c0 in range(p):
        for c1 in range(p):
            if c0 == 0 and c1 == 0:
                continue
            if powq((c0, c1), q // 2) == (p - 1, 0):
                z = (c0, c1)
                break
        if z:
            break
    m, c0_, t, rr = s, powq(z, m2), powq((a0, a1), m2), powq((a0, a1), (m2 + 1) // 2)
    while t != (1, 0):
        i, t2 = 0, t
        while t2 != (1, 0):
            t2 = mul(t2, t2)
            i += 1
        b = powq(c0_, 1 << (m - i - 1))
        m, c0_ = i, mul(b, b)
        t, rr = mul(t, c0_), mul(rr, b)
    return rr


def hensel_sqrt(a: PadicElt, allow_extension: bool = True) -> PadicElt:
    """A square root of a within precision; the other root is its negative.

    Odd valuation is never a square in the unramified extension.  A
    nonresidue unit of Q_p needs allow_extension, in which case the root
    is w * sqrt(a / r).
    """
    if a.zero:
        raise PreconditionError("sqrt of zero")
    p = a.p
    if a.v % 2 != 0:
        raise PreconditionError("odd valuation: not a square in Q_p or Q_p^2")
    u = a.unit_part()
    N = a.N
    if u.is_rational():
        res = u.u0 % p
        if pow(res, (p - 1) // 2, p) != 1:
            if not allow_extension:
                raise PreconditionError("nonresidue unit: extension required")
            rr = nonresidue(p)
            inner = hensel_sqrt(u / rr, allow_extension=False)
            return _scale_p_power(inner * u.w(), a.v // 2)
        y0 = (_sqrt_mod_p(res, p), 0)
    else:
        y0 = _sqrt_residue_fp2(u.u0 % p, u.u1 % p, p)
    # Newton iteration y -> (y + u/y)/2, precision doubles each step
    y = PadicElt(p, u.deg, 0, y0[0], y0[1], N)
    half = PadicElt.from_fraction(p, Fraction(1, 2), N)
    prec = 1
    while prec < N:
        y = (y + u / y) * half
        prec *= 2
    assert (y * y - u).zero, "Newton failed to converge"
    return _scale_p_power(y, a.v // 2)


def _scale_p_power(x: PadicElt, k: int) -> PadicElt:
    if x.zero or k == 0:
        return x
    return PadicElt(x.p, x.deg, x.v + k, x.u0, x.u1, x.N)


def embed_quad(p, quad, N=DEFAULT_PREC, sign=1):
    """Embed x + y*sqrt(d) into K_p via hensel_sqrt(d); sign flips the root."""
    root = hensel_sqrt(PadicElt.from_int(p, quad.d, N))
    if sign < 0:
        root = -root
    return (PadicElt.from_fraction(p, quad.x, N)
            + PadicElt.from_fraction(p, quad.y, N) * root)

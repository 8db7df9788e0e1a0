"""Rings of S-integers and the number theory behind the prime search.

Two kinds are supported: Z[1/p] (S = {infinity, p}) and the maximal order
O_F of a real quadratic field F = Q(sqrt d) of narrow class number 1
(S = archimedean places only).  Unit groups are {+-1, p} resp. {+-1, eps}
with eps the fundamental unit.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import sympy
from sympy.ntheory.residue_ntheory import discrete_log

from .errors import PreconditionError, SearchBoundError
from .quadfield import QuadElt, is_squarefree

# Real quadratic fields verified (externally) to have narrow class number 1.
# The constructor refuses anything outside this list rather than guessing.
NARROW_H1_FIELDS = frozenset({2, 3, 5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97})


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def strip_p_power(n: int, p: int) -> int:
    """n with all factors p removed; chunked for huge exponents."""
    if n == 0:
        return 0
    chunk = p ** 512
    while n % chunk == 0:
        n //= chunk
    chunk = p ** 32
    while n % chunk == 0:
        n //= chunk
    while n % p == 0:
        n //= p
    return n


def fundamental_unit(d: int) -> QuadElt:
    """Fundamental unit of O_{Q(sqrt d)} via the Pell continued fraction.

    For d = 1 mod 4 the Pell unit of Z[sqrt d] may be the cube of the true
    fundamental unit; the cube root is recovered from a real approximation
    and verified exactly.
    """
    if d <= 1 or not is_squarefree(d):
        raise PreconditionError("d must be squarefree > 1")
    a0 = isqrt(d)
    m, den, a = 0, 1, a0
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    while h * h - d * k * k not in (1, -1):
        m = den * a - m
        den = (d - m * m) // den
        a = (a0 + m) // den
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    u = QuadElt(d, h, k)
    if d % 4 == 1:
        # index of Z[sqrt d]^x in O_F^x is 1 or 3; try the cube root
        import mpmath as mp
        mp.mp.dps = 60
        ur = mp.mpf(h) + mp.mpf(k) * mp.sqrt(d)
        cr = mp.cbrt(ur)
        for sign_n in (1, -1):
            # if N(eps) = sign_n then eps + sign_n/eps = trace = 2x
            x = (cr + sign_n / cr) / 2
            y = (cr - sign_n / cr) / (2 * mp.sqrt(d))
            cand = QuadElt(d, Fraction(int(mp.nint(2 * x)), 2),
                           Fraction(int(mp.nint(2 * y)), 2))
            if cand.norm() == sign_n and cand ** 3 in (u, -u):
                return cand
    return u


class SIntRing:
    """Z[1/p] (kind 'rational') or O_F for F = Q(sqrt d) (kind 'quadratic')."""

    def __init__(self, kind: str, p: int | None = None, d: int | None = None):
        self.kind = kind
        if kind == "rational":
            if p is None or not sympy.isprime(p):
                raise PreconditionError("rational kind needs a prime p")
            self.p = p
            self.d = None
        elif kind == "quadratic":
            if d is None or d <= 1 or not is_squarefree(d):
                raise PreconditionError("quadratic kind needs squarefree d > 1")
            if d not in NARROW_H1_FIELDS:
                raise PreconditionError(
                    f"d={d} is not in the verified narrow-class-number-1 list")
            self.p = None
            self.d = d
            self._eps = None
        else:
            raise PreconditionError(f"unknown ring kind {kind!r}")

    @classmethod
    def z_inv_p(cls, p: int) -> "SIntRing":
        return cls("rational", p=p)

    @classmethod
    def quad_maximal(cls, d: int) -> "SIntRing":
        return cls("quadratic", d=d)

    # integral basis generator of O_F: omega = sqrt d or (1+sqrt d)/2
    def omega(self) -> QuadElt:
        assert self.kind == "quadratic"
        if self.d % 4 == 1:
            return QuadElt(self.d, Fraction(1, 2), Fraction(1, 2))
        return QuadElt(self.d, 0, 1)

    def eps(self) -> QuadElt:
        assert self.kind == "quadratic"
        if self._eps is None:
            self._eps = fundamental_unit(self.d)
        return self._eps

    def one(self):
        return SIntElt(self, Fraction(1) if self.kind == "rational"
                       else QuadElt(self.d, 1))

    def zero(self):
        return SIntElt(self, Fraction(0) if self.kind == "rational"
                       else QuadElt(self.d, 0))

    def elt(self, value) -> "SIntElt":
        if self.kind == "rational":
            return SIntElt(self, Fraction(value))
        if isinstance(value, (int, Fraction)):
            value = QuadElt(self.d, value)
        return SIntElt(self, value)

    def contains(self, value) -> bool:
        try:
            self.elt(value)
            return True
        except PreconditionError:
            return False

    def __eq__(self, other):
        return (isinstance(other, SIntRing) and self.kind == other.kind
                and self.p == other.p and self.d == other.d)

    def __repr__(self):
        return f"Z[1/{self.p}]" if self.kind == "rational" else f"O_Q(sqrt{self.d})"

    # -- integrality helpers -------------------------------------------
    def _intcoords(self, q: QuadElt):
        """Coordinates of q in the integral basis (1, omega), or None."""
        if self.d % 4 == 1:
            # q = x + y sqrt d = (x - y') + 2y' omega with omega=(1+sqrt d)/2
            b = 2 * q.y
            a = q.x - q.y
        else:
            a, b = q.x, q.y
        if a.denominator == 1 and b.denominator == 1:
            return int(a), int(b)
        return None


class SIntElt:
    """Element of an SIntRing; construction checks the denominator support."""

    __slots__ = ("ring", "value")

    def __init__(self, ring: SIntRing, value):
        self.ring = ring
        if ring.kind == "rational":
            value = Fraction(value)
            if strip_p_power(value.denominator, ring.p) != 1:
                raise PreconditionError(f"{value} not in {ring}")
        else:
            if not isinstance(value, QuadElt) or value.d != ring.d:
                raise PreconditionError("wrong field")
            if ring._intcoords(value) is None:
                raise PreconditionError(f"{value} is not integral in {ring}")
        self.value = value

    def _bin(self, other, op):
        if isinstance(other, SIntElt):
            other = other.value
        return SIntElt(self.ring, op(self.value, other))

    def __add__(self, other):
        return self._bin(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._bin(other, lambda x, y: x - y)

    def __mul__(self, other):
        return self._bin(other, lambda x, y: x * y)

    def __neg__(self):
        return SIntElt(self.ring, -self.value)

    def divide_exact(self, other) -> "SIntElt":
        """Division that must land back in the ring; raises otherwise."""
        if isinstance(other, SIntElt):
            other = other.value
        if self.ring.kind == "rational":
            return SIntElt(self.ring, Fraction(self.value) / Fraction(other))
        return SIntElt(self.ring, self.value / other)

    def is_zero(self):
        return self.value == 0 if self.ring.kind == "rational" else self.value.is_zero()

    def __eq__(self, other):
        if isinstance(other, SIntElt):
            other = other.value
        return self.value == other

    def __repr__(self):
        return repr(self.value)


# -- ideal predicates --------------------------------------------------------

def strip_units(x: SIntElt):
    """Remove unit factors; returns (integer data) for ideal-level work.

    rational kind: the positive integer generating x*Z[1/p] colon-intersected
    with Z, i.e. |numerator| with all powers of p removed.
    quadratic kind: a QuadElt associate chosen with integral coordinates
    (already integral) -- returned unchanged.
    """
    ring = x.ring
    if ring.kind == "rational":
        return abs(strip_p_power(Fraction(x.value).numerator, ring.p))
    return x.value


def generates_prime_ideal(x: SIntElt) -> bool:
    """True iff x generates a prime ideal of the S-integer ring."""
    if x.is_zero():
        raise PreconditionError("zero ideal")
    ring = x.ring
    if ring.kind == "rational":
        n = strip_units(x)
        return n > 1 and sympy.isprime(n)
    q = x.value
    nrm = abs(q.norm())
    assert nrm.denominator == 1
    nrm = int(nrm)
    if nrm == 1:
        return False
    if sympy.isprime(nrm):
        return True
    r = isqrt(nrm)
    if r * r != nrm or not sympy.isprime(r):
        return False
    # norm = r^2: prime iff x is an associate of the inert rational prime r
    quot = q / r
    if ring._intcoords(quot) is None:
        return False
    if abs(quot.norm()) != 1:
        return False
    disc = ring.d if ring.d % 4 == 1 else 4 * ring.d
    if r == 2:
        return ring.d % 8 == 5
    if disc % r == 0:
        return False
    return sympy.jacobi_symbol(disc % r, r) == -1


class ResidueRing:
    """(O_S / a'O_S) with enough structure to test unit surjectivity.

    rational kind: Z/nZ with n the unit-stripped modulus (p is invertible).
    quadratic kind: Z^2 / (lattice of a'*O_F) via a 2x2 Hermite normal form;
    elements are coordinate pairs on the integral basis (1, omega).
    """

    def __init__(self, modulus: SIntElt):
        if modulus.is_zero():
            raise PreconditionError("zero modulus")
        self.ring = modulus.ring
        self.modulus = modulus
        if self.ring.kind == "rational":
            n = strip_units(modulus)
            if n <= 1:
                raise PreconditionError("degenerate modulus (unit)")
            self.n = n
            self.size = n
        else:
            q = modulus.value
            om = self.ring.omega()
            rows = [self.ring._intcoords(q), self.ring._intcoords(q * om)]
            hnf = _row_hnf(rows)
            if hnf is None:
                raise PreconditionError("degenerate lattice")
            self.hnf = hnf  # basis {(a, 0), (b, c)}
            a, b, c = hnf
            self.size = a * c
            if self.size <= 1:
                raise PreconditionError("degenerate modulus (unit)")
            # omega multiplication data: omega^2 = t*omega + n0
            if self.ring.d % 4 == 1:
                self._t, self._n0 = 1, (self.ring.d - 1) // 4
            else:
                self._t, self._n0 = 0, self.ring.d

    # quadratic-kind element ops on coordinate pairs
    def reduce(self, pair):
        a, b, c = self.hnf
        x, y = pair
        k = y // c
        y -= k * c
        x -= k * b
        x %= a
        return (x, y)

    def q_mul(self, u, v):
        x1, y1 = u
        x2, y2 = v
        # (x1 + y1 w)(x2 + y2 w), w^2 = t w + n0
        x = x1 * x2 + y1 * y2 * self._n0
        y = x1 * y2 + y1 * x2 + y1 * y2 * self._t
        return self.reduce((x, y))

    def q_pow(self, u, n):
        res = self.reduce((1, 0))
        base = self.reduce(u)
        while n:
            if n & 1:
                res = self.q_mul(res, base)
            base = self.q_mul(base, base)
            n >>= 1
        return res

    def project(self, x: SIntElt):
        if self.ring.kind == "rational":
            v = Fraction(x.value)
            den = v.denominator
            return v.numerator * pow(den, -1, self.n) % self.n
        return self.reduce(self.ring._intcoords(x.value))

    def is_unit(self, elt) -> bool:
        if self.ring.kind == "rational":
            return gcd(elt, self.n) == 1
        # elt is a unit iff the lattice generated by elt*(1, omega) together
        # with the modulus lattice is all of Z^2
        x, y = elt
        t, n0 = self._t, self._n0
        a, b, c = self.hnf
        rows = [(x, y), (y * n0, x + y * t), (a, 0), (b, c)]
        hnf = _row_hnf(rows)
        return hnf is not None and hnf[0] * hnf[2] == 1

    def unit_group_order(self) -> int:
        if self.ring.kind == "rational":
            return int(sympy.totient(self.n))
        if generates_prime_ideal(self.modulus):
            return self.size - 1
        if self.size > 2 * 10 ** 6:
            raise SearchBoundError("residue ring too large to enumerate")
        a, _, c = self.hnf
        return sum(1 for x in range(a) for y in range(c)
                   if self.is_unit((x, y)))


def _row_hnf(rows):
    """Triangular basis {(a, 0), (b, c)} of the row lattice, or None.

    a, c > 0 and 0 <= b < a; returns (a, b, c).
    """
    work = [list(r) for r in rows if r != (0, 0)]
    if not work:
        return None
    # eliminate second coordinates down to a single row by euclid
    while True:
        nz = [r for r in work if r[1] != 0]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda r: abs(r[1]))
        piv = nz[0]
        for r in nz[1:]:
            q = r[1] // piv[1]
            r[0] -= q * piv[0]
            r[1] -= q * piv[1]
    carrier = next((r for r in work if r[1] != 0), None)
    firsts = [r[0] for r in work if r[1] == 0]
    g = 0
    for v in firsts:
        g = gcd(g, abs(v))
    if carrier is None or g == 0:
        return None
    a = g
    b, c = carrier
    if c < 0:
        b, c = -b, -c
    return (a, b % a, c)


def unit_reduction_surjective(x: SIntElt) -> bool:
    """Is O_S^x -> (O_S/x)^x surjective?

    The unit group is generated by -1 and p (resp. -1 and the fundamental
    unit), so this compares the subgroup they generate with the full unit
    group of the residue ring.
    """
    rr = ResidueRing(x)
    ring = x.ring
    full = rr.unit_group_order()
    if ring.kind == "rational":
        n = rr.n
        if gcd(ring.p, n) != 1:
            return False
        op = int(sympy.n_order(ring.p, n))
        minus1_in = (n <= 2) or (op % 2 == 0 and pow(ring.p, op // 2, n) == n - 1)
        sub = op if minus1_in else 2 * op
        return sub == full
    eps = ring.eps()
    e = rr.project(ring.elt(eps))
    if not rr.is_unit(e):
        return False
    one = rr.reduce((1, 0))
    minus1 = rr.reduce((-1, 0))
    cur = e
    seen_minus1 = cur == minus1
    k = 1
    while cur != one:
        cur = rr.q_mul(cur, e)
        k += 1
        if cur == minus1:
            seen_minus1 = True
        if k > full:
            return False
    sub = k if (seen_minus1 or minus1 == one) else 2 * k
    return sub == full


def find_unit_congruent(ring: SIntRing, target: SIntElt, modulus: SIntElt,
                        max_exp: int | None = None):
    """A unit u of O_S with u = target mod the modulus, as an exact element.

    rational kind: u = +-p^k found by discrete logarithm in (Z/n)^x (the
    enumeration the surjectivity bound suggests is hopeless for large
    moduli).  quadratic kind: u = +-eps^k by bounded two-sided enumeration.

    max_exp caps |k|: the exact unit p^k has ~k digits, so callers that
    must multiply the result back reject exponents past their budget.
    """
    rr = ResidueRing(modulus)
    if ring.kind == "rational":
        n = rr.n
        t = rr.project(target)
        if gcd(t, n) != 1:
            raise SearchBoundError("target not a unit in residue ring")
        base = ring.p % n
        order = int(sympy.n_order(base, n))
        best = None
        for sign in (1, -1):
            try:
                k = int(discrete_log(n, t * sign % n, base))
            except ValueError:
                continue
            for kk in (k, k - order):
                if best is None or abs(kk) < abs(best[1]):
                    best = (sign, kk)
        if best is None:
            raise SearchBoundError(
                "no unit +-p^k congruent to target; reduction not surjective?")
        sign, k = best
        if max_exp is not None and abs(k) > max_exp:
            raise SearchBoundError(f"unit exponent {k} exceeds cap {max_exp}")
        return ring.elt(sign * Fraction(ring.p) ** k)
    eps = ring.eps()
    eps_inv = eps.inverse()  # +-conj(eps), exactly integral since N = +-1
    t = rr.project(target)
    bound = rr.unit_group_order()
    minus1 = rr.reduce((-1, 0))
    cur = {1: rr.reduce((1, 0)), -1: rr.reduce((1, 0))}
    step = {1: rr.project(ring.elt(eps)), -1: rr.project(ring.elt(eps_inv))}
    for k in range(bound + 1):
        for direction in (1, -1):
            val = cur[direction]
            if val == t:
                return ring.elt(eps ** (direction * k))
            if rr.q_mul(minus1, val) == t:
                return ring.elt(-(eps ** (direction * k)))
        cur[1] = rr.q_mul(cur[1], step[1])
        cur[-1] = rr.q_mul(cur[-1], step[-1])
    raise SearchBoundError("unit search exhausted")

"""Generic exact 2x2 matrices and cusps.

Mat2 entries can be ints, Fractions, QuadElt or PadicElt; the class only
relies on ring operations, so the same carrier serves the decomposition,
the modular symbol paths, and Moebius actions on p-adic arguments.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


class Cusp:
    """Element of P^1(Q) as a normalized coprime pair; (1, 0) is infinity."""

    __slots__ = ("n", "d")

    def __init__(self, n, d=1):
        if isinstance(n, Fraction) or isinstance(d, Fraction):
            fr = Fraction(n) / Fraction(d) if d != 0 else None
            if fr is None:
                self.n, self.d = 1, 0
                return
            self.n, self.d = fr.numerator, fr.denominator
            return
        n, d = int(n), int(d)
        if d == 0:
            if n == 0:
                raise ZeroDivisionError("0/0 is not a cusp")
            self.n, self.d = 1, 0
            return
        g = gcd(abs(n), abs(d))
        n, d = n // g, d // g
        if d < 0:
            n, d = -n, -d
        self.n, self.d = n, d

    @property
    def is_infinity(self):
        return self.d == 0

    def as_fraction(self) -> Fraction:
        if self.d == 0:
            raise ZeroDivisionError("infinity")
        return Fraction(self.n, self.d)

    def __eq__(self, other):
        return isinstance(other, Cusp) and self.n == other.n and self.d == other.d

    def __hash__(self):
        return hash((self.n, self.d))

    def __repr__(self):
        return "oo" if self.d == 0 else f"{self.n}/{self.d}" if self.d != 1 else str(self.n)


CUSP_ZERO = Cusp(0)
CUSP_INF = Cusp(1, 0)


class Mat2:
    """2x2 matrix (a b; c d) over any exact ring."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls, one=1):
        return cls(one, one * 0, one * 0, one)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __mul__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            base = base * base
            n >>= 1
        if result is None:
            one = self.a * 0 + 1 if isinstance(self.a, (int, Fraction)) else None
            if one is None:
                raise ValueError("identity power needs explicit ring one")
            return Mat2(one, one * 0, one * 0, one)
        return result

    def adjugate(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        det = self.det()
        if isinstance(det, int):
            det = Fraction(det)
        adj = self.adjugate()
        if hasattr(det, "inverse"):
            dinv = det.inverse()
        else:
            dinv = 1 / det
        return Mat2(adj.a * dinv, adj.b * dinv, adj.c * dinv, adj.d * dinv)

    def scale(self, s) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return (self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    # -- actions ---------------------------------------------------------
    def act_cusp(self, x: Cusp) -> Cusp:
        """Projective action on P^1(Q); entries must be int/Fraction."""
        n = self.a * x.n + self.b * x.d
        d = self.c * x.n + self.d * x.d
        return Cusp(Fraction(n), Fraction(d))

    def act(self, tau):
        """Moebius action on a ring element (e.g. PadicElt); None is infinity."""
        if tau is None:
            den = self.c
            if _is_zeroish(den):
                return None
            return _divide(self.a, den)
        den = self.c * tau + self.d
        if _is_zeroish(den):
            return None
        return _divide(self.a * tau + self.b, den)

    def __repr__(self):
        return f"[{self.a} {self.b}; {self.c} {self.d}]"


def _is_zeroish(x):
    if hasattr(x, "zero"):
        return x.zero
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


def _divide(num, den):
    if isinstance(den, int):
        return Fraction(num) / den if isinstance(num, (int, Fraction)) else num / den
    return num / den


def mat_int(a, b, c, d) -> Mat2:
    return Mat2(int(a), int(b), int(c), int(d))


def int_content(m: Mat2) -> int:
    return gcd(gcd(abs(m.a), abs(m.b)), gcd(abs(m.c), abs(m.d)))


def strip_p_content(m: Mat2, p: int) -> Mat2:
    """Divide out any common p-power (projectively trivial)."""
    g = int_content(m)
    k = 1
    while g % p == 0:
        g //= p
        k *= p
    if k == 1:
        return m
    return Mat2(m.a // k, m.b // k, m.c // k, m.d // k)

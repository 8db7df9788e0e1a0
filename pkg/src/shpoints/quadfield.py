"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

Elements are stored as x + y*sqrt(d) with x, y rational and d a fixed
squarefree integer > 1.  Everything is exact; no floating point enters
except through the explicit real_value() helper.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import PreconditionError


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1
    return True


class QuadElt:
    """x + y*sqrt(d), exact."""

    __slots__ = ("d", "x", "y")

    def __init__(self, d: int, x, y=0):
        if d <= 1 or not is_squarefree(d):
            raise PreconditionError(f"d must be squarefree > 1, got {d}")
        self.d = d
        self.x = Fraction(x)
        self.y = Fraction(y)

    # -- constructors -------------------------------------------------
    @classmethod
    def sqrt_d(cls, d: int) -> "QuadElt":
        return cls(d, 0, 1)

    def _coerce(self, other):
        if isinstance(other, QuadElt):
            if other.d != self.d:
                raise PreconditionError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElt(self.d, other)
        return NotImplemented

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElt(self.d, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElt(self.d, self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElt(
            self.d,
            self.x * o.x + self.y * o.y * self.d,
            self.x * o.y + self.y * o.x,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QuadElt(self.d, -self.x, -self.y)

    def conj(self) -> "QuadElt":
        return QuadElt(self.d, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def inverse(self) -> "QuadElt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElt(self.d, self.x / n, -self.y / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElt(self.d, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_rational(self) -> bool:
        return self.y == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.d, self.x, self.y))

    def __bool__(self):
        return not self.is_zero()

    # -- embeddings -----------------------------------------------------
    def real_value(self, sqrt_d_value=None) -> float:
        """Image under sqrt(d) -> positive real root (or a supplied value)."""
        if sqrt_d_value is None:
            sqrt_d_value = self.d ** 0.5
        return float(self.x) + float(self.y) * sqrt_d_value

    def __repr__(self):
        if self.y == 0:
            return str(self.x)
        ys = f"{self.y}*sqrt{self.d}"
        if self.x == 0:
            return ys
        return f"{self.x}+{ys}" if self.y > 0 else f"{self.x}{ys}"


def parse_quad(text: str, d: int) -> QuadElt:
    """Parse 'a/b' or 'a/b+c/e*sqrtD' style exact literals."""
    text = text.replace(" ", "")
    key = f"sqrt{d}"
    if key not in text:
        return QuadElt(d, Fraction(text))
    head, _, _ = text.partition(key)
    if head.endswith("*"):
        head = head[:-1]
    # split off the rational part, if any: scan for the last +/- at depth 0
    cut = 0
    for i in range(1, len(head)):
        if head[i] in "+-" and head[i - 1] not in "+-*/":
            cut = i
    if cut:
        x, ycoef = head[:cut], head[cut:]
    else:
        x, ycoef = "0", head
    if ycoef in ("", "+"):
        ycoef = "1"
    elif ycoef == "-":
        ycoef = "-1"
    return QuadElt(d, Fraction(x), Fraction(ycoef))

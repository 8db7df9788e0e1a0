"""Elementary matrix decomposition in Gamma_1(N) over S-integers.

Implements the explicit unipotent factorization (given a unit congruence
c = u + t*a), the prime-search decomposition algorithm, and the variant
for unit-determinant matrices.  Factor lists multiply back exactly to the
input; that product identity is the contract everything else tests.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, SearchBoundError
from .matrices import Mat2
from .quadfield import QuadElt, parse_quad
from .sintegers import (SIntElt, SIntRing, find_unit_congruent,
                        generates_prime_ideal, unit_reduction_surjective)

DEFAULT_SEARCH_BOUND = 10 ** 6


@dataclass(frozen=True)
class LevelIdeal:
    """Principal ideal defining the congruence level, coprime to S."""

    ring: SIntRing
    generator: SIntElt

    def __post_init__(self):
        if self.generator.is_zero():
            raise PreconditionError("level ideal must be nonzero")

    def contains(self, x) -> bool:
        if not isinstance(x, SIntElt):
            x = self.ring.elt(x)
        try:
            x.divide_exact(self.generator)
            return True
        except PreconditionError:
            return False


@dataclass(frozen=True)
class ElemFactor:
    """U(x) = (1 x; 0 1), L(y) = (1 0; y 1), D(u) = (1 0; 0 u)."""

    tag: str  # "U" | "L" | "D"
    param: SIntElt

    def matrix(self) -> Mat2:
        ring = self.param.ring
        one = ring.one().value
        zero = ring.zero().value
        x = self.param.value
        if self.tag == "U":
            return Mat2(one, x, zero, one)
        if self.tag == "L":
            return Mat2(one, zero, x, one)
        if self.tag == "D":
            return Mat2(one, zero, zero, x)
        raise PreconditionError(f"bad factor tag {self.tag!r}")

    def check_membership(self, level: LevelIdeal):
        if self.tag == "L" and not level.contains(self.param):
            raise PreconditionError(f"lower factor {self.param} not in level ideal")


def ring_mat(ring: SIntRing, entries) -> Mat2:
    a, b, c, d = (ring.elt(e).value for e in entries)
    return Mat2(a, b, c, d)


def in_gamma1(m: Mat2, level: LevelIdeal) -> bool:
    ring = level.ring
    one = ring.one().value
    try:
        det_ok = m.det() == one
    except Exception:
        det_ok = False
    return (det_ok and level.contains(ring.elt(m.a - one))
            and level.contains(ring.elt(m.c))
            and level.contains(ring.elt(m.d - one)))


def product_of(factors, ring: SIntRing) -> Mat2:
    out = Mat2(ring.one().value, ring.zero().value,
               ring.zero().value, ring.one().value)
    for f in factors:
        out = out * f.matrix()
    return out


def verify_product(factors, gamma: Mat2, ring: SIntRing) -> bool:
    return product_of(factors, ring) == gamma


def lemma_factorization(gamma: Mat2, u: SIntElt, t: SIntElt,
                        level: LevelIdeal) -> list[ElemFactor]:
    """Four unipotent factors of gamma given c = u + t*a with u a unit.

    Returns [L(c + t(1-a)), U(-1/u), L(u(1-a)), U(x)]; the last parameter
    is read off the triangularized product.
    """
    ring = level.ring
    a, c = ring.elt(gamma.a), ring.elt(gamma.c)
    if not (c.value == (u.value * 1 + t.value * a.value)):
        raise PreconditionError("c != u + t*a")
    one = ring.one()
    uinv = ring.elt(1 / Fraction(u.value) if ring.kind == "rational"
                    else u.value.inverse())
    f1 = ElemFactor("L", c + t * (one - a))
    f2 = ElemFactor("U", -uinv)
    f3 = ElemFactor("L", u * (one - a))
    partial = (f1.matrix() * f2.matrix() * f3.matrix())
    rem = partial.inverse() * gamma  # must be (1 x; 0 1)
    x = ring.elt(rem.b)
    if not (rem.a == one.value and ring.elt(rem.c).is_zero()
            and rem.d == one.value):
        raise PreconditionError("factorization postcondition violated")
    f4 = ElemFactor("U", x)
    for f in (f1, f3):
        f.check_membership(level)
    return [f1, f2, f3, f4]


def _lambda_candidates(ring: SIntRing, bound: int):
    """0, 1, -1, 2, -2, ... resp. coefficient shells for quadratic rings."""
    if ring.kind == "rational":
        yield ring.elt(0)
        for k in range(1, bound + 1):
            yield ring.elt(k)
            yield ring.elt(-k)
        return
    om = ring.omega()
    yield ring.elt(QuadElt(ring.d, 0))
    shell = 0
    produced = 1
    while produced < 4 * bound:
        shell += 1
        pts = []
        for x in range(-shell, shell + 1):
            for y in range(-shell, shell + 1):
                if max(abs(x), abs(y)) == shell:
                    pts.append((x, y))
        for x, y in sorted(pts):
            yield ring.elt(QuadElt(ring.d, x) + QuadElt(ring.d, y) * om)
            produced += 1


def _compact(factors, ring: SIntRing) -> list[ElemFactor]:
    out = []
    for f in factors:
        if f.tag in ("U", "L") and f.param.is_zero():
            continue
        if f.tag == "D" and f.param == ring.one():
            continue
        out.append(f)
    return out


MAX_UNIT_EXP = 30_000


def decompose(gamma: Mat2, level: LevelIdeal,
              search_bound: int = DEFAULT_SEARCH_BOUND,
              max_unit_exp: int = MAX_UNIT_EXP) -> list[ElemFactor]:
    """gamma in Gamma_1(level) as a product of <= 5 elementary factors.

    Searches lambda (in the fixed deterministic order) such that
    a' = a + lambda*c generates a prime ideal with surjective unit
    reduction, then closes with the unit congruence and the four-factor
    lemma.  The prime search is GRH-conditional, hence the bound.  A
    candidate whose unit congruence needs an exponent past max_unit_exp
    (factor entries grow like p^|k|) is skipped in favor of the next one.
    """
    ring = level.ring
    if not in_gamma1(gamma, level):
        raise PreconditionError("matrix not in Gamma_1(level)")
    c = ring.elt(gamma.c)
    if c.is_zero():
        return _decompose_triangular(gamma, level)
    one = ring.one()
    if gamma.a == one.value and ring.elt(gamma.b).is_zero():
        return [ElemFactor("L", c)]
    tried = 0
    for lam in _lambda_candidates(ring, search_bound):
        tried += 1
        if tried > search_bound:
            break
        aprime = ring.elt(gamma.a) + lam * c
        if aprime.is_zero():
            continue
        try:
            if not generates_prime_ideal(aprime):
                continue
            if not unit_reduction_surjective(aprime):
                continue
            gamma_p = ElemFactor("U", lam).matrix() * gamma
            u = find_unit_congruent(ring, ring.elt(gamma_p.c), aprime,
                                    max_exp=max_unit_exp)
        except (PreconditionError, SearchBoundError):
            continue
        t = (ring.elt(gamma_p.c) - u).divide_exact(aprime)
        factors = lemma_factorization(gamma_p, u, t, level)
        out = _compact([ElemFactor("U", -lam)] + factors, ring)
        assert verify_product(out, gamma, ring)
        assert len(out) <= 5
        return out
    raise SearchBoundError(
        "lambda search exhausted: no prime a + lambda*c with surjective unit "
        "reduction within bound (GRH-conditional step); raise search_bound")


def _decompose_triangular(gamma: Mat2, level: LevelIdeal) -> list[ElemFactor]:
    """Degenerate c = 0 case: gamma = (a b; 0 d) with ad = 1, a = 1 mod level.

    If a = 1 the matrix is already elementary.  Otherwise the explicit
    four-factor identity
        gamma = U((b-1)a) L(d-1) U(1) L(-(d-1)a)
    applies: d - 1 lies in the level ideal, and so does its a-multiple.
    """
    ring = level.ring
    one = ring.one()
    if gamma.a == one.value:
        return _compact([ElemFactor("U", ring.elt(gamma.b))], ring)
    a = ring.elt(gamma.a)
    b = ring.elt(gamma.b)
    d = ring.elt(gamma.d)
    out = _compact([
        ElemFactor("U", (b - one) * a),
        ElemFactor("L", d - one),
        ElemFactor("U", one),
        ElemFactor("L", -(d - one) * a),
    ], ring)
    for f in out:
        f.check_membership(level)
    assert verify_product(out, gamma, ring)
    return out


def decompose_unit_det(gamma: Mat2, level: LevelIdeal,
                       search_bound: int = DEFAULT_SEARCH_BOUND) -> list[ElemFactor]:
    """Variant for det(gamma) a unit: same search, trailing D(det) factor."""
    ring = level.ring
    det = ring.elt(gamma.det())
    one = ring.one()
    if det == one:
        return decompose(gamma, level, search_bound)
    # require a = 1, c = 0 mod level
    if not (level.contains(ring.elt(gamma.a) - one) and level.contains(ring.elt(gamma.c))):
        raise PreconditionError("matrix not congruent to (1 *; 0 u) mod level")
    if ring.kind == "rational":
        dinv = ring.elt(1 / Fraction(det.value))
    else:
        if abs(det.value.norm()) != 1:
            raise PreconditionError("determinant is not a unit")
        dinv = ring.elt(det.value.inverse())
    # strip the unit-diagonal on the right and decompose the det-1 part
    d_factor = ElemFactor("D", det)
    core = gamma * d_factor.matrix().inverse()
    if ring.kind == "quadratic":
        core = Mat2(*(v if isinstance(v, QuadElt) else QuadElt(ring.d, v)
                      for v in core.entries()))
    if ring.elt(core.c).is_zero() and core.a == one.value:
        out = _compact([ElemFactor("U", ring.elt(core.b)), d_factor], ring)
        assert verify_product(out, gamma, ring)
        return out
    inner = decompose(core, level, search_bound)
    out = _compact(inner + [d_factor], ring)
    assert verify_product(out, gamma, ring)
    return out


def random_gamma1(level: LevelIdeal, word_length: int, seed: int,
                  height: int = 3) -> Mat2:
    """Deterministic pseudo-random word in the elementary generators."""
    ring = level.ring
    rng = random.Random(seed)
    out = Mat2(ring.one().value, ring.zero().value,
               ring.zero().value, ring.one().value)
    for i in range(word_length):
        coef = rng.randint(-height, height)
        if ring.kind == "rational" and rng.random() < 0.3:
            coef = Fraction(coef, ring.p ** rng.randint(1, 2))
        if rng.random() < 0.5:
            f = ElemFactor("U", ring.elt(coef))
        else:
            f = ElemFactor("L", level.generator * ring.elt(coef))
        out = out * f.matrix()
    return out


# -- text serialization -------------------------------------------------------

def factors_to_text(factors) -> str:
    lines = []
    for f in factors:
        lines.append(f"{f.tag} {f.param.value}")
    return "\n".join(lines)


def factors_from_text(text: str, ring: SIntRing) -> list[ElemFactor]:
    out = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        tag, _, lit = line.partition(" ")
        if tag not in ("U", "L", "D"):
            raise PreconditionError(f"bad factor line {line!r}")
        if ring.kind == "rational":
            val = ring.elt(Fraction(lit))
        else:
            val = ring.elt(parse_quad(lit, ring.d))
        out.append(ElemFactor(tag, val))
    return out

"""Algebraic recognition of p-adic values and matching against known points.

Recognition is lattice-based: a small integer relation between 1, the
embedded sqrt(D), and the unknown value (or its square) is found by LLL
and certified by re-embedding.  Matching compares logarithms and
valuations of Tate parameters up to powers of q and small multiples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .integrate import MultIntResult
from .padic import PadicElt, embed_quad, hensel_sqrt, padic_log
from .quadfield import QuadElt


@dataclass
class IntLattice:
    basis: list[list[int]]

    def __post_init__(self):
        if not self.basis or len(self.basis) > 8:
            raise PreconditionError("dimension must be between 1 and 8")

    def dim(self):
        return len(self.basis)


LLL_DELTA = Fraction(99, 100)


def lattice_reduce(lat: IntLattice, delta: Fraction = LLL_DELTA) -> IntLattice:
    """Textbook LLL over exact rationals."""
    b = [list(map(int, row)) for row in lat.basis]
    n = len(b)

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gso():
        bstar = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                num = sum(Fraction(x) * y for x, y in zip(b[i], bstar[j]))
                den = sum(y * y for y in bstar[j])
                mu[i][j] = num / den
                v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                bstar, mu = gso()
        nk = sum(y * y for y in bstar[k])
        nk1 = sum(y * y for y in bstar[k - 1])
        if nk >= (delta - mu[k][k - 1] ** 2) * nk1:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso()
            k = max(k - 1, 1)
    return IntLattice(b)


def is_size_reduced(lat: IntLattice, delta: Fraction = LLL_DELTA) -> bool:
    """Check size reduction and the Lovasz condition directly."""
    b = lat.basis
    n = len(b)
    bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in b[i]]
        for j in range(i):
            num = sum(Fraction(x) * y for x, y in zip(b[i], bstar[j]))
            den = sum(y * y for y in bstar[j])
            mu[i][j] = num / den
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        nk = sum(y * y for y in bstar[k])
        nk1 = sum(y * y for y in bstar[k - 1])
        if nk < (delta - mu[k][k - 1] ** 2) * nk1:
            return False
    return True


# -- recognition --------------------------------------------------------------

def _component_pair(x: PadicElt, prec: int):
    """(x0, x1) integer components of x = x0 + x1 w mod p^prec; x integral."""
    if x.zero:
        return 0, 0
    if x.v < 0:
        raise PreconditionError("negative valuation; scale first")
    mod = x.p ** prec
    pv = x.p ** x.v
    return (x.u0 * pv % mod, x.u1 * pv % mod)


def recognize_quadratic(x: PadicElt, D: int, height_bound: int, prec: int):
    """x as a + b sqrt(D) with small rational a, b, or None.

    Finds (n0, n1, n2) with n0 + n1 s - n2 x = 0 mod p^prec via a 3-dim
    lattice (s = the embedded sqrt(D)), then certifies by re-embedding.
    """
    p = x.p
    if p ** prec <= (2 * height_bound) ** 3:
        raise PreconditionError("precision too small for the height bound")
    if x.v < 0:
        return None  # denominators at p are not in scope for table values
    s = _sqrtD_canonical(p, D, prec + 2)
    s0, s1 = _component_pair(s, prec)
    assert s0 == 0 and s1 % p != 0
    x0, x1 = _component_pair(x.at_prec(prec + 2), prec)
    mod = p ** prec
    e = x1 * pow(s1, -1, mod) % mod
    lat = IntLattice([[x0, e, 1], [mod, 0, 0], [0, mod, 0]])
    red = lattice_reduce(lat)
    for row in sorted(red.basis, key=lambda r: sum(v * v for v in r)):
        n0, n1, n2 = row
        if n2 == 0:
            continue
        if max(abs(n0), abs(n1), abs(n2)) > height_bound:
            continue
        cand = _quad_from_sqrtD(D, Fraction(n0, n2), Fraction(n1, n2))
        back = embed_quad(p, cand, prec)
        diff = back - x
        if diff.zero or diff.v >= prec - 1:
            return cand
    return None


def _squarefree(D):
    from .darmon import squarefree_part
    return squarefree_part(D)


def _sqrtD_canonical(p: int, D: int, prec: int) -> PadicElt:
    """sqrt(D) under the same root convention embed_quad uses (via sqrt d0)."""
    d0 = _squarefree(D)
    m = 1
    while m * m * d0 != D:
        m += 1
    return m * hensel_sqrt(PadicElt.from_int(p, d0, prec))


def _quad_from_sqrtD(D: int, a: Fraction, b: Fraction) -> QuadElt:
    """a + b*sqrt(D) expressed over the squarefree radicand."""
    d0 = _squarefree(D)
    msq = D // d0
    m = 1
    while m * m < msq:
        m += 1
    return QuadElt(d0, a, b * m)


def recognize_degree2_over_K(x: PadicElt, D: int, height_bound: int,
                             prec: int):
    """Monic quadratic over Q(sqrt D) vanishing at x, or None.

    Uses the 6 unknown integer coordinates of (m0 + m1 s) x^2 +
    (m2 + m3 s) x + (m4 + m5 s) = 0 embedded in an 8-dim lattice.
    """
    p = x.p
    if x.v < 0:
        return None
    s = _sqrtD_canonical(p, D, prec + 4)
    mod = p ** prec
    vals = []
    xx = x.at_prec(prec + 4)
    for coeff in (xx * xx, s * xx * xx, xx, s * xx,
                  PadicElt.from_int(p, 1, prec + 4), s):
        vals.append(_component_pair(coeff, prec))
    # identity block plus congruence columns weighted so that any nonzero
    # residual outweighs every admissible coefficient vector
    scale = 1024 * height_bound
    rows = []
    for i in range(6):
        rows.append([1 if j == i else 0 for j in range(6)]
                    + [scale * vals[i][0], scale * vals[i][1]])
    rows.append([0] * 6 + [scale * mod, 0])
    rows.append([0] * 6 + [0, scale * mod])
    red = lattice_reduce(IntLattice(rows))
    for row in sorted(red.basis, key=lambda r: sum(v * v for v in r)):
        m = row[:6]
        if all(v == 0 for v in m):
            continue
        if max(abs(v) for v in m) > height_bound:
            continue
        lead = _quad_from_sqrtD(D, Fraction(m[0]), Fraction(m[1]))
        if lead.is_zero():
            continue
        if row[6] or row[7]:  # congruence columns of a true relation vanish
            continue
        beta = _quad_from_sqrtD(D, Fraction(m[2]), Fraction(m[3])) / lead
        gamma = _quad_from_sqrtD(D, Fraction(m[4]), Fraction(m[5])) / lead
        bb = embed_quad(p, beta, prec)
        gg = embed_quad(p, gamma, prec)
        resid = xx * xx + bb * xx + gg
        if resid.zero or resid.v >= prec - 1:
            return (beta, gamma)  # x^2 + beta x + gamma
    return None


# -- matching against global points -------------------------------------------

@dataclass
class MatchResult:
    matched: bool
    n: int = 0
    m: int = 0
    q_power: int = 0
    embedding_sign: int = 0

    def __repr__(self):
        if not self.matched:
            return "unmatched"
        return (f"matched: n*P_global ~ m'*J with (n, m') = "
                f"({self.n}, {self.m}), sign {self.embedding_sign}")


def match_global_point(J: MultIntResult, multiplier: int, point_xy, tate,
                       prec: int, bound: int = 20) -> MatchResult:
    """Compare J against the image of a known global point.

    Searches n, m' with |n|, |m'| <= bound and both sqrt(D) embeddings for
    n*log(u_P) = m'*log(J) + k*log(q), where k is forced by the valuation
    congruence mod v_p(q).  Logs are compared exactly at the stated
    precision (the Iwasawa branch leaves no further ambiguity).
    """
    E = tate.curve
    p = E.p
    X_alg, Y_alg = point_xy
    qv = tate.q
    logq = padic_log(qv)
    vq = qv.v
    vJ = J.valuation
    if vJ.denominator != 1:
        raise PreconditionError("resolve half-integral valuation first")
    vJ = int(vJ)
    best = None
    for sign in (1, -1):
        X = embed_quad(p, X_alg, tate.work, sign=sign)
        Y = embed_quad(p, Y_alg, tate.work, sign=sign)
        if not E.is_on_curve(X.at_absprec(prec), Y.at_absprec(prec)):
            raise PreconditionError("global point is not on the curve")
        uP = tate.u_from_point((X, Y))
        luP = padic_log(uP)
        for n in range(1, bound + 1):
            for m in range(-bound, bound + 1):
                if m == 0:
                    continue
                num = n * uP.v - m * vJ
                if num % vq:
                    continue
                k = num // vq
                diff = n * luP - m * J.log_value - k * logq
                if diff.zero or diff.v >= prec:
                    cand = (abs(n) + abs(m), n, m, k, sign)
                    if best is None or cand < best:
                        best = cand
    if best is None:
        return MatchResult(matched=False)
    _, n, m, k, sign = best
    return MatchResult(matched=True, n=n, m=m, q_power=k, embedding_sign=sign)

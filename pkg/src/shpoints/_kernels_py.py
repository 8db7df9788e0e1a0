"""Pure-Python integer kernels for the hot inner loops.

These are the reference implementations; _kernels.pyx mirrors them with C
integer types.  Everything here is exact integer arithmetic: the numeric
(mpmath) work happens once per coset in modsym, after which path values,
measures and moments reduce to continued fractions and table lookups.
"""
from __future__ import annotations

BACKEND = "python"


def ap_good(b2: int, b4: int, b6: int, ell: int) -> int:
    """Trace of Frobenius at a good odd prime via a quadratic-character sum."""
    sq = bytearray(ell)
    for t in range((ell - 1) // 2 + 1):
        sq[t * t % ell] = 1
    s = 0
    for x in range(ell):
        f = (((4 * x + b2) * x + 2 * b4) * x + b6) % ell
        if f:
            s += 1 if sq[f] else -1
    return -s


def phi_sum(num: int, den: int, N: int, idx_of, vals) -> int:
    """Value of the path from infinity to num/den as a sum of coset values.

    Walks the continued-fraction convergents; each unimodular piece
    contributes the table value of its bottom row's projective class.
    """
    if den == 0:
        return 0
    if den < 0:
        num, den = -num, -den
    total = 0
    pl, ql = 0, 1   # p_{-2}, q_{-2}
    pp, qq = 1, 0   # p_{-1}, q_{-1}
    j = 0
    while den:
        a = num // den
        num, den = den, num - a * den
        pn, qn = a * pp + pl, a * qq + ql
        # bottom row (q_j, eps*q_{j-1}) with eps = (-1)^(j-1)
        eps = -1 if j % 2 == 0 else 1
        total += vals[idx_of[(qn % N) * N + (eps * qq) % N]]
        pl, ql = pp, qq
        pp, qq = pn, qn
        j += 1
    return total


def pair_value(rn, rd, sn, sd, N, idx_of, vals) -> int:
    """Modular symbol of the path r -> s, exact integer."""
    return phi_sum(sn, sd, N, idx_of, vals) - phi_sum(rn, rd, N, idx_of, vals)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _strip_p(a, b, c, d, p):
    while a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        a //= p
        b //= p
        c //= p
        d //= p
    return a, b, c, d


def _mu_affine(t, j, k, p, rn, rd, sn, sd, N, idx_of, vals):
    """Measure of the ball (t/p^j) + p^k Zp; k must land even here."""
    if k % 2:
        # split into the p children (even level); rescale the center
        # representation when the child centers need a deeper denominator
        if k + j >= 0:
            return sum(
                _mu_affine(t + a * p ** (k + j), j, k + 1, p,
                           rn, rd, sn, sd, N, idx_of, vals)
                for a in range(p))
        return sum(
            _mu_affine(t * p ** (-k - j) + a, -k, k + 1, p,
                       rn, rd, sn, sd, N, idx_of, vals)
            for a in range(p))
    m = k + j
    if m >= 0:
        # canonical matrix (p^(k+j), t; 0, p^j), adjugate action on cusps
        an = p ** j * rn - t * rd
        ad = p ** m * rd
        bn = p ** j * sn - t * sd
        bd = p ** m * sd
    else:
        # ball p^k Zp with k <= -j: matrix (1, 0; 0, p^-k)
        an, ad = rn, p ** (-k) * rd
        bn, bd = sn, p ** (-k) * sd
    return pair_value(an, ad, bn, bd, N, idx_of, vals)


def measure_ball(A, B, C, D, p, rn, rd, sn, sd, N, idx_of, vals) -> int:
    """mu{r -> s}(g Zp) for an integer matrix g = (A B; C D), det != 0.

    Canonicalizes the ball: complements (balls containing infinity) flip
    sign, affine balls reduce to (center, radius) standard form whose
    matrix is reachable inside the p-arithmetic group.
    """
    A, B, C, D = _strip_p(A, B, C, D, p)
    det = A * D - B * C
    if det == 0:
        raise ZeroDivisionError("singular ball matrix")
    sign = 1
    if C != 0 and (D == 0 or _vp(D, p) >= _vp(C, p)):
        # infinity lies in the ball: pass to the complement
        A, B, C, D = B * p, A, D * p, C
        A, B, C, D = _strip_p(A, B, C, D, p)
        det = A * D - B * C
        sign = -1
    # now infinity is outside: D != 0 and (C == 0 or v(D) < v(C))
    vdet = _vp(det, p)
    vD = _vp(D, p)
    k = vdet - 2 * vD
    # center B/D truncated to a p-rational t/p^j at level p^k
    if B == 0:
        t, j = 0, 0
    else:
        vB = _vp(B, p)
        Bs = B // p ** vB
        Ds = D // p ** vD
        j = max(0, vD - vB)
        m = k + j
        if m <= 0:
            t = 0
        else:
            pm = p ** m
            t = (p ** (vB - vD + j) * Bs % pm) * pow(Ds, -1, pm) % pm
    return sign * _mu_affine(t, j, k, p, rn, rd, sn, sd, N, idx_of, vals)


def moments_ball(QA, QB, QC, QD, p, depth, n_max, mod,
                 rn, rd, sn, sd, N, idx_of, vals):
    """Moments of mu at the ball Q*Zp: sums of c^n * mu(Q*(c + p^depth Zp)).

    Returns n_max+1 integers mod `mod`.  This is the Riemann-sum moment
    evaluation (exponential in depth) -- the hot kernel.
    """
    out = [0] * (n_max + 1)
    pd = p ** depth
    for c in range(pd):
        mu = measure_ball(QA * pd, QA * c + QB, QC * pd, QC * c + QD,
                          p, rn, rd, sn, sd, N, idx_of, vals)
        if mu == 0:
            continue
        cpow = 1
        for n in range(n_max + 1):
            out[n] = (out[n] + mu * cpow) % mod
            cpow = cpow * c % mod
    return out

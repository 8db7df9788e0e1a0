# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels; mirrors _kernels_py exactly.

Ball-measure arithmetic runs on 128-bit integers (cell-matrix adjugate
actions square the entry magnitudes); callers guarantee via kernels._fits
that inputs stay below 2^58 so nothing here can overflow.
"""
from libc.stdlib cimport free, malloc

import array

cdef extern from *:
    ctypedef long long i128 "__int128_t"

BACKEND = "cython"


def ap_good(long long b2, long long b4, long long b6, long long ell):
    cdef long long x, f, s = 0, t
    cdef char *sq = <char *> malloc(ell)
    if sq == NULL:
        raise MemoryError()
    for x in range(ell):
        sq[x] = 0
    for t in range((ell - 1) // 2 + 1):
        sq[(t * t) % ell] = 1
    for x in range(ell):
        f = (((4 * x + b2) % ell * x + 2 * b4) % ell * x + b6) % ell
        if f < 0:
            f += ell
        if f:
            s += 1 if sq[f] else -1
    free(sq)
    return -s


cdef i128 c_floordiv(i128 num, i128 den) noexcept:
    # den > 0; C division truncates, adjust to floor
    cdef i128 q = num / den
    if num % den != 0 and num < 0:
        q -= 1
    return q


cdef long long c_phi_sum(i128 num, i128 den, long long N,
                         int[::1] idx_of, long long[::1] vals) noexcept:
    cdef long long total = 0
    cdef i128 pl = 0, ql = 1, pp = 1, qq = 0
    cdef i128 a, pn, qn, tmp
    cdef long long eps, c, d, j = 0
    if den == 0:
        return 0
    if den < 0:
        num = -num
        den = -den
    while den:
        a = c_floordiv(num, den)
        tmp = num - a * den
        num = den
        den = tmp
        pn = a * pp + pl
        qn = a * qq + ql
        eps = -1 if j % 2 == 0 else 1
        c = <long long> (qn % N)
        if c < 0:
            c += N
        d = <long long> ((eps * qq) % N)
        if d < 0:
            d += N
        total += vals[idx_of[c * N + d]]
        pl = pp
        ql = qq
        pp = pn
        qq = qn
        j += 1
    return total


cdef long long c_pair_value(i128 rn, i128 rd, i128 sn, i128 sd, long long N,
                            int[::1] idx_of, long long[::1] vals) noexcept:
    return (c_phi_sum(sn, sd, N, idx_of, vals)
            - c_phi_sum(rn, rd, N, idx_of, vals))


cdef long long c_vp(i128 n, long long p) noexcept:
    cdef long long v = 0
    if n < 0:
        n = -n
    while n % p == 0:
        n //= p
        v += 1
    return v


cdef i128 c_powi(long long b, long long e) noexcept:
    cdef i128 out = 1
    while e > 0:
        out *= b
        e -= 1
    return out


cdef i128 c_invmod(i128 a, i128 m) noexcept:
    cdef i128 q, t
    cdef i128 r0 = a % m, r1 = m
    cdef i128 s0 = 1, s1 = 0
    if r0 < 0:
        r0 += m
    while r1 != 0:
        q = r0 / r1
        t = r0 - q * r1; r0 = r1; r1 = t
        t = s0 - q * s1; s0 = s1; s1 = t
    s0 %= m
    if s0 < 0:
        s0 += m
    return s0


cdef long long c_mu_affine(i128 t, long long j, long long k, long long p,
                           long long rn, long long rd, long long sn,
                           long long sd, long long N, int[::1] idx_of,
                           long long[::1] vals) noexcept:
    cdef long long total, a
    cdef i128 pj, pm, an, ad, bn, bd
    if k % 2 != 0:
        total = 0
        if k + j >= 0:
            pm = c_powi(p, k + j)
            for a in range(p):
                total += c_mu_affine(t + a * pm, j, k + 1, p, rn, rd,
                                     sn, sd, N, idx_of, vals)
        else:
            pm = c_powi(p, -k - j)
            for a in range(p):
                total += c_mu_affine(t * pm + a, -k, k + 1, p, rn, rd,
                                     sn, sd, N, idx_of, vals)
        return total
    if k + j >= 0:
        pj = c_powi(p, j)
        pm = c_powi(p, k + j)
        an = pj * rn - t * rd
        ad = pm * rd
        bn = pj * sn - t * sd
        bd = pm * sd
    else:
        pm = c_powi(p, -k)
        an = rn
        ad = pm * rd
        bn = sn
        bd = pm * sd
    return c_pair_value(an, ad, bn, bd, N, idx_of, vals)


cdef long long c_measure(i128 A, i128 B, i128 C, i128 D, long long p,
                         long long rn, long long rd, long long sn,
                         long long sd, long long N, int[::1] idx_of,
                         long long[::1] vals) except? -9223372036854775807:
    cdef i128 det, t, Bs, Ds, pm
    cdef long long sign = 1, vdet, vD, k, j, vB, m
    while A % p == 0 and B % p == 0 and C % p == 0 and D % p == 0:
        A //= p; B //= p; C //= p; D //= p
    det = A * D - B * C
    if det == 0:
        raise ZeroDivisionError("singular ball matrix")
    if C != 0 and (D == 0 or c_vp(D, p) >= c_vp(C, p)):
        t = A; A = B * p; B = t
        t = C; C = D * p; D = t
        while A % p == 0 and B % p == 0 and C % p == 0 and D % p == 0:
            A //= p; B //= p; C //= p; D //= p
        det = A * D - B * C
        sign = -1
    vdet = c_vp(det, p)
    vD = c_vp(D, p)
    k = vdet - 2 * vD
    if B == 0:
        t = 0
        j = 0
    else:
        vB = c_vp(B, p)
        Bs = B / c_powi(p, vB)
        Ds = D / c_powi(p, vD)
        j = vD - vB
        if j < 0:
            j = 0
        m = k + j
        if m <= 0:
            t = 0
        else:
            pm = c_powi(p, m)
            t = ((c_powi(p, vB - vD + j) * Bs) % pm) * c_invmod(Ds, pm) % pm
            if t < 0:
                t += pm
    return sign * c_mu_affine(t, j, k, p, rn, rd, sn, sd, N, idx_of, vals)


cdef int[::1] _as_int_view(object idx_of):
    if isinstance(idx_of, array.array):
        return idx_of
    return array.array("i", idx_of)


cdef long long[::1] _as_ll_view(object vals):
    if isinstance(vals, array.array):
        return vals
    return array.array("q", vals)


def pair_value(rn, rd, sn, sd, N, idx_of, vals):
    cdef int[::1] iv = _as_int_view(idx_of)
    cdef long long[::1] vv = _as_ll_view(vals)
    return c_pair_value(rn, rd, sn, sd, N, iv, vv)


def measure_ball(A, B, C, D, p, rn, rd, sn, sd, N, idx_of, vals):
    cdef int[::1] iv = _as_int_view(idx_of)
    cdef long long[::1] vv = _as_ll_view(vals)
    return c_measure(A, B, C, D, p, rn, rd, sn, sd, N, iv, vv)


def moments_ball(QA, QB, QC, QD, p, depth, n_max, mod,
                 rn, rd, sn, sd, N, idx_of, vals):
    # mod must stay below 2^60 (guarded by kernels._fits); products are
    # taken through 128-bit intermediates
    cdef int[::1] iv = _as_int_view(idx_of)
    cdef long long[::1] vv = _as_ll_view(vals)
    cdef i128 cQA = QA, cQB = QB, cQC = QC, cQD = QD
    cdef i128 pd128 = c_powi(p, depth), c128
    cdef long long cp = p, crn = rn, crd = rd, csn = sn, csd = sd
    cdef long long cN = N, cmod = mod
    cdef long long pd = <long long> pd128
    cdef long long c, mu, n, nm = n_max, cpow, cred
    acc_arr = array.array("q", [0] * (n_max + 1))
    cdef long long[::1] acc = acc_arr
    for c in range(pd):
        c128 = c
        mu = c_measure(cQA * pd128, cQA * c128 + cQB, cQC * pd128,
                       cQC * c128 + cQD, cp, crn, crd, csn, csd,
                       cN, iv, vv)
        if mu == 0:
            continue
        cred = c % cmod
        cpow = 1
        for n in range(nm + 1):
            acc[n] = <long long> ((acc[n] + <i128> mu * cpow) % cmod)
            if acc[n] < 0:
                acc[n] += cmod
            cpow = <long long> ((<i128> cpow * cred) % cmod)
    return [int(acc[i]) for i in range(n_max + 1)]

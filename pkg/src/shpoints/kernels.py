"""Kernel backend selection.

The compiled Cython extension is used when it imported cleanly and the
operands fit its 128-bit arithmetic; the pure-Python module is the
always-available fallback and the reference semantics.  Both backends
produce identical exact results.
"""
from __future__ import annotations

from . import _kernels_py as _py

try:  # pragma: no cover - depends on build environment
    from . import _kernels as _c
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    _c = None
    HAVE_COMPILED = False

BACKEND = "cython" if HAVE_COMPILED else "python"

# C-kernel guards: matrix entries (after the p^depth cell scaling) below
# 2^58 keep every 128-bit intermediate in range; the moment modulus must
# stay below 2^60 for the mulmod reduction.
_C_INPUT_BOUND = 1 << 58
_C_MOD_BOUND = 1 << 60
_C_CUSP_BOUND = 1 << 16

ap_good = _c.ap_good if HAVE_COMPILED else _py.ap_good


def pair_value(rn, rd, sn, sd, N, idx_of, vals):
    if HAVE_COMPILED and max(abs(rn), abs(rd), abs(sn), abs(sd)) < _C_INPUT_BOUND:
        return _c.pair_value(rn, rd, sn, sd, N, idx_of, vals)
    return _py.pair_value(rn, rd, sn, sd, N, idx_of, vals)


def measure_ball(A, B, C, D, p, rn, rd, sn, sd, N, idx_of, vals):
    if HAVE_COMPILED and _fits(A, B, C, D, p, 0, rn, rd, sn, sd):
        return _c.measure_ball(A, B, C, D, p, rn, rd, sn, sd, N, idx_of, vals)
    return _py.measure_ball(A, B, C, D, p, rn, rd, sn, sd, N, idx_of, vals)


def moments_ball(QA, QB, QC, QD, p, depth, n_max, mod,
                 rn, rd, sn, sd, N, idx_of, vals):
    if HAVE_COMPILED and mod < _C_MOD_BOUND and \
            _fits(QA, QB, QC, QD, p, depth, rn, rd, sn, sd):
        return _c.moments_ball(QA, QB, QC, QD, p, depth, n_max, mod,
                               rn, rd, sn, sd, N, idx_of, vals)
    return _py.moments_ball(QA, QB, QC, QD, p, depth, n_max, mod,
                            rn, rd, sn, sd, N, idx_of, vals)


def _fits(A, B, C, D, p, depth, rn, rd, sn, sd) -> bool:
    scale = p ** (depth + 1)
    m = max(abs(A), abs(B), abs(C), abs(D), 1) * scale
    if m >= _C_INPUT_BOUND:
        return False
    return max(abs(rn), abs(rd), abs(sn), abs(sd), 1) < _C_CUSP_BOUND

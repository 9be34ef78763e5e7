"""Continued fractions and finite Liouville / ultra-Liouville diagnostics.

All arithmetic on convergents is exact (Python integers); distances to the
target number are evaluated with mpmath at a precision sized to the
largest denominator involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import PrecisionExceeded

# largest exponent q^N we are willing to materialise in the (UL) threshold
EXPONENT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class ContinuedFraction:
    """``alpha = [0; a_1, a_2, ...]`` truncated to the given quotients."""

    partial_quotients: tuple

    def __post_init__(self):
        pq = tuple(int(a) for a in self.partial_quotients)
        if not pq or any(a < 1 for a in pq):
            raise ValueError("partial quotients must be positive integers")
        object.__setattr__(self, "partial_quotients", pq)

    @property
    def convergents(self) -> list:
        """``(p_k, q_k)`` for ``k = 1..len``; ``q_k`` strictly increases."""
        p_prev, p = 1, 0
        q_prev, q = 0, 1
        out = []
        for a in self.partial_quotients:
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            out.append((p, q))
        return out

    def precision_bits(self) -> int:
        q_last = self.convergents[-1][1]
        return 4 * q_last.bit_length() + 128

    def value(self) -> mpmath.mpf:
        with mpmath.workprec(self.precision_bits()):
            x = mpmath.mpf(0)
            for a in reversed(self.partial_quotients):
                x = 1 / (a + x)
            return +x

    def to_float(self) -> float:
        return float(self.value())

    @classmethod
    def golden(cls, depth: int = 30) -> "ContinuedFraction":
        return cls((1,) * depth)

    @classmethod
    def liouville_type(cls, depth: int, first: int = 1) -> "ContinuedFraction":
        """Quotients with ``a_{k+1} = q_k^k``: denominators grow like a tower."""
        quotients = [first]
        q_prev, q = 1, first
        for k in range(1, depth):
            a = q ** k
            quotients.append(a)
            q_prev, q = q, a * q + q_prev
        return cls(tuple(quotients))


@dataclass(frozen=True)
class LiouvilleRow:
    k: int
    p: int
    q: int
    N: int
    distance: mpmath.mpf
    residual_L: mpmath.mpf
    satisfies_L: bool | None
    residual_UL: mpmath.mpf | None
    satisfies_UL: bool | None


def _ul_threshold(q: int, N: int, lam: int):
    exponent = q ** N
    if exponent > EXPONENT_BUDGET:
        raise PrecisionExceeded(f"q^N = {q}^{N} exceeds the exponent budget")
    return mpmath.mpf(lam) ** (-exponent)


def liouville_report(cf: ContinuedFraction, N_list, lam: int = 2) -> list:
    """Per-convergent residuals for conditions (L) and (UL).

    The target is the value of the full quotient list; the last convergent
    is excluded since it coincides with that value.  ``satisfies_*`` is
    ``None`` ("indeterminate") when the comparison falls below the working
    resolution or the (UL) exponent exceeds :data:`EXPONENT_BUDGET`.
    """
    if len(cf.partial_quotients) < 3:
        raise ValueError("need at least 3 partial quotients")
    prec = cf.precision_bits()
    rows = []
    with mpmath.workprec(prec):
        alpha = cf.value()
        # error of the truncated value against any infinite extension
        p_last, q_last = cf.convergents[-1]
        resolution = mpmath.mpf(1) / (mpmath.mpf(q_last) ** 2)
        for k, (p, q) in enumerate(cf.convergents[:-1], start=1):
            dist = abs(alpha - mpmath.mpf(p) / q)
            for N in N_list:
                thr = mpmath.mpf(1) / mpmath.mpf(q) ** N
                res_L = dist - thr
                sat_L = None if abs(res_L) <= resolution else bool(res_L < 0)
                try:
                    thr_ul = _ul_threshold(q, N, lam)
                    res_UL = dist - thr_ul
                    sat_UL = None if abs(res_UL) <= resolution else bool(res_UL < 0)
                except PrecisionExceeded:
                    res_UL, sat_UL = None, None
                rows.append(LiouvilleRow(k, p, q, N, dist, res_L, sat_L, res_UL, sat_UL))
    return rows


def irrationality_exponent_estimate(cf: ContinuedFraction) -> list:
    """``-log|alpha - p_k/q_k| / log q_k`` per convergent (q_k > 1)."""
    out = []
    with mpmath.workprec(cf.precision_bits()):
        alpha = cf.value()
        for p, q in cf.convergents[:-1]:
            if q > 1:
                d = abs(alpha - mpmath.mpf(p) / q)
                out.append(float(-mpmath.log(d) / math.log(q)))
    return out

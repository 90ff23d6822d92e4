"""A-priori error bounds for the composite far-field Gauss quadrature.

For each velocity field the far-field integrand on a unit-mapped cell is a
cell cubic (or its derivative) against a kernel whose t-derivatives are
controlled by the inverse distance d(j) >= m to the evaluation point. Taylor
expansion to order 2K plus the measured rule defects eps_k / c_K turn this
into a uniform bound on |exact - NGQ| summed over all far cells:

    sum_k  C_(.,k) eps_k / ((2k)! 2^(2k+1))
         + C_(.,K) / ((2K)! 2^(2K)) (1/(2K+1) + c_K/2),

with the field-specific derivative-sum constants C built from h_0, m and the
sup norms of the profile and its first three derivatives. The final factors
are 2/pi for u_x and u_xx and 2 h_0/pi for u (the log kernel gains h_0).
"""

from __future__ import annotations

import math

from .gauss import GaussRule
from .interval import Interval, PI

__all__ = ["SupNorms", "dj_sum", "gq_error_bound"]


class SupNorms:
    """Rigorous sup-norm bounds of the profile derivatives, orders 0..3."""

    __slots__ = ("w", "wx", "wxx", "wxxx")

    def __init__(self, w: Interval, wx: Interval, wxx: Interval, wxxx: Interval):
        for name, v in (("w", w), ("wx", wx), ("wxx", wxx), ("wxxx", wxxx)):
            if v.lo < 0.0:
                raise ValueError(f"sup norm {name} must be nonnegative")
        self.w = w
        self.wx = wx
        self.wxx = wxx
        self.wxxx = wxxx

    def order(self, i: int) -> Interval:
        return (self.w, self.wx, self.wxx, self.wxxx)[i]


def dj_sum(l: int, m: int, n: int) -> Interval:
    """Upper bound dj_l on sum over far cells of d(j)^(-l).

    dj_l = 2/(l-1) (m-1)^(1-l) for l >= 2; dj_1 = 2 log(n/(m-1));
    dj_0 = 2((n+1) log(n+1) - (n+1)) bounds the summed |log d| term.
    """
    if l >= 2:
        return (Interval(2.0) / Interval(float(l - 1))) \
            * Interval(float(m - 1)).pow_int(-(l - 1))
    if l == 1:
        return Interval(2.0) * (Interval(float(n)) / Interval(float(m - 1))).log()
    n1 = Interval(float(n + 1))
    return Interval(2.0) * (n1 * n1.log() - n1)


def _c_m(norms: SupNorms, h0: Interval, m: int) -> Interval:
    """C_m = sum_i ||d^i w|| h0^i m^(i-3) / i!  (cubic against 1/(x-y))."""
    total = Interval(0.0)
    for i in range(4):
        term = norms.order(i) * h0.pow_int(i) \
            * Interval(float(m)).pow_int(i - 3) \
            / Interval(float(math.factorial(i)))
        total = total + term
    return total


def _c_m2(norms: SupNorms, h0: Interval, m: int) -> Interval:
    """C_(m,2) = sum_(i<=2) h0^i/i! m^(i-2) ||d^(i+1) w||  (u_xx variant)."""
    total = Interval(0.0)
    for i in range(3):
        term = norms.order(i + 1) * h0.pow_int(i) \
            * Interval(float(m)).pow_int(i - 2) \
            / Interval(float(math.factorial(i)))
        total = total + term
    return total


def _series_bound(rule: GaussRule, c_of_k, c_K_term: Interval) -> Interval:
    """sum_k c_of_k(k) eps_k/((2k)! 2^(2k+1)) + tail with c_K_term at k=K."""
    K = rule.K
    total = Interval(0.0)
    for k in range(1, K):
        denom = Interval(float(math.factorial(2 * k))) * Interval(2.0).pow_int(2 * k + 1)
        total = total + c_of_k(k) * rule.eps[k] / denom
    denom = Interval(float(math.factorial(2 * K))) * Interval(2.0).pow_int(2 * K)
    tail = c_K_term / denom * (Interval(1.0) / Interval(float(2 * K + 1))
                               + rule.c_K * Interval(0.5))
    return total + tail


def gq_error_bound(kind: str, rule: GaussRule, norms: SupNorms,
                   m: int, n: int, h0: float) -> Interval:
    """Uniform bound on |exact - composite NGQ| for one far-field kernel pair.

    kind in {"u", "u_x", "u_xx"}. The bound already includes the final
    2/pi factor (2 h0/pi for u) covering both the x-y and x+y kernels.
    Monotone nondecreasing in each sup norm.
    """
    if kind not in ("u", "u_x", "u_xx"):
        raise ValueError(f"unknown field kind {kind!r}")
    h0_iv = Interval(h0)
    K = rule.K

    if kind == "u_x":
        cm = _c_m(norms, h0_iv, m)

        def c_f(k: int) -> Interval:
            if k == 1:
                return Interval(2.0) * norms.w * dj_sum(3, m, n) \
                    + Interval(2.0) * h0_iv * norms.wx * dj_sum(2, m, n) \
                    + h0_iv.pow_int(2) * norms.wxx * dj_sum(1, m, n)
            return cm * Interval(float(math.factorial(2 * k))) \
                * dj_sum(2 * k - 2, m, n)

        total = _series_bound(rule, c_f, c_f(K))
        return Interval(2.0) / PI * total

    if kind == "u":
        cm = _c_m(norms, h0_iv, m)

        def c_a(k: int) -> Interval:
            if k == 1:
                return h0_iv.pow_int(2) * norms.wxx * dj_sum(0, m, n) \
                    + Interval(2.0) * h0_iv * norms.wx * dj_sum(1, m, n) \
                    + norms.w * dj_sum(2, m, n)
            return cm * Interval(float(math.factorial(2 * k))) \
                / Interval(float(2 * k - 3)) * dj_sum(2 * k - 3, m, n)

        total = _series_bound(rule, c_a, c_a(K))
        return Interval(2.0) * h0_iv / PI * total

    cm2 = _c_m2(norms, h0_iv, m)

    def c_b(k: int) -> Interval:
        if k == 1:
            return Interval(2.0) * (norms.wx * dj_sum(3, m, n)
                                    + norms.wxx * h0_iv * dj_sum(2, m, n)
                                    + Interval(0.5) * norms.wxxx
                                    * h0_iv.pow_int(2) * dj_sum(1, m, n))
        return cm2 * Interval(float(math.factorial(2 * k))) * dj_sum(2 * k - 1, m, n)

    total = _series_bound(rule, c_b, c_b(K))
    return Interval(2.0) / PI * total

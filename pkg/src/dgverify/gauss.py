"""Legendre-Gauss quadrature rule with rigorously measured defects.

The stored nodes/weights are ordinary floating-point approximations; no
claim is made about their accuracy. Instead the rule carries the measured
moment defects

    eps_k = | sum_j A_j z_j^(2k) - 2/(2k+1) |,   k = 0..K-1
    c_K   = sum_j A_j z_j^(2K)

computed in interval arithmetic, and two structural exactnesses enforced at
construction: the nodes/weights come in (+z, -z) pairs sharing one weight
(so odd moments vanish as real numbers), and the weights sum to exactly 2
as rational numbers (verified with exact arithmetic, so eps_0 = 0). All
downstream quadrature error bounds depend only on eps_k and c_K.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .interval import Interval
from .ivec import IntervalVec

__all__ = ["GaussRule", "legendre_nodes_weights", "ngq", "ngq_interval",
           "ngq_poly_encloses"]


def _enclose_fraction(f: Fraction) -> Interval:
    """Tightest Interval containing an exact rational."""
    v = float(f)
    fv = Fraction(v)
    if fv == f:
        return Interval(v, v)
    if fv < f:
        return Interval(v, math.nextafter(v, math.inf))
    return Interval(math.nextafter(v, -math.inf), v)


def legendre_nodes_weights(K: int):
    """Nodes/weights of the K-point rule by Newton iteration on P_K.

    Round-to-nearest floats; accuracy is immaterial for rigor (only the
    measured eps_k enter the proofs).
    """
    # initial guesses: Chebyshev-like
    k = np.arange(1, K + 1)
    z = np.cos(math.pi * (k - 0.25) / (K + 0.5))
    for _ in range(100):
        p0 = np.ones_like(z)
        p1 = z.copy()
        for j in range(2, K + 1):
            p0, p1 = p1, ((2 * j - 1) * z * p1 - (j - 1) * p0) / j
        dp = K * (z * p1 - p0) / (z * z - 1.0)
        dz = p1 / dp
        z = z - dz
        if np.max(np.abs(dz)) < 1e-17:
            break
    p0 = np.ones_like(z)
    p1 = z.copy()
    for j in range(2, K + 1):
        p0, p1 = p1, ((2 * j - 1) * z * p1 - (j - 1) * p0) / j
    dp = K * (z * p1 - p0) / (z * z - 1.0)
    w = 2.0 / ((1.0 - z * z) * dp * dp)
    order = np.argsort(z)
    return z[order], w[order]


def _pair_and_normalize(z: np.ndarray, w: np.ndarray):
    """Enforce exact (+z,-z) pairing and an exactly-rational weight sum of 2."""
    K = len(z)
    if K % 2 != 0:
        raise ValueError("only even node counts supported")
    half = K // 2
    zp = z[half:].copy()          # positive nodes, ascending
    wp = w[half:].copy()
    # Make the positive weights sum to exactly 1 as rationals by adjusting
    # one weight (doubles are exact rationals, so this is checkable). The
    # smallest weight has the finest ulp, so 1 - rest is representable there.
    target = Fraction(1)
    for j in np.argsort(wp):
        rest = sum(Fraction(float(v)) for i, v in enumerate(wp) if i != j)
        adjusted = float(target - rest)
        if Fraction(adjusted) + rest == target:
            wp[j] = adjusted
            break
    else:
        raise AssertionError("weight normalization not exactly representable")
    z_full = np.concatenate([zp, -zp])
    w_full = np.concatenate([wp, wp])
    return z_full, w_full


def _tune_nodes(zp: np.ndarray, wp: np.ndarray) -> np.ndarray:
    """Nudge the positive nodes by ulps to shrink the k = 1 moment defect.

    The proofs depend only on the measured defects, so the node values are
    free parameters; the dominant error term in every downstream bound
    carries eps_1, which greedy ulp steps push to ~1e-18 while leaving the
    higher defects at their few-ulp level. Exact rational arithmetic keeps
    the search honest.
    """
    zp = zp.copy()
    K2 = len(zp)

    def defect(zs, k):
        s = sum(2 * Fraction(float(w)) * Fraction(float(x)) ** (2 * k)
                for w, x in zip(wp, zs))
        return abs(s - Fraction(2, 2 * k + 1))

    def objective(zs):
        return defect(zs, 1) + Fraction(1, 1000) * defect(zs, 2)

    best = objective(zp)
    for _ in range(8):
        improved = False
        for i in range(K2):
            for direction in (math.inf, -math.inf):
                trial = zp.copy()
                v = zp[i]
                for _step in range(3):
                    v = math.nextafter(v, direction)
                    trial[i] = v
                    cand = objective(trial)
                    if cand < best:
                        best = cand
                        zp = trial.copy()
                        improved = True
        if not improved:
            break
    return zp


class GaussRule:
    """K-point Legendre-Gauss rule on [-1, 1] with measured defects."""

    __slots__ = ("K", "nodes", "weights", "eps", "c_K")

    def __init__(self, K: int = 8):
        z, w = legendre_nodes_weights(K)
        z, w = _pair_and_normalize(z, w)
        half = K // 2
        zp = _tune_nodes(z[:half], w[:half])
        z = np.concatenate([zp, -zp])
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "nodes", z)
        object.__setattr__(self, "weights", w)
        eps, cK = self._measure_defects()
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "c_K", cK)

    def __setattr__(self, name, value):
        raise AttributeError("GaussRule is immutable")

    def _measure_defects(self):
        """Exact rational moment defects, rounded outward once at the end.

        Doubles are exact rationals, so sum_j A_j z_j^(2k) - 2/(2k+1) is a
        rational number Fraction computes exactly; no interval slop enters
        the measurement.
        """
        K = self.K
        ws = [Fraction(float(v)) for v in self.weights]
        zs = [Fraction(float(v)) for v in self.nodes]
        eps = []
        for k in range(K):
            if k == 0:
                # weights sum to 2 exactly (pairing + normalization)
                assert sum(ws) == 2
                eps.append(Interval(0.0, 0.0))
                continue
            defect = abs(sum(w * z ** (2 * k) for w, z in zip(ws, zs))
                         - Fraction(2, 2 * k + 1))
            eps.append(_enclose_fraction(defect))
        c_K = _enclose_fraction(sum(w * z ** (2 * K) for w, z in zip(ws, zs)))
        return eps, c_K

    # -- plain float quadrature (non-rigorous path) -------------------------

    def integrate(self, f, a: float, b: float) -> float:
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        return half * float(np.sum(self.weights * f(half * self.nodes + mid)))


def ngq(rule: GaussRule, f, a: float, b: float) -> float:
    """Numerical realization NGQ_K(f, a, b) in plain floating point."""
    return rule.integrate(f, a, b)


def ngq_interval(rule: GaussRule, f_iv, a: float, b: float) -> Interval:
    """NGQ_K evaluated in interval arithmetic (roundoff enclosure only).

    ``f_iv`` maps an IntervalVec of abscissae to an IntervalVec of values.
    The result encloses the real number NGQ_K(f, a, b); it does NOT account
    for the quadrature (node-approximation) error, which the caller bounds
    separately via the eps_k machinery.
    """
    half = (Interval(b) - Interval(a)) * Interval(0.5)
    mid = (Interval(b) + Interval(a)) * Interval(0.5)
    x = IntervalVec.from_scalar(half, rule.K) * IntervalVec.exact(rule.nodes) \
        + IntervalVec.from_scalar(mid, rule.K)
    vals = f_iv(x)
    s = (IntervalVec.exact(rule.weights) * vals).sum()
    return s * half


def ngq_poly_encloses(rule: GaussRule, coeffs, a: float, b: float) -> Interval:
    """Enclosure of the exact integral of a polynomial via NGQ + eps-slack.

    ``coeffs`` are power-basis coefficients (Interval or float), degree
    <= 2K - 1. After mapping to [-1, 1] the rule's defect on t^(2j) is at
    most eps_j (odd moments vanish exactly by pairing), so

        | integral - NGQ | <= (b-a)/2 * sum_j eps_j |c_(2j)|

    with c the mapped coefficients.
    """
    K = rule.K
    cs = [c if isinstance(c, Interval) else Interval(float(c)) for c in coeffs]
    if len(cs) > 2 * K:
        raise ValueError("polynomial degree too high for this rule")
    half = (Interval(b) - Interval(a)) * Interval(0.5)
    mid = (Interval(b) + Interval(a)) * Interval(0.5)
    # mapped coefficients of p(half*t + mid) via synthetic expansion
    mapped = [Interval(0.0)] * len(cs)
    for deg, c in enumerate(cs):
        # (half*t + mid)^deg expanded by binomial
        for j in range(deg + 1):
            binom = math.comb(deg, j)
            term = c * Interval(float(binom)) * half.pow_int(j) \
                * mid.pow_int(deg - j)
            mapped[j] = mapped[j] + term
    # NGQ in interval arithmetic
    def f_iv(x):
        acc = IntervalVec.from_scalar(cs[-1], rule.K)
        for c in reversed(cs[:-1]):
            acc = acc * x + IntervalVec.from_scalar(c, rule.K)
        return acc

    val = ngq_interval(rule, f_iv, a, b)
    slack = Interval(0.0)
    for j in range(0, len(mapped), 2):
        slack = slack + rule.eps[j // 2] * abs(mapped[j])
    slack = slack * abs(half)
    return val.widened(slack.hi)

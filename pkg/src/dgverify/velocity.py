"""Rigorous velocity evaluation at fine-grid nodes.

u, u_x, u_xx are Hilbert-transform integrals of the piecewise-cubic profile
over [0, L] (odd extension folded in):

    u_x(x)  = 1/pi PV int w(y)  (1/(x-y) - 1/(x+y)) dy
    u(x)    = 1/pi    int w(y)  (log|x-y| - log(x+y)) dy
    u_xx(x) = 1/pi PV int w_x(y)(1/(x-y) + 1/(x+y)) dy

Each node's integral splits into a near block of cells (the symmetric
index block around the node's cell, which also absorbs the reflected
near-set close to the origin) integrated in closed form with interval
arithmetic, and the far field summed by composite Gauss quadrature in plain
floats with the kernels combined per point. The reported node enclosure is

    near_interval + far_float +- (roundoff bound + a-priori GQ bound),

with the roundoff bound assembled per node from magnitude accumulators and
the standard recursive-summation estimate.

Principal values never produce singular terms: the log coefficients at a
coincident grid node cancel exactly between the two adjacent cells (the
cell cubics interpolate the shared node value and slope as real numbers),
and the remaining log arguments are bounded away from zero by a fine cell.
u and u_xx vanish identically at x = 0 by oddness; u_xx grows
logarithmically at x = L, so its last node carries no value.
"""

from __future__ import annotations

import math

import numpy as np

from . import _farfield
from .gauss import GaussRule
from .gq_error import SupNorms, gq_error_bound
from .grid import Grid
from .interval import Interval, PI
from .ivec import IntervalVec
from .profile import HermiteProfile

__all__ = ["VelocityField", "velocity_at_nodes", "cell_coeffs_interval",
           "near_field_float"]

_U = 2.0 ** -53  # unit roundoff


class VelocityField:
    """Node enclosures of one velocity field on the fine grid."""

    __slots__ = ("kind", "grid", "vec", "gq_error", "roundoff",
                 "last_node_valid")

    def __init__(self, kind: str, grid: Grid, vec: IntervalVec,
                 gq_error: Interval, roundoff: np.ndarray,
                 last_node_valid: bool):
        self.kind = kind
        self.grid = grid
        self.vec = vec
        self.gq_error = gq_error
        self.roundoff = roundoff
        self.last_node_valid = last_node_valid

    @property
    def values(self) -> np.ndarray:
        return self.vec.mid()

    def node(self, i: int) -> Interval:
        if i == self.grid.n and not self.last_node_valid:
            raise ValueError(f"{self.kind} has no value at x = L")
        return self.vec[i]


def cell_coeffs_interval(profile: HermiteProfile):
    """Interval power-basis coefficients (A, B, C, D) per coarse cell."""
    g = profile.grid
    h = Interval(g.L) / Interval(float(g.n))
    W0 = IntervalVec.exact(profile.values[:-1])
    W1 = IntervalVec.exact(profile.values[1:])
    S0 = IntervalVec.exact(profile.slopes[:-1])
    S1 = IntervalVec.exact(profile.slopes[1:])
    hv = IntervalVec.from_scalar(h, g.n)
    dw = (W1 - W0) / hv
    C = (dw * 3.0 - S0 * 2.0 - S1) / hv
    D = (S0 + S1 - dw * 2.0) / (hv * hv)
    return W0, S0, C, D


def _horner3(c0, c1, c2, c3, t):
    return c0 + t * (c1 + t * (c2 + t * c3))


def _masked_log_abs(t: IntervalVec, zero_mask: np.ndarray) -> IntervalVec:
    """log|t| with exact-zero contributions at masked lanes.

    Lanes where the argument is exactly zero get the interval [0, 0]; their
    true log coefficient vanishes (or cancels pairwise), so a zero factor
    makes the product contribution exactly zero.
    """
    a = abs(t)
    lo = np.where(zero_mask, 1.0, a.lo)
    hi = np.where(zero_mask, 1.0, a.hi)
    lg = IntervalVec(lo, hi, _check=False).log()
    return IntervalVec(np.where(zero_mask, 0.0, lg.lo),
                       np.where(zero_mask, 0.0, lg.hi), _check=False)


def _lambda_j(t: IntervalVec, j: int, zero_mask: np.ndarray) -> IntervalVec:
    """Antiderivative factor L_j(t) = t^j (log|t| - 1/j) / j, L_j(0) = 0."""
    lg = _masked_log_abs(t, zero_mask)
    inv_j = Interval(1.0) / Interval(float(j))
    out = t.pow_int(j) * (lg - inv_j) / float(j)
    return IntervalVec(np.where(zero_mask, 0.0, out.lo),
                       np.where(zero_mask, 0.0, out.hi), _check=False)


def _scatter_add(total: IntervalVec, idx: np.ndarray, part: IntervalVec):
    lo = total.lo.copy()
    hi = total.hi.copy()
    raw_lo = lo[idx] + part.lo
    raw_hi = hi[idx] + part.hi
    lo[idx] = np.where(raw_lo == 0.0, 0.0, np.nextafter(raw_lo, -np.inf))
    hi[idx] = np.where(raw_hi == 0.0, 0.0, np.nextafter(raw_hi, np.inf))
    return IntervalVec(lo, hi, _check=False)


def near_field_interval(profile: HermiteProfile, xs: np.ndarray,
                        cells: np.ndarray, kind: str, m: int) -> IntervalVec:
    """Closed-form near-block integrals at every node, as intervals."""
    g = profile.grid
    n = g.n
    nodes = g.nodes()
    A, B, C, D = cell_coeffs_interval(profile)
    if kind == "u_xx":
        # integrate the derivative quadratic
        A, B, C, D = B, C * 2.0, D * 3.0, IntervalVec.exact(np.zeros(n))
    nn = len(xs)
    total = IntervalVec.exact(np.zeros(nn))
    for off in range(-m, m + 1):
        k = cells + off
        valid = (k >= 0) & (k <= n - 1)
        if not np.any(valid):
            continue
        idx = np.flatnonzero(valid)
        kv = k[idx]
        xv = xs[idx]
        plus_near = (kv + cells[idx]) <= m  # reflected-near set J3
        a = nodes[kv]
        b = nodes[kv + 1]
        Ak, Bk, Ck, Dk = A[kv], B[kv], C[kv], D[kv]
        xe = IntervalVec.exact(xv)
        ta = IntervalVec.exact(a) - xe          # a - x
        tb = IntervalVec.exact(b) - xe          # b - x
        ua = IntervalVec.exact(a) + xe          # a + x
        ub = IntervalVec.exact(b) + xe          # b + x
        a_sing = a == xv
        b_sing = b == xv
        ua_sing = (a == 0.0) & (xv == 0.0)
        # expansion of the cell cubic at y = x and y = -x
        xi = -ta
        q0 = _horner3(Ak, Bk, Ck, Dk, xi)
        q1 = Bk + xi * (Ck * 2.0 + xi * Dk * 3.0)
        q2 = Ck + Dk * xi * 3.0
        q3 = Dk
        eta = -ua
        r0 = _horner3(Ak, Bk, Ck, Dk, eta)
        r1 = Bk + eta * (Ck * 2.0 + eta * Dk * 3.0)
        r2 = Ck + Dk * eta * 3.0
        r3 = Dk

        if kind in ("u_x", "u_xx"):
            lg_a = _masked_log_abs(ta, a_sing)
            lg_b = _masked_log_abs(tb, b_sing)
            minus = q0 * (lg_a - lg_b) \
                - q1 * (tb - ta) \
                - q2 * (tb.square() - ta.square()) * 0.5 \
                - q3 * (tb.pow_int(3) - ta.pow_int(3)) * (1.0 / 3.0)
            lg_ua = _masked_log_abs(ua, ua_sing)
            lg_ub = _masked_log_abs(ub, np.zeros_like(ua_sing))
            plus = r0 * (lg_ub - lg_ua) \
                + r1 * (ub - ua) \
                + r2 * (ub.square() - ua.square()) * 0.5 \
                + r3 * (ub.pow_int(3) - ua.pow_int(3)) * (1.0 / 3.0)
            plus = IntervalVec(np.where(plus_near, plus.lo, 0.0),
                               np.where(plus_near, plus.hi, 0.0),
                               _check=False)
            part = minus - plus if kind == "u_x" else minus + plus
        else:  # u: log kernels
            jm = (q0 * (_lambda_j(tb, 1, b_sing) - _lambda_j(ta, 1, a_sing))
                  + q1 * (_lambda_j(tb, 2, b_sing) - _lambda_j(ta, 2, a_sing))
                  + q2 * (_lambda_j(tb, 3, b_sing) - _lambda_j(ta, 3, a_sing))
                  + q3 * (_lambda_j(tb, 4, b_sing) - _lambda_j(ta, 4, a_sing)))
            zf = np.zeros_like(ua_sing)
            jp = (r0 * (_lambda_j(ub, 1, zf) - _lambda_j(ua, 1, ua_sing))
                  + r1 * (_lambda_j(ub, 2, zf) - _lambda_j(ua, 2, ua_sing))
                  + r2 * (_lambda_j(ub, 3, zf) - _lambda_j(ua, 3, ua_sing))
                  + r3 * (_lambda_j(ub, 4, zf) - _lambda_j(ua, 4, ua_sing)))
            jp = IntervalVec(np.where(plus_near, jp.lo, 0.0),
                             np.where(plus_near, jp.hi, 0.0), _check=False)
            part = jm - jp
        total = _scatter_add(total, idx, part)
    return total


def _gamma(n_ops: float) -> Interval:
    nu = Interval(float(n_ops)) * Interval(_U)
    return nu / (Interval(1.0) - nu)


def _omega_eval_error(norms: SupNorms, h0: float) -> Interval:
    """Per-point bound on the float cubic/derivative evaluation error.

    Covers coefficient construction, Horner, and the weight product; the
    coefficient magnitudes are bounded through the construction formulas
    (|C| <= 6 ||w'||/h0, |D| <= 4 ||w'||/h0^2).
    """
    g = _gamma(32)
    h = Interval(h0)
    val = g * (norms.w + norms.wx * h * 12.0)
    slope = g * (norms.wx * 25.0 + norms.wxx * h)
    return val.max_with(slope)


def velocity_at_nodes(profile: HermiteProfile, N: int, kind: str,
                      rule: GaussRule, norms: SupNorms,
                      m: int = 8) -> VelocityField:
    """Rigorous node enclosures of u, u_x, or u_xx on the N-cell fine grid."""
    if kind not in ("u", "u_x", "u_xx"):
        raise ValueError(f"unknown field kind {kind!r}")
    g = profile.grid
    n = g.n
    fine = g.refined(N)
    ratio = N // n
    xs = fine.nodes()
    js = np.arange(N + 1)
    cells = np.minimum(js // ratio, n - 1)

    K = rule.K
    lo_cell = np.maximum(cells - m, 0)
    hi_cell = np.minimum(cells + m, n - 1)
    p_lo = (K * lo_cell).astype(np.int64)
    p_hi = (K * (hi_cell + 1)).astype(np.int64)
    q_hi = (K * np.maximum(0, m - cells + 1)).astype(np.int64)

    Y, WV, WS, WB = _farfield.quad_points(g.nodes(), rule.nodes, rule.weights,
                                          profile.values, profile.slopes, g.h)
    if kind == "u_x":
        far, s_t, s_abs, s_bare = _farfield.far_sum_ux(xs, Y, WV, WB, p_lo,
                                                       p_hi, q_hi)
    elif kind == "u":
        far, s_t, s_abs, s_bare = _farfield.far_sum_u(xs, Y, WV, WB, p_lo,
                                                      p_hi, q_hi)
    else:
        far, s_t, s_abs, s_bare = _farfield.far_sum_uxx(xs, Y, WS, WB, p_lo,
                                                        p_hi, q_hi)

    near = near_field_interval(profile, xs, cells, kind, m)

    # per-node roundoff bound; the 1e-9 relative inflation dominates the
    # few-ulp error of assembling the bound itself in floats
    M_terms = K * n + 8
    gamma_M = _gamma(M_terms).hi
    e_omega = _omega_eval_error(norms, g.h).hi
    err = (gamma_M * s_t + (10.0 * _U) * s_abs + e_omega * s_bare)
    err = err * (1.0 + 1e-9)

    gq = gq_error_bound(kind, rule, norms, m, n, g.h)
    pad = err + gq.hi * (1.0 + 1e-9)

    def dn(a):
        return np.where(a == 0.0, 0.0, np.nextafter(a, -np.inf))

    def up(a):
        return np.where(a == 0.0, 0.0, np.nextafter(a, np.inf))

    lo = dn(dn(near.lo + far) - pad)
    hi = up(up(near.hi + far) + pad)

    inv_pi = Interval(1.0) / PI
    vec = IntervalVec(lo, hi, _check=False) * inv_pi

    last_valid = kind != "u_xx"
    # u and u_xx vanish identically at x = 0 by oddness (the combined
    # kernels are zero there); pin the exact value
    veclo, vechi = vec.lo, vec.hi
    if kind in ("u", "u_xx"):
        veclo[0] = 0.0
        vechi[0] = 0.0
    if kind == "u_xx":
        veclo[-1] = 0.0
        vechi[-1] = 0.0
    vec = IntervalVec(veclo, vechi, _check=False)
    roundoff = err
    return VelocityField(kind, fine, vec, gq, roundoff, last_valid)


# -- plain float path for the dynamic-rescaling solver -----------------------


def near_field_float(values, slopes, nodes, xs, cells, kind, m):
    """Float near-block integrals (same formulas, no intervals)."""
    n = len(nodes) - 1
    h0 = nodes[1] - nodes[0]
    w0, w1 = values[:-1], values[1:]
    s0, s1 = slopes[:-1], slopes[1:]
    dw = (w1 - w0) / h0
    Cc = (3.0 * dw - 2.0 * s0 - s1) / h0
    Dc = (s0 + s1 - 2.0 * dw) / (h0 * h0)
    Ac, Bc = w0, s0
    if kind == "u_xx":
        Ac, Bc, Cc, Dc = Bc, 2.0 * Cc, 3.0 * Dc, np.zeros(n)
    total = np.zeros(len(xs))
    with np.errstate(divide="ignore", invalid="ignore"):
        for off in range(-m, m + 1):
            k = cells + off
            valid = (k >= 0) & (k <= n - 1)
            if not np.any(valid):
                continue
            idx = np.flatnonzero(valid)
            kv = k[idx]
            xv = xs[idx]
            a = nodes[kv]
            b = nodes[kv + 1]
            ta = a - xv
            tb = b - xv
            ua = a + xv
            ub = b + xv
            xi = -ta
            q0 = Ac[kv] + xi * (Bc[kv] + xi * (Cc[kv] + xi * Dc[kv]))
            q1 = Bc[kv] + xi * (2.0 * Cc[kv] + 3.0 * xi * Dc[kv])
            q2 = Cc[kv] + 3.0 * Dc[kv] * xi
            q3 = Dc[kv]
            eta = -ua
            r0 = Ac[kv] + eta * (Bc[kv] + eta * (Cc[kv] + eta * Dc[kv]))
            r1 = Bc[kv] + eta * (2.0 * Cc[kv] + 3.0 * eta * Dc[kv])
            r2 = Cc[kv] + 3.0 * Dc[kv] * eta
            r3 = Dc[kv]
            lg_a = np.where(ta == 0.0, 0.0, np.log(np.abs(ta)))
            lg_b = np.where(tb == 0.0, 0.0, np.log(np.abs(tb)))
            lg_ua = np.where(ua == 0.0, 0.0, np.log(ua))
            lg_ub = np.log(ub)
            pnear = (kv + cells[idx]) <= m
            if kind in ("u_x", "u_xx"):
                minus = q0 * (lg_a - lg_b) - q1 * (tb - ta) \
                    - 0.5 * q2 * (tb ** 2 - ta ** 2) \
                    - q3 * (tb ** 3 - ta ** 3) / 3.0
                plus = r0 * (lg_ub - lg_ua) + r1 * (ub - ua) \
                    + 0.5 * r2 * (ub ** 2 - ua ** 2) \
                    + r3 * (ub ** 3 - ua ** 3) / 3.0
                plus = np.where(pnear, plus, 0.0)
                part = minus - plus if kind == "u_x" else minus + plus
            else:
                def lam(t, j, lg):
                    return np.where(t == 0.0, 0.0,
                                    t ** j * (lg - 1.0 / j) / j)

                jm = (q0 * (lam(tb, 1, lg_b) - lam(ta, 1, lg_a))
                      + q1 * (lam(tb, 2, lg_b) - lam(ta, 2, lg_a))
                      + q2 * (lam(tb, 3, lg_b) - lam(ta, 3, lg_a))
                      + q3 * (lam(tb, 4, lg_b) - lam(ta, 4, lg_a)))
                jp = (r0 * (lam(ub, 1, lg_ub) - lam(ua, 1, lg_ua))
                      + r1 * (lam(ub, 2, lg_ub) - lam(ua, 2, lg_ua))
                      + r2 * (lam(ub, 3, lg_ub) - lam(ua, 3, lg_ua))
                      + r3 * (lam(ub, 4, lg_ub) - lam(ua, 4, lg_ua)))
                jp = np.where(pnear, jp, 0.0)
                part = jm - jp
            total[idx] += part
    return total


def velocity_float(values, slopes, grid: Grid, rule: GaussRule, kind: str,
                   xs=None, m: int = 8) -> np.ndarray:
    """Non-rigorous velocity at the coarse nodes (solver path)."""
    nodes = grid.nodes()
    if xs is None:
        xs = nodes
    n = grid.n
    cells = np.minimum(np.searchsorted(nodes, xs, side="right") - 1, n - 1)
    cells = np.maximum(cells, 0)
    K = rule.K
    p_lo = (K * np.maximum(cells - m, 0)).astype(np.int64)
    p_hi = (K * (np.minimum(cells + m, n - 1) + 1)).astype(np.int64)
    q_hi = (K * np.maximum(0, m - cells + 1)).astype(np.int64)
    Y, WV, WS, WB = _farfield.quad_points(nodes, rule.nodes, rule.weights,
                                          values, slopes, grid.h)
    if kind == "u_x":
        far = _farfield.far_sum_ux(xs, Y, WV, WB, p_lo, p_hi, q_hi)[0]
    elif kind == "u":
        far = _farfield.far_sum_u(xs, Y, WV, WB, p_lo, p_hi, q_hi)[0]
    else:
        far = _farfield.far_sum_uxx(xs, Y, WS, WB, p_lo, p_hi, q_hi)[0]
    near = near_field_float(values, slopes, nodes, xs, cells, kind, m)
    out = (near + far) / math.pi
    if kind in ("u", "u_xx"):
        out = np.where(xs == 0.0, 0.0, out)
    return out

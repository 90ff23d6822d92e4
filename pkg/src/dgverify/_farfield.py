"""Far-field composite quadrature kernels (numba, plain float64).

Each routine evaluates, for every node x simultaneously, the composite
Gauss sums of weight * kernel over the quadrature points outside that
node's near block [p_lo, p_hi), with the x-y and x+y kernels combined per
point there (the combination keeps term sizes proportional to x near the
origin for the odd fields). Inside the near block the x-y kernel is
handled analytically by the caller, while the x+y kernel is analytic only
on the reflected-near range [0, q_hi) (the J3 set); the remaining block
points get a solo x+y quadrature pass here, mirroring the original index
split and keeping the smooth-kernel contributions in cancellation-free
float sums.

fastmath stays OFF and each node's accumulation is strictly sequential in
point order: the a-posteriori roundoff bound assumes recursive summation,
and results must not depend on the thread count. Alongside the value,
three magnitude accumulators feed that bound:

    s_t    = sum |term|                      (summation error, gamma_M)
    s_abs  = sum |weight| * (per-term kernel roundoff magnitude)
    s_bare = sum |bare weight| * |kernel|    (propagated omega-eval error)

For the log kernel the per-term roundoff magnitude is |log d| + 1 per
side.
"""

import numpy as np
from numba import njit, prange

__all__ = ["far_sum_ux", "far_sum_u", "far_sum_uxx", "quad_points"]


def quad_points(nodes_coarse, z, w, values, slopes, h0):
    """Quadrature abscissae and weighted integrand factors for all cells.

    Returns (Y, WV, WS, WB): point positions, (h0/2) A_l omega(y),
    (h0/2) A_l omega_x(y), and bare (h0/2) A_l, flattened cell-major.
    """
    n = len(nodes_coarse) - 1
    K = len(z)
    a = nodes_coarse[:-1]
    half = 0.5 * h0
    Y = (a[:, None] + half * (z[None, :] + 1.0)).ravel()
    w0, w1 = values[:-1], values[1:]
    s0, s1 = slopes[:-1], slopes[1:]
    dw = (w1 - w0) / h0
    C = (3.0 * dw - 2.0 * s0 - s1) / h0
    D = (s0 + s1 - 2.0 * dw) / (h0 * h0)
    d = (half * (z[None, :] + 1.0))
    om = (w0[:, None] + d * (s0[:, None] + d * (C[:, None] + d * D[:, None])))
    omx = (s0[:, None] + d * (2.0 * C[:, None] + d * 3.0 * D[:, None]))
    WB = np.broadcast_to(half * w[None, :], (n, K)).copy()
    WV = WB * om
    WS = WB * omx
    return Y, WV.ravel(), WS.ravel(), WB.ravel()


@njit(parallel=True)
def far_sum_ux(xs, Y, WV, WB, p_lo, p_hi, q_hi):
    """WV (1/(x-y) - 1/(x+y)) outside the block; solo -WV/(x+y) inside it
    beyond the reflected-near range."""
    n_nodes = xs.shape[0]
    M = Y.shape[0]
    val = np.zeros(n_nodes)
    s_t = np.zeros(n_nodes)
    s_abs = np.zeros(n_nodes)
    s_bare = np.zeros(n_nodes)
    for i in prange(n_nodes):
        x = xs[i]
        acc = 0.0
        at = 0.0
        aa = 0.0
        ab = 0.0
        for p in range(p_lo[i]):
            k1 = 1.0 / (x - Y[p])
            k2 = 1.0 / (x + Y[p])
            k = k1 - k2
            t = WV[p] * k
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * (abs(k1) + abs(k2))
            ab += WB[p] * abs(k)
        for p in range(p_hi[i], M):
            k1 = 1.0 / (x - Y[p])
            k2 = 1.0 / (x + Y[p])
            k = k1 - k2
            t = WV[p] * k
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * (abs(k1) + abs(k2))
            ab += WB[p] * abs(k)
        for p in range(max(p_lo[i], q_hi[i]), p_hi[i]):
            k2 = 1.0 / (x + Y[p])
            t = -WV[p] * k2
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * abs(k2)
            ab += WB[p] * abs(k2)
        val[i] = acc
        s_t[i] = at
        s_abs[i] = aa
        s_bare[i] = ab
    return val, s_t, s_abs, s_bare


@njit(parallel=True)
def far_sum_u(xs, Y, WV, WB, p_lo, p_hi, q_hi):
    """WV (log|x-y| - log(x+y)) outside the block; solo -WV log(x+y)
    inside it beyond the reflected-near range."""
    n_nodes = xs.shape[0]
    M = Y.shape[0]
    val = np.zeros(n_nodes)
    s_t = np.zeros(n_nodes)
    s_abs = np.zeros(n_nodes)
    s_bare = np.zeros(n_nodes)
    for i in prange(n_nodes):
        x = xs[i]
        acc = 0.0
        at = 0.0
        aa = 0.0
        ab = 0.0
        for p in range(p_lo[i]):
            d1 = abs(x - Y[p])
            d2 = x + Y[p]
            k = np.log(d1 / d2)
            t = WV[p] * k
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * (abs(np.log(d1)) + abs(np.log(d2)) + 2.0)
            ab += WB[p] * abs(k)
        for p in range(p_hi[i], M):
            d1 = abs(x - Y[p])
            d2 = x + Y[p]
            k = np.log(d1 / d2)
            t = WV[p] * k
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * (abs(np.log(d1)) + abs(np.log(d2)) + 2.0)
            ab += WB[p] * abs(k)
        for p in range(max(p_lo[i], q_hi[i]), p_hi[i]):
            k2 = np.log(x + Y[p])
            t = -WV[p] * k2
            acc += t
            at += abs(t)
            aa += abs(WV[p]) * (abs(k2) + 1.0)
            ab += WB[p] * abs(k2)
        val[i] = acc
        s_t[i] = at
        s_abs[i] = aa
        s_bare[i] = ab
    return val, s_t, s_abs, s_bare


@njit(parallel=True)
def far_sum_uxx(xs, Y, WS, WB, p_lo, p_hi, q_hi):
    """WS (1/(x-y) + 1/(x+y)) outside the block; solo +WS/(x+y) inside it
    beyond the reflected-near range."""
    n_nodes = xs.shape[0]
    M = Y.shape[0]
    val = np.zeros(n_nodes)
    s_t = np.zeros(n_nodes)
    s_abs = np.zeros(n_nodes)
    s_bare = np.zeros(n_nodes)
    for i in prange(n_nodes):
        x = xs[i]
        acc = 0.0
        at = 0.0
        aa = 0.0
        ab = 0.0
        for p in range(p_lo[i]):
            k1 = 1.0 / (x - Y[p])
            k2 = 1.0 / (x + Y[p])
            k = k1 + k2
            t = WS[p] * k
            acc += t
            at += abs(t)
            aa += abs(WS[p]) * (abs(k1) + abs(k2))
            ab += WB[p] * abs(k)
        for p in range(p_hi[i], M):
            k1 = 1.0 / (x - Y[p])
            k2 = 1.0 / (x + Y[p])
            k = k1 + k2
            t = WS[p] * k
            acc += t
            at += abs(t)
            aa += abs(WS[p]) * (abs(k1) + abs(k2))
            ab += WB[p] * abs(k)
        for p in range(max(p_lo[i], q_hi[i]), p_hi[i]):
            k2 = 1.0 / (x + Y[p])
            t = WS[p] * k2
            acc += t
            at += abs(t)
            aa += abs(WS[p]) * abs(k2)
            ab += WB[p] * abs(k2)
        val[i] = acc
        s_t[i] = at
        s_abs[i] = aa
        s_bare[i] = ab
    return val, s_t, s_abs, s_bare

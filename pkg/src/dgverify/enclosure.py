"""Per-cell enclosure sequences and the rigorous norm estimators.

Everything the verification needs about the profile reduces to per-cell
upper/lower bounds on the fine grid: the profile and its derivatives come
from the stored cell cubics (third derivative exactly constant per coarse
cell, the lower orders squeezed between one-sided mean-value enclosures
from both cell endpoints), velocity fields from their node enclosures plus
derivative padding, and ratios with removable endpoint zeros from running
hulls of the derivative bounds (the mean-value trick), intersected with
direct division wherever the denominator clears zero. L-infinity, L2, L1
and integral estimators are then plain cell reductions.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid
from .interval import Interval
from .ivec import IntervalVec
from .profile import HermiteProfile
from .velocity import VelocityField, cell_coeffs_interval

__all__ = ["PiecewiseBound", "BoundChain", "derive_bound_chain",
           "field_cells", "bound_linf", "bound_l2", "bound_l1",
           "bound_integral", "ratio_bound", "estimate_K2_K3", "estimate_K4",
           "ConstantsTable", "verify_constants_table", "CLAIMED_BOUNDS"]


class PiecewiseBound:
    """Sound per-cell enclosures [low_i, up_i] of a function on the grid."""

    __slots__ = ("grid", "cells")

    def __init__(self, grid: Grid, cells: IntervalVec):
        if len(cells) != grid.n:
            raise ValueError("need one interval per cell")
        self.grid = grid
        self.cells = cells

    @property
    def up(self):
        return self.cells.hi

    @property
    def low(self):
        return self.cells.lo

    def max_abs(self) -> np.ndarray:
        return self.cells.mag()

    def restrict(self, a: float, b: float):
        """Cell slice for the cell-aligned window [a, b]."""
        i0 = self.grid.aligned_index(a)
        i1 = self.grid.aligned_index(b)
        if i1 <= i0:
            raise ValueError("empty window")
        return self.cells[i0:i1]


def _segment_enclosure(left: IntervalVec, right: IntervalVec,
                       deriv: IntervalVec, h: float) -> IntervalVec:
    """Range of g over each cell from endpoint values and g' bounds.

    g(x) lies in g(a) + [0,h] g'(cell) and in g(b) - [0,h] g'(cell);
    the intersection of the two one-sided mean-value enclosures is sound
    and tight to O(h^2).
    """
    span = IntervalVec.bounds(np.zeros_like(left.lo), np.full_like(left.lo, h))
    e1 = left + span * deriv
    e2 = right - span * deriv
    return e1.intersect(e2)


class BoundChain:
    """Profile bound chain on the fine grid: node values and cell ranges.

    w3 is exact per cell (piecewise constant); w2 is linear per coarse
    cell and takes exact ranges; w1 and w drop out of the mean-value
    squeeze. The removable-ratio members (w/x, w/(x-L), (w_x - w_x(0))/x,
    w_xx/x) combine running hulls of the next derivative with direct
    division away from the endpoint.
    """

    __slots__ = ("grid", "w0n", "w1n", "w", "w1", "w2", "w3",
                 "wox", "woxml", "w1ox", "w2ox", "xcell", "s0", "c0_origin")

    def __init__(self, **kw):
        for k in self.__slots__:
            setattr(self, k, kw[k])


def derive_bound_chain(profile: HermiteProfile, N: int) -> BoundChain:
    g = profile.grid
    n = g.n
    fine = g.refined(N)
    ratio = N // n
    h_f = Interval(g.L) / Interval(float(N))

    A, B, C, D = cell_coeffs_interval(profile)

    # node values/slopes on the fine grid by interval Horner
    j = np.arange(N + 1)
    cell = np.minimum(j // ratio, n - 1)
    r = j - cell * ratio
    delta = IntervalVec.from_scalar(h_f, N + 1) * r.astype(np.float64)
    Ak, Bk, Ck, Dk = A[cell], B[cell], C[cell], D[cell]
    w0n = Ak + delta * (Bk + delta * (Ck + delta * Dk))
    w1n = Bk + delta * (Ck * 2.0 + delta * Dk * 3.0)
    lo0 = w0n.lo.copy(); hi0 = w0n.hi.copy()
    lo0[0] = hi0[0] = 0.0
    lo0[-1] = hi0[-1] = 0.0  # stored data vanish at the support ends
    w0n = IntervalVec(lo0, hi0, _check=False)

    cc = np.minimum(np.arange(N) // ratio, n - 1)
    w3 = D[cc] * 6.0

    left = lambda v: v[np.arange(N)]
    right = lambda v: v[np.arange(N) + 1]
    # w2 nodes from the cell cubics (left-cell convention at nodes)
    w2n = Ck * 2.0 + delta * Dk * 6.0
    hf = fine.h
    w2 = _segment_enclosure(left(w2n), right(w2n), w3, hf)
    w1 = _segment_enclosure(left(w1n), right(w1n), w2, hf)
    w = _segment_enclosure(left(w0n), right(w0n), w1, hf)

    xn = fine.nodes()
    xcell = IntervalVec.bounds(xn[:-1], xn[1:])

    # removable ratios: running hull (mean value from the endpoint)
    # intersected with direct division where the cell clears the endpoint
    def mixed_ratio(num_cells: IntervalVec, hull_src: IntervalVec,
                    den_cells: IntervalVec, from_left: bool,
                    extra: IntervalVec | None = None) -> IntervalVec:
        hull = hull_src.prefix_hull() if from_left else hull_src.suffix_hull()
        if extra is not None:
            hull = hull + extra
        ok = ~den_cells.contains(0.0)
        out_lo = hull.lo.copy()
        out_hi = hull.hi.copy()
        if np.any(ok):
            direct = num_cells[ok] / den_cells[ok]
            both = direct.intersect(hull[ok])
            out_lo[ok] = both.lo
            out_hi[ok] = both.hi
        return IntervalVec(out_lo, out_hi, _check=False)

    s0 = Interval(float(profile.slopes[0]))
    c0 = C[0] * 2.0  # spline curvature at the origin; zero up to solve dust
    wox = mixed_ratio(w, w1, xcell, True)
    woxml = mixed_ratio(w, w1, xcell - Interval(g.L), False)
    w1_shift = w1 - IntervalVec.from_scalar(s0, N)
    w1ox = mixed_ratio(w1_shift, w2, xcell, True)
    # w_xx(0) is only approximately zero (spline solve dust); carry it
    c0_over_x = IntervalVec.from_scalar(c0.hull(-c0), N) / \
        IntervalVec.bounds(np.maximum(xcell.lo, hf), xcell.hi)
    w2ox = mixed_ratio(w2, w3, xcell, True, extra=c0_over_x)

    return BoundChain(grid=fine, w0n=w0n, w1n=w1n, w=w, w1=w1, w2=w2, w3=w3,
                      wox=wox, woxml=woxml, w1ox=w1ox, w2ox=w2ox,
                      xcell=xcell, s0=s0, c0_origin=c0)


def field_cells(field: VelocityField, pad: Interval,
                last_valid_cell: int | None = None) -> IntervalVec:
    """Per-cell velocity enclosures from node enclosures + |f'| <= pad.

    pad bounds the integral of the derivative across one cell (for u_x
    the sqrt(h)||u_xx||_2 Cauchy-Schwarz pad, for u the h sup|u_x| pad).
    """
    v = field.vec
    n = field.grid.n
    lo = np.minimum(v.lo[:-1], v.lo[1:])
    hi = np.maximum(v.hi[:-1], v.hi[1:])
    out = IntervalVec(lo, hi, _check=False).widened(pad.hi)
    if last_valid_cell is not None:
        out = out[:last_valid_cell]
    return out


# -- norm and integral estimators -------------------------------------------


def bound_linf(cells: IntervalVec) -> Interval:
    """Enclosure of sup |g| given sound per-cell bounds."""
    upper = float(np.max(cells.mag()))
    lower = float(np.max(np.minimum(np.abs(cells.lo),
                                    np.abs(cells.hi)) *
                         (~cells.contains(0.0))))
    return Interval(min(lower, upper), upper)


def bound_l2(cells: IntervalVec, h: Interval) -> Interval:
    """Enclosure of the L2 norm over the covered cells."""
    sq = cells.square()
    total = sq.sum() * h
    return Interval(max(total.lo, 0.0), total.hi).sqrt()


def bound_l1(cells: IntervalVec, h: Interval) -> Interval:
    total = abs(cells).sum() * h
    return Interval(max(total.lo, 0.0), total.hi)


def bound_integral(cells: IntervalVec, h: Interval) -> Interval:
    return cells.sum() * h


def ratio_bound(num: IntervalVec, den: IntervalVec,
                fallback: list | None = None) -> IntervalVec:
    """Cellwise f1/f2 from bounds of v f1 and v f2, with zone fallbacks.

    fallback entries are (i0, i1, IntervalVec-or-Interval) replacing the
    quotient on cells [i0, i1) where the denominator crosses zero removably
    (the caller supplies the mean-value enclosure for those zones).
    """
    lo = np.empty(len(num))
    hi = np.empty(len(num))
    covered = np.zeros(len(num), dtype=bool)
    for (i0, i1, enc) in fallback or []:
        if isinstance(enc, Interval):
            lo[i0:i1] = enc.lo
            hi[i0:i1] = enc.hi
        else:
            lo[i0:i1] = enc.lo
            hi[i0:i1] = enc.hi
        covered[i0:i1] = True
    free = ~covered
    if np.any(free):
        d = den[free]
        if np.any(d.contains(0.0)):
            k = int(np.flatnonzero(free)[np.argmax(d.contains(0.0))])
            raise ZeroDivisionError(
                f"denominator bound crosses zero at cell {k} outside "
                f"declared singular zones")
        q = num[free] / d
        lo[free] = q.lo
        hi[free] = q.hi
    return IntervalVec(lo, hi, _check=False)


# -- special strategies for K2, K3, K4 --------------------------------------


def estimate_K2_K3(ux: VelocityField, c_l: Interval,
                   wx_l2: Interval) -> tuple[Interval, Interval, IntervalVec]:
    """sup |u_x| and sup |c_l + u_x| via the sqrt(h) Cauchy-Schwarz pad.

    |u_x(x) - u_x(x_i)| <= sqrt(h) ||u_xx||_2 on a cell, and
    ||u_xx||_2 = ||w_x||_2 by the Hilbert-transform isometry.
    """
    h = ux.grid.h
    pad = Interval(h).sqrt() * wx_l2
    cells = field_cells(ux, pad)
    K2 = bound_linf(cells)
    K3 = bound_linf(cells + c_l)
    return K2, K3, cells


def estimate_K4(uxx: VelocityField, chain: BoundChain, M: float,
                a: float = 4.0) -> Interval:
    """sup |u_xx| on [0, M] via a crude rigorous sup |u_xxx| bound.

    |u_xxx (x^2 - L^2)| <= (2a/pi) sup_[0,M+a] |(w_xx (x^2-L^2))_x|
                        + (2/(a pi)) ||w_xx (x^2-L^2)||_L1[0,L],
    divided by L^2 - M^2 on [0, M]; then cell enclosures from node values
    plus h times that bound.
    """
    from .interval import PI

    g = uxx.grid
    L = g.L
    iM = g.aligned_index(M)
    iMa = g.aligned_index(min(M + a, L))
    X = chain.xcell
    L2mX2 = Interval(L * L) - X.square()
    prod_d = chain.w3 * (-L2mX2) + X * chain.w2 * 2.0  # (w_xx(x^2-L^2))_x
    sup_d = bound_linf(prod_d[:iMa])
    l1 = bound_l1(chain.w2 * (X.square() - Interval(L * L)),
                  Interval(g.h))
    denom = Interval(L * L - M * M)
    two = Interval(2.0)
    uxxx_sup = (two * Interval(a) / PI * sup_d
                + two / (Interval(a) * PI) * l1) / denom
    pad = Interval(g.h) * Interval(0.0, uxxx_sup.hi)
    cells = field_cells(uxx, pad)[:iM]
    return bound_linf(cells)


# -- the constants table -----------------------------------------------------

# claimed bounds, kept as decimal strings for exact-rational comparison
CLAIMED_BOUNDS = {
    "K1": "1.001", "K1r": "0.8092", "K2": "3.606", "K3": "2.907",
    "K4": "0.9296", "K5l": "1.001e-2", "K5": "4.433e-2", "K6": "11.13",
    "K7": "26.65", "K8": "0.3210",
    "J1_sqrt": "0.1683", "J2_sqrt": "0.2141", "J3_sqrt": "0.5757",
    "J4_sqrt": "53.37", "J5_sqrt": "0.5431", "J5r_sqrt": "0.4673",
    "J6_sqrt": "2.096", "J7_sqrt": "0.6965", "J7r_sqrt": "0.4500",
    "aux_psi_phi": "0.1", "aux_psix_phi": "2",
}


class ConstantsTable:
    """Computed intervals with attached claimed bounds and verdicts."""

    def __init__(self):
        self.entries: dict[str, dict] = {}

    def add(self, name: str, value: Interval, claimed: str | None = None,
            slack: float = 1.0):
        from fractions import Fraction

        rec = {"value": value, "claimed": claimed, "passed": None}
        if claimed is not None:
            limit = Fraction(claimed) * Fraction(str(slack))
            rec["passed"] = Fraction(value.hi) <= limit
        self.entries[name] = rec

    def __getitem__(self, name: str) -> Interval:
        return self.entries[name]["value"]

    def all_passed(self) -> bool:
        return all(r["passed"] is not False for r in self.entries.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.entries.items() if r["passed"] is False]


def verify_constants_table(chain: BoundChain, ux: VelocityField,
                           uxx: VelocityField, c_l: Interval,
                           M: float = 5.0, slack: float = 1.0,
                           weights_aux: dict | None = None) -> ConstantsTable:
    """Compute and check every entry of the verified-constants table."""
    g = chain.grid
    L = g.L
    h = Interval(g.h)
    iM = g.aligned_index(M)
    i_in0 = g.aligned_index(0.25)
    i_in1 = g.aligned_index(L - 0.25)
    X = chain.xcell
    L2 = Interval(L * L)
    L2mX2 = L2 - X.square()

    t = ConstantsTable()
    t.add("K1", bound_linf(chain.w1), CLAIMED_BOUNDS["K1"], slack)
    t.add("K1r", bound_linf(chain.w1[iM:]), CLAIMED_BOUNDS["K1r"], slack)

    J6 = bound_l2(chain.w1, h)
    t.add("J6_sqrt", J6, CLAIMED_BOUNDS["J6_sqrt"], slack)
    K2, K3, ux_cells = estimate_K2_K3(ux, c_l, J6)
    t.add("K2", K2, CLAIMED_BOUNDS["K2"], slack)
    t.add("K3", K3, CLAIMED_BOUNDS["K3"], slack)
    t.add("K4", estimate_K4(uxx, chain, M), CLAIMED_BOUNDS["K4"], slack)

    # K5l = sup_[0,M] |w / (x (x^2 - L^2))|, removable at 0
    k5l_cells = abs(chain.wox[:iM] / (X.square() - L2)[:iM])
    t.add("K5l", bound_linf(k5l_cells), CLAIMED_BOUNDS["K5l"], slack)
    # K5 = sup_[0,L] |w / (x^2 - L^2)|, removable at L
    k5_cells = abs(chain.woxml / (X + Interval(L)))
    t.add("K5", bound_linf(k5_cells), CLAIMED_BOUNDS["K5"], slack)

    prod_d = chain.w3 * (-L2mX2) + X * chain.w2 * 2.0
    t.add("K6", bound_linf(prod_d[i_in0:i_in1]), CLAIMED_BOUNDS["K6"], slack)
    t.add("K7", bound_linf(chain.w2 * (-L2mX2)), CLAIMED_BOUNDS["K7"], slack)
    t.add("K8", bound_linf(chain.w2[i_in0:i_in1]), CLAIMED_BOUNDS["K8"],
          slack)

    t.add("J1_sqrt", bound_l2(chain.w3[:iM], h), CLAIMED_BOUNDS["J1_sqrt"],
          slack)
    t.add("J2_sqrt", bound_l2(chain.w2ox[:iM], h), CLAIMED_BOUNDS["J2_sqrt"],
          slack)
    t.add("J3_sqrt", bound_l2(chain.w1ox, h), CLAIMED_BOUNDS["J3_sqrt"],
          slack)
    t.add("J4_sqrt", bound_l2(chain.w2 * L2mX2, h), CLAIMED_BOUNDS["J4_sqrt"],
          slack)
    minXL = X.min_with(Interval(L) - X)
    t.add("J5_sqrt", bound_l2(chain.w3 * minXL, h), CLAIMED_BOUNDS["J5_sqrt"],
          slack)
    t.add("J5r_sqrt", bound_l2((chain.w3 * minXL)[iM:], h),
          CLAIMED_BOUNDS["J5r_sqrt"], slack)
    t.add("J7_sqrt", bound_l2(chain.w2, h), CLAIMED_BOUNDS["J7_sqrt"], slack)
    t.add("J7r_sqrt", bound_l2(chain.w2[iM:], h), CLAIMED_BOUNDS["J7r_sqrt"],
          slack)

    if weights_aux is not None:
        t.add("aux_psi_phi", weights_aux["aux_psi_phi"],
              CLAIMED_BOUNDS["aux_psi_phi"], slack)
        t.add("aux_psix_phi", weights_aux["aux_psix_phi"],
              CLAIMED_BOUNDS["aux_psix_phi"], slack)
    return t

"""Per-cell enclosures of the singular energy weights and their ratios.

The L2 weight behaves like x^-4 at the origin and (L-x)^-2 at the support
edge, and the H1 weight like x^-2; raw per-cell intervals of them would be
unbounded on the end cells. Every consumer therefore works with manifestly
regular combinations: the weight numerator scaled by x^3 (left) or by
L^2-x^2 (right), the denominator divided by its simple zeros through
running-hull mean-value enclosures, and each downstream quantity assembled
so the singular powers cancel symbolically before any interval division.

Quantities that are genuinely unbounded on an end cell (psi, the
(x-L)-log-derivatives at the origin cell) carry valid-from masks; their
consumers either slice away from the end or fall into min-branches where
the other branch is taken.
"""

from __future__ import annotations

import math

import numpy as np

from .enclosure import BoundChain, bound_linf
from .interval import Interval, PI
from .ivec import IntervalVec

__all__ = ["StabilityParams", "Weights", "cutoff_cells"]


class StabilityParams:
    """All tunables of the stability verification, paper defaults."""

    def __init__(self, **overrides):
        base = dict(
            e=0.005, f=0.004, a1=1.0 / 6.0, a2=0.0056, a3=0.00192,
            d0=0.15, d1=0.11, d2=0.0013, d3=0.07, d4=4.5, d5=0.05,
            d6=0.03, d7=2.5, d8=0.0004, M2=6.5,
            mu=0.02, tau=0.05, alpha1=5.6, alpha2=500.0, b3=10.0,
            E_star=5e-4,
            lam=2.0, tau1=12.0, tau2=32.0, tau3=3.3, tau4=65.0,
            M=5.0, eps_zone=0.1, delta_cross=0.25,
            schatten_p=4,
        )
        unknown = set(overrides) - set(base)
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")
        base.update(overrides)
        for k, v in base.items():
            if v <= 0:
                raise ValueError(f"parameter {k} must be positive")
            setattr(self, k, v)

    def as_dict(self):
        keys = ("e", "f", "a1", "a2", "a3", "d0", "d1", "d2", "d3", "d4",
                "d5", "d6", "d7", "d8", "M2", "mu", "tau", "alpha1",
                "alpha2", "b3", "E_star", "lam", "tau1", "tau2", "tau3",
                "tau4", "M", "eps_zone", "delta_cross", "schatten_p")
        return {k: getattr(self, k) for k in keys}


def _sigmoid_cells(s: IntervalVec) -> IntervalVec:
    lo = np.clip(s.lo, -745.0, 709.0)
    hi = np.clip(s.hi, -745.0, 709.0)
    es = IntervalVec(lo, hi, _check=False).exp()
    return es / (es + 1.0)


def cutoff_cells(x: IntervalVec):
    """chi1, chi2 = 1 - chi1, chi1' per cell.

    chi1 is 1 on [0,4], 0 on [6,L], and sigma(1/(x-4) + 1/(x-6)) in
    between. chi1' = -sigma(1-sigma)(1/(x-4)^2 + 1/(x-6)^2) vanishes
    double-exponentially at the transition edges, which beats the blowup
    of the inner derivative; edge cells use the monotone cap
    e^(-1/t)/t^2 evaluated at the cell's outer distance.
    """
    N = len(x)
    chi1_lo = np.where(x.hi <= 4.0, 1.0, 0.0)
    chi1_hi = np.where(x.lo >= 6.0, 0.0, 1.0)
    d1p_lo = np.zeros(N)
    d1p_hi = np.zeros(N)
    trans = (x.hi > 4.0) & (x.lo < 6.0)
    if np.any(trans):
        xi = IntervalVec(np.clip(x.lo[trans], 4.0, 6.0),
                         np.clip(x.hi[trans], 4.0, 6.0), _check=False)
        inner = (xi.lo > 4.0) & (xi.hi < 6.0)
        si_lo = np.zeros(len(xi))
        si_hi = np.ones(len(xi))
        sub_all = np.flatnonzero(trans)
        if np.any(inner):
            t4 = xi[inner] - 4.0
            t6 = xi[inner] - 6.0
            s = 1.0 / t4 + 1.0 / t6
            sig = _sigmoid_cells(s)
            si_lo[inner] = sig.lo
            si_hi[inner] = sig.hi
            mag = sig * (1.0 - sig) * (1.0 / t4.square() + 1.0 / t6.square())
            d1p_lo[sub_all[inner]] = -mag.mag()
        edge = np.flatnonzero(trans)[~inner]
        for j in edge:
            t = max(min(x.hi[j] - 4.0, 6.0 - x.lo[j], 0.5), 1e-300)
            b = math.exp(-1.0 / t) / (t * t) * (1.0 + 1e-9)
            d1p_lo[j] = -b
            d1p_hi[j] = b
        chi1_lo[trans] = si_lo
        chi1_hi[trans] = si_hi
    chi1 = IntervalVec(np.clip(chi1_lo, 0.0, 1.0),
                       np.clip(chi1_hi, 0.0, 1.0), _check=False)
    chi2 = IntervalVec(np.clip(1.0 - chi1.hi, 0.0, 1.0),
                       np.clip(1.0 - chi1.lo, 0.0, 1.0), _check=False)
    chi1p = IntervalVec(d1p_lo, d1p_hi, _check=False)
    return chi1, chi2, chi1p


def _patch(base: IntervalVec, mask: np.ndarray,
           repl: IntervalVec) -> IntervalVec:
    lo = base.lo.copy()
    hi = base.hi.copy()
    lo[mask] = repl.lo[mask] if repl.lo.shape == mask.shape else repl.lo
    hi[mask] = repl.hi[mask] if repl.hi.shape == mask.shape else repl.hi
    return IntervalVec(lo, hi, _check=False)


class Weights:
    """All weight-derived per-cell quantities on the fine grid.

    Members marked *_from1 are invalid on cell 0 (filled with wide finite
    dummies there); members marked *_toN1 are invalid on the last cell.
    Check routines in the stability module only consume them on their
    valid ranges or inside min-branches.
    """

    def __init__(self, chain: BoundChain, params: StabilityParams):
        self.chain = chain
        self.params = params
        g = chain.grid
        self.grid = g
        N = g.n
        L = g.L
        self.L = L
        X = chain.xcell
        self.X = X
        self.XmL = X - Interval(L)
        self.LmX = -self.XmL
        self.XpL = X + Interval(L)
        self.L2mX2 = Interval(L * L) - X.square()
        idx = np.arange(N)
        self.left = idx < (5 * N) // 8
        self.right = idx >= (3 * N) // 8
        self.interior = (X.lo > 0) & (X.hi < L)  # all but the two end cells
        self.x_pos = X.lo > 0                    # all but cell 0

        e = Interval.parse(repr(params.e))
        f = Interval.parse(repr(params.f))
        self.e_iv = e
        self.f_iv = f

        self.chi1, self.chi2, self.chi1p = cutoff_cells(X)

        W, W1, W2 = chain.w, chain.w1, chain.w2
        third = Interval(1.0) / Interval(3.0)
        fifth = Interval(1.0) / Interval(5.0)
        arm0 = W - X * W1 * fifth                  # chi1 arm
        armL = W - self.XmL * W1 * third           # chi2 arm
        self.den = self.chi1 * arm0 + self.chi2 * armL
        arm0_x = W1 * (Interval(4.0) * fifth) - X * W2 * fifth
        armL_x = W1 * (Interval(2.0) * third) - self.XmL * W2 * third
        self.den_x = self.chi1p * (arm0 - armL) + self.chi1 * arm0_x \
            + self.chi2 * armL_x

        # den/x and den/(x-L): the running hulls are sound on every cell
        # (mean value from the respective endpoint), tight near it; direct
        # division is tight away from it; intersect where both apply.
        self.denox = self._hull_ratio(self.den, X, arm0_x.prefix_hull())
        self.denoxml = self._hull_ratio(self.den, self.XmL,
                                        armL_x.suffix_hull())

        # scaled numerators: num3 = x^3 (phi numerator) regular on the
        # left; numL = (L^2-x^2)(phi numerator) regular on the right
        self.num3 = -1.0 - e * X.square() \
            - (f * 2.0) * X.square().square() / self.L2mX2
        self.num3p = -(e * 2.0) * X - (f * 2.0) * X.pow_int(3) \
            * (Interval(4.0 * L * L) - X.square() * 2.0) \
            / self.L2mX2.square()
        numL_right = -(self.L2mX2 * (1.0 / X.pow_int(3) + e / X)
                       + (f * 2.0) * X) if False else None

        # validity of the weight signs (phi, psi > 0 on (0, L))
        self.valid = bool((self.num3.hi < 0.0).all()
                          and (self.denox.hi < 0.0).all()
                          and (self.denoxml.lo > 0.0).all())

        # phi^-1 = x^3 den / num3: regular and nonnegative everywhere
        self.phi_inv = X.pow_int(3) * self.den / self.num3

        # log-derivative combinations
        xden = self._with_direct(self.den_x / self.denox,
                                 (X * self.den_x) / self.den)
        self.xlogphi = X * self.num3p / self.num3 - 3.0 - xden
        xmlden = self._with_direct(self.den_x / self.denoxml,
                                   (self.XmL * self.den_x) / self.den)
        xml_over_x = self._over_x(self.XmL)       # (x-L)/x, invalid cell 0
        self.xmllogphi_from1 = self.XmL * self.num3p / self.num3 \
            - xml_over_x * 3.0 - xmlden
        self.absdlogphi = abs(self.xlogphi * 0.5 + 1.5)
        self.absdlogphi_xml_from1 = abs(self.xmllogphi_from1 * 0.5 + 1.5)

        # psi pieces
        wox, woxml = chain.wox, chain.woxml
        self.neg_wox = -wox
        if not bool((self.neg_wox.lo > 0).all() and (woxml.lo > 0).all()):
            self.valid = False
        psix2_left = self.L2mX2 / (self.neg_wox * (L * L))
        psix2_right = X * self.XpL / (woxml * (L * L))
        self.psix2 = _patch(psix2_left, self.right, psix2_right)
        self.psix2 = self.psix2.intersect(
            _patch(psix2_right, self.left, psix2_left))
        # psi itself: invalid on cell 0 (fills with the right form there)
        psi_right = self.XpL / (X * (L * L) * woxml)
        psi_left = IntervalVec(
            np.where(self.x_pos, psix2_left.lo, psi_right.lo),
            np.where(self.x_pos, psix2_left.hi, psi_right.hi),
            _check=False)
        psi_left = psi_left / IntervalVec(
            np.where(self.x_pos, X.lo, 1.0),
            np.where(self.x_pos, X.hi, 1.0), _check=False).square()
        self.psi_from1 = _patch(psi_left, self.right, psi_right)

        xw1_over_w = self._with_direct(W1 / wox, (X * W1) / W)
        self.xlogpsi = -(1.0 + X.square() / (L * L)) \
            / (1.0 - X.square() / (L * L)) - xw1_over_w
        self.absdlogpsi = abs(self.xlogpsi * 0.5 + 0.5)
        self.xmllogpsi_from1 = self.xlogpsi * xml_over_x
        self.absdlogpsi_xml_from1 = abs(self.xmllogpsi_from1 * 0.5 + 0.5)

        # nonlinear comparison weights (x^4 (L-x)^2 regularization)
        self.phi1reg = (X.square() * 0.02 + 1.0) * self.LmX.square() * 1.15
        self.phi2reg = X.square().square() \
            * ((self.LmX / self.XpL).square() + 1.0) * 0.0085
        phit_left = self.LmX.square() * self.num3 / self.denox
        phit_right = -(X * self.LmX * self.num3) / self.denoxml
        self.phit = _patch(phit_left, self.right, phit_right)
        self.phit = self.phit.intersect(
            _patch(phit_right, self.left, phit_left))
        self.psi1_over_psi = (X.square() * 0.01 + 1.0) * 0.97 / self.psix2
        self.psi_over_psi1 = self.psix2 / ((X.square() * 0.01 + 1.0) * 0.97)
        self.phi1_over_phi = self.phi1reg / self.phit
        self.phi2_over_phi = self.phi2reg / self.phit

        # velocity-control ratio conditions (x-powers cancelled exactly)
        a1_, a2_, mu = params.alpha1, params.alpha2, params.mu
        one_p = X.square() * 0.0125 + 1.0           # x^3 xi_1
        xi1x_neg = X.square() * 0.0125 + 3.0        # -x^4 xi_1'
        self.ratio1 = one_p.square() / (
            ((X.square() * 0.02 + 1.0) * (1.15 * a1_) + xi1x_neg)
            * (X.square() * 0.01 + 1.0) * (mu * a1_ * 0.97))
        lx = self.LmX
        xi2_s = lx.square() * 0.022 + 1.0           # (L-x) xi_2
        den2 = ((lx / self.XpL).square() + 1.0) * (0.0085 * a2_) \
            + 1.0 - lx.square() * 0.022             # (a2 phi2 + xi2') (L-x)^2
        self.ratio2 = xi2_s.square() * X.square() / (
            den2 * (mu * a2_ * 0.97) * (X.square() * 0.01 + 1.0))
        if not bool((den2.lo > 0).all()):
            self.valid = False

        # kappa, xi combinations
        bracket = (lx * one_p) * (a2_ / a1_) \
            + X.pow_int(3) * xi2_s * (1.0 / 1.0)
        self.kappa3_sq = X.pow_int(3) * lx * (a2_ / 1.0) / bracket \
            * (1.0 / a1_) * a1_  # = x^3 (L-x) a2 / bracket
        self.kappa3_sq = X.pow_int(3) * lx * a2_ / (
            (lx * one_p) * (a2_ / a1_) + X.pow_int(3) * xi2_s)
        self.sqrt_a1_xi1 = (X.pow_int(3) * a1_ / one_p).sqrt()
        self.sqrt_a2_xi2 = (lx * a2_ / xi2_s).sqrt()
        self.x32 = X.pow_int(3).sqrt()
        self.lmx12 = lx.sqrt()

        # rho ratios for the bootstrap
        iM = g.aligned_index(params.M)
        maskL = idx < iM
        maskR = ~maskL
        pr_left = self.num3 / (self.denox
                               * (X.square().square() * 0.1 + 1.25))
        pr_right = self.XmL * self.num3 / (
            X.pow_int(3) * self.denoxml * (self.XmL.square() * 0.1 + 0.01))
        self.phi_over_rho1 = _patch(pr_left, maskR, pr_right)
        ps_left = self.psix2 / (X.square() * 0.02 + 1.0)
        ps_right = self.psi_from1 * 50.0
        self.psi_over_rho2 = _patch(ps_left, maskR, ps_right)

        # projection kernels (regular scalings)
        self.x_g_ux0 = IntervalVec.from_scalar(-2.0 / PI, N)   # x g_ux0
        self.x_gcw = self._x_gcw()                              # x g_cw
        self.g_uxL_scaled = X * 2.0 / (PI * self.XpL)  # (L-x) g_uxL

    # -- internal helpers ----------------------------------------------------

    def _hull_ratio(self, num: IntervalVec, den: IntervalVec,
                    hull: IntervalVec) -> IntervalVec:
        ok = ~den.contains(0.0)
        lo = hull.lo.copy()
        hi = hull.hi.copy()
        if np.any(ok):
            d = num[ok] / den[ok]
            both = d.intersect(hull[ok])
            lo[ok] = both.lo
            hi[ok] = both.hi
        return IntervalVec(lo, hi, _check=False)

    def _with_direct(self, safe: IntervalVec,
                     direct: IntervalVec | None) -> IntervalVec:
        """Intersect an everywhere-sound form with direct division where
        the direct denominators stay away from zero (interior cells)."""
        if direct is None:
            return safe
        out_lo = safe.lo.copy()
        out_hi = safe.hi.copy()
        m = self.interior
        both = direct[m].intersect(safe[m])
        out_lo[m] = both.lo
        out_hi[m] = both.hi
        return IntervalVec(out_lo, out_hi, _check=False)

    def _over_x(self, num: IntervalVec) -> IntervalVec:
        """num/x, wide-but-finite dummy on cell 0 (consumers mask it)."""
        X = self.X
        lo_x = np.where(self.x_pos, X.lo, X.hi)
        xs = IntervalVec(lo_x, X.hi, _check=False)
        return num / xs

    def _x_gcw(self) -> IntervalVec:
        """x g_cw = x log((L+x)/(L-x))/(L pi), edge-capped on the last cell.

        (L-x) log((L+x)/(L-x)) -> 0 monotonically at the edge, so the last
        cells are capped through that factor.
        """
        X = self.X
        L = self.L
        N = len(X)
        safe = X.hi < L
        lo = np.zeros(N)
        hi = np.empty(N)
        if np.any(safe):
            val = X[safe] * (self.XpL[safe] / self.LmX[safe]).log() / (PI * L)
            lo[safe] = val.lo
            hi[safe] = val.hi
        last = ~safe
        for j in np.flatnonzero(last):
            t = max(self.LmX.lo[j], 1e-300)
            hi[j] = math.log((2.0 * L) / t) / math.pi * (1.0 + 1e-9)
            lo[j] = 0.0
        return IntervalVec(lo, hi, _check=False)

    # -- auxiliary sup norms of the cross-term lemma --------------------------

    def aux_sup_norms(self) -> dict:
        """sup on [0.5, 9.5] of (x^2-L^2)^-1 (psi/phi)^(1/2) and of
        psi_x (psi phi)^(-1/2).

        psi/phi = psix2 * x * den / num3 (regular there);
        psi_x^2/(psi phi) = (x psi'/psi)^2 psi/(x^2 phi).
        """
        g = self.grid
        sl = slice(g.aligned_index(0.5), g.aligned_index(9.5))
        psi_over_phi = self.psix2[sl] * self.X[sl] * self.den[sl] \
            / self.num3[sl]
        val1 = psi_over_phi.sqrt() / abs(self.L2mX2[sl])
        val2 = (self.xlogpsi[sl].square() * psi_over_phi
                / self.X[sl].square()).sqrt()
        return {"aux_psi_phi": bound_linf(val1),
                "aux_psix_phi": bound_linf(val2)}

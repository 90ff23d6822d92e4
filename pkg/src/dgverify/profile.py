"""Piecewise-cubic odd profiles in Hermite form.

A ``HermiteProfile`` stores node values and node slopes on a uniform grid
over [0, L]; each cell carries the cubic interpolating those endpoint values
and slopes. The represented function is extended oddly through 0 and by zero
outside [-L, L]. ``build_spline`` produces the C^2 spline (odd second
derivative zero at 0, second-order extrapolated slope at L); a profile built
directly from (values, slopes) is only C^1.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .grid import Grid

__all__ = [
    "HermiteProfile",
    "build_spline",
    "read_profile",
    "write_profile",
    "cell_coefficients",
]


class HermiteProfile:
    """Odd, compactly supported piecewise cubic on [-L, L]."""

    __slots__ = ("grid", "values", "slopes", "_coeffs")

    def __init__(self, grid: Grid, values, slopes):
        values = np.asarray(values, dtype=np.float64)
        slopes = np.asarray(slopes, dtype=np.float64)
        if values.shape != (grid.n + 1,) or slopes.shape != (grid.n + 1,):
            raise ValueError("values/slopes must have n+1 entries")
        if values[0] != 0.0:
            raise ValueError("profile must vanish at x = 0")
        if values[-1] != 0.0:
            raise ValueError("profile must vanish at x = L")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(slopes))):
            raise ValueError("non-finite profile data")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "_coeffs", None)

    def __setattr__(self, name, value):
        raise AttributeError("HermiteProfile is immutable")

    # -- cubic coefficients --------------------------------------------------

    def coefficients(self):
        """Per-cell power-basis coefficients (A, B, C, D) in d = x - x_i.

        p(x_i + d) = A + B d + C d^2 + D d^3 on cell i.
        """
        if self._coeffs is None:
            h = self.grid.h
            w0 = self.values[:-1]
            w1 = self.values[1:]
            s0 = self.slopes[:-1]
            s1 = self.slopes[1:]
            dw = (w1 - w0) / h
            A = w0.copy()
            B = s0.copy()
            C = (3.0 * dw - 2.0 * s0 - s1) / h
            D = (s0 + s1 - 2.0 * dw) / (h * h)
            object.__setattr__(self, "_coeffs", (A, B, C, D))
        return self._coeffs

    # -- evaluation ----------------------------------------------------------

    def eval(self, x, k: int = 0):
        """k-th derivative of the profile at x (scalar or array), |x| <= L.

        Outside [-L, L] the value (k = 0) is 0; derivatives are undefined
        there because the slope jumps at the support boundary.
        k = 3 returns the per-cell constant third derivative. At an interior
        node the left cell is used for k >= 1 (values agree for k <= 2 on
        spline-built profiles).
        """
        if not 0 <= k <= 3:
            raise ValueError("derivative order must be 0..3")
        x_arr = np.asarray(x, dtype=np.float64)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        sign = np.where(x_arr < 0.0, -1.0, 1.0)
        ax = np.abs(x_arr)
        outside = ax > self.grid.L
        if k >= 1 and np.any(outside):
            raise ValueError("derivative requested outside the support [-L, L]")
        out = np.zeros_like(x_arr)
        inside = ~outside
        if np.any(inside):
            out[inside] = self._eval_abs(ax[inside], k)
        # odd extension: d^k/dx^k of an odd function has parity (-1)^(k+1)
        parity = sign if k % 2 == 0 else 1.0
        out = out * parity
        return float(out[0]) if scalar else out

    def _eval_abs(self, ax, k):
        g = self.grid
        nodes = g.nodes()
        side = "left" if k >= 1 else "right"
        idx = np.searchsorted(nodes, ax, side=side) - 1
        idx = np.clip(idx, 0, g.n - 1)
        d = ax - nodes[idx]
        A, B, C, D = self.coefficients()
        a, b, c, dd = A[idx], B[idx], C[idx], D[idx]
        if k == 0:
            out = a + d * (b + d * (c + d * dd))
            # the right support endpoint is the one node whose cell lookup
            # lands left of it; return the stored datum exactly
            at_L = ax == self.grid.L
            if np.any(at_L):
                out = np.where(at_L, self.values[-1], out)
            return out
        if k == 1:
            return b + d * (2.0 * c + d * 3.0 * dd)
        if k == 2:
            return 2.0 * c + 6.0 * dd * d
        return 6.0 * dd

    def __call__(self, x, k: int = 0):
        return self.eval(x, k)

    # -- refinement ----------------------------------------------------------

    def refine(self, N: int):
        """Exact values and slopes on the refined grid with N cells.

        N must be a multiple of n; the refined data defines the same
        piecewise cubic.
        """
        fine = self.grid.refined(N)
        ratio = N // self.grid.n
        j = np.arange(N + 1)
        cell = np.minimum(j // ratio, self.grid.n - 1)
        d = (j - cell * ratio) * (self.grid.L / N)
        A, B, C, D = self.coefficients()
        a, b, c, dd = A[cell], B[cell], C[cell], D[cell]
        vals = a + d * (b + d * (c + d * dd))
        slps = b + d * (2.0 * c + d * 3.0 * dd)
        vals[0] = 0.0
        vals[-1] = self.values[-1]  # exact node datum (zero)
        return vals, slps

    def max_abs_third_derivative(self) -> float:
        return float(np.max(np.abs(6.0 * self.coefficients()[3])))


def build_spline(grid: Grid, values) -> HermiteProfile:
    """C^2 cubic spline through (x_i, values_i), odd at 0, clamped at L.

    Boundary conditions: omega_xx(0) = 0 (so the odd extension through the
    origin is C^2) and omega_x(L) from the second-order extrapolation
    (3 w_n - 4 w_(n-1) + w_(n-2)) / (2h).
    """
    values = np.asarray(values, dtype=np.float64)
    n = grid.n
    if n < 3:
        raise ValueError("spline construction needs at least 3 cells")
    if values.shape != (n + 1,):
        raise ValueError("values must have n+1 entries")
    if values[0] != 0.0:
        raise ValueError("spline values must vanish at x = 0")
    h = grid.h
    sn = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h)

    # tridiagonal system for the slopes s_0..s_(n-1):
    #   2 s_0 + s_1 = 3 (w_1 - w_0)/h                   (omega_xx(0) = 0)
    #   s_(i-1) + 4 s_i + s_(i+1) = 3 (w_(i+1)-w_(i-1))/h   (C^2 interior)
    # with s_n known.
    m = n  # unknowns s_0..s_(n-1)
    ab = np.zeros((3, m))
    rhs = np.zeros(m)
    ab[1, 0] = 2.0
    ab[0, 1] = 1.0
    rhs[0] = 3.0 * (values[1] - values[0]) / h
    i = np.arange(1, m)
    ab[1, 1:] = 4.0
    ab[2, 0:m - 1] = 1.0
    ab[0, 2:] = 1.0
    rhs[1:] = 3.0 * (values[i + 1] - values[i - 1]) / h
    rhs[m - 1] -= sn
    slopes = np.empty(n + 1)
    slopes[:n] = solve_banded((1, 1), ab, rhs)
    slopes[n] = sn
    return HermiteProfile(grid, values, slopes)


def cell_coefficients(values, slopes, h):
    """Power-basis coefficients from raw Hermite data (helper for oracles)."""
    w0, w1 = values[:-1], values[1:]
    s0, s1 = slopes[:-1], slopes[1:]
    dw = (w1 - w0) / h
    return (w0.copy(), s0.copy(),
            (3.0 * dw - 2.0 * s0 - s1) / h,
            (s0 + s1 - 2.0 * dw) / (h * h))


# -- file format -----------------------------------------------------------
#
# Line-oriented text:
#   L=<17-sig-digit decimal>
#   n=<int>
#   <i> <x_i> <w_i> <s_i>          (one line per node, 17 significant digits)


def write_profile(path, profile: HermiteProfile) -> None:
    g = profile.grid
    with open(path, "w") as f:
        f.write(f"L={g.L:.17g}\n")
        f.write(f"n={g.n}\n")
        nodes = g.nodes()
        for i in range(g.n + 1):
            f.write(f"{i} {nodes[i]:.17g} {profile.values[i]:.17g} "
                    f"{profile.slopes[i]:.17g}\n")


def read_profile(path) -> HermiteProfile:
    with open(path) as f:
        header = {}
        for _ in range(2):
            key, _, val = f.readline().strip().partition("=")
            header[key] = val
        if set(header) != {"L", "n"}:
            raise ValueError("profile file must start with L= and n= lines")
        L = float(header["L"])
        n = int(header["n"])
        grid = Grid(L, n)
        values = np.empty(n + 1)
        slopes = np.empty(n + 1)
        seen = np.zeros(n + 1, dtype=bool)
        for line in f:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"malformed node line: {line!r}")
            i = int(parts[0])
            if not 0 <= i <= n:
                raise ValueError(f"node index {i} out of range")
            x = float(parts[1])
            if x != grid.node(i):
                raise ValueError(f"node {i}: coordinate {x} does not match grid")
            values[i] = float(parts[2])
            slopes[i] = float(parts[3])
            seen[i] = True
        if not np.all(seen):
            raise ValueError(f"missing node rows: {np.flatnonzero(~seen)[:5]}")
    if values[0] != 0.0:
        raise ValueError("profile file violates w(0) = 0")
    if values[-1] != 0.0:
        raise ValueError("profile file violates w(L) = 0")
    return HermiteProfile(grid, values, slopes)

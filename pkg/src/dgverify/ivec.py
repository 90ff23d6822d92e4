"""Vectorized interval arithmetic on numpy arrays.

An ``IntervalVec`` is a pair of equal-shape float64 arrays (lo, hi) with the
same outward-rounding contract as the scalar ``Interval``: one representable
step of outward nudge per arithmetic operation, two for libm elementary
functions. Grid-indexed rigorous values (per-cell bounds, per-node velocity
enclosures) all live in this type; reductions use a fixed pairwise tree so
results do not depend on chunking or thread count.
"""

from __future__ import annotations

import numpy as np

from .interval import Interval, DomainError, ZeroDivisionIntervalError

__all__ = ["IntervalVec"]

_INF = np.inf


def _dn(a):
    return np.nextafter(a, -_INF)


def _up(a):
    return np.nextafter(a, _INF)


def _dn_sum(a):
    # float add/sub rounding to exactly 0 is exact; keep zeros unperturbed
    r = np.nextafter(a, -_INF)
    return np.where(a == 0.0, 0.0, r)


def _up_sum(a):
    r = np.nextafter(a, _INF)
    return np.where(a == 0.0, 0.0, r)


def _dn2(a):
    return np.nextafter(np.nextafter(a, -_INF), -_INF)


def _up2(a):
    return np.nextafter(np.nextafter(a, _INF), _INF)


class IntervalVec:
    """Elementwise intervals [lo_i, hi_i]; the workhorse for grid data."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi, _check: bool = True):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if _check:
            if lo.shape != hi.shape:
                raise ValueError("shape mismatch")
            if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
                raise ValueError("NaN endpoint")
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise ValueError("non-finite endpoint")
            if np.any(lo > hi):
                k = int(np.argmax(lo > hi))
                raise ValueError(f"lo > hi at index {k}: [{lo.flat[k]}, {hi.flat[k]}]")
        self.lo = lo
        self.hi = hi

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact(values) -> "IntervalVec":
        v = np.asarray(values, dtype=np.float64)
        return IntervalVec(v.copy(), v.copy())

    @staticmethod
    def from_scalar(iv: Interval, n: int) -> "IntervalVec":
        return IntervalVec(np.full(n, iv.lo), np.full(n, iv.hi))

    @staticmethod
    def bounds(lo, hi) -> "IntervalVec":
        return IntervalVec(np.asarray(lo, dtype=np.float64).copy(),
                           np.asarray(hi, dtype=np.float64).copy())

    def copy(self) -> "IntervalVec":
        return IntervalVec(self.lo.copy(), self.hi.copy(), _check=False)

    # -- basic info ----------------------------------------------------------

    @property
    def shape(self):
        return self.lo.shape

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "IntervalVec | Interval":
        if isinstance(idx, (int, np.integer)):
            return Interval(float(self.lo[idx]), float(self.hi[idx]))
        return IntervalVec(self.lo[idx], self.hi[idx], _check=False)

    def width(self):
        return _up(self.hi - self.lo)

    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def contains(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        return (self.lo <= v) & (v <= self.hi)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(v):
        if isinstance(v, IntervalVec):
            return v
        if isinstance(v, Interval):
            return IntervalVec(np.float64(v.lo), np.float64(v.hi), _check=False)
        if isinstance(v, (int, float, np.floating, np.integer)):
            a = np.float64(v)
            return IntervalVec(a, a, _check=False)
        if isinstance(v, np.ndarray):
            a = v.astype(np.float64, copy=False)
            return IntervalVec(a, a, _check=False)
        return NotImplemented

    def __add__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return IntervalVec(_dn_sum(self.lo + o.lo), _up_sum(self.hi + o.hi), _check=False)

    __radd__ = __add__

    def __sub__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return IntervalVec(_dn_sum(self.lo - o.hi), _up_sum(self.hi - o.lo), _check=False)

    def __rsub__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return IntervalVec(-self.hi, -self.lo, _check=False)

    def __mul__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p1 = self.lo * o.lo
        p2 = self.lo * o.hi
        p3 = self.hi * o.lo
        p4 = self.hi * o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        zero = ((self.lo == 0.0) & (self.hi == 0.0)) | ((o.lo == 0.0) & (o.hi == 0.0))
        return IntervalVec(np.where(zero, 0.0, _dn(lo)),
                           np.where(zero, 0.0, _up(hi)), _check=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        bad = (o.lo <= 0.0) & (o.hi >= 0.0)
        if np.any(bad):
            k = int(np.argmax(bad))
            raise ZeroDivisionIntervalError(
                f"division by interval containing zero at index {k}: "
                f"[{o.lo.flat[k] if o.lo.ndim else o.lo}, "
                f"{o.hi.flat[k] if o.hi.ndim else o.hi}]")
        q1 = self.lo / o.lo
        q2 = self.lo / o.hi
        q3 = self.hi / o.lo
        q4 = self.hi / o.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        zero = (self.lo == 0.0) & (self.hi == 0.0)
        return IntervalVec(np.where(zero, 0.0, _dn(lo)),
                           np.where(zero, 0.0, _up(hi)), _check=False)

    def __rtruediv__(self, other):
        o = IntervalVec._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __abs__(self):
        lo = np.where(self.lo >= 0.0, self.lo,
                      np.where(self.hi <= 0.0, -self.hi, 0.0))
        hi = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return IntervalVec(lo, hi, _check=False)

    def square(self) -> "IntervalVec":
        a = abs(self)
        hi_raw = a.hi * a.hi
        return IntervalVec(np.maximum(0.0, _dn(a.lo * a.lo)),
                           np.where(hi_raw == 0.0, 0.0, _up(hi_raw)),
                           _check=False)

    def pow_int(self, n: int) -> "IntervalVec":
        if n == 0:
            one = np.ones_like(self.lo)
            return IntervalVec(one, one.copy(), _check=False)
        if n < 0:
            return 1.0 / self.pow_int(-n)
        if n % 2 == 0:
            return self.square().pow_int(n // 2) if n > 2 else (
                self.square() if n == 2 else self)
        r = self
        if n > 1:
            r = self.square().pow_int((n - 1) // 2) * self
        return r

    def sqrt(self) -> "IntervalVec":
        if np.any(self.lo < 0.0):
            raise DomainError("sqrt of interval with negative part")
        hi_raw = np.sqrt(self.hi)
        return IntervalVec(np.maximum(0.0, _dn2(np.sqrt(self.lo))),
                           np.where(hi_raw == 0.0, 0.0, _up2(hi_raw)),
                           _check=False)

    def log(self) -> "IntervalVec":
        if np.any(self.lo <= 0.0):
            raise DomainError("log of interval touching zero")
        return IntervalVec(_dn2(np.log(self.lo)), _up2(np.log(self.hi)),
                           _check=False)

    def exp(self) -> "IntervalVec":
        return IntervalVec(np.maximum(0.0, _dn2(np.exp(self.lo))),
                           _up2(np.exp(self.hi)), _check=False)

    # -- lattice -----------------------------------------------------------

    def hull(self, other: "IntervalVec") -> "IntervalVec":
        o = IntervalVec._coerce(other)
        return IntervalVec(np.minimum(self.lo, o.lo), np.maximum(self.hi, o.hi),
                           _check=False)

    def intersect(self, other: "IntervalVec") -> "IntervalVec":
        o = IntervalVec._coerce(other)
        lo = np.maximum(self.lo, o.lo)
        hi = np.minimum(self.hi, o.hi)
        if np.any(lo > hi):
            k = int(np.argmax(lo > hi))
            raise ValueError(f"empty intersection at index {k}")
        return IntervalVec(lo, hi, _check=False)

    def min_with(self, other) -> "IntervalVec":
        o = IntervalVec._coerce(other)
        return IntervalVec(np.minimum(self.lo, o.lo), np.minimum(self.hi, o.hi),
                           _check=False)

    def max_with(self, other) -> "IntervalVec":
        o = IntervalVec._coerce(other)
        return IntervalVec(np.maximum(self.lo, o.lo), np.maximum(self.hi, o.hi),
                           _check=False)

    def widened(self, delta) -> "IntervalVec":
        d = np.asarray(delta, dtype=np.float64)
        if np.any(d < 0.0):
            raise ValueError("negative widening")
        return IntervalVec(_dn(self.lo - d), _up(self.hi + d), _check=False)

    # -- running hulls (exact: min/max only, no rounding) --------------------

    def prefix_hull(self) -> "IntervalVec":
        """H_i = hull(x_0, ..., x_i)."""
        return IntervalVec(np.minimum.accumulate(self.lo),
                           np.maximum.accumulate(self.hi), _check=False)

    def suffix_hull(self) -> "IntervalVec":
        """H_i = hull(x_i, ..., x_last)."""
        return IntervalVec(np.minimum.accumulate(self.lo[::-1])[::-1].copy(),
                           np.maximum.accumulate(self.hi[::-1])[::-1].copy(),
                           _check=False)

    # -- reductions --------------------------------------------------------

    def sum(self) -> Interval:
        """Pairwise-tree interval sum; deterministic for a given length."""
        lo, hi = self.lo.ravel(), self.hi.ravel()
        while lo.size > 1:
            n = lo.size
            half = n // 2
            lo_pair = _dn(lo[:half] + lo[half:2 * half])
            hi_pair = _up(hi[:half] + hi[half:2 * half])
            if n % 2:
                lo_pair = np.concatenate([lo_pair, lo[-1:]])
                hi_pair = np.concatenate([hi_pair, hi[-1:]])
            lo, hi = lo_pair, hi_pair
        if lo.size == 0:
            return Interval(0.0, 0.0)
        return Interval(float(lo[0]), float(hi[0]))

    def max_upper(self) -> float:
        return float(np.max(self.hi))

    def min_lower(self) -> float:
        return float(np.min(self.lo))

    def max_reduce(self) -> Interval:
        """Interval of the elementwise maximum over the vector (exact)."""
        return Interval(float(np.max(self.lo)), float(np.max(self.hi)))

    def __repr__(self):
        n = len(self.lo.ravel())
        if n <= 4:
            items = ", ".join(f"[{a:.6g},{b:.6g}]"
                              for a, b in zip(self.lo.ravel(), self.hi.ravel()))
            return f"IntervalVec({items})"
        return (f"IntervalVec(n={n}, lo range [{self.lo.min():.6g}, "
                f"{self.lo.max():.6g}], hi range [{self.hi.min():.6g}, "
                f"{self.hi.max():.6g}])")

"""Outward-rounded interval arithmetic.

Every rigorous scalar in this package lives in an ``Interval``: a closed
interval [lo, hi] of finite doubles that is guaranteed to contain the exact
real value. Directed rounding is emulated portably: each endpoint produced by
a round-to-nearest operation is nudged outward by one representable step
(two steps for the libm elementary functions, whose results are faithfully
rounded but not correctly rounded). This makes results independent of FPU
mode state and compiler reordering, at the cost of slightly wider intervals.

Decimal-string construction parses outward, so ``Interval.parse("0.6991")``
encloses the exact decimal 0.6991 even though it is not a binary double.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "Interval",
    "IntervalError",
    "DomainError",
    "ZeroDivisionIntervalError",
    "round_up_sig",
]

_INF = math.inf


class IntervalError(ValueError):
    """Invalid interval construction or operation."""


class DomainError(IntervalError):
    """Operand lies (partly) outside the mathematical domain of the op."""


class ZeroDivisionIntervalError(DomainError):
    """Division by an interval containing zero."""


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down_sum(x: float) -> float:
    # a float add/sub rounding to exactly 0 is exact (the true sum of two
    # doubles below the subnormal threshold is 0), so zero needs no nudge
    return x if x == 0.0 else math.nextafter(x, -_INF)


def _up_sum(x: float) -> float:
    return x if x == 0.0 else math.nextafter(x, _INF)


def _down2(x: float) -> float:
    return math.nextafter(math.nextafter(x, -_INF), -_INF)


def _up2(x: float) -> float:
    return math.nextafter(math.nextafter(x, _INF), _INF)


class Interval:
    """Closed interval [lo, hi] with finite endpoints and lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalError("NaN endpoint")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise IntervalError(f"non-finite endpoint [{lo}, {hi}]")
        if lo > hi:
            raise IntervalError(f"lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def parse(text: str) -> "Interval":
        """Enclose the exact decimal value of ``text`` (outward parse)."""
        exact = Fraction(text)
        v = float(exact)
        fv = Fraction(v)
        if fv == exact:
            return Interval(v, v)
        if fv < exact:
            return Interval(v, _up(v))
        return Interval(_down(v), v)

    @staticmethod
    def hull_of(*values: "Interval | float") -> "Interval":
        ivs = [v if isinstance(v, Interval) else Interval.point(v) for v in values]
        return Interval(min(i.lo for i in ivs), max(i.hi for i in ivs))

    # -- predicates --------------------------------------------------------

    def contains(self, v: float) -> bool:
        return self.lo <= v <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    # Certain comparisons: true only when they hold for every pair of
    # representatives.
    def certainly_lt(self, other: "Interval | float") -> bool:
        o = other if isinstance(other, Interval) else Interval.point(other)
        return self.hi < o.lo

    def certainly_le(self, other: "Interval | float") -> bool:
        o = other if isinstance(other, Interval) else Interval.point(other)
        return self.hi <= o.lo

    def certainly_gt(self, other: "Interval | float") -> bool:
        o = other if isinstance(other, Interval) else Interval.point(other)
        return self.lo > o.hi

    # -- measures ----------------------------------------------------------

    def width(self) -> float:
        return _up(self.hi - self.lo)

    def midpoint(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = self.lo + 0.5 * (self.hi - self.lo)
        return m

    def mag(self) -> float:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        """Smallest absolute value over the interval."""
        if self.contains_zero():
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(v) -> "Interval":
        if isinstance(v, Interval):
            return v
        if isinstance(v, (int, float)):
            return Interval.point(float(v))
        return NotImplemented

    def __add__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down_sum(self.lo + o.lo), _up_sum(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Interval(_down_sum(self.lo - o.hi), _up_sum(self.hi - o.lo))

    def __rsub__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if (self.lo == 0.0 and self.hi == 0.0) or (o.lo == 0.0 and o.hi == 0.0):
            return Interval(0.0, 0.0)
        p = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(p)), _up(max(p)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.contains_zero():
            raise ZeroDivisionIntervalError(f"division by {o}")
        if self.lo == 0.0 and self.hi == 0.0:
            return Interval(0.0, 0.0)
        q = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(q)), _up(max(q)))

    def __rtruediv__(self, other):
        o = Interval._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __abs__(self):
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def pow_int(self, n: int) -> "Interval":
        """x**n for integer n, with sign/parity handled exactly."""
        if n == 0:
            return Interval(1.0, 1.0)
        if n < 0:
            return Interval(1.0, 1.0) / self.pow_int(-n)
        lo_p = _pow_rn(self.lo, n)
        hi_p = _pow_rn(self.hi, n)

        def dn(v):
            return v if v == 0.0 else _down2(v)

        def up(v):
            return v if v == 0.0 else _up2(v)

        if n % 2 == 1:
            return Interval(dn(lo_p), up(hi_p))
        if self.lo >= 0.0:
            return Interval(max(0.0, dn(lo_p)), up(hi_p))
        if self.hi <= 0.0:
            return Interval(max(0.0, dn(hi_p)), up(lo_p))
        return Interval(0.0, up(max(lo_p, hi_p)))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return self.pow_int(n)

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainError(f"sqrt of {self}")
        hi = 0.0 if self.hi == 0.0 else _up2(math.sqrt(self.hi))
        return Interval(max(0.0, _down2(math.sqrt(self.lo))), hi)

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise DomainError(f"log of {self}")
        return Interval(_down2(math.log(self.lo)), _up2(math.log(self.hi)))

    def exp(self) -> "Interval":
        return Interval(max(0.0, _down2(math.exp(self.lo))), _up2(math.exp(self.hi)))

    def atan(self) -> "Interval":
        return Interval(_down2(math.atan(self.lo)), _up2(math.atan(self.hi)))

    # -- lattice -----------------------------------------------------------

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise IntervalError(f"empty intersection of {self} and {other}")
        return Interval(lo, hi)

    def min_with(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def max_with(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    # -- misc ----------------------------------------------------------------

    def widened(self, delta: float) -> "Interval":
        """[lo - delta, hi + delta] for delta >= 0, outward-rounded."""
        if delta < 0.0:
            raise IntervalError("negative widening")
        return Interval(_down(self.lo - delta), _up(self.hi + delta))

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


def _pow_rn(x: float, n: int) -> float:
    """x**n by binary powering in round-to-nearest.

    Relative error < (1+u)^(2*log2(n)) - 1; pow_int widens by 2 steps which
    covers every exponent used in this package (n <= 16).
    """
    if n > 16:  # keep the 2-step slack honest
        raise IntervalError("pow_int supports n <= 16")
    r = 1.0
    b = x
    e = n
    while e:
        if e & 1:
            r *= b
        e >>= 1
        if e:
            b *= b
    return r


# -- significant-digit rounding ------------------------------------------


def round_up_sig(x: "Interval | float", digits: int) -> float:
    """Smallest number with ``digits`` significant decimal digits >= x.hi.

    Mirrors the reporting convention used for the verified constants
    (upper endpoints rounded up to 4 significant digits). The endpoint is
    taken in its shortest round-tripping decimal form, so a stored 3.6
    rounds to 3.600 rather than 3.601. Report formatting only; rigorous
    claim comparisons elsewhere use exact rational compares.
    """
    v = x.hi if isinstance(x, Interval) else float(x)
    if v <= 0.0:
        raise IntervalError("round_up_sig requires a positive upper endpoint")
    if digits < 1:
        raise IntervalError("digits must be >= 1")
    from decimal import Decimal, ROUND_CEILING

    d = Decimal(repr(v))
    exp = d.adjusted()  # floor(log10 |d|)
    quantum = Decimal(1).scaleb(exp - digits + 1)
    return float(d.quantize(quantum, rounding=ROUND_CEILING))


# Frequently used constants, parsed outward once.
PI = Interval(_down(math.pi), _up(math.pi))
TWO_OVER_PI = Interval(2.0, 2.0) / PI

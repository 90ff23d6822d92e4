"""Containment and tightness tests for the scalar interval type."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dgverify.interval import (
    Interval,
    IntervalError,
    DomainError,
    ZeroDivisionIntervalError,
    round_up_sig,
)

finite = st.floats(min_value=-1e12, max_value=1e12,
                   allow_nan=False, allow_infinity=False)


def make_interval(a, b):
    return Interval(min(a, b), max(a, b))


iv_strategy = st.builds(make_interval, finite, finite)


def test_construction_validation():
    with pytest.raises(IntervalError):
        Interval(2.0, 1.0)
    with pytest.raises(IntervalError):
        Interval(float("nan"), 1.0)
    with pytest.raises(IntervalError):
        Interval(0.0, float("inf"))
    x = Interval(1.0, 2.0)
    with pytest.raises(AttributeError):
        x.lo = 0.0


def test_exact_endpoint_examples():
    s = Interval(1.0, 2.0) + Interval(3.0, 4.0)
    # possibly widened by one representable step each side
    assert s.lo <= 4.0 <= 6.0 <= s.hi
    assert s.lo >= math.nextafter(4.0, -math.inf)
    assert s.hi <= math.nextafter(6.0, math.inf)

    p = Interval(2.0, 2.0) * Interval(3.0, 3.0)
    assert p.contains(6.0)

    assert Interval(4.0, 4.0).sqrt().contains(2.0)
    lg = Interval(1.0, math.e).log()
    assert lg.contains_interval(Interval(0.0, 1.0))


def test_parse_outward():
    x = Interval.parse("0.6991")
    from fractions import Fraction
    exact = Fraction("0.6991")
    assert Fraction(x.lo) <= exact <= Fraction(x.hi)
    assert x.width() < 1e-15
    # representable decimals are exact
    assert Interval.parse("0.5").is_point()
    assert Interval.parse("3.25").lo == 3.25


def test_division_by_zero_interval():
    with pytest.raises(ZeroDivisionIntervalError):
        Interval(1.0, 2.0) / Interval(-1.0, 1.0)
    with pytest.raises(ZeroDivisionIntervalError):
        Interval(1.0) / Interval(0.0, 0.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        Interval(-1.0, 1.0).sqrt()
    with pytest.raises(DomainError):
        Interval(0.0, 1.0).log()


def test_tightness_point_ops():
    # width(op(point, point)) <= 4 representable steps for basic ops
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = float(rng.uniform(-100, 100))
        b = float(rng.uniform(-100, 100))
        for op in (lambda x, y: x + y, lambda x, y: x - y, lambda x, y: x * y):
            r = op(Interval.point(a), Interval.point(b))
            steps = 0
            v = r.lo
            while v < r.hi and steps <= 4:
                v = math.nextafter(v, math.inf)
                steps += 1
            assert steps <= 4
        if b != 0.0:
            r = Interval.point(a) / Interval.point(b)
            assert r.width() <= 4 * math.ulp(max(abs(r.lo), abs(r.hi), 1e-300))


def test_commutativity_same_rounding_path():
    rng = np.random.default_rng(11)
    for _ in range(200):
        x = make_interval(*rng.uniform(-50, 50, 2))
        y = make_interval(*rng.uniform(-50, 50, 2))
        assert x + y == y + x
        assert x * y == y * x


@given(iv_strategy, iv_strategy)
@settings(max_examples=300, deadline=None)
def test_hull_contains_both(x, y):
    h = x.hull(y)
    assert h.contains_interval(x) and h.contains_interval(y)


@given(iv_strategy, iv_strategy, st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=300, deadline=None)
def test_containment_property(x, y, s, t):
    a = x.lo + s * (x.hi - x.lo)
    b = y.lo + t * (y.hi - y.lo)
    a = min(max(a, x.lo), x.hi)
    b = min(max(b, y.lo), y.hi)
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    if y.mig() > 1e-6:
        assert (x / y).contains(a / b)


def test_pow_int_parity():
    x = Interval(-2.0, 3.0)
    sq = x.pow_int(2)
    assert sq.lo <= 0.0 <= 4.0 and sq.contains(9.0) and sq.contains(0.0)
    cube = x.pow_int(3)
    assert cube.contains(-8.0) and cube.contains(27.0)
    assert x.pow_int(0) == Interval(1.0, 1.0)
    inv = Interval(2.0, 4.0).pow_int(-2)
    assert inv.contains(1 / 16) and inv.contains(1 / 4)


def test_elementary_function_containment_vs_mpmath():
    # containment vs extended-precision reference on random intervals
    import mpmath

    mpmath.mp.dps = 40
    rng = np.random.default_rng(3)
    for _ in range(400):
        lo = float(rng.uniform(0.01, 50.0))
        hi = lo + float(rng.uniform(0, 5.0))
        x = Interval(lo, hi)
        for f_iv, f_mp in ((Interval.exp, mpmath.exp),
                           (Interval.log, mpmath.log),
                           (Interval.sqrt, mpmath.sqrt)):
            r = f_iv(x)
            for v in (lo, hi, 0.5 * (lo + hi)):
                ref = f_mp(mpmath.mpf(v))
                assert mpmath.mpf(r.lo) <= ref <= mpmath.mpf(r.hi)


def test_exp_random_containment_bulk():
    rng = np.random.default_rng(5)
    lo = rng.uniform(-20, 20, size=10_000)
    w = rng.uniform(0, 1, size=10_000)
    for a, b in zip(lo, lo + w):
        r = Interval(a, b).exp()
        assert r.lo <= math.exp(a) and math.exp(b) <= r.hi


def test_round_up_sig_examples():
    assert round_up_sig(Interval(1.00052, 1.00061), 4) == 1.001
    assert round_up_sig(Interval(3.6, 3.6), 4) == 3.600
    assert round_up_sig(Interval(0.80911, 0.80913), 4) == 0.8092


def test_intersect_and_minmax():
    a = Interval(0.0, 2.0)
    b = Interval(1.0, 3.0)
    assert a.intersect(b) == Interval(1.0, 2.0)
    with pytest.raises(IntervalError):
        Interval(0.0, 1.0).intersect(Interval(2.0, 3.0))
    assert a.min_with(b) == Interval(0.0, 2.0)
    assert a.max_with(b) == Interval(1.0, 3.0)


def test_midpoint_width_mag():
    x = Interval(-3.0, 1.0)
    assert x.midpoint() == -1.0
    assert x.width() >= 4.0
    assert x.mag() == 3.0
    assert x.mig() == 0.0
    assert Interval(2.0, 3.0).mig() == 2.0

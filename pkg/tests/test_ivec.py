"""Vectorized interval arithmetic agrees with the scalar type and stays sound."""

import numpy as np
import pytest

from dgverify.interval import Interval, ZeroDivisionIntervalError
from dgverify.ivec import IntervalVec


def random_vec(rng, n, lo=-50.0, hi=50.0):
    a = rng.uniform(lo, hi, n)
    b = a + rng.uniform(0, 3, n)
    return IntervalVec.bounds(a, b)


def test_matches_scalar_ops():
    rng = np.random.default_rng(0)
    x = random_vec(rng, 500)
    y = random_vec(rng, 500)
    y2 = IntervalVec.bounds(np.abs(y.lo) + 0.5, np.abs(y.hi) + 3.5)
    for i in range(0, 500, 37):
        assert x[i] + y[i] == (x + y)[i]
        assert x[i] - y[i] == (x - y)[i]
        assert x[i] * y[i] == (x * y)[i]
        assert x[i] / y2[i] == (x / y2)[i]


def test_division_rejects_zero_crossing():
    v = IntervalVec.bounds([-1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ZeroDivisionIntervalError):
        IntervalVec.exact([1.0, 1.0]) / v


def test_random_containment_bulk():
    rng = np.random.default_rng(42)
    n = 20_000
    x = random_vec(rng, n)
    y = random_vec(rng, n)
    a = rng.uniform(x.lo, x.hi)
    b = rng.uniform(y.lo, y.hi)
    assert np.all((x + y).contains(a + b))
    assert np.all((x - y).contains(a - b))
    assert np.all((x * y).contains(a * b))
    ypos = IntervalVec.bounds(np.abs(y.lo) + 0.1, np.abs(y.hi) + 3.1)
    bpos = rng.uniform(ypos.lo, ypos.hi)
    assert np.all((x / ypos).contains(a / bpos))
    assert np.all(abs(x).contains(np.abs(a)))
    assert np.all(x.square().contains(a * a))
    assert np.all(x.pow_int(3).contains(a ** 3))
    xs = abs(x)
    asq = rng.uniform(xs.lo, xs.hi)
    assert np.all(xs.sqrt().contains(np.sqrt(asq)))
    xp = abs(x) + 0.01
    ap = rng.uniform(xp.lo, xp.hi)
    assert np.all(xp.log().contains(np.log(ap)))
    small = IntervalVec.bounds(np.clip(x.lo, -30, 30), np.clip(x.hi, -30, 30) + 0.001)
    asm = rng.uniform(small.lo, small.hi)
    assert np.all(small.exp().contains(np.exp(asm)))


def test_sum_pairwise_contains_exact():
    rng = np.random.default_rng(1)
    vals = rng.uniform(-1, 1, 100_001)
    v = IntervalVec.exact(vals)
    s = v.sum()
    import math

    exact = math.fsum(vals)
    assert s.contains(exact)
    # pairwise tree keeps the enclosure tight: width ~ log2(n) * eps * |sum|
    assert s.width() < 1e-10


def test_sum_deterministic():
    rng = np.random.default_rng(2)
    vals = rng.uniform(-1, 1, 9999)
    s1 = IntervalVec.exact(vals).sum()
    s2 = IntervalVec.exact(vals.copy()).sum()
    assert s1 == s2


def test_prefix_suffix_hull():
    v = IntervalVec.bounds([0.0, -1.0, 0.5], [1.0, 0.0, 2.0])
    p = v.prefix_hull()
    assert p[2] == Interval(-1.0, 2.0)
    assert p[0] == Interval(0.0, 1.0)
    s = v.suffix_hull()
    assert s[0] == Interval(-1.0, 2.0)
    assert s[2] == Interval(0.5, 2.0)


def test_hull_intersect_minmax():
    x = IntervalVec.bounds([0.0], [2.0])
    y = IntervalVec.bounds([1.0], [3.0])
    assert x.hull(y)[0] == Interval(0.0, 3.0)
    assert x.intersect(y)[0] == Interval(1.0, 2.0)
    assert x.min_with(y)[0] == Interval(0.0, 2.0)
    assert x.max_with(y)[0] == Interval(1.0, 3.0)


def test_max_reduce():
    v = IntervalVec.bounds([0.0, 5.0], [1.0, 6.0])
    m = v.max_reduce()
    assert m == Interval(5.0, 6.0)

"""Gauss rule structure, measured defects, and polynomial enclosures."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dgverify.gauss import GaussRule, ngq, ngq_poly_encloses
from dgverify.interval import Interval


def test_rule_pairing_and_weight_sum():
    r = GaussRule(8)
    K = r.K
    half = K // 2
    # paired construction: z_j + z_(j+K/2) = 0 and A_j = A_(j+K/2) exactly
    assert np.all(r.nodes[:half] + r.nodes[half:] == 0.0)
    assert np.all(r.weights[:half] == r.weights[half:])
    assert sum(Fraction(float(w)) for w in r.weights) == 2


def test_eps0_exactly_zero():
    r = GaussRule(8)
    assert r.eps[0].lo == 0.0 and r.eps[0].hi == 0.0


def test_eps_small():
    r = GaussRule(8)
    for k in range(1, 8):
        assert r.eps[k].hi < 1e-15, f"eps_{k} = {r.eps[k]}"
    # c_K ~ integral of t^16 = 2/17
    assert abs(r.c_K.midpoint() - 2.0 / 17.0) < 0.15


def test_nodes_accurate():
    # sanity only; rigor never relies on node accuracy
    r = GaussRule(8)
    known = 0.96028985649753623  # largest |node| of the 8-point rule
    assert abs(np.max(r.nodes) - known) < 1e-14


def test_ngq_x5_encloses_sixth():
    r = GaussRule(8)
    got = ngq_poly_encloses(r, [0, 0, 0, 0, 0, 1.0], 0.0, 1.0)
    assert got.contains(1.0 / 6.0)
    assert got.width() < 1e-13


def test_ngq_monomials_random_intervals():
    r = GaussRule(8)
    rng = np.random.default_rng(9)
    import mpmath
    mpmath.mp.dps = 50
    for _ in range(100):
        a = float(rng.uniform(-3, 3))
        b = a + float(rng.uniform(0.01, 3))
        k = int(rng.integers(0, 16))
        coeffs = [0.0] * k + [1.0]
        got = ngq_poly_encloses(r, coeffs, a, b)
        exact = (mpmath.mpf(b) ** (k + 1) - mpmath.mpf(a) ** (k + 1)) / (k + 1)
        assert mpmath.mpf(got.lo) <= exact <= mpmath.mpf(got.hi), \
            f"k={k} [{a},{b}] {got} vs {exact}"


def test_ngq_float_smooth():
    r = GaussRule(8)
    val = ngq(r, np.sin, 0.0, 1.0)
    assert abs(val - (1 - math.cos(1.0))) < 1e-15


def test_degree_cap():
    r = GaussRule(8)
    with pytest.raises(ValueError):
        ngq_poly_encloses(r, [0.0] * 17, 0.0, 1.0)

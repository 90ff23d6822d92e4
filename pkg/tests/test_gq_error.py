"""Far-field quadrature error constants: structure and magnitudes."""

import pytest

from dgverify.gauss import GaussRule
from dgverify.gq_error import SupNorms, dj_sum, gq_error_bound
from dgverify.interval import Interval


@pytest.fixture(scope="module")
def rule():
    return GaussRule(8)


def plausible_norms():
    # representative magnitudes of the converged profile's derivatives
    return SupNorms(Interval(1.0), Interval(1.001), Interval(30.0),
                    Interval(3000.0))


def test_zero_norms_zero_bound(rule):
    z = SupNorms(*(Interval(0.0),) * 4)
    for kind in ("u", "u_x", "u_xx"):
        b = gq_error_bound(kind, rule, z, m=8, n=8000, h0=10.0 / 8000)
        assert b.hi == 0.0


def test_dj_sums():
    assert dj_sum(2, 8, 8000).contains(2.0 / 7.0)
    assert dj_sum(3, 8, 8000).contains(1.0 / 49.0)
    import math

    assert dj_sum(1, 8, 8000).contains(2 * math.log(8000 / 7))


def test_paper_scale_magnitudes(rule):
    norms = plausible_norms()
    h0 = 10.0 / 8000
    b_ux = gq_error_bound("u_x", rule, norms, 8, 8000, h0)
    b_u = gq_error_bound("u", rule, norms, 8, 8000, h0)
    b_uxx = gq_error_bound("u_xx", rule, norms, 8, 8000, h0)
    assert b_ux.hi < 2e-17
    assert b_u.hi < 2e-19
    assert b_uxx.hi < 5e-18
    assert b_ux.lo >= 0 and b_u.lo >= 0 and b_uxx.lo >= 0


def test_monotone_in_norms(rule):
    h0 = 10.0 / 8000
    lo = plausible_norms()
    hi = SupNorms(Interval(2.0), Interval(2.0), Interval(60.0), Interval(6000.0))
    for kind in ("u", "u_x", "u_xx"):
        a = gq_error_bound(kind, rule, lo, 8, 8000, h0)
        b = gq_error_bound(kind, rule, hi, 8, 8000, h0)
        assert b.hi >= a.hi


def test_other_K_supported():
    r6 = GaussRule(6)
    norms = plausible_norms()
    b = gq_error_bound("u_x", r6, norms, 8, 8000, 10.0 / 8000)
    assert b.hi < 1e-10  # weaker rule, weaker but still tiny bound

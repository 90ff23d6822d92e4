"""Spline construction, evaluation, refinement, and file round-trips."""

import math

import numpy as np
import pytest

from dgverify.grid import Grid
from dgverify.profile import (
    HermiteProfile, build_spline, read_profile, write_profile,
)


def cubic_test_function(L):
    # cubic vanishing at 0 and L with zero curvature at 0
    def f(x):
        return x * (x - L) * (x + L) * 0.01

    def fp(x):
        return 0.01 * (3 * x * x - L * L)

    return f, fp


def test_hermite_data_reproduces_cubic_exactly():
    # per-cell Hermite interpolation of exact cubic data is the cubic
    L = 10.0
    g = Grid(L, 64)
    f, fp = cubic_test_function(L)
    x = g.nodes()
    p = HermiteProfile(g, f(x), fp(x))
    xs = np.linspace(0, L, 777)
    scale = np.max(np.abs(f(xs)))
    assert np.max(np.abs(p.eval(xs) - f(xs))) < 1e-12 * scale
    assert np.max(np.abs(p.eval(xs, 1) - fp(xs))) < 1e-11 * scale


def test_spline_reproduces_cubic_away_from_end_layer():
    # the extrapolated end slope is second-order, so a true cubic picks up
    # an O(h^2 f''') slope defect at L which decays geometrically inward;
    # away from that layer the spline is the cubic to roundoff
    L = 10.0
    g = Grid(L, 64)
    f, fp = cubic_test_function(L)
    x = g.nodes()
    p = build_spline(g, f(x))
    xs = np.linspace(0, L - 20 * g.h, 500)
    scale = np.max(np.abs(f(xs)))
    assert np.max(np.abs(p.eval(xs) - f(xs))) < 1e-11 * scale
    xe = np.linspace(L - 20 * g.h, L, 100)
    assert np.max(np.abs(p.eval(xe) - f(xe))) < 0.06 * g.h ** 2 * g.h


def test_zero_profile():
    g = Grid(10.0, 16)
    p = build_spline(g, np.zeros(17))
    assert p.eval(3.3) == 0.0
    assert p.eval(3.3, 2) == 0.0


def test_eval_at_nodes_exact():
    g = Grid(10.0, 32)
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(33)
    vals[0] = vals[-1] = 0.0
    p = build_spline(g, vals)
    x = g.nodes()
    assert np.all(p.eval(x) == vals)


def test_oddness():
    g = Grid(10.0, 50)
    x = g.nodes()
    vals = -np.sin(np.pi * x / 10.0) * (10.0 - x) / np.pi
    p = build_spline(g, vals)
    pts = np.linspace(0.01, 9.99, 101)
    for k in range(3):
        left = p.eval(-pts, k)
        right = p.eval(pts, k)
        np.testing.assert_allclose(left, ((-1.0) ** (k + 1)) * right, rtol=0, atol=1e-14)


def test_outside_support():
    g = Grid(10.0, 16)
    p = build_spline(g, np.zeros(17))
    assert p.eval(11.0) == 0.0
    assert p.eval(-12.0) == 0.0
    with pytest.raises(ValueError):
        p.eval(11.0, 1)


def test_second_derivative_zero_at_origin():
    g = Grid(10.0, 100)
    x = g.nodes()
    vals = -np.sin(np.pi * x / 10.0) * (10.0 - x) / np.pi
    p = build_spline(g, vals)
    assert abs(p.eval(0.0, 2)) < 1e-10


def test_interpolation_convergence_rate():
    # max error vs analytic <= C h^4, C fit by halving h. The function must
    # be compatible with both boundary conditions (odd-smooth at 0, third
    # derivative vanishing at L) or the boundary layers dominate at lower
    # order; sin^4 gives quartic vanishing at L.
    L = 10.0

    def f(x):
        return -(x / np.pi) * np.sin(np.pi * x / L) ** 4

    errs = []
    for n in (250, 500, 1000):
        g = Grid(L, n)
        vals = f(g.nodes())
        vals[-1] = 0.0  # sin(pi) roundoff dust
        p = build_spline(g, vals)
        xs = np.linspace(0, L, 20011)
        errs.append(np.max(np.abs(p.eval(xs) - f(xs))))
    rate1 = math.log2(errs[0] / errs[1])
    rate2 = math.log2(errs[1] / errs[2])
    assert rate1 > 3.5 and rate2 > 3.5
    C = errs[2] / (L / 1000) ** 4
    assert errs[0] < 1.5 * C * (L / 250) ** 4


def test_spec_initial_guess_boundary_layer_is_second_order():
    # the default solver initial guess has f''(0) != 0, incompatible with a
    # C^2 odd extension; the spline then carries an O(h^2) layer at 0
    L = 10.0

    def f(x):
        return -np.sin(np.pi * x / L) * (L - x) / np.pi

    errs = []
    for n in (250, 500):
        g = Grid(L, n)
        p = build_spline(g, f(g.nodes()))
        xs = np.linspace(0, L, 20011)
        errs.append(np.max(np.abs(p.eval(xs) - f(xs))))
    rate = math.log2(errs[0] / errs[1])
    assert 1.5 < rate < 2.6


def test_refine_identity_and_exactness():
    g = Grid(10.0, 40)
    x = g.nodes()
    vals = -np.sin(np.pi * x / 10.0) * (10.0 - x) / np.pi
    p = build_spline(g, vals)
    v_same, s_same = p.refine(40)
    np.testing.assert_array_equal(v_same, p.values)
    np.testing.assert_allclose(s_same, p.slopes, rtol=0, atol=0)

    v_fine, s_fine = p.refine(400)
    fine = Grid(10.0, 400)
    # refined data defines the same piecewise cubic
    p2 = HermiteProfile(fine, v_fine, s_fine)
    pts = np.random.default_rng(1).uniform(0, 10, 1000)
    assert np.max(np.abs(p2.eval(pts) - p.eval(pts))) < 1e-13


def test_refine_count_51_points_per_cell():
    g = Grid(10.0, 8000 // 100)  # scaled-down stand-in with the same ratio
    p = build_spline(g, np.zeros(g.n + 1))
    N = g.n * 50
    v, s = p.refine(N)
    assert len(v) == N + 1  # each coarse cell holds N/n + 1 = 51 fine nodes
    with pytest.raises(ValueError):
        p.refine(N + 1)


def test_resplined_fine_grid_agrees():
    # reconstructing from refined values+slopes is exact; re-running the
    # spline solve on refined values alone re-imposes the boundary
    # conditions and agrees to the h_fine^2 end-slope defect only
    g = Grid(10.0, 100)
    x = g.nodes()
    vals = -np.sin(np.pi * x / 10.0) * (10.0 - x) / np.pi
    p = build_spline(g, vals)
    v_fine, s_fine = p.refine(1000)
    pts = np.random.default_rng(2).uniform(0, 10, 1000)

    p_exact = HermiteProfile(Grid(10.0, 1000), v_fine, s_fine)
    assert np.max(np.abs(p_exact.eval(pts) - p.eval(pts))) < 1e-13

    p_resolve = build_spline(Grid(10.0, 1000), v_fine)
    assert np.max(np.abs(p_resolve.eval(pts) - p.eval(pts))) < 1e-5


def test_file_roundtrip(tmp_path):
    g = Grid(10.0, 25)
    rng = np.random.default_rng(3)
    vals = rng.standard_normal(26) * 1e-3
    vals[0] = vals[-1] = 0.0
    p = build_spline(g, vals)
    path = tmp_path / "profile.txt"
    write_profile(path, p)
    q = read_profile(path)
    np.testing.assert_array_equal(q.values, p.values)
    np.testing.assert_array_equal(q.slopes, p.slopes)
    assert q.grid == p.grid


def test_reader_rejects_nonzero_boundary(tmp_path):
    path = tmp_path / "bad.txt"
    g = Grid(10.0, 4)
    lines = ["L=10\n", "n=4\n"]
    nodes = g.nodes()
    vals = [0.0, 1.0, 2.0, 1.0, 0.5]  # w(L) != 0
    for i in range(5):
        lines.append(f"{i} {nodes[i]:.17g} {vals[i]:.17g} 0\n")
    path.write_text("".join(lines))
    with pytest.raises(ValueError):
        read_profile(path)


def test_node_tie_uses_left_cell_for_derivatives():
    g = Grid(10.0, 10)
    vals = np.zeros(11)
    vals[5] = 1.0
    vals[0] = vals[-1] = 0.0
    slopes = np.zeros(11)
    p = HermiteProfile(g, vals, slopes)  # C^1 only; third derivative jumps
    x5 = g.node(5)
    left_third = p.eval(x5 - 1e-9, 3)
    assert p.eval(x5, 3) == pytest.approx(left_third, rel=1e-6)
